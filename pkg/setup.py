import os.path

from setuptools import find_packages, setup

from maserpairs.version import VERSION


def readme():
    try:
        with open(os.path.join(os.path.dirname(__file__), 'README.rst')) as f:
            return f.read()
    except (IOError, OSError):
        return ''


install_requires = {
    'logging-spinner >= 0.2.1',
    'numpy >= 1.17.0',
    'scipy >= 1.4.0',
}


setup(
    name='maserpairs',
    version=VERSION,
    description='Entanglement of atom pairs emerging from a one-atom maser',
    long_description=readme(),
    license='GPLv3 or later',
    packages=find_packages(exclude=['tests']),
    entry_points='''
        [console_scripts]
        maserpairs = maserpairs.cli:main
    ''',
    install_requires=list(install_requires),
    extras_require={
        'tests': ['flake8 >= 3.3.0', 'flake8-import-order-spoqa',
                  'pytest >= 3.0.7'],
    },
    python_requires='>=3.6',
    classifiers=[
        'Development Status :: 4 - Beta',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: GNU General Public License v3 or later (GPLv3+)',  # noqa: E501
        'Operating System :: POSIX',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3 :: Only',
        'Programming Language :: Python :: Implementation :: CPython',
        'Topic :: Scientific/Engineering :: Physics',
    ]
)
