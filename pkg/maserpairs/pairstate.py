""":mod:`maserpairs.pairstate` --- Joint state of two successive atoms
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

Two excited atoms that cross the resonator one right after the other
emerge in the joint state

.. math::

   \\rho = \\frac14\\left(1 + s\\sigma_z + t\\tau_z
          + u(\\sigma_x\\tau_x + \\sigma_y\\tau_y) + v\\sigma_z\\tau_z\\right)

where :math:`\\sigma` and :math:`\\tau` are the Pauli operators of the first
and the second atom.  The four real numbers ``(s, t, u, v)`` are the whole
story; matrices are built only to cross-check and to present results.

Matrices use the basis order ``|ee>, |eg>, |ge>, |gg>``.

"""
import collections
import logging
import math

import numpy

from .fock import apply_atom_passage, rabi_angles

__all__ = ('BASIS', 'BOUNDARY_TOLERANCE', 'INVALID_STATE_TOLERANCE',
           'PAULI_X', 'PAULI_Y', 'PAULI_Z',
           'InvalidState', 'PairCorrelations', 'StateError',
           'TwoQubitDensity', 'ValidityReport',
           'correlations', 'degree_of_correlation', 'delta_eigenvalues',
           'delta_trace_norm', 'eigenvalues', 'is_separable',
           'joint_probabilities', 'partial_transpose', 'ppt_eigenvalues',
           'product_density', 'single_atom_states', 'to_density_matrix',
           'validate')


#: (:class:`tuple`) Labels of the basis states in matrix order.
BASIS = 'ee', 'eg', 'ge', 'gg'

#: (:class:`float`) Absolute tolerance of validity and separability
#: decisions.
BOUNDARY_TOLERANCE = 1e-12

#: (:class:`float`) How far :func:`correlations` tolerates a violated
#: validity inequality before it blames the numerics.
INVALID_STATE_TOLERANCE = 1e-9

#: (:class:`float`) Tolerance of the Hermiticity check of
#: :class:`TwoQubitDensity`.
HERMITICITY_TOLERANCE = 1e-12

#: (:class:`numpy.ndarray`) :math:`|g\rangle\langle e| + |e\rangle\langle g|`.
PAULI_X = numpy.array([[0, 1], [1, 0]], dtype=complex)

#: (:class:`numpy.ndarray`) The Pauli matrix
#: :math:`i|g\rangle\langle e| - i|e\rangle\langle g|`.
PAULI_Y = numpy.array([[0, -1j], [1j, 0]], dtype=complex)

#: (:class:`numpy.ndarray`) :math:`|e\rangle\langle e| - |g\rangle\langle g|`.
PAULI_Z = numpy.array([[1, 0], [0, -1]], dtype=complex)

_IDENTITY = numpy.eye(2, dtype=complex)


class PairCorrelations(collections.namedtuple('PairCorrelations',
                                              's t u v')):
    """The four numbers that define the joint state of an atom pair.

    ``s`` and ``t`` are the Bloch z-components of the first and the second
    atom, and ``u``, ``u``, ``v`` the diagonal of their cross dyadic.

    """

    __slots__ = ()

    def __new__(cls, s, t, u, v):
        values = tuple(float(x) for x in (s, t, u, v))
        if not all(math.isfinite(x) for x in values):
            raise ValueError('correlations must be finite, not ' +
                             repr(values))
        return super(PairCorrelations, cls).__new__(cls, *values)

    @classmethod
    def from_density_matrix(cls, rho):
        """Read ``(s, t, u, v)`` off a matrix of the family.

        :param rho: the two-atom state
        :type rho: :class:`TwoQubitDensity`, :class:`numpy.ndarray`
        :return: the correlations
        :rtype: :class:`PairCorrelations`

        """
        matrix = numpy.asarray(rho)

        def expect(a, b):
            return numpy.trace(matrix @ numpy.kron(a, b)).real
        transverse = expect(PAULI_X, PAULI_X) + expect(PAULI_Y, PAULI_Y)
        return cls(expect(PAULI_Z, _IDENTITY),
                   expect(_IDENTITY, PAULI_Z),
                   transverse / 2,
                   expect(PAULI_Z, PAULI_Z))

    @property
    def excess(self):
        """(:class:`float`) The longitudinal element :math:`v - st` of the
        entanglement dyadic.

        """
        return self.v - self.s * self.t


class ValidityReport(collections.namedtuple('ValidityReport',
                                            'transverse longitudinal')):
    """Residuals of the two positivity inequalities

    .. math::

       1 - v \\geq \\sqrt{4u^2 + (s-t)^2}, \\qquad 1 + v \\geq |s + t|

    Both are non-negative for a physical state.

    """

    __slots__ = ()

    @property
    def valid(self):
        """(:class:`bool`) Whether both residuals are within
        :const:`BOUNDARY_TOLERANCE` of being non-negative.

        """
        return min(self) >= -BOUNDARY_TOLERANCE


class TwoQubitDensity(object):
    """A Hermitian 4 by 4 matrix in the ``|ee>, |eg>, |ge>, |gg>`` basis.
    It need not be positive; partial transposes and differences of states
    are represented by this type as well.

    :param matrix: the matrix
    :type matrix: :class:`numpy.ndarray`

    """

    #: (:class:`numpy.ndarray`) Read-only complex matrix.
    matrix = None

    def __init__(self, matrix):
        matrix = numpy.array(matrix, dtype=complex)
        if matrix.shape != (4, 4):
            raise ValueError('matrix must be 4 by 4, not {0!r}'.format(
                matrix.shape
            ))
        elif not numpy.allclose(matrix, matrix.conj().T,
                                rtol=0, atol=HERMITICITY_TOLERANCE):
            raise ValueError('matrix must be Hermitian')
        matrix.setflags(write=False)
        self.matrix = matrix

    @property
    def trace(self):
        """(:class:`float`) The trace."""
        return float(numpy.trace(self.matrix).real)

    def __array__(self, dtype=None, copy=None):
        if copy:
            return numpy.array(self.matrix, dtype=dtype)
        return numpy.asarray(self.matrix, dtype=dtype)

    __hash__ = None

    def __eq__(self, other):
        return (isinstance(other, type(self)) and
                numpy.array_equal(self.matrix, other.matrix))

    def __ne__(self, other):
        return not (self == other)

    def __repr__(self):
        return '{0.__module__}.{0.__name__}({1!r})'.format(
            type(self), self.matrix.tolist()
        )


def correlations(dist, phi):
    """Compute ``(s, t, u, v)`` for two atoms meeting the field ``dist``
    one right after the other.  The operator traces reduce to sums over
    the photon-number probabilities:

    .. math::

       s &= \\sum_n p_n \\cos(2\\varphi\\sqrt{n+1}) \\\\
       t &= \\sum_n p'_n \\cos(2\\varphi\\sqrt{n+1}) \\\\
       u &= 2\\sum_n p_n \\sin^2(\\varphi\\sqrt{n+1})
            \\cos(\\varphi\\sqrt{n+1}) \\cos(\\varphi\\sqrt{n+2}) \\\\
       v &= \\sum_n \\cos(2\\varphi\\sqrt{n+1})
            \\left[\\cos^2(\\varphi\\sqrt{n+1})\\,p_n
                   - \\sin^2(\\varphi\\sqrt{n})\\,p_{n-1}\\right]

    where :math:`p'` is the field after the first atom.
    :func:`maserpairs.oracle.matrix_correlations` evaluates the same traces
    with dense matrices.

    :param dist: the field met by the first atom
    :type dist: :class:`~.fock.PhotonDistribution`
    :param phi: Rabi angle in radians
    :type phi: :class:`float`
    :return: the correlations
    :rtype: :class:`PairCorrelations`
    :raise InvalidState: when the result violates positivity by more than
                         :const:`INVALID_STATE_TOLERANCE`

    """
    logger = logging.getLogger(__name__ + '.correlations')
    probs = numpy.asarray(dist)
    angles = rabi_angles(len(probs) + 1, phi)
    cos = numpy.cos(angles)
    sin_squared = numpy.sin(angles[:-1]) ** 2
    inversion = numpy.cos(2 * angles)
    after = numpy.asarray(apply_atom_passage(dist, phi))
    s = numpy.dot(inversion[:-1], probs)
    t = numpy.dot(inversion, after)
    u = 2 * numpy.dot(probs * sin_squared * cos[:-1], cos[1:])
    v = (numpy.dot(inversion[:-1] * cos[:-1] ** 2, probs) -
         numpy.dot(inversion[1:] * sin_squared, probs))
    corr = PairCorrelations(s, t, u, v)
    report = validate(corr)
    if min(report) < -INVALID_STATE_TOLERANCE:
        logger.error('phi=%r: %r violates positivity: %r', phi, corr, report)
        raise InvalidState(report, '{0!r} is not a physical state'.format(
            corr
        ))
    return corr


def validate(corr):
    """Check the positivity inequalities of the two-atom state.

    >>> validate(PairCorrelations(0, 0, 0.6, 0)).valid
    False

    :param corr: the correlations
    :type corr: :class:`PairCorrelations`
    :return: both residuals
    :rtype: :class:`ValidityReport`

    """
    s, t, u, v = corr
    return ValidityReport((1 - v) - math.hypot(2 * u, s - t),
                          (1 + v) - abs(s + t))


def delta_trace_norm(corr):
    """The trace norm of the difference between the joint state and the
    product of its marginals, i.e. the sum of the moduli of the eigenvalues
    of :math:`\\Delta\\rho = \\frac14(u(\\sigma_x\\tau_x + \\sigma_y\\tau_y)
    + (v - st)\\sigma_z\\tau_z)`.

    """
    excess = abs(corr.excess)
    u = abs(corr.u)
    if 2 * u <= excess:
        return excess
    return excess / 2 + u


def degree_of_correlation(corr):
    """The largest characteristic value of the entanglement dyadic
    ``diag(u, u, v - st)``.

    """
    return max(abs(corr.u), abs(corr.excess))


def eigenvalues(corr):
    """The spectrum of the joint state in ascending order, from its
    1 + 1 + 2 block structure.

    """
    s, t, u, v = corr
    spread = math.hypot(s - t, 2 * u)
    return numpy.sort([(1 + s + t + v) / 4, (1 - s - t + v) / 4,
                       (1 - v - spread) / 4, (1 - v + spread) / 4])


def ppt_eigenvalues(corr):
    """The spectrum of the partial transpose of the joint state in
    ascending order.  The transposition moves the ``|eg>``--``|ge>``
    coherence to ``|ee>``--``|gg>``.

    """
    s, t, u, v = corr
    spread = math.hypot(s + t, 2 * u)
    return numpy.sort([(1 + s - t - v) / 4, (1 - s + t - v) / 4,
                       (1 + v - spread) / 4, (1 + v + spread) / 4])


def delta_eigenvalues(corr):
    """The spectrum of :math:`\\Delta\\rho` in ascending order:
    :math:`\\frac14(v-st)` twice and :math:`\\frac14[\\pm 2u - (v-st)]`.

    They sum to zero as the trace of a difference of two states must.

    """
    excess = corr.excess
    return numpy.sort([excess / 4, excess / 4,
                       (2 * corr.u - excess) / 4, (-2 * corr.u - excess) / 4])


def is_separable(corr):
    """Whether the joint state is a mixture of product states.  For this
    family the partial-transpose criterion reduces to

    .. math::

       1 + v \\geq \\sqrt{4u^2 + (s+t)^2}

    so in particular every state with ``u == 0`` is separable.

    """
    s, t, u, v = corr
    return 1 + v >= math.hypot(2 * u, s + t) - BOUNDARY_TOLERANCE


def to_density_matrix(corr):
    """Expand ``(s, t, u, v)`` into the 4 by 4 matrix.

    :param corr: the correlations
    :type corr: :class:`PairCorrelations`
    :return: the joint state
    :rtype: :class:`TwoQubitDensity`

    """
    s, t, u, v = corr
    matrix = numpy.diag([1 + s + t + v, 1 + s - t - v,
                         1 - s + t - v, 1 - s - t + v]).astype(complex) / 4
    matrix[1, 2] = matrix[2, 1] = u / 2
    return TwoQubitDensity(matrix)


def partial_transpose(rho):
    """Transpose ``rho`` with respect to the second atom.

    :param rho: a two-atom matrix
    :type rho: :class:`TwoQubitDensity`, :class:`numpy.ndarray`
    :return: the partial transpose
    :rtype: :class:`TwoQubitDensity`

    """
    blocks = numpy.asarray(rho).reshape(2, 2, 2, 2)
    return TwoQubitDensity(blocks.transpose(0, 3, 2, 1).reshape(4, 4))


def single_atom_states(corr):
    """The reduced states of the first and the second atom,
    :math:`\\frac12(1 + s\\sigma_z)` and :math:`\\frac12(1 + t\\tau_z)`.

    :return: a pair of 2 by 2 arrays
    :rtype: :class:`tuple`

    """
    return ((_IDENTITY + corr.s * PAULI_Z) / 2,
            (_IDENTITY + corr.t * PAULI_Z) / 2)


def product_density(corr):
    """The uncorrelated product of the two single-atom states."""
    first, second = single_atom_states(corr)
    return TwoQubitDensity(numpy.kron(first, second))


def joint_probabilities(corr):
    """Probabilities of the four joint detection outcomes.

    :return: the mapping of ``'ee'``, ``'eg'``, ``'ge'``, ``'gg'`` to their
             probabilities
    :rtype: :class:`collections.OrderedDict`

    """
    diagonal = numpy.diag(to_density_matrix(corr).matrix).real
    return collections.OrderedDict(zip(BASIS, diagonal.tolist()))


class StateError(Exception):
    """Exception related to two-atom states."""


class InvalidState(StateError, ValueError):
    """Exception that rises when computed correlations do not describe
    a physical state, which points to a numerical problem.

    """

    #: (:class:`ValidityReport`) The violated residuals.
    report = None

    def __init__(self, report, *args, **kwargs):
        super(InvalidState, self).__init__(*args, **kwargs)
        self.report = report

    def __reduce__(self):
        return type(self), (self.report,) + self.args, self.__dict__
