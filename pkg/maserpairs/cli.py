""":mod:`maserpairs.cli` --- CLI main
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

"""
import argparse
import logging
import math
import sys

from logging_spinner import SpinnerHandler, UserWaitingFilter

from .fock import (DEFAULT_N_CAP, DEFAULT_TAIL_EPS, MaserParams,
                   TruncationOverflow, TruncationPolicy, mandel_q,
                   photon_variance)
from .lewsan import DecompositionError
from .oracle import OracleMismatchError
from .pairstate import InvalidState, joint_probabilities, single_atom_states
from .sweep import (DEFAULT_STEPS, DEFAULT_THETA_MAX, DEFAULT_THETA_MIN,
                    DEFAULT_VERIFY_EVERY, SweepConfig, SweepOutputError,
                    analyze_point, emit_csv, emit_plot_data, find_peaks,
                    run_sweep, verify_point)
from .version import VERSION


#: (:class:`int`) Exit status for output that cannot be written.
EXIT_OUTPUT_ERROR = 1

#: (:class:`int`) Exit status for a numerically broken state or
#: decomposition.
EXIT_NUMERICAL_ERROR = 2

#: (:class:`int`) Exit status for a truncation overflow.
EXIT_TRUNCATION_OVERFLOW = 3


parser = argparse.ArgumentParser(
    description='Entangled atom pairs from a one-atom maser'
)
parser.add_argument('-d', '--debug', action='store_true', help='debug mode')
parser.add_argument('-v', '--version', action='version',
                    version='%(prog)s ' + VERSION)
subparsers = parser.add_subparsers()


def subparser(function):
    """Register a subparser function."""
    p = subparsers.add_parser(function.__name__, description=function.__doc__)
    p.set_defaults(function=function)
    p.call = function
    return p


def add_maser_arguments(p, phi=False):
    p.add_argument('--nex', type=float, required=True,
                   help='pump rate: atoms per photon lifetime')
    p.add_argument('--nu', type=float, default=0.0,
                   help='thermal photon number [%(default)s]')
    if phi:
        p.add_argument('--phi', type=float, required=True,
                       help='accumulated Rabi angle in units of pi')
    p.add_argument('--tail-eps', type=float, default=DEFAULT_TAIL_EPS,
                   help='bound on the omitted photon-number tail '
                        '[%(default)s]')
    p.add_argument('--n-cap', type=int, default=DEFAULT_N_CAP,
                   help='hard maximum photon number [%(default)s]')


def get_point(p, args):
    try:
        params = MaserParams(args.nex, args.nu, args.phi * math.pi)
        trunc = TruncationPolicy(args.tail_eps, args.n_cap)
    except (TypeError, ValueError) as e:
        p.error(str(e))
    return params, trunc


def print_pairs(pairs):
    for key, value in pairs:
        if isinstance(value, float):
            value = '{0:.17g}'.format(value)
        print('{0}={1}'.format(key, value))


@subparser
def sweep(args):
    """Sweep the pump parameter and write the pair quantities as CSV."""
    try:
        config = SweepConfig(
            nex=args.nex, nu=args.nu,
            theta_min=args.theta_min, theta_max=args.theta_max,
            steps=args.steps, tail_eps=args.tail_eps, n_cap=args.n_cap,
            out=args.out, plot_data=args.plot_data, peaks=args.peaks,
            verify=args.verify, verify_every=args.verify_every,
            jobs=args.jobs
        )
    except (TypeError, ValueError) as e:
        sweep.error(str(e))
    if args.peak_resolution is not None and not args.peak_resolution > 0:
        sweep.error('--peak-resolution must be positive')
    records = run_sweep(config)
    emit_csv(records, config.out)
    if config.plot_data:
        emit_plot_data(records, config.plot_data)
    if config.peaks:
        for peak in find_peaks(records, config, args.peak_resolution):
            print('peak phi/pi={0:.6f} 1-S={1:.6f}'.format(*peak),
                  file=sys.stderr)


add_maser_arguments(sweep)
sweep.add_argument('--theta-min', type=float, default=DEFAULT_THETA_MIN,
                   help='first grid point of theta in units of pi '
                        '[%(default)s]')
sweep.add_argument('--theta-max', type=float, default=DEFAULT_THETA_MAX,
                   help='last grid point of theta in units of pi '
                        '[%(default)s]')
sweep.add_argument('--steps', type=int, default=DEFAULT_STEPS,
                   help='number of grid points [%(default)s]')
sweep.add_argument('-o', '--out', default='-',
                   help='CSV output file; - for the standard output '
                        '[%(default)s]')
sweep.add_argument('--plot-data',
                   help='also write gnuplot blocks of the trace norm and '
                        '1 - S to this file')
sweep.add_argument('--peaks', action='store_true',
                   help='report the local maxima of 1 - S')
sweep.add_argument('--peak-resolution', type=float,
                   help='read each peak off a grid of phi with this '
                        'spacing in units of pi')
sweep.add_argument('--verify', action='store_true',
                   help='cross-check grid points against brute-force '
                        'matrix computations')
sweep.add_argument('--verify-every', type=int, default=DEFAULT_VERIFY_EVERY,
                   help='stride of cross-checked grid points [%(default)s]')
sweep.add_argument('-j', '--jobs', type=int, default=1,
                   help='number of worker processes [%(default)s]')


@subparser
def point(args):
    """Print every pair quantity at one parameter point."""
    params, trunc = get_point(point, args)
    analysis = analyze_point(params, trunc)
    dist = analysis.distribution
    corr = analysis.correlations
    result = analysis.decomposition
    first, second = single_atom_states(corr)
    record = analysis.to_record()
    pairs = list(zip(record._fields, record))
    pairs.extend([
        ('variance', photon_variance(dist)),
        ('mandel_q', mandel_q(dist)),
        ('tail_bound', dist.tail_bound),
        ('lambda', result.lambda_cap),
        ('q', result.q),
        ('first_excited', float(first[0, 0].real)),
        ('second_excited', float(second[0, 0].real)),
    ])
    pairs.extend(('P_' + key, value)
                 for key, value in joint_probabilities(corr).items())
    print_pairs(pairs)


add_maser_arguments(point, phi=True)


@subparser
def verify(args):
    """Cross-check one parameter point against brute-force matrix
    computations.

    """
    params, trunc = get_point(verify, args)
    result = verify_point(params, trunc)
    print_pairs([('verified', 'ok'), ('sep_degree', result.sep_degree),
                 ('p', result.p), ('q', result.q)])


add_maser_arguments(verify, phi=True)


def main(args=None):
    args = parser.parse_args(args)
    # records go to stdout; progress and diagnostics to stderr
    log_handler = logging.StreamHandler(sys.stderr)
    log_handler.addFilter(UserWaitingFilter())
    spinner_handler = SpinnerHandler(sys.stderr)
    local = logging.getLogger('maserpairs')
    if args.debug:
        root = logging.getLogger()
        root.setLevel(logging.INFO)
        root.addHandler(log_handler)
        local.setLevel(logging.DEBUG)
    else:
        local.setLevel(logging.INFO)
        local.addHandler(log_handler)
    local.addHandler(spinner_handler)
    if getattr(args, 'function', None):
        try:
            args.function(args)
        except TruncationOverflow as e:
            if args.debug:
                raise
            where = ''
            if e.theta_over_pi is not None:
                where = ' at theta/pi={0!r}'.format(e.theta_over_pi)
            parser.exit(EXIT_TRUNCATION_OVERFLOW,
                        'The photon-number tail does not fit under '
                        'n_cap={0}{1}.\nTry a larger --n-cap or a looser '
                        '--tail-eps.\n'.format(e.n_cap, where))
        except (InvalidState, DecompositionError, OracleMismatchError) as e:
            if args.debug:
                raise
            parser.exit(EXIT_NUMERICAL_ERROR,
                        '{0}: {1}\n'.format(type(e).__name__, e))
        except SweepOutputError as e:
            if args.debug:
                raise
            parser.exit(EXIT_OUTPUT_ERROR,
                        'Cannot write output: {0}\n'.format(e))
    else:
        parser.print_usage()
