""":mod:`maserpairs.sweep` --- Sweeps over the pump parameter
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

Evaluates the steady-state pair quantities along a uniform grid of the pump
parameter :math:`\\theta = \\varphi\\sqrt{N_{ex}}` and writes them out as
CSV or as plotting blocks.

"""
import collections
import concurrent.futures
import contextlib
import csv
import functools
import io
import logging
import math
import numbers
import sys

import numpy
from scipy.optimize import minimize_scalar

from .fock import (DEFAULT_N_CAP, DEFAULT_TAIL_EPS, MaserParams,
                   TruncationOverflow, TruncationPolicy, mean_photon,
                   steady_state)
from .lewsan import ls_decompose
from .oracle import verify_correlations
from .pairstate import (InvalidState, correlations, degree_of_correlation,
                        delta_trace_norm, validate)

__all__ = ('CSV_FIELDS', 'DEFAULT_STEPS', 'DEFAULT_THETA_MAX',
           'DEFAULT_THETA_MIN', 'DEFAULT_VERIFY_EVERY', 'PEAK_TOLERANCE',
           'Peak', 'PeakReport', 'PointAnalysis', 'SweepConfig',
           'SweepOutputError', 'SweepRecord',
           'analyze_point', 'emit_csv', 'emit_plot_data', 'evaluate_point',
           'find_peaks', 'read_csv', 'run_sweep', 'verify_point')


#: (:class:`tuple`) Column names of the CSV output, in order.
CSV_FIELDS = ('theta_over_pi', 'phi_over_pi', 's', 't', 'u', 'v',
              'trace_norm', 'deg_corr', 'separable', 'sep_degree',
              'one_minus_S', 'p', 'nbar', 'n_max')

#: (:class:`float`) Default lower end of the sweep, in units of :math:`\pi`.
DEFAULT_THETA_MIN = 0.0

#: (:class:`float`) Default upper end of the sweep, in units of :math:`\pi`.
DEFAULT_THETA_MAX = 5.0

#: (:class:`int`) Default number of grid points.
DEFAULT_STEPS = 2000

#: (:class:`int`) Default stride of oracle-verified grid points.
DEFAULT_VERIFY_EVERY = 50

#: (:class:`float`) Location tolerance of a refined peak in units of
#: :math:`\pi`.
PEAK_TOLERANCE = 1e-10

_INTEGER_FIELDS = frozenset(['separable', 'n_max'])


def _positive_integer(name, value):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError('{0} must be an integer, not {1!r}'.format(
            name, value
        ))
    elif value < 1:
        raise ValueError('{0} must be positive, not {1!r}'.format(
            name, value
        ))
    return int(value)


class SweepConfig(object):
    """Everything a sweep needs to know.

    :param nex: the pump rate.  it has to be positive
    :type nex: :class:`float`
    :param nu: the thermal photon number
    :type nu: :class:`float`
    :param theta_min: the first grid point in units of :math:`\\pi`
    :type theta_min: :class:`float`
    :param theta_max: the last grid point in units of :math:`\\pi`
    :type theta_max: :class:`float`
    :param steps: the number of grid points, both ends included
    :type steps: :class:`int`
    :param tail_eps: see :class:`~.fock.TruncationPolicy`
    :type tail_eps: :class:`float`
    :param n_cap: see :class:`~.fock.TruncationPolicy`
    :type n_cap: :class:`int`
    :param out: the CSV destination.  ``'-'`` or :const:`None` for
                the standard output
    :type out: :class:`str`
    :param plot_data: the destination of the plotting blocks, if any
    :type plot_data: :class:`str`
    :param peaks: whether to report the peaks of :math:`1 - S`
    :type peaks: :class:`bool`
    :param verify: whether to cross-check every ``verify_every``-th point
                   against :mod:`maserpairs.oracle`
    :type verify: :class:`bool`
    :param verify_every: the stride of verified points
    :type verify_every: :class:`int`
    :param jobs: the number of worker processes
    :type jobs: :class:`int`

    """

    def __init__(self, nex, nu, theta_min=DEFAULT_THETA_MIN,
                 theta_max=DEFAULT_THETA_MAX, steps=DEFAULT_STEPS,
                 tail_eps=DEFAULT_TAIL_EPS, n_cap=DEFAULT_N_CAP, out=None,
                 plot_data=None, peaks=False, verify=False,
                 verify_every=DEFAULT_VERIFY_EVERY, jobs=1):
        # reuse the validation of the physical parameters
        params = MaserParams(nex, nu, 0.0)
        if not params.nex:
            raise ValueError('nex must be positive for a sweep')
        for name, value in [('theta_min', theta_min),
                            ('theta_max', theta_max)]:
            if not isinstance(value, numbers.Real):
                raise TypeError('{0} must be a real number, not {1!r}'.format(
                    name, value
                ))
            elif not math.isfinite(value) or value < 0:
                raise ValueError('{0} must be a finite non-negative number, '
                                 'not {1!r}'.format(name, value))
        if theta_max <= theta_min:
            raise ValueError('theta_max ({0!r}) must be greater than '
                             'theta_min ({1!r})'.format(theta_max, theta_min))
        steps = _positive_integer('steps', steps)
        if steps < 2:
            raise ValueError('steps must be at least 2, not ' + repr(steps))
        self.nex = params.nex
        self.nu = params.nu
        self.theta_min = float(theta_min)
        self.theta_max = float(theta_max)
        self.steps = steps
        self.trunc = TruncationPolicy(tail_eps, n_cap)
        self.out = out
        self.plot_data = plot_data
        self.peaks = bool(peaks)
        self.verify = bool(verify)
        self.verify_every = _positive_integer('verify_every', verify_every)
        self.jobs = _positive_integer('jobs', jobs)

    @property
    def grid(self):
        """(:class:`numpy.ndarray`) The grid of :math:`\\theta/\\pi`."""
        return numpy.linspace(self.theta_min, self.theta_max, self.steps)

    def params_at(self, theta_over_pi):
        """The maser parameters at a grid point.

        :param theta_over_pi: the pump parameter in units of :math:`\\pi`
        :type theta_over_pi: :class:`float`
        :rtype: :class:`~.fock.MaserParams`

        """
        phi = float(theta_over_pi) * math.pi / math.sqrt(self.nex)
        return MaserParams(self.nex, self.nu, phi)

    def __repr__(self):
        return '{0.__module__}.{0.__name__}(nex={1.nex!r}, nu={1.nu!r}, ' \
               'theta_min={1.theta_min!r}, theta_max={1.theta_max!r}, ' \
               'steps={1.steps!r})'.format(type(self), self)


class SweepRecord(collections.namedtuple('SweepRecord', CSV_FIELDS)):
    """One row of sweep output.  ``separable`` is 1 exactly when
    ``sep_degree`` is 1.

    """

    __slots__ = ()

    def to_row(self):
        """Format the fields as CSV cells.  Floats are written with 17
        significant digits so that :meth:`from_row` restores them exactly.

        :rtype: :class:`list`

        """
        return [str(value) if name in _INTEGER_FIELDS else
                '{0:.17g}'.format(value)
                for name, value in zip(self._fields, self)]

    @classmethod
    def from_row(cls, row):
        """Parse the cells written by :meth:`to_row`.

        :param row: the cells in :const:`CSV_FIELDS` order
        :type row: :class:`collections.abc.Sequence`
        :rtype: :class:`SweepRecord`

        """
        if len(row) != len(CSV_FIELDS):
            raise ValueError('expected {0} cells, not {1!r}'.format(
                len(CSV_FIELDS), row
            ))
        return cls(*(int(cell) if name in _INTEGER_FIELDS else float(cell)
                     for name, cell in zip(CSV_FIELDS, row)))


#: A local maximum of :math:`1 - S`.
Peak = collections.namedtuple('Peak', 'phi_over_pi value')


class PeakReport(tuple):
    """The local maxima of :math:`1 - S`, ordered by position.

    :param peaks: pairs of ``(phi_over_pi, value)``
    :type peaks: :class:`collections.abc.Iterable`

    """

    def __new__(cls, peaks=()):
        return super(PeakReport, cls).__new__(
            cls, sorted(Peak(*peak) for peak in peaks)
        )

    @property
    def highest(self):
        """(:class:`Peak`) The highest peak.  Might be :const:`None`."""
        return max(self, key=lambda peak: peak.value, default=None)

    def __repr__(self):
        return '{0.__module__}.{0.__name__}({1!r})'.format(
            type(self), list(self)
        )


class PointAnalysis(collections.namedtuple('PointAnalysis', [
    'params', 'distribution', 'correlations', 'decomposition'
])):
    """The intermediate results behind one :class:`SweepRecord`."""

    __slots__ = ()

    def to_record(self, theta_over_pi=None):
        """Condense into an output row.

        :param theta_over_pi: the grid coordinate to record.  derived from
                              :attr:`params` if omitted
        :type theta_over_pi: :class:`float`
        :rtype: :class:`SweepRecord`

        """
        params = self.params
        corr = self.correlations
        result = self.decomposition
        if theta_over_pi is None:
            theta_over_pi = params.theta / math.pi
        return SweepRecord(
            theta_over_pi=float(theta_over_pi),
            phi_over_pi=params.phi / math.pi,
            s=corr.s, t=corr.t, u=corr.u, v=corr.v,
            trace_norm=delta_trace_norm(corr),
            deg_corr=degree_of_correlation(corr),
            separable=int(result.separable),
            sep_degree=result.sep_degree,
            one_minus_S=1.0 - result.sep_degree,
            p=result.p,
            nbar=mean_photon(self.distribution),
            n_max=self.distribution.n_max
        )


def analyze_point(params, trunc=None):
    """Compute the steady state, the pair correlations and the
    decomposition at one parameter point.

    :param params: the maser parameters
    :type params: :class:`~.fock.MaserParams`
    :param trunc: the truncation policy
    :type trunc: :class:`~.fock.TruncationPolicy`
    :rtype: :class:`PointAnalysis`
    :raise maserpairs.fock.TruncationOverflow: when the steady state does
                                               not fit under the cap
    :raise maserpairs.pairstate.InvalidState: when the correlations are
                                              not physical
    :raise maserpairs.lewsan.DecompositionError: when the decomposition
                                                 fails

    """
    logger = logging.getLogger(__name__ + '.analyze_point')
    dist = steady_state(params, trunc)
    corr = correlations(dist, params.phi)
    report = validate(corr)
    if not report.valid:
        logger.error('%r: %r is not a physical state (%r)',
                     params, corr, report)
        raise InvalidState(report, '{0!r} is not a physical state'.format(
            corr
        ))
    result = ls_decompose(corr)
    logger.debug('%r: %r, %r', params, corr, result)
    return PointAnalysis(params, dist, corr, result)


def evaluate_point(params, trunc=None, theta_over_pi=None):
    """Evaluate every output quantity at one parameter point.

    :param params: the maser parameters
    :type params: :class:`~.fock.MaserParams`
    :param trunc: the truncation policy
    :type trunc: :class:`~.fock.TruncationPolicy`
    :param theta_over_pi: the grid coordinate to record.  derived from
                          ``params`` if omitted
    :type theta_over_pi: :class:`float`
    :return: the output row
    :rtype: :class:`SweepRecord`
    :raise maserpairs.fock.TruncationOverflow: when the steady state does
                                               not fit under the cap
    :raise maserpairs.pairstate.InvalidState: when the correlations are
                                              not physical
    :raise maserpairs.lewsan.DecompositionError: when the decomposition
                                                 fails

    """
    return analyze_point(params, trunc).to_record(theta_over_pi)


def _evaluate_grid_point(config, theta_over_pi):
    params = config.params_at(theta_over_pi)
    try:
        return evaluate_point(params, config.trunc, theta_over_pi)
    except TruncationOverflow as e:
        e.theta_over_pi = float(theta_over_pi)
        raise


def verify_point(params, trunc=None):
    """Cross-check one parameter point against :mod:`maserpairs.oracle`.

    :param params: the maser parameters
    :type params: :class:`~.fock.MaserParams`
    :param trunc: the truncation policy
    :type trunc: :class:`~.fock.TruncationPolicy`
    :return: the analytic decomposition
    :rtype: :class:`~.lewsan.LsResult`
    :raise maserpairs.oracle.OracleMismatchError: when a check fails

    """
    dist = steady_state(params, trunc)
    return verify_correlations(dist, params.phi)


def run_sweep(config):
    """Evaluate the whole grid of ``config``.  With more than one job the
    points are farmed out to worker processes; the records come back in
    grid order either way.

    :param config: the sweep
    :type config: :class:`SweepConfig`
    :return: one record per grid point, in grid order
    :rtype: :class:`list`
    :raise maserpairs.fock.TruncationOverflow: when a grid point does not
                                               fit under the cap.  its
                                               ``theta_over_pi`` is set

    """
    logger = logging.getLogger(__name__ + '.run_sweep')
    grid = config.grid.tolist()
    evaluate = functools.partial(_evaluate_grid_point, config)
    logger.info('Evaluating %d points for %r...', len(grid), config,
                extra={'user_waiting': True})
    try:
        if config.jobs > 1:
            with concurrent.futures.ProcessPoolExecutor(config.jobs) as pool:
                chunksize = max(1, len(grid) // (config.jobs * 4))
                records = list(pool.map(evaluate, grid, chunksize=chunksize))
        else:
            records = [evaluate(theta) for theta in grid]
        if config.verify:
            for theta in grid[::config.verify_every]:
                logger.debug('verifying theta/pi=%r', theta)
                verify_point(config.params_at(theta), config.trunc)
    except TruncationOverflow as e:
        logger.info('Failed at theta/pi=%r.', e.theta_over_pi,
                    extra={'user_waiting': False})
        raise
    except Exception:
        logger.info('Failed.', extra={'user_waiting': False})
        raise
    logger.info('Evaluated %d points.', len(records),
                extra={'user_waiting': False})
    return records


def _refine_peak(xs, ys):
    # vertex of the parabola through three neighbouring points
    origin = xs[1]
    a, b, c = numpy.polyfit(numpy.asarray(xs) - origin, ys, 2)
    if a >= 0:
        return xs[1], ys[1]
    offset = -b / (2 * a)
    offset = min(max(offset, xs[0] - origin), xs[2] - origin)
    value = c - b * b / (4 * a)
    return origin + offset, min(max(value, 0.0), 1.0)


def _dark_area(config, phi_over_pi):
    params = MaserParams(config.nex, config.nu, phi_over_pi * math.pi)
    return evaluate_point(params, config.trunc).one_minus_S


def _maximize_dark_area(config, lo, hi):
    # the maxima are cusps, so no interpolation: evaluate 1 - S directly
    best = minimize_scalar(lambda x: -_dark_area(config, x),
                           bounds=(lo, hi), method='bounded',
                           options={'xatol': PEAK_TOLERANCE})
    return float(best.x), -float(best.fun)


def _read_at_resolution(config, phi_over_pi, resolution):
    location = round(round(phi_over_pi / resolution) * resolution, 12)
    return location, _dark_area(config, location)


def find_peaks(records, config=None, resolution=None):
    """Locate the local maxima of :math:`1 - S` along a sweep.

    Without ``config`` each maximum is refined by fitting a parabola
    through it and its two neighbours.  With ``config`` :math:`1 - S` is
    evaluated afresh and maximized between the two neighbours, which
    finds the cusps at the trapping angles independently of the grid.
    With ``resolution`` as well, every peak is read off a grid of
    :math:`\\varphi/\\pi` with that spacing, at the grid point nearest to
    the refined maximum.

    :param records: the sweep in grid order
    :type records: :class:`collections.abc.Sequence`
    :param config: the sweep that produced ``records``
    :type config: :class:`SweepConfig`
    :param resolution: the spacing of the reading grid in units of
                       :math:`\\pi`
    :type resolution: :class:`float`
    :rtype: :class:`PeakReport`
    :raise ValueError: when ``resolution`` is not positive or comes
                       without ``config``

    """
    if resolution is not None:
        if config is None:
            raise ValueError('resolution needs the sweep configuration')
        elif not resolution > 0:
            raise ValueError('resolution must be positive, not '
                             '{0!r}'.format(resolution))
    xs = [record.phi_over_pi for record in records]
    ys = [record.one_minus_S for record in records]
    peaks = []
    for i in range(1, len(records) - 1):
        if not ys[i - 1] < ys[i] >= ys[i + 1]:
            continue
        elif config is None:
            peaks.append(_refine_peak(xs[i - 1:i + 2], ys[i - 1:i + 2]))
            continue
        location, value = _maximize_dark_area(config, xs[i - 1], xs[i + 1])
        if value < ys[i]:
            location, value = xs[i], ys[i]
        if resolution is not None:
            location, value = _read_at_resolution(config, location,
                                                  resolution)
        peaks.append((location, value))
    return PeakReport(peaks)


@contextlib.contextmanager
def _open_output(path):
    if path is None or path == '-':
        yield sys.stdout
        return
    try:
        f = io.open(path, 'w', newline='')
    except OSError as e:
        raise SweepOutputError(path, e.errno, e.strerror) from e
    with f:
        yield f


def emit_csv(records, path=None):
    """Write records as CSV with a header row of :const:`CSV_FIELDS`.

    :param records: the records
    :type records: :class:`collections.abc.Iterable`
    :param path: the destination.  ``'-'`` or :const:`None` for the standard
                 output
    :type path: :class:`str`
    :raise SweepOutputError: when the destination cannot be written

    """
    try:
        with _open_output(path) as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(CSV_FIELDS)
            for record in records:
                writer.writerow(record.to_row())
    except SweepOutputError:
        raise
    except OSError as e:
        raise SweepOutputError(path, e.errno, e.strerror) from e


def read_csv(path):
    """Read the records written by :func:`emit_csv`.

    :param path: the CSV file
    :type path: :class:`str`
    :rtype: :class:`list`

    """
    with io.open(path, newline='') as f:
        reader = csv.reader(f)
        header = tuple(next(reader))
        if header != CSV_FIELDS:
            raise ValueError('unexpected header: {0!r}'.format(header))
        return [SweepRecord.from_row(row) for row in reader]


def emit_plot_data(records, path):
    """Write two whitespace-separated blocks, separated by two blank lines
    as gnuplot's ``index`` expects: :math:`\\theta/\\pi` against the trace
    norm, then :math:`\\theta/\\pi` against :math:`1 - S`.

    :param records: the records
    :type records: :class:`collections.abc.Sequence`
    :param path: the destination.  ``'-'`` for the standard output
    :type path: :class:`str`
    :raise SweepOutputError: when the destination cannot be written

    """
    columns = numpy.array(
        [(r.theta_over_pi, r.trace_norm, r.one_minus_S) for r in records],
        dtype=float
    ).reshape(-1, 3)
    try:
        with _open_output(path) as f:
            numpy.savetxt(f, columns[:, [0, 1]], fmt='%.17g',
                          header='theta_over_pi trace_norm')
            f.write('\n\n')
            numpy.savetxt(f, columns[:, [0, 2]], fmt='%.17g',
                          header='theta_over_pi one_minus_S')
    except SweepOutputError:
        raise
    except OSError as e:
        raise SweepOutputError(path, e.errno, e.strerror) from e


class SweepOutputError(OSError):
    """Exception that rises when sweep output cannot be written."""

    #: (:class:`str`) The destination that failed.
    path = None

    def __init__(self, path, *args, **kwargs):
        super(SweepOutputError, self).__init__(*args, **kwargs)
        self.path = path

    def __str__(self):
        return '{0}: {1}'.format(self.path, self.strerror or
                                 super(SweepOutputError, self).__str__())
