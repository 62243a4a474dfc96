""":mod:`maserpairs.lewsan` --- Degree of separability
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

Every two-atom state splits as

.. math::

   \\rho = S\\rho_{sep} + (1 - S)\\rho_{pure}

with a separable :math:`\\rho_{sep}`, a pure :math:`\\rho_{pure}` and the
largest possible weight :math:`S`, the degree of separability.  Within the
four-parameter family of :mod:`maserpairs.pairstate` the pure part is

.. math::

   \\rho_{pure} = \\frac14\\left[1 + p\\sigma_z - p\\tau_z
                 + q(\\sigma_x\\tau_x + \\sigma_y\\tau_y)
                 - \\sigma_z\\tau_z\\right],
   \\qquad q = \\mathrm{sgn}(u)\\sqrt{1 - p^2}

and :math:`S = 1 - (1 - \\Lambda)/\\sqrt{1 - p^2}` where
:math:`\\Lambda = 1 - |u| + \\frac12\\sqrt{(1+v)^2 - (s+t)^2}`.

The weight :math:`(1-\\Lambda)/\\sqrt{1-p^2}` of the pure part is the least
one that leaves a separable remainder; :math:`p` is then pushed as close to
zero as positivity of the remainder allows.  When :math:`p = 0` is not
allowed, the remainder is singular and :math:`p` solves

.. math::

   \\frac{1 - \\Lambda}{\\sqrt{1 - p^2}}\\left[(1 - v) - (s - t)p\\right]
   = (1 - \\Lambda)^2 - v + st

"""
import logging
import math

import numpy
from scipy.optimize import brentq, minimize_scalar

from .pairstate import (BOUNDARY_TOLERANCE, PairCorrelations,
                        TwoQubitDensity, eigenvalues, is_separable,
                        partial_transpose, ppt_eigenvalues, to_density_matrix)

__all__ = ('DECOMPOSITION_TOLERANCE', 'RECONSTRUCTION_TOLERANCE',
           'ROOT_TOLERANCE',
           'DecompositionError', 'DecompositionInvalid', 'LsResult',
           'NoValidRoot',
           'lambda_cap', 'ls_decompose', 'pure_part', 'solve_p')


#: (:class:`float`) Largest residual accepted for a root of the
#: singular-remainder equation.
ROOT_TOLERANCE = 1e-10

#: (:class:`float`) How negative an eigenvalue of the separable part (or of
#: its partial transpose) may come out.
DECOMPOSITION_TOLERANCE = 1e-9

#: (:class:`float`) Largest entrywise deviation of the recombined state.
RECONSTRUCTION_TOLERANCE = 1e-10

#: (:class:`float`) Right-hand sides closer to zero than this count as
#: vanishing.
DEGENERATE_TOLERANCE = 1e-12

#: (:class:`float`) Separable weights below this leave no separable part
#: to report.
NEGLIGIBLE_WEIGHT = 1e-12

#: (:class:`float`) The fallback root scan covers ``(-SCAN_LIMIT,
#: SCAN_LIMIT)``.
SCAN_LIMIT = 0.999999

#: (:class:`int`) Number of points of the fallback root scan.
SCAN_POINTS = 4001

#: (:class:`float`) Quadratic roots closer than this are a double root
#: split by rounding; their midpoint joins the candidates.
DOUBLE_ROOT_SPREAD = 1e-6


class LsResult(object):
    """The outcome of :func:`ls_decompose`.

    For separable input :attr:`sep_degree` is 1, :attr:`rho_sep` is
    the input itself, :attr:`rho_pure` is :const:`None` and :attr:`p`,
    :attr:`q` are 0.

    """

    #: (:class:`~.pairstate.PairCorrelations`) The decomposed state.
    correlations = None

    #: (:class:`float`) The degree of separability :math:`S`.
    sep_degree = None

    #: (:class:`float`) :math:`\Lambda`, an upper bound of :math:`S` that
    #: is reached when :attr:`p` is 0.
    lambda_cap = None

    #: (:class:`float`) The asymmetry of the pure part.
    p = None

    #: (:class:`float`) The transverse amplitude of the pure part.
    q = None

    #: (:class:`~.pairstate.TwoQubitDensity`) The pure part.
    #: Might be :const:`None`.
    rho_pure = None

    #: (:class:`~.pairstate.TwoQubitDensity`) The separable part.
    #: Might be :const:`None` when the input is itself pure.
    rho_sep = None

    #: (:class:`~.pairstate.PairCorrelations`) :attr:`rho_sep` in terms of
    #: its four parameters.  Might be :const:`None`.
    sep_correlations = None

    def __init__(self, correlations, sep_degree, lambda_cap, p=0.0, q=0.0,
                 rho_pure=None, rho_sep=None, sep_correlations=None):
        self.correlations = correlations
        self.sep_degree = sep_degree
        self.lambda_cap = lambda_cap
        self.p = p
        self.q = q
        self.rho_pure = rho_pure
        self.rho_sep = rho_sep
        self.sep_correlations = sep_correlations

    @property
    def separable(self):
        """(:class:`bool`) Whether no pure part was needed."""
        return self.rho_pure is None

    def __repr__(self):
        return '<{0.__module__}.{0.__name__} S={1!r} lambda={2!r} p={3!r} ' \
               'q={4!r}>'.format(type(self), self.sep_degree,
                                 self.lambda_cap, self.p, self.q)


def lambda_cap(corr):
    """:math:`\\Lambda = 1 - |u| + \\frac12\\sqrt{(1+v)^2 - (s+t)^2}`.
    It is less than 1 exactly for non-separable states.

    """
    s, t, u, v = corr
    # non-negative for valid states; clipped against rounding
    radicand = max((1 + v) ** 2 - (s + t) ** 2, 0.0)
    return 1 - abs(u) + math.sqrt(radicand) / 2


def pure_part(p, q):
    """The pure part :math:`\\rho_{pure}` for the given ``p`` and ``q``.
    It is the family member ``(p, -p, q, -1)``.

    :rtype: :class:`~.pairstate.TwoQubitDensity`

    """
    return to_density_matrix(PairCorrelations(p, -p, q, -1))


def _residual(corr, cap, p):
    s, t, u, v = corr
    gap = 1 - cap
    return (gap / math.sqrt(1 - p * p) * ((1 - v) - (s - t) * p) -
            (gap * gap - v + s * t))


def _quadratic_roots(a, b, c):
    if a == 0:
        return [-c / b] if b else []
    discriminant = b * b - 4 * a * c
    if discriminant < 0:
        # a double root may come out slightly complex
        if discriminant < -1e-12 * (b * b + abs(4 * a * c)):
            return []
        discriminant = 0.0
    q = -(b + math.copysign(math.sqrt(discriminant), b)) / 2
    if q == 0:
        return [0.0]
    return sorted({q / a, c / q})


def _bracketed_roots(corr, cap):
    grid = numpy.linspace(-SCAN_LIMIT, SCAN_LIMIT, SCAN_POINTS)
    values = [_residual(corr, cap, p) for p in grid]
    roots = []
    for lo, hi, f_lo, f_hi in zip(grid, grid[1:], values, values[1:]):
        if f_lo == 0:
            roots.append(float(lo))
        elif f_lo * f_hi < 0:
            roots.append(brentq(lambda p: _residual(corr, cap, p), lo, hi,
                                xtol=1e-15))
    return roots


def _separable_remainder(corr, cap, p):
    weight = (1 - cap) / math.sqrt(1 - p * p)
    sep_degree = 1 - weight
    q = math.copysign(math.sqrt(1 - p * p), corr.u)
    if sep_degree < NEGLIGIBLE_WEIGHT:
        return sep_degree, q, None
    s, t, u, v = corr
    return sep_degree, q, PairCorrelations((s - weight * p) / sep_degree,
                                           (t + weight * p) / sep_degree,
                                           (u - weight * q) / sep_degree,
                                           (v + weight) / sep_degree)


def _is_admissible(sep_degree, remainder):
    if not -BOUNDARY_TOLERANCE <= sep_degree <= 1 + BOUNDARY_TOLERANCE:
        return False
    elif remainder is None:
        return True
    return (eigenvalues(remainder)[0] >= -DECOMPOSITION_TOLERANCE and
            ppt_eigenvalues(remainder)[0] >= -DECOMPOSITION_TOLERANCE)


def _remainder_margin(corr, cap, p):
    _, _, remainder = _separable_remainder(corr, cap, p)
    if remainder is None:
        return 0.0
    return min(eigenvalues(remainder)[0], ppt_eigenvalues(remainder)[0])


def _polished(corr, cap, p):
    # searched in terms of the offset from p
    lo = max(p - DOUBLE_ROOT_SPREAD, -SCAN_LIMIT) - p
    hi = min(p + DOUBLE_ROOT_SPREAD, SCAN_LIMIT) - p
    best = minimize_scalar(lambda d: -_remainder_margin(corr, cap, p + d),
                           bounds=(lo, hi), method='bounded',
                           options={'xatol': 1e-15})
    return p + float(best.x)


def solve_p(corr, lambda_cap):
    """Find the asymmetry ``p`` of the pure part of a non-separable state.

    ``p`` is 0 when :math:`\\Lambda^2 - (1+v)\\Lambda + st \\geq 0`.
    Otherwise the squared singular-remainder equation is a quadratic in
    ``p``; its real roots inside ``(-1, 1)`` that solve the unsquared
    equation and leave a positive, PPT remainder compete, and the one with
    the largest separable weight wins.  A sign-change scan refined by
    :func:`scipy.optimize.brentq` stands in when the quadratic yields
    nothing.  Rounding can split a double root into two roots that miss the
    singular remainder; such candidates are polished by maximizing the
    lowest eigenvalue of the remainder nearby.

    :param corr: the correlations of a non-separable state
    :type corr: :class:`~.pairstate.PairCorrelations`
    :param lambda_cap: :math:`\\Lambda` of ``corr``
    :type lambda_cap: :class:`float`
    :return: ``p``
    :rtype: :class:`float`
    :raise NoValidRoot: when no admissible root exists

    """
    logger = logging.getLogger(__name__ + '.solve_p')
    s, t, u, v = corr
    cap = lambda_cap
    if cap * cap - (1 + v) * cap + s * t >= 0:
        logger.debug('%r: symmetric pure part', corr)
        return 0.0
    gap = 1 - cap
    rhs = gap * gap - v + s * t
    if abs(rhs) <= DEGENERATE_TOLERANCE:
        if abs(s - t) > DEGENERATE_TOLERANCE and abs(1 - v) < abs(s - t):
            return (1 - v) / (s - t)
        logger.error('%r: the singular-remainder equation degenerates '
                     'without a root in (-1, 1)', corr)
        raise NoValidRoot(corr, cap, 'no root for {0!r}'.format(corr))
    roots = _quadratic_roots(gap * gap * (s - t) ** 2 + rhs * rhs,
                             -2 * gap * gap * (1 - v) * (s - t),
                             gap * gap * (1 - v) ** 2 - rhs * rhs)
    if len(roots) == 2 and roots[1] - roots[0] < DOUBLE_ROOT_SPREAD:
        roots.append((roots[0] + roots[1]) / 2)
    candidates = [
        p
        for p in roots
        if abs(p) < 1 and abs(_residual(corr, cap, p)) <= ROOT_TOLERANCE
    ]
    if not candidates:
        logger.debug('%r: no quadratic root survived; scanning', corr)
        candidates = _bracketed_roots(corr, cap)
    survivors = []
    for p in candidates:
        sep_degree, _, remainder = _separable_remainder(corr, cap, p)
        if not _is_admissible(sep_degree, remainder):
            # rounding may have pushed the root off the singular remainder
            p = _polished(corr, cap, p)
            sep_degree, _, remainder = _separable_remainder(corr, cap, p)
            if not _is_admissible(sep_degree, remainder):
                continue
        survivors.append((sep_degree, -abs(p), p))
    if not survivors:
        logger.error('%r: none of the roots %r leaves a separable '
                     'remainder', corr, candidates)
        raise NoValidRoot(corr, cap, 'no admissible root for {0!r} among '
                                     '{1!r}'.format(corr, candidates))
    sep_degree, _, p = max(survivors)
    logger.debug('%r: p=%r, S=%r', corr, p, sep_degree)
    return p


def ls_decompose(corr):
    """Split the two-atom state into its best separable approximation and
    a pure remainder.

    :param corr: the correlations
    :type corr: :class:`~.pairstate.PairCorrelations`
    :return: the decomposition
    :rtype: :class:`LsResult`
    :raise NoValidRoot: when ``p`` cannot be determined
    :raise DecompositionInvalid: when the parts fail to recombine into
                                 the input, or the separable part is not
                                 positive and PPT

    """
    logger = logging.getLogger(__name__ + '.ls_decompose')
    cap = lambda_cap(corr)
    rho = to_density_matrix(corr)
    if corr.u == 0 or is_separable(corr):
        return LsResult(corr, 1.0, cap, rho_sep=rho, sep_correlations=corr)
    p = solve_p(corr, cap)
    sep_degree, q, remainder = _separable_remainder(corr, cap, p)
    if not -BOUNDARY_TOLERANCE <= sep_degree <= 1 + BOUNDARY_TOLERANCE:
        logger.error('%r: S=%r is out of range', corr, sep_degree)
        raise DecompositionInvalid(corr, 'S={0!r} is out of [0, 1] for '
                                         '{1!r}'.format(sep_degree, corr))
    sep_degree = min(max(sep_degree, 0.0), 1.0)
    rho_pure = pure_part(p, q)
    pure_spectrum = numpy.linalg.eigvalsh(rho_pure.matrix)
    if abs(pure_spectrum[-2]) > RECONSTRUCTION_TOLERANCE:
        raise DecompositionInvalid(corr, 'the pure part for p={0!r} has '
                                         'rank above 1'.format(p))
    if remainder is None:
        rho_sep = None
        recombined = rho_pure.matrix
    else:
        rho_sep = TwoQubitDensity(
            (rho.matrix - (1 - sep_degree) * rho_pure.matrix) / sep_degree
        )
        recombined = (sep_degree * rho_sep.matrix +
                      (1 - sep_degree) * rho_pure.matrix)
        lowest = min(numpy.linalg.eigvalsh(rho_sep.matrix)[0],
                     numpy.linalg.eigvalsh(
                         partial_transpose(rho_sep).matrix)[0])
        if lowest < -DECOMPOSITION_TOLERANCE:
            logger.error('%r: separable part has eigenvalue %r', corr,
                         lowest)
            raise DecompositionInvalid(
                corr, 'the separable part of {0!r} is not positive and PPT '
                      '(lowest eigenvalue {1!r})'.format(corr, lowest)
            )
    deviation = numpy.abs(recombined - rho.matrix).max()
    if deviation > RECONSTRUCTION_TOLERANCE:
        logger.error('%r: parts recombine with deviation %r', corr,
                     deviation)
        raise DecompositionInvalid(corr, 'the parts of {0!r} recombine with '
                                         'deviation {1!r}'.format(corr,
                                                                  deviation))
    return LsResult(corr, sep_degree, cap, p, q, rho_pure, rho_sep,
                    remainder)


class DecompositionError(Exception):
    """Exception related to the separable decomposition."""

    #: (:class:`~.pairstate.PairCorrelations`) The offending state.
    correlations = None

    def __init__(self, correlations, *args, **kwargs):
        super(DecompositionError, self).__init__(*args, **kwargs)
        self.correlations = correlations

    def __reduce__(self):
        return type(self), (self.correlations,) + self.args, self.__dict__


class NoValidRoot(DecompositionError, ArithmeticError):
    """Exception that rises when the asymmetry of the pure part has no
    admissible value.

    """

    #: (:class:`float`) :math:`\Lambda` of the offending state.
    lambda_cap = None

    def __init__(self, correlations, lambda_cap, *args, **kwargs):
        super(NoValidRoot, self).__init__(correlations, *args, **kwargs)
        self.lambda_cap = lambda_cap

    def __reduce__(self):
        return type(self), (self.correlations, self.lambda_cap) + \
            self.args, self.__dict__


class DecompositionInvalid(DecompositionError, ArithmeticError):
    """Exception that rises when the computed parts do not form a valid
    decomposition of the state.

    """
