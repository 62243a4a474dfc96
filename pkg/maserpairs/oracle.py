""":mod:`maserpairs.oracle` --- Brute-force cross-checks
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

Slow, literal counterparts of the closed forms used elsewhere: dense
truncated field operators, spectra of explicit 4 by 4 matrices, and a direct
numerical search for the best separable approximation.  The test suite and
``maserpairs sweep --verify`` compare the two paths.

"""
import enum
import logging
import math

import numpy
from scipy.optimize import minimize_scalar
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .lewsan import ls_decompose
from .pairstate import (BOUNDARY_TOLERANCE, PAULI_X, PAULI_Y, PAULI_Z,
                        PairCorrelations, correlations, delta_trace_norm,
                        is_separable, partial_transpose, validate)

__all__ = ('CORRELATION_TOLERANCE', 'FEASIBILITY_TOLERANCE', 'HEADROOM',
           'LS_TOLERANCE', 'TRACE_NORM_TOLERANCE',
           'DenseFieldOperator', 'OperatorRole', 'OracleMismatchError',
           'field_operator', 'matrix_correlations', 'numeric_ls_search',
           'numeric_trace_norm', 'pauli_density', 'ppt_min_eigenvalue',
           'random_correlations', 'random_pure_state', 'spectrum_4x4',
           'verify_correlations')


#: (:class:`int`) Photon levels added above the input distribution: one for
#: the photon the first atom may leave, one more so that
#: :math:`S^\dagger S` is exact on that level.
HEADROOM = 2

#: (:class:`float`) Agreement required between the photon-number sums and
#: the dense operator traces.
CORRELATION_TOLERANCE = 1e-10

#: (:class:`float`) Agreement required between the closed-form and the
#: spectral trace norm.
TRACE_NORM_TOLERANCE = 1e-12

#: (:class:`float`) Agreement required between the analytic and the
#: searched degree of separability.
LS_TOLERANCE = 1e-3

#: (:class:`float`) How negative an eigenvalue may be for a candidate
#: remainder to count as positive.
FEASIBILITY_TOLERANCE = 1e-9

#: (:class:`float`) Bisection tolerance on the separable weight.
BISECTION_TOLERANCE = 1e-8

#: (:class:`float`) Half width of the final search for the asymmetry of
#: the pure part.
POLISH_WIDTH = 1e-6


class OperatorRole(enum.Enum):
    """Which passage operator a :class:`DenseFieldOperator` represents."""

    #: (:class:`OperatorRole`) The diagonal operator
    #: :math:`C = \cos(\varphi\sqrt{aa^\dagger})`.
    cosine = 'C'

    #: (:class:`OperatorRole`) The raising operator
    #: :math:`S = a^\dagger\sin(\varphi\sqrt{aa^\dagger})/\sqrt{aa^\dagger}`.
    sine = 'S'

    def __repr__(self):
        return '{0.__module__}.{0.__name__}.{1}'.format(
            type(self),
            self.name
        )


class DenseFieldOperator(object):
    """A passage operator as an explicit square matrix on the truncated
    photon-number space.

    :param matrix: the real square matrix
    :type matrix: :class:`numpy.ndarray`
    :param role: which operator it is
    :type role: :class:`OperatorRole`

    """

    def __init__(self, matrix, role):
        if not isinstance(role, OperatorRole):
            raise TypeError('role must be an instance of {0.__module__}.'
                            '{0.__name__}, not {1!r}'.format(OperatorRole,
                                                             role))
        matrix = numpy.array(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError('matrix must be square, not {0!r}'.format(
                matrix.shape
            ))
        matrix.setflags(write=False)
        self.matrix = matrix
        self.role = role

    @property
    def dimension(self):
        """(:class:`int`) The number of photon levels."""
        return self.matrix.shape[0]

    def __repr__(self):
        return '<{0.__module__}.{0.__name__} {1!r} dimension={2}>'.format(
            type(self), self.role, self.dimension
        )


def field_operator(dimension, phi, role):
    """Build :math:`C` or :math:`S` on ``dimension`` photon levels.
    :math:`S` drops the photon it would push above the top level.

    :rtype: :class:`DenseFieldOperator`

    """
    angles = phi * numpy.sqrt(numpy.arange(1, dimension + 1))
    if role is OperatorRole.cosine:
        matrix = numpy.diag(numpy.cos(angles))
    else:
        matrix = numpy.diag(numpy.sin(angles[:-1]), k=-1)
    return DenseFieldOperator(matrix, role)


def matrix_correlations(dist, phi):
    """Evaluate ``(s, t, u, v)`` literally as operator traces, e.g.
    :math:`u = \\mathrm{tr}\\{(S^\\dagger CSC + CS^\\dagger CS)\\rho\\}`.

    :param dist: the field met by the first atom
    :type dist: :class:`~.fock.PhotonDistribution`
    :param phi: Rabi angle in radians
    :type phi: :class:`float`
    :rtype: :class:`~.pairstate.PairCorrelations`

    """
    probs = numpy.asarray(dist)
    dimension = len(probs) + HEADROOM
    c = field_operator(dimension, phi, OperatorRole.cosine).matrix
    s = field_operator(dimension, phi, OperatorRole.sine).matrix
    field = numpy.zeros((dimension, dimension))
    field[:len(probs), :len(probs)] = numpy.diag(probs)
    inversion = c @ c - s.T @ s
    emitted = s @ field @ s.T
    kept = c @ field @ c
    return PairCorrelations(
        numpy.trace(inversion @ field),
        numpy.trace(inversion @ (kept + emitted)),
        numpy.trace((s.T @ c @ s @ c + c @ s.T @ c @ s) @ field),
        numpy.trace(inversion @ (kept - emitted))
    )


def pauli_density(corr):
    """The joint state assembled term by term from Pauli products,
    independently of :func:`~.pairstate.to_density_matrix`.

    :rtype: :class:`numpy.ndarray`

    """
    s, t, u, v = corr
    identity = numpy.eye(2)
    return (numpy.kron(identity, identity) +
            s * numpy.kron(PAULI_Z, identity) +
            t * numpy.kron(identity, PAULI_Z) +
            u * (numpy.kron(PAULI_X, PAULI_X) +
                 numpy.kron(PAULI_Y, PAULI_Y)) +
            v * numpy.kron(PAULI_Z, PAULI_Z)) / 4


def spectrum_4x4(rho):
    """Eigenvalues of a Hermitian 4 by 4 matrix in ascending order.

    The matrix is split into the blocks its non-zero entries connect.
    When no block is larger than 2 by 2 the eigenvalues come in closed
    form; otherwise :func:`numpy.linalg.eigvalsh` does the work.

    :param rho: the matrix
    :type rho: :class:`~.pairstate.TwoQubitDensity`, :class:`numpy.ndarray`
    :rtype: :class:`numpy.ndarray`

    """
    matrix = numpy.asarray(rho)
    count, labels = connected_components(csr_matrix(matrix != 0),
                                         directed=False)
    blocks = [numpy.flatnonzero(labels == label) for label in range(count)]
    if max(len(block) for block in blocks) > 2:
        return numpy.linalg.eigvalsh(matrix)
    values = []
    for block in blocks:
        if len(block) == 1:
            values.append(matrix[block[0], block[0]].real)
            continue
        i, j = block
        a, b = matrix[i, i].real, matrix[j, j].real
        radius = math.hypot((a - b) / 2, abs(matrix[i, j]))
        values.extend([(a + b) / 2 - radius, (a + b) / 2 + radius])
    return numpy.sort(values)


def ppt_min_eigenvalue(rho):
    """The lowest eigenvalue of the partial transpose of ``rho``."""
    return float(spectrum_4x4(partial_transpose(rho))[0])


def numeric_trace_norm(corr):
    """The sum of the moduli of the eigenvalues of the explicit matrix
    :math:`\\rho - \\rho^{(1st)}\\otimes\\rho^{(2nd)}`.

    """
    first = (numpy.eye(2) + corr.s * PAULI_Z) / 2
    second = (numpy.eye(2) + corr.t * PAULI_Z) / 2
    delta = pauli_density(corr) - numpy.kron(first, second)
    return float(numpy.abs(spectrum_4x4(delta)).sum())


def random_pure_state(rng):
    """A Haar-random two-qubit state vector.

    :param rng: the random generator
    :type rng: :class:`numpy.random.Generator`
    :rtype: :class:`numpy.ndarray`

    """
    vector = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    return vector / numpy.linalg.norm(vector)


def random_correlations(rng, count, separable=None):
    """Draw valid correlations uniformly from the box
    :math:`[-1, 1]^4` by rejection.

    :param rng: the random generator
    :type rng: :class:`numpy.random.Generator`
    :param count: how many to draw
    :type count: :class:`int`
    :param separable: keep only separable (:const:`True`) or only
                      non-separable (:const:`False`) states.
                      no filter if :const:`None`
    :type separable: :class:`bool`
    :rtype: :class:`list`

    """
    found = []
    while len(found) < count:
        corr = PairCorrelations(*rng.uniform(-1, 1, 4))
        if not validate(corr).valid:
            continue
        elif separable is not None and is_separable(corr) != separable:
            continue
        found.append(corr)
    return found


def _largest_weight(rho, rho_pt, projector, projector_pt):
    def margin(weight):
        rest = 1 - weight
        return min(numpy.linalg.eigvalsh(rho - rest * projector)[0],
                   numpy.linalg.eigvalsh(rho_pt - rest * projector_pt)[0])
    if margin(1.0) >= -FEASIBILITY_TOLERANCE:
        return 1.0
    # the margin is concave in the weight, so its feasible set is an
    # interval whose upper end is bracketed by any feasible point and 1
    best = minimize_scalar(lambda w: -margin(w), bounds=(0.0, 1.0),
                           method='bounded', options={'xatol': 1e-12})
    lo, hi = float(best.x), 1.0
    peak = margin(lo)
    if peak < -FEASIBILITY_TOLERANCE:
        # infeasible for every weight: a negative score that rises
        # towards the feasible candidates
        return peak + FEASIBILITY_TOLERANCE
    while hi - lo > BISECTION_TOLERANCE:
        middle = (lo + hi) / 2
        if margin(middle) >= -FEASIBILITY_TOLERANCE:
            lo = middle
        else:
            hi = middle
    return lo


def _projector(vector):
    return numpy.outer(vector, vector.conj())


def _family_vector(p, sign):
    vector = numpy.zeros(4, dtype=complex)
    vector[1] = math.sqrt((1 + p) / 2)
    vector[2] = sign * math.sqrt((1 - p) / 2)
    return vector


def numeric_ls_search(corr, grid=201, samples=200, rng=None):
    """Search the largest separable weight directly.

    Every candidate pure state :math:`|\\psi\\rangle` gets the largest
    :math:`\\lambda` for which
    :math:`(\\rho - (1-\\lambda)|\\psi\\rangle\\langle\\psi|)/\\lambda` is
    positive and PPT.  The candidates are ``grid`` values of ``p`` inside
    ``(-1, 1)`` for both signs of ``q`` in the pure-part family, refined
    around the best grid point, plus ``samples`` Haar-random pure states.
    A candidate that leaves no feasible weight scores its best (negative)
    margin instead, so the refinement climbs towards feasible members of
    the family even when only a single ``p`` is feasible.

    :param corr: the correlations
    :type corr: :class:`~.pairstate.PairCorrelations`
    :param grid: the number of ``p`` values
    :type grid: :class:`int`
    :param samples: the number of random general pure states
    :type samples: :class:`int`
    :param rng: the random generator.  a generator seeded with 0 is used
                if omitted
    :type rng: :class:`numpy.random.Generator`
    :return: the best weight found
    :rtype: :class:`float`

    """
    logger = logging.getLogger(__name__ + '.numeric_ls_search')
    if rng is None:
        rng = numpy.random.default_rng(0)
    rho = pauli_density(corr)
    rho_pt = numpy.asarray(partial_transpose(rho))

    def weight_of(vector):
        projector = _projector(vector)
        return _largest_weight(rho, rho_pt, projector,
                               numpy.asarray(partial_transpose(projector)))
    best = 0.0
    ps = numpy.linspace(-1, 1, grid + 2)[1:-1]
    for sign in 1, -1:
        def score(p):
            return weight_of(_family_vector(min(max(p, -1.0), 1.0), sign))
        weights = [score(p) for p in ps]
        i = int(numpy.argmax(weights))
        lo = ps[max(i - 1, 0)]
        hi = ps[min(i + 1, len(ps) - 1)]
        refined = minimize_scalar(lambda p: -score(p), bounds=(lo, hi),
                                  method='bounded', options={'xatol': 1e-12})
        # once more within POLISH_WIDTH, in terms of the offset from the
        # refined point
        center = float(refined.x)
        polished = minimize_scalar(lambda d: -score(center + d),
                                   bounds=(-POLISH_WIDTH, POLISH_WIDTH),
                                   method='bounded',
                                   options={'xatol': 1e-15})
        best = max(best, weights[i], -refined.fun, -polished.fun)
    for _ in range(samples):
        best = max(best, weight_of(random_pure_state(rng)))
    logger.debug('%r: searched S=%r', corr, best)
    return best


def verify_correlations(dist, phi, corr=None, grid=101, samples=50):
    """Run the whole cross-check suite at one point: operator traces
    against photon-number sums, the spectral trace norm against its closed
    form, the partial-transpose spectrum against the separability
    criterion, and for non-separable states the searched degree of
    separability against the analytic one.

    :param dist: the field met by the first atom
    :type dist: :class:`~.fock.PhotonDistribution`
    :param phi: Rabi angle in radians
    :type phi: :class:`float`
    :param corr: the correlations to check.  computed with
                 :func:`~.pairstate.correlations` if omitted
    :type corr: :class:`~.pairstate.PairCorrelations`
    :return: the analytic decomposition
    :rtype: :class:`~.lewsan.LsResult`
    :raise OracleMismatchError: when any comparison fails

    """
    logger = logging.getLogger(__name__ + '.verify_correlations')
    if corr is None:
        corr = correlations(dist, phi)
    dense = matrix_correlations(dist, phi)
    for name, fast, slow in zip(corr._fields, corr, dense):
        if abs(fast - slow) > CORRELATION_TOLERANCE:
            raise OracleMismatchError(name, fast, slow)
    _compare('trace_norm', delta_trace_norm(corr), numeric_trace_norm(corr),
             TRACE_NORM_TOLERANCE)
    separable = is_separable(corr)
    lowest = ppt_min_eigenvalue(pauli_density(corr))
    # the PPT eigenvalue is a quarter of the separability residual
    if separable != (lowest >= -BOUNDARY_TOLERANCE / 4):
        raise OracleMismatchError('separable', separable, lowest)
    result = ls_decompose(corr)
    if not separable:
        searched = numeric_ls_search(corr, grid=grid, samples=samples)
        if searched > result.sep_degree + LS_TOLERANCE:
            logger.warning('phi=%r: the search reached S=%r above the '
                           'analytic S=%r', phi, searched, result.sep_degree)
        _compare('sep_degree', result.sep_degree, searched, LS_TOLERANCE)
    logger.debug('phi=%r: %r verified', phi, corr)
    return result


def _compare(name, analytic, numeric, tolerance):
    if abs(analytic - numeric) > tolerance:
        raise OracleMismatchError(name, analytic, numeric)


class OracleMismatchError(ArithmeticError):
    """Exception that rises when a closed form and its brute-force
    counterpart disagree.

    """

    def __init__(self, name, analytic, numeric):
        super(OracleMismatchError, self).__init__(
            '{0}: {1!r} (analytic) != {2!r} (numeric)'.format(name, analytic,
                                                              numeric)
        )
        self.name = name
        self.analytic = analytic
        self.numeric = numeric
