""":mod:`maserpairs.fock` --- Photon-number space of the cavity field
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

The maser field stays diagonal in the photon-number basis under every map
used in this package, so a field state is just the list of photon-number
probabilities :math:`p_0, \\ldots, p_{n_{max}}`, truncated where the omitted
tail is negligible.

A resonant Jaynes--Cummings passage of an excited atom acts on the field
through the two operators

.. math::

   C|n\\rangle = \\cos(\\varphi\\sqrt{n+1})|n\\rangle, \\qquad
   S|n\\rangle = \\sin(\\varphi\\sqrt{n+1})|n+1\\rangle

"""
import logging
import math
import numbers

import numpy

__all__ = ('DEFAULT_N_CAP', 'DEFAULT_TAIL_EPS', 'TRAPPING_TOLERANCE',
           'MaserParams', 'PhotonDistribution', 'TruncationError',
           'TruncationOverflow', 'TruncationPolicy',
           'apply_atom_passage', 'mandel_q', 'mean_photon',
           'photon_variance', 'rabi_angles', 'rabi_coefficients',
           'steady_state', 'thermal_distribution')


#: (:class:`float`) Default relative bound on the omitted tail mass.
DEFAULT_TAIL_EPS = 1e-12

#: (:class:`int`) Default hard maximum photon number.
DEFAULT_N_CAP = 10000

#: (:class:`float`) Relative distance to a multiple of :math:`\pi` under
#: which a Rabi angle counts as a trapping angle.
TRAPPING_TOLERANCE = 1e-14


def _finite_non_negative(name, value):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise TypeError('{0} must be a real number, not {1!r}'.format(
            name, value
        ))
    value = float(value)
    if not math.isfinite(value) or value < 0:
        raise ValueError('{0} must be a finite non-negative number, not '
                         '{1!r}'.format(name, value))
    return value


class MaserParams(object):
    """The physical knobs of a one-atom maser.

    :param nex: the pump rate, i.e. the mean number of atoms traversing
                the resonator in one photon lifetime
    :type nex: :class:`float`
    :param nu: the number of thermal photons
    :type nu: :class:`float`
    :param phi: the accumulated Rabi angle in radians
    :type phi: :class:`float`

    """

    #: (:class:`float`) Pump rate :math:`N_{ex}`.
    nex = None

    #: (:class:`float`) Thermal photon number :math:`\nu`.
    nu = None

    #: (:class:`float`) Accumulated Rabi angle :math:`\varphi`.
    phi = None

    def __init__(self, nex, nu, phi):
        self.nex = _finite_non_negative('nex', nex)
        self.nu = _finite_non_negative('nu', nu)
        self.phi = _finite_non_negative('phi', phi)

    @property
    def theta(self):
        """(:class:`float`) The pump parameter :math:`\\varphi\\sqrt{N_{ex}}`
        in radians.

        """
        return self.phi * math.sqrt(self.nex)

    def __eq__(self, other):
        return (isinstance(other, type(self)) and
                (self.nex, self.nu, self.phi) ==
                (other.nex, other.nu, other.phi))

    def __ne__(self, other):
        return not (self == other)

    def __hash__(self):
        return hash((self.nex, self.nu, self.phi))

    def __repr__(self):
        return '{0.__module__}.{0.__name__}(nex={1!r}, nu={2!r}, ' \
               'phi={3!r})'.format(type(self), self.nex, self.nu, self.phi)


class TruncationPolicy(object):
    """Where to cut the photon-number ladder off.

    :param tail_eps: the bound on the omitted probability mass, relative
                     to the accumulated mass.  it has to be in ``(0, 1)``
    :type tail_eps: :class:`float`
    :param n_cap: the hard maximum photon number
    :type n_cap: :class:`int`

    """

    def __init__(self, tail_eps=DEFAULT_TAIL_EPS, n_cap=DEFAULT_N_CAP):
        if not isinstance(tail_eps, numbers.Real):
            raise TypeError('tail_eps must be a real number, not ' +
                            repr(tail_eps))
        elif not 0 < tail_eps < 1:
            raise ValueError('tail_eps must be in (0, 1), not ' +
                             repr(tail_eps))
        if isinstance(n_cap, bool) or not isinstance(n_cap, numbers.Integral):
            raise TypeError('n_cap must be an integer, not ' + repr(n_cap))
        elif n_cap < 1:
            raise ValueError('n_cap must be at least 1, not ' + repr(n_cap))
        self.tail_eps = float(tail_eps)
        self.n_cap = int(n_cap)

    def __eq__(self, other):
        return (isinstance(other, type(self)) and
                self.tail_eps == other.tail_eps and
                self.n_cap == other.n_cap)

    def __ne__(self, other):
        return not (self == other)

    def __hash__(self):
        return hash((self.tail_eps, self.n_cap))

    def __repr__(self):
        return '{0.__module__}.{0.__name__}(tail_eps={1!r}, ' \
               'n_cap={2!r})'.format(type(self), self.tail_eps, self.n_cap)


class PhotonDistribution(object):
    """Diagonal state of the cavity field, truncated at :attr:`n_max`.

    It behaves as a read-only sequence of probabilities and converts to
    a :mod:`numpy` array with :func:`numpy.asarray`.

    :param probs: the probabilities :math:`p_0, \\ldots, p_{n_{max}}`
    :type probs: :class:`collections.abc.Sequence`
    :param tail_bound: an upper bound on the omitted probability mass
    :type tail_bound: :class:`float`

    """

    #: (:class:`numpy.ndarray`) Read-only array of photon-number
    #: probabilities.
    probs = None

    #: (:class:`float`) Upper bound on the probability mass above
    #: :attr:`n_max`.
    tail_bound = None

    @classmethod
    def vacuum(cls):
        """The empty cavity."""
        return cls([1.0])

    def __init__(self, probs, tail_bound=0.0):
        probs = numpy.array(probs, dtype=float)
        if probs.ndim != 1 or not probs.size:
            raise ValueError('probs must be a non-empty one-dimensional '
                             'sequence')
        elif not numpy.isfinite(probs).all() or (probs < 0).any():
            raise ValueError('probs must be finite and non-negative')
        probs.setflags(write=False)
        self.probs = probs
        self.tail_bound = _finite_non_negative('tail_bound', tail_bound)

    @property
    def n_max(self):
        """(:class:`int`) The largest photon number kept."""
        return len(self.probs) - 1

    @property
    def total(self):
        """(:class:`float`) The kept probability mass."""
        return math.fsum(self.probs)

    def __len__(self):
        return len(self.probs)

    def __iter__(self):
        return iter(self.probs.tolist())

    def __getitem__(self, n):
        return self.probs[n]

    def __array__(self, dtype=None, copy=None):
        if copy:
            return numpy.array(self.probs, dtype=dtype)
        return numpy.asarray(self.probs, dtype=dtype)

    def __eq__(self, other):
        return (isinstance(other, type(self)) and
                numpy.array_equal(self.probs, other.probs) and
                self.tail_bound == other.tail_bound)

    def __ne__(self, other):
        return not (self == other)

    __hash__ = None

    def __repr__(self):
        return '{0.__module__}.{0.__name__}({1!r}, tail_bound={2!r})'.format(
            type(self), self.probs.tolist(), self.tail_bound
        )


def rabi_coefficients(n, phi):
    """The diagonal action of the passage operators on :math:`|n\\rangle`:
    ``C|n> = c|n>`` and ``S|n> = s|n+1>``.

    >>> rabi_coefficients(0, 0.0)
    (1.0, 0.0)

    :param n: photon number
    :type n: :class:`int`
    :param phi: Rabi angle in radians
    :type phi: :class:`float`
    :return: the pair ``(c, s)``
    :rtype: :class:`tuple`

    """
    angle = phi * math.sqrt(n + 1)
    return math.cos(angle), math.sin(angle)


def rabi_angles(count, phi, offset=0):
    """Vectorised Rabi angles :math:`\\varphi\\sqrt{n+1}` for
    ``n = offset, ..., offset + count - 1``.

    """
    return phi * numpy.sqrt(numpy.arange(offset + 1, offset + count + 1))


def _sin_squared(angle):
    turns = round(angle / math.pi)
    if turns and abs(angle - turns * math.pi) <= TRAPPING_TOLERANCE * angle:
        return 0.0
    return math.sin(angle) ** 2


def thermal_distribution(nu, trunc=None):
    """The geometric distribution of a field in thermal equilibrium with
    ``nu`` mean photons.  It is also the steady state for :math:`\\varphi=0`.

    :param nu: the mean thermal photon number
    :type nu: :class:`float`
    :param trunc: the truncation policy.  the default policy is used
                  if omitted
    :type trunc: :class:`TruncationPolicy`
    :return: the normalized distribution
    :rtype: :class:`PhotonDistribution`
    :raise TruncationOverflow: when the tail bound needs more than
                               ``trunc.n_cap`` photons

    """
    if trunc is None:
        trunc = TruncationPolicy()
    nu = _finite_non_negative('nu', nu)
    return _thermal(nu, trunc, MaserParams(0, nu, 0))


def _thermal(nu, trunc, params):
    ratio = nu / (nu + 1.0)
    if ratio == 0.0:
        return PhotonDistribution.vacuum()
    # the omitted mass beyond n_max is exactly ratio ** (n_max + 1)
    n_max = max(0, int(math.ceil(math.log(trunc.tail_eps) /
                                 math.log(ratio))) - 1)
    while ratio ** (n_max + 1) >= trunc.tail_eps:
        n_max += 1
    while n_max > 0 and ratio ** n_max < trunc.tail_eps:
        n_max -= 1
    if n_max > trunc.n_cap:
        raise TruncationOverflow(
            params, trunc.n_cap,
            'thermal distribution with nu={0!r} needs {1} photons, more '
            'than n_cap={2}'.format(nu, n_max, trunc.n_cap)
        )
    probs = (1.0 - ratio) * ratio ** numpy.arange(n_max + 1)
    probs /= math.fsum(probs)
    return PhotonDistribution(probs, ratio ** (n_max + 1))


def steady_state(params, trunc=None):
    """The photon-number distribution of the maser field in the steady
    state, i.e. the normalized product

    .. math::

       p_n \\propto \\prod_{k=1}^{n}\\left[\\frac{\\nu}{\\nu+1}
       + \\frac{N_{ex}}{\\nu+1}\\frac{\\sin^2(\\varphi\\sqrt{k})}{k}\\right]

    The product is accumulated in the log domain and stops at the smallest
    ``n`` where a geometric bound on the remaining tail drops below
    ``trunc.tail_eps`` times the accumulated mass, or where a factor is
    exactly zero (a trapping state of a cold cavity).

    :param params: the maser parameters
    :type params: :class:`MaserParams`
    :param trunc: the truncation policy.  the default policy is used
                  if omitted
    :type trunc: :class:`TruncationPolicy`
    :return: the normalized distribution
    :rtype: :class:`PhotonDistribution`
    :raise TruncationOverflow: when ``trunc.n_cap`` is reached before
                               the tail bound is met

    """
    logger = logging.getLogger(__name__ + '.steady_state')
    if not isinstance(params, MaserParams):
        raise TypeError('params must be {0.__module__}.{0.__name__}, not '
                        '{1!r}'.format(MaserParams, params))
    if trunc is None:
        trunc = TruncationPolicy()
    if params.phi == 0:
        return _thermal(params.nu, trunc, params)
    background = params.nu / (params.nu + 1.0)
    pump = params.nex / (params.nu + 1.0)
    log_eps = math.log(trunc.tail_eps)
    log_terms = [0.0]
    log_total = 0.0
    tail_bound = 0.0
    n = 0
    while True:
        # every later factor is bounded by this since sin^2 <= 1
        ratio = background + pump / (n + 1)
        if ratio == 0.0:
            break
        elif ratio < 1.0:
            log_tail = log_terms[-1] + math.log(ratio / (1.0 - ratio))
            if log_tail < log_eps + log_total:
                tail_bound = math.exp(log_tail - log_total)
                break
        if n >= trunc.n_cap:
            raise TruncationOverflow(
                params, trunc.n_cap,
                'the steady state of {0!r} has not converged within '
                'n_cap={1} photons'.format(params, trunc.n_cap)
            )
        k = n + 1
        factor = background + \
            pump * _sin_squared(params.phi * math.sqrt(k)) / k
        if factor == 0.0:
            logger.debug('%r: trapped at n=%d', params, n)
            break
        log_terms.append(log_terms[-1] + math.log(factor))
        log_total = float(numpy.logaddexp(log_total, log_terms[-1]))
        n = k
    logs = numpy.array(log_terms)
    probs = numpy.exp(logs - logs.max())
    probs /= math.fsum(probs)
    logger.debug('%r: n_max=%d, tail_bound=%.3g', params, n, tail_bound)
    return PhotonDistribution(probs, tail_bound)


def apply_atom_passage(dist, phi):
    """The field left behind by one excited atom, i.e. the diagonal of
    :math:`C\\rho C + S\\rho S^\\dagger`:

    .. math::

       p'_n = \\cos^2(\\varphi\\sqrt{n+1})\\,p_n
              + \\sin^2(\\varphi\\sqrt{n})\\,p_{n-1}

    The result has one more photon level than ``dist``.

    :param dist: the field before the atom
    :type dist: :class:`PhotonDistribution`
    :param phi: Rabi angle in radians
    :type phi: :class:`float`
    :return: the field after the atom
    :rtype: :class:`PhotonDistribution`

    """
    probs = numpy.asarray(dist)
    angles = rabi_angles(len(probs) + 1, phi)
    stay = numpy.cos(angles) ** 2
    emit = numpy.sin(rabi_angles(len(probs) + 1, phi, offset=-1)) ** 2
    after = (stay * numpy.append(probs, 0.0) +
             emit * numpy.insert(probs, 0, 0.0))
    return PhotonDistribution(after, dist.tail_bound)


def mean_photon(dist):
    """The mean photon number :math:`\\sum_n n p_n`."""
    probs = numpy.asarray(dist)
    return float(numpy.dot(numpy.arange(len(probs)), probs))


def photon_variance(dist):
    """The photon-number variance."""
    probs = numpy.asarray(dist)
    n = numpy.arange(len(probs))
    mean = numpy.dot(n, probs)
    return float(numpy.dot((n - mean) ** 2, probs))


def mandel_q(dist):
    """Mandel's :math:`Q = (\\mathrm{Var}\\,n - \\bar n)/\\bar n`, negative
    for sub-Poissonian fields.  The vacuum gets 0.

    """
    mean = mean_photon(dist)
    if mean == 0:
        return 0.0
    return (photon_variance(dist) - mean) / mean


class TruncationError(Exception):
    """Exception related to the truncation of the photon-number ladder."""


class TruncationOverflow(TruncationError, ArithmeticError):
    """Exception that rises when the hard photon-number cap is reached
    before the tail bound is met.

    """

    #: (:class:`MaserParams`) The parameters that overflowed.
    params = None

    #: (:class:`int`) The cap that was reached.
    n_cap = None

    #: (:class:`float`) The pump parameter in units of :math:`\pi`, when
    #: the overflow happened during a sweep.  Might be :const:`None`.
    theta_over_pi = None

    def __init__(self, params, n_cap, *args, **kwargs):
        super(TruncationOverflow, self).__init__(*args, **kwargs)
        self.params = params
        self.n_cap = n_cap

    def __reduce__(self):
        return type(self), (self.params, self.n_cap) + self.args, \
            self.__dict__
