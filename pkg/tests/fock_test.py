import math
import pickle

import numpy
from numpy.testing import assert_allclose
from pytest import fixture, mark, raises

from maserpairs.fock import (MaserParams, PhotonDistribution,
                             TruncationOverflow, TruncationPolicy,
                             apply_atom_passage, mandel_q, mean_photon,
                             photon_variance, rabi_angles, rabi_coefficients,
                             steady_state, thermal_distribution)


@fixture
def fx_peak_params():
    return MaserParams(1, 0, 0.708 * math.pi)


def test_maser_params():
    params = MaserParams(4, 0.5, math.pi / 2)
    assert params.nex == 4.0
    assert params.nu == 0.5
    assert params.theta == math.pi
    assert params == MaserParams(4.0, 0.5, math.pi / 2)
    assert params != MaserParams(4.0, 0.5, math.pi)
    assert hash(params) == hash(MaserParams(4.0, 0.5, math.pi / 2))
    assert repr(params) == \
        'maserpairs.fock.MaserParams(nex=4.0, nu=0.5, phi={0!r})'.format(
            math.pi / 2
        )


@mark.parametrize('kwargs', [
    {'nex': -1, 'nu': 0, 'phi': 1},
    {'nex': 1, 'nu': -0.1, 'phi': 1},
    {'nex': 1, 'nu': 0, 'phi': float('nan')},
    {'nex': float('inf'), 'nu': 0, 'phi': 1},
])
def test_maser_params_value_error(kwargs):
    with raises(ValueError):
        MaserParams(**kwargs)


@mark.parametrize('kwargs', [
    {'nex': '1', 'nu': 0, 'phi': 1},
    {'nex': 1, 'nu': None, 'phi': 1},
    {'nex': 1, 'nu': 0, 'phi': True},
])
def test_maser_params_type_error(kwargs):
    with raises(TypeError):
        MaserParams(**kwargs)


def test_truncation_policy():
    trunc = TruncationPolicy()
    assert trunc.tail_eps == 1e-12
    assert trunc.n_cap == 10000
    assert trunc == TruncationPolicy(1e-12, 10000)
    with raises(ValueError):
        TruncationPolicy(0)
    with raises(ValueError):
        TruncationPolicy(1e-12, 0)
    with raises(TypeError):
        TruncationPolicy(1e-12, 10.5)


def test_photon_distribution():
    dist = PhotonDistribution([0.25, 0.75], tail_bound=1e-13)
    assert dist.n_max == 1
    assert len(dist) == 2
    assert list(dist) == [0.25, 0.75]
    assert dist[1] == 0.75
    assert dist.total == 1.0
    assert dist == PhotonDistribution([0.25, 0.75], tail_bound=1e-13)
    assert dist != PhotonDistribution([0.25, 0.75])
    with raises(ValueError):
        numpy.asarray(dist)[0] = 1.0
    assert PhotonDistribution.vacuum().n_max == 0
    with raises(ValueError):
        PhotonDistribution([])
    with raises(ValueError):
        PhotonDistribution([1.5, -0.5])


@mark.parametrize(('n', 'phi', 'expected'), [
    (0, 0.0, (1.0, 0.0)),
    (0, math.pi / 2, (0.0, 1.0)),
    (1, math.pi / 2, (-0.60569, 0.79570)),
])
def test_rabi_coefficients(n, phi, expected):
    c, s = rabi_coefficients(n, phi)
    assert_allclose((c, s), expected, atol=1e-5)
    assert abs(c * c + s * s - 1) < 1e-15


def test_rabi_angles():
    assert_allclose(rabi_angles(3, 2.0), 2 * numpy.sqrt([1, 2, 3]))
    assert_allclose(rabi_angles(2, 1.0, offset=-1), [0.0, 1.0])


def test_thermal_distribution():
    dist = thermal_distribution(0.2)
    n = numpy.arange(len(dist))
    assert_allclose(dist, (1 / 1.2) * (0.2 / 1.2) ** n, rtol=0, atol=1e-12)
    assert abs(dist[0] - 5 / 6) < 1e-12
    assert abs(dist.total - 1) < 1e-12
    assert dist.tail_bound < 1e-12
    assert thermal_distribution(0) == PhotonDistribution.vacuum()


def test_thermal_distribution_overflow():
    with raises(TruncationOverflow) as e:
        thermal_distribution(100, TruncationPolicy(n_cap=50))
    assert e.value.n_cap == 50


def test_steady_state_trapping():
    dist = steady_state(MaserParams(1, 0, math.pi))
    assert list(dist) == [1.0]
    assert dist.tail_bound == 0.0


def test_thermal_overflow_keeps_params():
    params = MaserParams(3, 100, 0.0)
    with raises(TruncationOverflow) as e:
        steady_state(params, TruncationPolicy(n_cap=50))
    assert e.value.params == params


@mark.parametrize('phi', [math.pi / math.sqrt(2), 5 * math.pi / math.sqrt(2)])
def test_steady_state_trapping_second_level(phi):
    # the cold cavity cannot climb past one photon when phi * sqrt(2) is a
    # multiple of pi
    dist = steady_state(MaserParams(1, 0, phi))
    weight = math.sin(phi) ** 2
    assert len(dist) == 2
    assert dist.tail_bound == 0.0
    assert_allclose(dist, [1 / (1 + weight), weight / (1 + weight)],
                    rtol=0, atol=1e-14)


@mark.parametrize('nex', [0.5, 1, 7])
def test_steady_state_thermal_limit(nex):
    dist = steady_state(MaserParams(nex, 0.2, 0.0))
    n = numpy.arange(len(dist))
    assert_allclose(dist, (0.2 / 1.2) ** n / 1.2, rtol=0, atol=1e-12)


def test_steady_state_small_phi():
    # the factor tends to the thermal ratio when phi vanishes
    dist = steady_state(MaserParams(1, 0.2, 1e-9))
    n = numpy.arange(len(dist))
    assert_allclose(dist, (0.2 / 1.2) ** n / 1.2, rtol=0, atol=1e-12)


def test_steady_state_recursion(fx_peak_params):
    dist = steady_state(fx_peak_params)
    probs = numpy.asarray(dist)
    k = numpy.arange(1, len(probs))
    factors = numpy.sin(fx_peak_params.phi * numpy.sqrt(k)) ** 2 / k
    assert_allclose(probs[1:], probs[:-1] * factors, rtol=1e-12, atol=1e-300)
    assert abs(dist.total - 1) < 1e-12
    assert dist.tail_bound < 1e-12


@mark.parametrize(('nex', 'nu', 'phi'), [
    (1, 0, 0.3), (3, 0.2, 1.0), (10, 1, 2.5), (200, 0, 0.1),
])
def test_steady_state_normalized(nex, nu, phi):
    dist = steady_state(MaserParams(nex, nu, phi))
    assert abs(dist.total - 1) < 1e-12
    assert (numpy.asarray(dist) >= 0).all()


def test_steady_state_large_pump():
    # the linear product would overflow long before the peak
    dist = steady_state(MaserParams(5000, 0, 0.05))
    assert abs(dist.total - 1) < 1e-12
    assert numpy.isfinite(numpy.asarray(dist)).all()
    assert mean_photon(dist) > 100


def test_steady_state_overflow():
    params = MaserParams(5000, 0, 0.05)
    with raises(TruncationOverflow) as e:
        steady_state(params, TruncationPolicy(n_cap=100))
    assert e.value.params == params
    assert e.value.n_cap == 100
    assert e.value.theta_over_pi is None


def test_truncation_overflow_pickle():
    error = TruncationOverflow(MaserParams(1, 0, 1), 10, 'message')
    error.theta_over_pi = 0.5
    copied = pickle.loads(pickle.dumps(error))
    assert copied.params == error.params
    assert copied.n_cap == 10
    assert copied.theta_over_pi == 0.5
    assert str(copied) == 'message'


def test_steady_state_type_error():
    with raises(TypeError):
        steady_state((1, 0, 1))


def test_apply_atom_passage_vacuum():
    phi = 0.4
    after = apply_atom_passage(PhotonDistribution.vacuum(), phi)
    assert_allclose(after, [math.cos(phi) ** 2, math.sin(phi) ** 2])
    emitted = apply_atom_passage(PhotonDistribution.vacuum(), math.pi / 2)
    assert_allclose(emitted, [0, 1], atol=1e-16)


def test_apply_atom_passage_conserves():
    dist = steady_state(MaserParams(3, 0.5, 1.0))
    after = apply_atom_passage(dist, 1.0)
    assert len(after) == len(dist) + 1
    assert abs(after.total - dist.total) < 1e-14
    assert after.tail_bound == dist.tail_bound


def test_apply_atom_passage_steady_state_matches_dense():
    phi = 1.0
    dist = steady_state(MaserParams(1, 0, phi))
    dimension = len(dist) + 1
    angles = phi * numpy.sqrt(numpy.arange(1, dimension + 1))
    c = numpy.diag(numpy.cos(angles))
    s = numpy.diag(numpy.sin(angles[:-1]), k=-1)
    rho = numpy.zeros((dimension, dimension))
    rho[:len(dist), :len(dist)] = numpy.diag(dist)
    dense = numpy.diag(c @ rho @ c + s @ rho @ s.T)
    assert_allclose(apply_atom_passage(dist, phi), dense, rtol=0, atol=1e-12)


def test_mean_photon():
    assert mean_photon(PhotonDistribution.vacuum()) == 0
    assert mean_photon(PhotonDistribution([0, 1])) == 1
    assert abs(mean_photon(thermal_distribution(0.2)) - 0.2) < 1e-10


def test_photon_variance_and_mandel_q():
    thermal = thermal_distribution(0.2)
    # thermal light is super-Poissonian with Q = nu
    assert abs(photon_variance(thermal) - 0.2 * 1.2) < 1e-9
    assert abs(mandel_q(thermal) - 0.2) < 1e-9
    assert photon_variance(PhotonDistribution([0, 1])) == 0
    assert mandel_q(PhotonDistribution([0, 1])) == -1
    assert mandel_q(PhotonDistribution.vacuum()) == 0
