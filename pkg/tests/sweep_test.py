import math
import os.path

import numpy
from numpy.testing import assert_allclose
from pytest import fixture, mark, raises

from maserpairs.fock import MaserParams, TruncationOverflow, steady_state
from maserpairs.pairstate import PairCorrelations, correlations, validate
from maserpairs.sweep import (CSV_FIELDS, Peak, PeakReport, PointAnalysis,
                              SweepConfig, SweepOutputError, SweepRecord,
                              analyze_point, emit_csv, emit_plot_data,
                              evaluate_point, find_peaks, read_csv,
                              run_sweep, verify_point)


CSV_HEADER = ('theta_over_pi,phi_over_pi,s,t,u,v,trace_norm,deg_corr,'
              'separable,sep_degree,one_minus_S,p,nbar,n_max')


@fixture
def fx_config():
    return SweepConfig(nex=1, nu=0, theta_min=0.5, theta_max=1.0, steps=21)


@fixture
def fx_records(fx_config):
    return run_sweep(fx_config)


def make_record(phi_over_pi, one_minus_s):
    return SweepRecord(
        theta_over_pi=phi_over_pi, phi_over_pi=phi_over_pi,
        s=0.0, t=0.0, u=0.0, v=0.0, trace_norm=0.0, deg_corr=0.0,
        separable=int(one_minus_s == 0), sep_degree=1 - one_minus_s,
        one_minus_S=one_minus_s, p=0.0, nbar=0.0, n_max=0
    )


def test_sweep_config_defaults():
    config = SweepConfig(nex=1, nu=0)
    assert config.theta_min == 0
    assert config.theta_max == 5
    assert config.steps == 2000
    assert config.trunc.tail_eps == 1e-12
    assert config.trunc.n_cap == 10000
    assert config.verify_every == 50
    assert config.jobs == 1
    grid = config.grid
    assert len(grid) == 2000
    assert grid[0] == 0 and grid[-1] == 5


@mark.parametrize('kwargs', [
    {'nex': 0, 'nu': 0},
    {'nex': 1, 'nu': 0, 'theta_min': -1},
    {'nex': 1, 'nu': 0, 'theta_min': 2, 'theta_max': 1},
    {'nex': 1, 'nu': 0, 'steps': 1},
    {'nex': 1, 'nu': 0, 'jobs': 0},
    {'nex': 1, 'nu': 0, 'tail_eps': 2},
])
def test_sweep_config_value_error(kwargs):
    with raises(ValueError):
        SweepConfig(**kwargs)


def test_sweep_config_type_error():
    with raises(TypeError):
        SweepConfig(nex=1, nu=0, steps=10.0)


def test_sweep_config_params_at():
    config = SweepConfig(nex=4, nu=0.1)
    params = config.params_at(1.0)
    assert params == MaserParams(4, 0.1, math.pi / 2)
    assert abs(params.theta - math.pi) < 1e-15


def test_evaluate_point():
    params = MaserParams(1, 0, 0.708 * math.pi)
    record = evaluate_point(params)
    assert isinstance(record, SweepRecord)
    assert abs(record.theta_over_pi - 0.708) < 1e-15
    assert abs(record.phi_over_pi - 0.708) < 1e-15
    assert record.separable == 0
    assert record.sep_degree < 1
    assert record.one_minus_S == 1 - record.sep_degree
    assert validate(PairCorrelations(record.s, record.t, record.u,
                                     record.v)).valid
    assert record.n_max > 0
    assert record.nbar > 0


def test_analyze_point():
    params = MaserParams(1, 0, 0.708 * math.pi)
    analysis = analyze_point(params)
    assert isinstance(analysis, PointAnalysis)
    assert analysis.params == params
    assert analysis.distribution == steady_state(params)
    assert analysis.correlations == correlations(analysis.distribution,
                                                 params.phi)
    assert analysis.to_record() == evaluate_point(params)
    assert analysis.to_record(0.5).theta_over_pi == 0.5


def test_evaluate_point_thermal():
    record = evaluate_point(MaserParams(1, 0.2, 0.0))
    assert record.separable == 1
    assert record.sep_degree == 1
    assert record.one_minus_S == 0
    assert abs(record.nbar - 0.2) < 1e-10
    assert record.trace_norm < 1e-12


def test_run_sweep(fx_config, fx_records):
    assert len(fx_records) == 21
    thetas = [record.theta_over_pi for record in fx_records]
    assert thetas == sorted(thetas)
    assert_allclose(thetas, numpy.linspace(0.5, 1.0, 21))
    for record in fx_records:
        assert (record.separable == 1) == (record.sep_degree == 1)
        corr = PairCorrelations(record.s, record.t, record.u, record.v)
        assert validate(corr).valid


def test_run_sweep_deterministic(fx_config, fx_records):
    assert run_sweep(fx_config) == fx_records


def test_run_sweep_parallel(fx_records):
    config = SweepConfig(nex=1, nu=0, theta_min=0.5, theta_max=1.0, steps=21,
                         jobs=2)
    assert run_sweep(config) == fx_records


def test_run_sweep_starts_at_zero():
    records = run_sweep(SweepConfig(nex=1, nu=0, theta_max=0.1, steps=3))
    assert records[0].theta_over_pi == 0
    assert records[0].separable == 1
    assert records[0].n_max == 0


def test_run_sweep_through_trapping_angle():
    # theta/pi = 1 puts phi * sqrt(2) on pi for nex=2
    records = run_sweep(SweepConfig(nex=2, nu=0, theta_min=0.9,
                                    theta_max=1.1, steps=3))
    assert len(records) == 3
    assert records[1].n_max == 1
    assert records[1].separable == 0


def test_run_sweep_verify():
    config = SweepConfig(nex=1, nu=0, theta_min=0.6, theta_max=0.8, steps=5,
                         verify=True, verify_every=2)
    assert len(run_sweep(config)) == 5


def test_run_sweep_overflow():
    config = SweepConfig(nex=5000, nu=0, theta_min=1.0, theta_max=1.5,
                         steps=3, n_cap=50)
    with raises(TruncationOverflow) as e:
        run_sweep(config)
    assert e.value.theta_over_pi == 1.0
    assert e.value.n_cap == 50


def test_run_sweep_overflow_parallel():
    config = SweepConfig(nex=5000, nu=0, theta_min=1.0, theta_max=1.5,
                         steps=3, n_cap=50, jobs=2)
    with raises(TruncationOverflow) as e:
        run_sweep(config)
    assert e.value.theta_over_pi == 1.0


def test_verify_point():
    result = verify_point(MaserParams(1, 0, 1.414 * math.pi))
    assert not result.separable


def test_find_peaks_monotone():
    records = [make_record(x, x / 10) for x in numpy.linspace(0, 1, 11)]
    assert find_peaks(records) == PeakReport()


def test_find_peaks_parabola():
    xs = numpy.linspace(0, 1, 21)
    records = [make_record(x, 0.5 - 2 * (x - 0.4321) ** 2) for x in xs]
    peaks = find_peaks(records)
    assert len(peaks) == 1
    peak, = peaks
    assert isinstance(peak, Peak)
    assert abs(peak.phi_over_pi - 0.4321) < 1e-12
    assert abs(peak.value - 0.5) < 1e-12
    assert peaks.highest == peak


def test_find_peaks_several():
    xs = numpy.linspace(0, 4, 401)
    records = [make_record(x, abs(math.sin(math.pi * x)) / 2) for x in xs]
    peaks = find_peaks(records)
    assert_allclose([peak.phi_over_pi for peak in peaks],
                    [0.5, 1.5, 2.5, 3.5], atol=1e-3)
    assert all(abs(peak.value - 0.5) < 1e-4 for peak in peaks)


def test_find_peaks_refined(fx_config, fx_records):
    peak = find_peaks(fx_records, fx_config).highest
    # the cusp sits where phi * sqrt(2) = pi
    assert abs(peak.phi_over_pi - 1 / math.sqrt(2)) < 1e-5
    assert peak.value >= max(r.one_minus_S for r in fx_records)


def test_find_peaks_resolution(fx_config, fx_records):
    peak = find_peaks(fx_records, fx_config, resolution=0.002).highest
    assert peak.phi_over_pi == 0.708
    assert abs(peak.value - 0.5245) < 2e-3


@mark.parametrize(('config', 'resolution'), [(None, 0.002), (True, 0),
                                             (True, -0.1)])
def test_find_peaks_resolution_error(fx_config, config, resolution):
    with raises(ValueError):
        find_peaks([], fx_config if config else None, resolution)


def test_peak_report():
    report = PeakReport([(1.5, 0.2), (0.5, 0.3)])
    assert list(report) == [Peak(0.5, 0.3), Peak(1.5, 0.2)]
    assert report.highest == Peak(0.5, 0.3)
    assert PeakReport().highest is None


def test_sweep_record_row():
    record = make_record(0.1, 0.25)
    row = record.to_row()
    assert row[0] == '0.10000000000000001'
    assert row[CSV_FIELDS.index('separable')] == '0'
    assert SweepRecord.from_row(row) == record
    with raises(ValueError):
        SweepRecord.from_row(row[:-1])


def test_emit_csv_single(tmpdir):
    path = str(tmpdir.join('one.csv'))
    emit_csv([make_record(0.25, 0.5)], path)
    with open(path, newline='') as f:
        content = f.read()
    lines = content.split('\n')
    assert len(lines) == 3 and lines[-1] == ''
    assert lines[0] == CSV_HEADER
    assert lines[1].startswith('0.25,0.25,0,0,0,0,0,0,0,0.5,0.5,0,0,0')


def test_emit_csv_round_trip(tmpdir, fx_records):
    path = str(tmpdir.join('sweep.csv'))
    emit_csv(fx_records, path)
    assert read_csv(path) == fx_records


def test_emit_csv_byte_identical(tmpdir, fx_config, fx_records):
    first = tmpdir.join('first.csv')
    second = tmpdir.join('second.csv')
    emit_csv(fx_records, str(first))
    emit_csv(run_sweep(fx_config), str(second))
    assert first.read_binary() == second.read_binary()


def test_emit_csv_stdout(capsys):
    emit_csv([make_record(0.25, 0.5)], '-')
    out, _ = capsys.readouterr()
    assert out.startswith(CSV_HEADER + '\n')


def test_emit_csv_error(tmpdir):
    path = os.path.join(str(tmpdir), 'missing', 'sweep.csv')
    with raises(SweepOutputError) as e:
        emit_csv([make_record(0.25, 0.5)], path)
    assert e.value.path == path
    assert isinstance(e.value, OSError)
    assert path in str(e.value)


def test_emit_plot_data(tmpdir, fx_records):
    path = tmpdir.join('plot.dat')
    emit_plot_data(fx_records, str(path))
    blocks = path.read().split('\n\n\n')
    assert len(blocks) == 2
    trace_norm = numpy.loadtxt(blocks[0].splitlines())
    dark_area = numpy.loadtxt(blocks[1].splitlines())
    assert trace_norm.shape == dark_area.shape == (21, 2)
    assert_allclose(trace_norm[:, 1], [r.trace_norm for r in fx_records])
    assert_allclose(dark_area[:, 1], [r.one_minus_S for r in fx_records])


def test_emit_plot_data_error(tmpdir):
    path = os.path.join(str(tmpdir), 'missing', 'plot.dat')
    with raises(SweepOutputError):
        emit_plot_data([make_record(0.25, 0.5)], path)
