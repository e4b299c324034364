"""Trajectory container, input signals, simulators, noise, and the tri-modal
Gaussian target."""

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.stats import multivariate_normal, norm

from bwl.dynamics import (FourierInputSpec, TrajectoryData, TrimodalSpec,
                          add_noise, fourier_input, sample_domain,
                          sample_phases, simulate_forced_second_order,
                          simulate_van_der_pol, trimodal_gaussian)


# ---------------------------------------------------------------------------
# TrajectoryData

def test_trajectory_coerces_1d_and_exposes_grid():
    traj = TrajectoryData(t0=1.0, dt=0.5, values=np.array([1.0, 2.0, 3.0]))
    assert traj.values.shape == (3, 1)
    assert traj.n_samples == 3
    assert traj.n_channels == 1
    assert_allclose(traj.times, [1.0, 1.5, 2.0])
    assert_allclose(traj.channel(0), [1.0, 2.0, 3.0])


def test_trajectory_validation():
    with pytest.raises(ValueError, match="dt"):
        TrajectoryData(t0=0.0, dt=0.0, values=np.ones(3))
    with pytest.raises(ValueError, match="finite"):
        TrajectoryData(t0=0.0, dt=0.1, values=np.array([1.0, np.nan]))
    with pytest.raises(ValueError, match="1-D or 2-D"):
        TrajectoryData(t0=0.0, dt=0.1, values=np.ones((2, 2, 2)))


def test_trajectory_csv_round_trip_exact(tmp_path):
    rng = np.random.default_rng(0)
    traj = TrajectoryData(t0=-0.3, dt=0.017,
                          values=rng.standard_normal((40, 3)))
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    back = TrajectoryData.from_csv(path)
    # 17 significant digits round-trip doubles exactly; dt is recovered
    # from adjacent time stamps so it carries one rounding step
    assert np.array_equal(back.values, traj.values)
    assert back.t0 == traj.t0
    assert back.dt == pytest.approx(traj.dt, rel=1e-12)
    header = path.read_text().splitlines()[0]
    assert header == "time,ch0,ch1,ch2"


def test_trajectory_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("stamp,ch0\n0.0,1.0\n0.1,2.0\n")
    with pytest.raises(ValueError, match="time"):
        TrajectoryData.from_csv(path)


# ---------------------------------------------------------------------------
# Fourier input

def test_fourier_zero_phases_starts_at_zero():
    spec = FourierInputSpec(phases=np.zeros(5))
    u = fourier_input(spec, 100, 0.01)
    assert u.channel(0)[0] == 0.0


def test_fourier_quarter_phases_hit_amplitude_sum():
    # all five harmonics at phase pi/2 give sum(sin(pi/2)) / sqrt(5) = sqrt(5)
    spec = FourierInputSpec(phases=np.full(5, np.pi / 2.0))
    u = fourier_input(spec, 10, 0.01)
    assert u.channel(0)[0] == pytest.approx(np.sqrt(5.0))


def test_fourier_is_bounded_and_periodic():
    phases = sample_phases(5, seed=3)
    spec = FourierInputSpec(phases=phases)
    u = fourier_input(spec, 20000, 0.005)
    assert np.abs(u.values).max() <= np.sqrt(5.0) + 1e-12
    # fundamental period 2*pi: u(t + 2*pi) = u(t)
    u0 = fourier_input(spec, 2, 1.4, t0=0.3).channel(0)
    u1 = fourier_input(spec, 2, 1.4, t0=0.3 + 2.0 * np.pi).channel(0)
    assert_allclose(u0, u1, atol=1e-12)


def test_fourier_spec_validation():
    with pytest.raises(ValueError):
        FourierInputSpec(phases=np.zeros(4))  # wrong phase count
    with pytest.raises(ValueError):
        FourierInputSpec(phases=np.zeros(5), omega0=0.0)


def test_sample_phases_deterministic_in_range():
    a = sample_phases(5, seed=11)
    b = sample_phases(5, seed=11)
    assert np.array_equal(a, b)
    assert np.all(a >= 0.0) and np.all(a < 2.0 * np.pi)
    assert not np.array_equal(a, sample_phases(5, seed=12))


# ---------------------------------------------------------------------------
# forced second-order system

def test_second_order_zero_input_stays_at_rest():
    u = TrajectoryData(t0=0.0, dt=0.01, values=np.zeros(200))
    y = simulate_forced_second_order(u)
    assert np.all(y.values == 0.0)


def test_second_order_step_response_dc_gain():
    # y'' + 0.8 y' + 4 y = 1.2 u settles at gain/stiffness = 0.3
    u = TrajectoryData(t0=0.0, dt=0.01, values=np.ones(4001))
    y = simulate_forced_second_order(u)
    assert y.channel(0)[-1] == pytest.approx(0.3, abs=1e-5)


def test_second_order_output_is_causal():
    rng = np.random.default_rng(5)
    vals = rng.standard_normal(300)
    other = vals.copy()
    other[150:] += 4.0
    ya = simulate_forced_second_order(TrajectoryData(t0=0.0, dt=0.02, values=vals))
    yb = simulate_forced_second_order(TrajectoryData(t0=0.0, dt=0.02, values=other))
    assert np.array_equal(ya.values[:151], yb.values[:151])
    assert not np.array_equal(ya.values[151:], yb.values[151:])


def test_second_order_step_halving_convergence():
    # same piecewise-constant forcing on dt and dt/2 grids; RK4 global error
    # is O(dt^4), so halving the step shrinks the difference ~16x
    rng = np.random.default_rng(0)
    vals = rng.standard_normal(200)
    y1 = simulate_forced_second_order(
        TrajectoryData(t0=0.0, dt=0.05, values=vals))
    y2 = simulate_forced_second_order(
        TrajectoryData(t0=0.0, dt=0.025, values=np.repeat(vals, 2)))
    y4 = simulate_forced_second_order(
        TrajectoryData(t0=0.0, dt=0.0125, values=np.repeat(vals, 4)))
    d12 = np.abs(y1.values[:, 0] - y2.values[::2, 0]).max()
    d24 = np.abs(y2.values[:, 0] - y4.values[::2, 0]).max()
    assert 8.0 <= d12 / d24 <= 32.0


def test_second_order_rejects_multichannel_forcing():
    u = TrajectoryData(t0=0.0, dt=0.1, values=np.ones((5, 2)))
    with pytest.raises(ValueError, match="single-channel"):
        simulate_forced_second_order(u)


# ---------------------------------------------------------------------------
# Van der Pol

def test_van_der_pol_reduces_to_harmonic_oscillator():
    # mu = 0 from (1, 0): x = cos t, v = -sin t
    traj = simulate_van_der_pol(0.0, (1.0, 0.0), 6284, 0.001)
    assert np.abs(traj.channel(0) - np.cos(traj.times)).max() <= 1e-10
    assert np.abs(traj.channel(1) + np.sin(traj.times)).max() <= 1e-10


def test_van_der_pol_equilibrium():
    traj = simulate_van_der_pol(2.0, (0.0, 0.0), 100, 0.01)
    assert np.all(traj.values == 0.0)


def test_van_der_pol_limit_cycle_bounded():
    traj = simulate_van_der_pol(2.0, (2.0, 0.0), 4001, 0.01)
    assert np.abs(traj.channel(0)).max() <= 2.5
    # the orbit keeps oscillating (no spurious decay)
    assert np.abs(traj.channel(0)[-400:]).max() >= 1.0


def test_van_der_pol_step_halving_convergence():
    a = simulate_van_der_pol(2.0, (2.0, 0.0), 401, 0.01)
    b = simulate_van_der_pol(2.0, (2.0, 0.0), 801, 0.005)
    c = simulate_van_der_pol(2.0, (2.0, 0.0), 1601, 0.0025)
    dab = np.abs(a.values - b.values[::2]).max()
    dbc = np.abs(b.values - c.values[::2]).max()
    assert 8.0 <= dab / dbc <= 32.0


def test_van_der_pol_validation():
    with pytest.raises(ValueError):
        simulate_van_der_pol(1.0, (1.0, 0.0, 0.0), 10, 0.01)
    with pytest.raises(ValueError):
        simulate_van_der_pol(1.0, (1.0, 0.0), 10, 0.0)


# ---------------------------------------------------------------------------
# noise

def test_add_noise_zero_std_is_identity():
    traj = simulate_van_der_pol(1.0, (1.0, 0.0), 50, 0.01)
    noisy = add_noise(traj, 0.0, seed=4)
    assert np.array_equal(noisy.values, traj.values)


def test_add_noise_deterministic_and_seed_sensitive():
    traj = TrajectoryData(t0=0.0, dt=0.1, values=np.zeros((100, 2)))
    a = add_noise(traj, 0.5, seed=1)
    b = add_noise(traj, 0.5, seed=1)
    c = add_noise(traj, 0.5, seed=2)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_add_noise_empirical_moments():
    traj = TrajectoryData(t0=0.0, dt=0.1, values=np.zeros((100000, 2)))
    noisy = add_noise(traj, 0.25, seed=9)
    assert noisy.values.std() == pytest.approx(0.25, rel=0.02)
    assert abs(noisy.values.mean()) <= 4.0 * 0.25 / np.sqrt(noisy.values.size)
    # per-channel spread matches too
    for ch in range(2):
        assert noisy.channel(ch).std() == pytest.approx(0.25, rel=0.02)


def test_add_noise_rejects_negative_std():
    traj = TrajectoryData(t0=0.0, dt=0.1, values=np.zeros(5))
    with pytest.raises(ValueError):
        add_noise(traj, -0.1, seed=0)


# ---------------------------------------------------------------------------
# tri-modal Gaussian

def test_trimodal_d1_frozen_value_and_oracle():
    spec = TrimodalSpec(dim=1)
    value = trimodal_gaussian(spec, np.array([0.0]))
    assert value == pytest.approx(0.08984966143437789, rel=1e-12)
    oracle = norm.pdf(0.0, 0.0, np.sqrt(20.0)) + 2.0 * norm.pdf(
        15.0, 0.0, np.sqrt(20.0))
    assert value == pytest.approx(oracle, rel=1e-13)


def test_trimodal_matches_scipy_in_higher_dimension():
    spec = TrimodalSpec(dim=3)
    rng = np.random.default_rng(6)
    pts = rng.uniform(-30.0, 30.0, size=(20, 3))
    cov = 20.0 * np.eye(3)
    ref = sum(multivariate_normal(mean=c, cov=cov).pdf(pts)
              for c in spec.centers)
    assert_allclose(trimodal_gaussian(spec, pts), ref, rtol=1e-12)


def test_trimodal_symmetry_and_batch_consistency():
    spec = TrimodalSpec(dim=2)
    rng = np.random.default_rng(7)
    pts = rng.uniform(-30.0, 30.0, size=(15, 2))
    vals = trimodal_gaussian(spec, pts)
    assert_allclose(trimodal_gaussian(spec, -pts), vals, rtol=1e-13)
    for j in range(15):
        assert vals[j] == trimodal_gaussian(spec, pts[j])


def test_trimodal_normalization_d1():
    # three unit-mass modes, slight loss to the domain boundary
    spec = TrimodalSpec(dim=1)
    xs = np.linspace(-30.0, 30.0, 100001)
    integral = np.trapezoid(trimodal_gaussian(spec, xs[:, None]), xs)
    assert abs(integral - 3.0) <= 1e-3


def test_trimodal_validation():
    with pytest.raises(ValueError):
        TrimodalSpec(dim=6)
    spec = TrimodalSpec(dim=2)
    with pytest.raises(ValueError, match="dimension"):
        trimodal_gaussian(spec, np.zeros((3, 3)))


def test_sample_domain_bounds_and_determinism():
    spec = TrimodalSpec(dim=3)
    a = sample_domain(spec, 5000, seed=2)
    b = sample_domain(spec, 5000, seed=2)
    assert np.array_equal(a, b)
    assert a.shape == (5000, 3)
    assert np.all(np.abs(a) <= 30.0)
    # uniform on [-30, 30]: mean 0, std 60/sqrt(12)
    assert abs(a.mean()) <= 4.0 * 60.0 / np.sqrt(12.0 * a.size)
    assert a.std() == pytest.approx(60.0 / np.sqrt(12.0), rel=0.02)
