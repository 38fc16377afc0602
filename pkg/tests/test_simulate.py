import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from qproc import density
from qproc.errors import DomainError
from qproc.process import simulate
from qproc.process.simulate import OUParams, make_rng


def rng(seed=0):
    return make_rng(seed)


def test_ouparams_validation():
    with pytest.raises(DomainError):
        OUParams(0.5, 0.0)
    with pytest.raises(DomainError):
        OUParams(1.5, 1.0)


def test_make_rng_is_philox_and_passes_generators():
    g = make_rng(3)
    assert isinstance(g.bit_generator, np.random.Philox)
    assert make_rng(g) is g
    assert make_rng(3).random() == make_rng(3).random()


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("QPROC_THREADS", "3")
    assert simulate.worker_count() == 3
    monkeypatch.setenv("QPROC_THREADS", "0")
    assert simulate.worker_count() >= 1
    monkeypatch.setenv("QPROC_THREADS", "x")
    with pytest.raises(DomainError):
        simulate.worker_count()


@pytest.mark.parametrize("q", [-0.9, 0.0, 0.5, 0.9])
def test_stationary_draws_in_support(q):
    x = simulate.sample_stationary(q, rng(1), 20_000)
    assert np.all(np.abs(x) <= 2 / math.sqrt(1 - q))


def test_gaussian_stationary_mean():
    x = simulate.sample_stationary(1.0, rng(2), 1_000_000)
    assert abs(x.mean()) <= 4 / math.sqrt(1e6)


def test_fourth_moment_q_half():
    x = simulate.sample_stationary(0.5, rng(4), 200_000)
    y = x**4
    assert abs(y.mean() - 2.5) <= 4 * y.std() / math.sqrt(y.size)


@pytest.mark.parametrize("q", [-0.9, -0.5, 0.0, 0.5, 0.9])
def test_stationary_ks(q):
    x = simulate.sample_stationary(q, rng(5), 100_000)
    res = stats.kstest(x, lambda s: density.cdf_stationary(s, q))
    assert res.pvalue > 1e-3


def test_scalar_draw():
    assert isinstance(simulate.sample_stationary(0.5, rng(0)), float)
    assert isinstance(simulate.sample_transition(0.1, 0.5, 0.5, rng(0)), float)


def test_transition_rho_zero_is_stationary():
    a = simulate.sample_transition(1.0, 0.0, 0.5, rng(6), 100_000)
    b = simulate.sample_stationary(0.5, rng(7), 100_000)
    assert stats.ks_2samp(a, b).pvalue > 1e-3


def test_transition_rho_near_one_returns_state():
    y = simulate.sample_transition(0.7, 1 - 1e-13, 0.5, rng(0), 5)
    assert np.all(y == 0.7)


def test_transition_outside_support():
    with pytest.raises(DomainError):
        simulate.sample_transition(3.0, 0.5, 0.5, rng(0), 3)


def test_gaussian_transition_moments():
    y = simulate.sample_transition(1.3, 0.6, 1.0, rng(8), 400_000)
    assert abs(y.mean() - 0.78) <= 4 * y.std() / math.sqrt(y.size)
    d2 = (y - y.mean()) ** 2
    assert abs(d2.mean() - 0.64) <= 4 * d2.std() / math.sqrt(y.size)


def test_negative_rho_symmetry():
    # law at (y, -rho) is the law at (-y, rho), and the mirror image of the law at (y, rho)
    a = simulate.sample_transition(0.8, -0.6, 0.5, rng(9), 100_000)
    b = -simulate.sample_transition(0.8, 0.6, 0.5, rng(10), 100_000)
    assert stats.ks_2samp(a, b).pvalue > 1e-3
    assert abs(a.mean() + 0.48) <= 4 * a.std() / math.sqrt(a.size)


@pytest.mark.parametrize("q", [-0.9, 0.3, 0.9])
def test_transition_ks_against_quadrature(q):
    c = 2 / math.sqrt(1 - q)
    y, rho = 0.37 * c, 0.75
    x = simulate.sample_transition(y, rho, q, rng(12), 50_000)
    spec = density.QuadratureSpec(scheme="adaptive", abs_tol=1e-11)
    for level in np.linspace(-0.8 * c, 0.8 * c, 5):
        ref = density.integrate_support(lambda s: density.pdf_transition(s, y, rho, q) * (s <= level), q, spec)
        assert abs(np.mean(x <= level) - ref) <= 4 * math.sqrt(max(ref * (1 - ref), 1e-12) / x.size) + 1e-6


def test_simulate_ou_single_point():
    tr = simulate.simulate_ou(OUParams(0.5, 1.0), [0.0], 3)
    assert len(tr) == 1 and tr.seed == 3 and tr.kind == "ou"


def test_simulate_ou_rejects_bad_times():
    with pytest.raises(DomainError):
        simulate.simulate_ou(OUParams(0.5, 1.0), [0.0, 1.0, 0.5], 0)
    with pytest.raises(DomainError):
        simulate.simulate_ou(OUParams(0.5, 1.0), [0.0, np.nan], 0)


def test_trajectory_validation():
    with pytest.raises(ValueError):
        simulate.Trajectory([0.0, 1.0], [0.0], 1)
    with pytest.raises(ValueError):
        simulate.Trajectory([0.0], [0.0], 1, kind="bm")


def test_large_lag_decorrelates():
    paths = simulate.simulate_ou_paths(OUParams(0.5, 1.0), [0.0, 50.0], 100_000, seed=1)
    prod = paths[:, 0] * paths[:, 1]
    assert abs(prod.mean()) <= 4 * prod.std() / math.sqrt(prod.size)


def test_paths_deterministic_across_threads():
    times = np.linspace(0, 2, 5)
    a = simulate.simulate_ou_paths(OUParams(0.3, 1.0), times, 9000, seed=5, threads=1)
    b = simulate.simulate_ou_paths(OUParams(0.3, 1.0), times, 9000, seed=5, threads=4)
    assert np.array_equal(a, b)
    c = simulate.simulate_qwiener_paths(0.3, times, 9000, seed=5, threads=1)
    d = simulate.simulate_qwiener_paths(0.3, times, 9000, seed=5, threads=3)
    assert np.array_equal(c, d)


def test_paths_differ_across_seeds():
    times = [0.0, 1.0]
    a = simulate.simulate_ou_paths(OUParams(0.3, 1.0), times, 10, seed=1)
    b = simulate.simulate_ou_paths(OUParams(0.3, 1.0), times, 10, seed=2)
    assert not np.array_equal(a, b)


def test_ou_start_state():
    paths = simulate.simulate_ou_paths(OUParams(0.5, 1.0), [0.0, 0.5], 50, seed=1, start=0.4)
    assert np.all(paths[:, 0] == 0.4)


def test_qwiener_at_zero():
    tr = simulate.simulate_qwiener(0.5, [0.0], 1)
    assert tr.values[0] == 0.0
    paths = simulate.simulate_qwiener_paths(0.5, [0.0, 1.0], 20, seed=1)
    assert np.all(paths[:, 0] == 0.0)


def test_qwiener_negative_time():
    with pytest.raises(DomainError):
        simulate.simulate_qwiener(0.5, [-1.0, 1.0], 1)


def test_qwiener_support_scales_with_time():
    q = 0.5
    times = np.array([0.25, 1.0, 4.0])
    paths = simulate.simulate_qwiener_paths(q, times, 5000, seed=2)
    assert np.all(np.abs(paths) <= 2 * np.sqrt(times) / math.sqrt(1 - q) * (1 + 1e-12))


def test_qwiener_conditioned_start():
    paths = simulate.simulate_qwiener_paths(0.0, [2.0], 100_000, seed=3, start=(1.0, 0.5))
    x = paths[:, 0]
    assert abs(x.mean() - 0.5) <= 4 * x.std() / math.sqrt(x.size)
    with pytest.raises(DomainError):
        simulate.simulate_qwiener_paths(0.0, [0.5], 10, seed=3, start=(1.0, 0.5))


def test_backward_transition_mean():
    # E(X_sigma | X_tau) = (sigma / tau) X_tau
    x = simulate.sample_qwiener_backward(1.2, 1.0, 2.0, 0.5, rng(4), 100_000)
    assert abs(x.mean() - 0.6) <= 4 * x.std() / math.sqrt(x.size)


@settings(max_examples=20)
@given(st.one_of(st.floats(-0.9, 0.99), st.just(1.0)), st.integers(0, 2**31))
def test_transition_stays_in_support(q, seed):
    c = 3.0 if q == 1.0 else 2 / math.sqrt(1 - q)
    y = simulate.sample_transition(0.5 * c, 0.7, q, rng(seed), 500)
    if q < 1:
        assert np.all(np.abs(y) <= c)
    assert np.all(np.isfinite(y))
