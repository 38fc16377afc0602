import math

import pytest

from qproc.errors import DomainError
from qproc.verify import checks, suite


def _failures(reports):
    return [(r.check_id, r.statistic, r.target, r.tolerance) for r in reports if not r.passed]


@pytest.mark.parametrize("q", [-0.5, 0.0, 0.9, 1.0])
def test_orthogonality_checks_pass(q):
    reps = checks.check_orthogonality(q, n_max=6)
    assert reps and not _failures(reps)


@pytest.mark.parametrize("q", [-0.9, 0.5, 1.0])
def test_chapman_kolmogorov_pass(q):
    reps = checks.check_chapman_kolmogorov(q, 0.6, 0.5)
    assert len(reps) == 9 and not _failures(reps)


@pytest.mark.parametrize("q", [0.0, 0.5, 1.0])
def test_formula_checks_pass(q):
    assert not _failures(checks.check_formulas(q))


def test_guards_pass():
    reps = checks.check_guards()
    assert [r.check_id for r in reps] == ["guard.q_above_one", "guard.phi_domain", "guard.bridge_degree"]
    assert all(r.passed for r in reps)


def test_mc_config_guards():
    with pytest.raises(DomainError):
        checks.MCConfig(n_paths=100)
    with pytest.raises(DomainError):
        checks.MCConfig(degrees=(5,))


def test_default_points_inside_support():
    for q in (-0.9, 0.0, 0.9):
        c = 2 / math.sqrt(1 - q)
        assert all(abs(x) < c and abs(z) < c for x, z in checks.default_points(q))


def test_mc_checks_pass_small():
    cfg = checks.MCConfig(n_paths=20_000, seed=3)
    reps = checks.check_martingales(0.5, 1.0, cfg) + checks.check_moments_and_covariances(0.5, 1.0, cfg)
    assert all(r.seed is not None for r in reps if r.tolerance_kind == "standard-error-multiple")
    assert not _failures(reps)


@pytest.fixture(scope="module")
def quick_reports():
    return suite.run_suite("quick", seed=5, threads=1)


def test_quick_suite_passes(quick_reports):
    assert not _failures(quick_reports)
    ids = [r.check_id for r in quick_reports]
    assert ids == sorted(ids) and len(set(ids)) == len(ids)


def test_quick_suite_thread_independent(quick_reports):
    assert suite.run_suite("quick", seed=5, threads=3) == quick_reports


def test_coverage_has_no_gaps(quick_reports):
    cov = suite.coverage_map(quick_reports)
    assert set(cov) == set(suite.COVERAGE)
    assert [k for k, v in cov.items() if not v] == []


def test_unknown_suite():
    with pytest.raises(DomainError):
        suite.run_suite("nope")
