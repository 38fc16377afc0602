"""Suite runner: a grid of independent check jobs, run in parallel, sorted by check_id."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from qproc.errors import DomainError
from qproc.process.simulate import worker_count
from qproc.verify import checks
from qproc.verify.report import summary_table

__all__ = ["SuiteConfig", "SUITES", "build_jobs", "run_suite", "coverage_map", "COVERAGE"]


@dataclass(frozen=True)
class SuiteConfig:
    qs: tuple
    alphas: tuple
    mc: checks.MCConfig
    n_max: int = 8
    ck_pairs: tuple = ((0.7, 0.5), (0.4, 0.8), (0.0, 0.6), (0.6, 0.0))


SUITES = {
    "default": SuiteConfig(
        qs=(-0.9, -0.5, 0.0, 0.5, 0.9, 1.0),
        alphas=(0.5, 1.0),
        mc=checks.MCConfig(n_paths=100_000),
    ),
    "quick": SuiteConfig(
        qs=(0.0, 0.5, 1.0),
        alphas=(1.0,),
        mc=checks.MCConfig(n_paths=20_000),
        n_max=4,
        ck_pairs=((0.7, 0.5),),
    ),
}

# public operations and the check families exercising them
COVERAGE = {
    "qseries.q_number": ("qseries.pochhammer_factorial", "orthogonality.hermite"),
    "qseries.q_factorial": ("qseries.pochhammer_factorial", "orthogonality.hermite", "spectral.total_power"),
    "qseries.q_binomial": ("qseries.binomial_ratio", "bridge.ou_hermite"),
    "qseries.pochhammer": ("qseries.pochhammer_factorial", "orthogonality.asc"),
    "qseries.pochhammer_inf": ("qseries.pochhammer_inf", "density.normalization_stationary"),
    "qseries.check_q": ("guard.q_above_one",),
    "orthopoly.hermite_seq": ("orthogonality.hermite", "orthopoly.closed_forms", "propagation.hermite"),
    "orthopoly.asc_seq": ("orthogonality.asc", "orthopoly.tau_series"),
    "orthopoly.phi": ("orthopoly.phi_series", "martingale.ou_exponential", "guard.phi_domain"),
    "orthopoly.tau": ("orthopoly.tau_series",),
    "orthopoly.hermite_bound": ("orthopoly.hermite_bound",),
    "density.pdf_stationary": ("density.normalization_stationary", "density.semicircle", "density.gaussian",
                               "orthogonality.hermite"),
    "density.pdf_transition": ("density.normalization_transition", "chapman_kolmogorov", "orthogonality.asc",
                               "propagation.hermite"),
    "density.pdf_transition_mehler": ("density.mehler",),
    "density.cdf_stationary": ("density.semicircle_cdf", "density.quantile_roundtrip"),
    "density.quantile_stationary": ("density.quantile_roundtrip",),
    "process.sample_stationary": ("moments.fourth", "martingale.ou_hermite_stationary"),
    "process.sample_transition": ("martingale.ou_hermite", "moments.transition_var"),
    "process.simulate_ou_paths": ("moments.square_square", "covariance.ou_lag"),
    "process.simulate_qwiener_paths": ("covariance.qwiener", "selfsimilarity", "qwiener.clock_invariance"),
    "process.sample_qwiener_transition": ("martingale.qwiener_forward", "increments.moments"),
    "process.sample_qwiener_backward": ("martingale.qwiener_reverse",),
    "process.ou_covariance": ("covariance.ou_lag",),
    "process.wiener_covariance": ("covariance.qwiener",),
    "process.increment_moments": ("increments.moments",),
    "process.increment_cubic_covariance": ("increments.covariance",),
    "process.harness_mean": ("bridge.qwiener_mean",),
    "process.harness_second": ("bridge.qwiener_second",),
    "process.harness_var": ("bridge.qwiener_var", "bridge.brownian_var"),
    "process.ou_bridge_mean": ("bridge.ou_mean",),
    "process.ou_bridge_var": ("bridge.ou_var", "bridge.var_algebraic"),
    "process.bridge_coeffs": ("bridge.ou_hermite", "bridge.hermite_table", "bridge.linear_algebraic",
                              "guard.bridge_degree"),
    "process.hermite_bridge_mean": ("bridge.ou_hermite", "bridge.ou_mc_mean_pooled"),
    "process.spectral_density": ("spectral.total_power",),
    "process.tsp_params": ("regression.tsp_second", "regression.tsp_consistency"),
    "process.tsp_params_jk": ("regression.tsp_second_jk", "regression.tsp_identity"),
    "process.moment_identities": ("moments.fourth", "moments.square_square", "moments.square_cross"),
}


def build_jobs(config: SuiteConfig, seed: int):
    mc = replace(config.mc, seed=int(seed))
    jobs = [("guards", checks.check_guards)]
    for q in config.qs:
        jobs.append((f"orthogonality q={q}", lambda q=q: checks.check_orthogonality(q, config.n_max)))
        jobs.append((f"formulas q={q}", lambda q=q: checks.check_formulas(q, config.alphas)))
        for r1, r2 in config.ck_pairs:
            jobs.append((f"ck q={q}", lambda q=q, r1=r1, r2=r2: checks.check_chapman_kolmogorov(q, r1, r2)))
        for i, a in enumerate(config.alphas):
            first = i == 0
            jobs.append((f"martingales q={q} alpha={a}",
                         lambda q=q, a=a, f=first: checks.check_martingales(q, a, mc, include_qwiener=f)))
            jobs.append((f"bridges q={q} alpha={a}",
                         lambda q=q, a=a, f=first: checks.check_bridges(q, a, mc, include_qwiener=f)))
            jobs.append((f"moments q={q} alpha={a}",
                         lambda q=q, a=a, f=first: checks.check_moments_and_covariances(q, a, mc,
                                                                                    include_qwiener=f)))
    return jobs


def coverage_map(reports):
    """For each public operation, the check families present in ``reports`` that exercise it."""
    families = {r.check_id.split("/", 1)[0] for r in reports}
    return {op: sorted(f for f in fams if f in families) for op, fams in sorted(COVERAGE.items())}


def run_suite(name: str = "default", seed: int = 1, threads: int | None = None):
    """Run a named suite; returns Reports sorted by check_id.

    Each check draws from seeds derived from (seed, check_id), so results do not
    depend on scheduling or on the worker count.
    """
    if name not in SUITES:
        raise DomainError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    jobs = build_jobs(SUITES[name], seed)
    workers = min(worker_count(threads), len(jobs))
    if workers <= 1:
        parts = [job() for _, job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda j: j[1](), jobs))
    reports = sorted((r for part in parts for r in part), key=lambda r: r.check_id)
    ids = [r.check_id for r in reports]
    if len(set(ids)) != len(ids):
        raise RuntimeError("duplicate check ids in suite")
    return reports


def summarize(reports) -> str:
    return summary_table(reports)
