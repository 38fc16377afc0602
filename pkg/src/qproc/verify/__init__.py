from qproc.verify.checks import (
    MCConfig,
    check_bridges,
    check_chapman_kolmogorov,
    check_formulas,
    check_guards,
    check_martingales,
    check_moments_and_covariances,
    check_orthogonality,
)
from qproc.verify.report import Report, derive_seed, reports_to_json, summary_table
from qproc.verify.suite import SUITES, SuiteConfig, coverage_map, run_suite
