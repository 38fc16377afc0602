from qproc.process.bridge import MAX_BRIDGE_DEGREE, BridgeCoeffs, bridge_coeffs, hermite_bridge_mean
from qproc.process.formulas import (
    harness_mean,
    harness_second,
    harness_var,
    increment_cubic_covariance,
    increment_moments,
    moment_identities,
    ou_bridge_mean,
    ou_bridge_var,
    ou_covariance,
    spectral_density,
    tsp_params,
    tsp_params_jk,
    wiener_covariance,
)
from qproc.process.simulate import (
    OUParams,
    Trajectory,
    make_rng,
    sample_qwiener_backward,
    sample_qwiener_transition,
    sample_stationary,
    sample_transition,
    simulate_ou,
    simulate_ou_paths,
    simulate_qwiener,
    simulate_qwiener_paths,
    worker_count,
)
