"""q-Gaussian processes: densities, orthogonal polynomials, exact simulation and verification."""

from qproc.density import (
    QuadratureSpec,
    Support,
    cdf_stationary,
    integrate_support,
    pdf_stationary,
    pdf_transition,
    pdf_transition_mehler,
    quantile_stationary,
    support,
)
from qproc.errors import DomainError, UnsupportedDegreeError
from qproc.orthopoly import PolySeq, asc_seq, hermite, hermite_seq, phi, tau
from qproc.process import OUParams, Trajectory, simulate_ou, simulate_ou_paths, simulate_qwiener, simulate_qwiener_paths
from qproc.qseries import QParam, check_q

__version__ = "0.1.0"
