"""Strong Cesaro-type means of Fourier series measured against Orlicz-type
pointwise characteristics."""

from .nfunction import ComplementaryPair, NFunction, check_conditions, get_pair
from .fourier import PeriodicFunction, coefficients, get_function, partial_sum
from .characteristics import g_p_psi, g_ps, m_of_x, w_p, w_psi
from .strongmeans import psi_domain_chain, strong_mean, theorem_rhs
from .harness import ExperimentConfig, emit_csv, pair_check, run_sweep

__version__ = "0.1.0"

__all__ = [
    "ComplementaryPair", "NFunction", "check_conditions", "get_pair",
    "PeriodicFunction", "coefficients", "get_function", "partial_sum",
    "g_p_psi", "g_ps", "m_of_x", "w_p", "w_psi",
    "psi_domain_chain", "strong_mean", "theorem_rhs",
    "ExperimentConfig", "emit_csv", "pair_check", "run_sweep",
]
