"""Minimum-error discrimination of symmetric mixed quantum states."""

__version__ = "0.1.0"

from .cxmat import hermitian_eig, is_psd  # noqa: E402
from .gallery import build_ex1, build_ex2, build_ex3  # noqa: E402
from .optmeas import (CANONICAL, OptimalityReport, Pom, build_phi,  # noqa: E402
                      build_phi2, build_pom, error_probability, solve)
from .oracle import ansatz_search, bloch_search, certify, simulate  # noqa: E402
from .symstates import (DirectSumProblem, SymmetricFamily,  # noqa: E402
                        generate_states, make_family, random_family)

__all__ = [
    "CANONICAL", "DirectSumProblem", "OptimalityReport", "Pom", "SymmetricFamily",
    "ansatz_search", "bloch_search", "build_ex1", "build_ex2", "build_ex3",
    "build_phi", "build_phi2", "build_pom", "certify", "error_probability",
    "generate_states", "hermitian_eig", "is_psd", "make_family", "random_family",
    "simulate", "solve",
]
