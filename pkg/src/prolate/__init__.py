"""Prolate spheroidal wave functions at large bandwidth.

Uniform asymptotic approximations for the angular and radial functions
Ps_n^m(x; gamma^2) and the separation constant, with an arbitrary-precision
series oracle to check them against.
"""

from .approx import (Anchoring, EvalResult, Evaluator, MatchingConstants, Regime,
                     RegimePartition, evaluate_angular, evaluate_radial)
from .eigensystem import (ModeIndex, SpectralState, coefficient_table, eigenvalue_oracle,
                          lambda_asymptotic, solve_sigma)
from .errors import (AdmissibilityError, ConvergenceError, DomainError, OverflowRangeError,
                     ProlateError)

__version__ = "0.1.0"

__all__ = [
    "Anchoring", "EvalResult", "Evaluator", "MatchingConstants", "Regime", "RegimePartition",
    "evaluate_angular", "evaluate_radial", "ModeIndex", "SpectralState", "coefficient_table",
    "eigenvalue_oracle", "lambda_asymptotic", "solve_sigma", "AdmissibilityError",
    "ConvergenceError", "DomainError", "OverflowRangeError", "ProlateError",
]
