"""Asymptotic expansions of exponential integrals with complex analytic phase.

Computes Sum_l c_l lambda^{-(d+l)/2} for integrals of e^{-lambda*phi(x)} A(x)
over boxes (and half-space boundary points) by a constructive Morse-lemma
change of variables, and cross-checks every claim against an adaptive
Gauss-Kronrod quadrature oracle.
"""

from .errors import (AsympintError, BoundaryRegimeError, BranchCutError,
                     BudgetExceededError, DegenerateHessianError, DomainError,
                     NoStationaryPointError, ParseError, SingularPointError)
from .expansion import (CriticalPointReport, Domain, Expansion, assemble,
                        evaluate_partial_sum, expand_at, expand_integral,
                        find_critical_points, higher_order_1d_closed_form)
from .genfun import (CoefficientTable, GenFunProblem, boundary_limit,
                     exact_coefficients, face_scaling_u, saddle_prediction)
from .morse import MorseData, complete_squares
from .multiseries import TruncatedSeries
from .parser import compile_program, parse
from .quadrature import QuadratureResult, decay_slope, integrate

__version__ = "0.1.0"

__all__ = [
    "AsympintError", "BoundaryRegimeError", "BranchCutError",
    "BudgetExceededError", "CoefficientTable", "CriticalPointReport",
    "DegenerateHessianError", "Domain", "DomainError", "Expansion",
    "GenFunProblem", "MorseData", "NoStationaryPointError", "ParseError",
    "QuadratureResult", "SingularPointError", "TruncatedSeries", "assemble",
    "boundary_limit", "compile_program", "complete_squares", "decay_slope",
    "evaluate_partial_sum", "exact_coefficients", "expand_at",
    "expand_integral", "face_scaling_u", "find_critical_points",
    "higher_order_1d_closed_form", "integrate", "parse", "saddle_prediction",
    "__version__",
]
