"""Exception types shared across the package."""


class AsympintError(Exception):
    """Base class for domain errors raised by this package."""


class ParseError(AsympintError):
    def __init__(self, message, position):
        super().__init__(f"{message} (offset {position})")
        self.position = position


class SingularPointError(AsympintError):
    """Evaluation or expansion hit a branch point / division by zero."""


class DegenerateHessianError(AsympintError):
    """Hessian singular at a stationary point (quadratic degeneracy)."""


class BranchCutError(AsympintError):
    """An eigenvalue sits on the closed negative real axis, where the
    principal square root (and hence the orientation rule) is undefined."""


class NoStationaryPointError(AsympintError):
    """No admissible stationary point found on the domain."""


class DomainError(AsympintError):
    """Unsupported integration domain configuration (e.g. corner point)."""


class BoundaryRegimeError(AsympintError):
    """Direction parameter sits on or outside the open interval between
    the two derivative rates: the interior saddle formula does not
    apply, use the boundary (Gaussian) limit instead."""


class BudgetExceededError(AsympintError):
    """Quadrature evaluation budget exhausted before reaching tolerance."""
