"""Exception and warning types shared across the package."""


class PickPeakError(Exception):
    """Base class for all package-specific errors."""


class ExpressionError(PickPeakError):
    """Invalid expression construction: bad parameter or failed certificate."""


class DomainViolationError(PickPeakError):
    """Evaluation point lies outside the closed unit disc."""


class DegenerateExpressionError(PickPeakError):
    """A certified-nonvanishing denominator collapsed during evaluation."""


class RangeViolationError(ExpressionError):
    """Child of a principal-power node leaves the disc {|w - 1/2| <= 1/2}."""


class ComputationError(PickPeakError):
    """A numerical kernel (eigensolver) failed."""


class UnsolvableError(PickPeakError):
    """Interpolation data admits no solution in the closed unit ball."""

    def __init__(self, depth: int, message: str):
        super().__init__(f"{message} (recursion depth {depth})")
        self.depth = depth


class InfeasiblePickError(PickPeakError):
    """Combined problem rejected: the Pick matrix is not positive semidefinite."""

    def __init__(self, matrix, verdict):
        super().__init__(
            f"Pick matrix verdict {verdict.kind!r}, "
            f"min eigenvalue {verdict.min_eigenvalue:.6g}"
        )
        self.matrix = matrix
        self.verdict = verdict


class SearchExhaustedError(PickPeakError):
    """A doubling search hit its cap without certifying its target."""

    def __init__(self, search: str, cap: int):
        super().__init__(f"{search}: doubling search exhausted at cap {cap}")
        self.search = search
        self.cap = cap


class DegenerateSeparatorError(PickPeakError):
    """Separator normalization constant is numerically zero."""


class PreconditionError(PickPeakError):
    """A documented operation precondition was violated by the caller."""


class CertificationFailedError(PickPeakError):
    """A solution was constructed but its final certificates missed their bounds.

    Carries the offending solution and certificate so callers can inspect or
    re-certify instead of losing the artifact.
    """

    def __init__(self, message: str, solution=None, certificate=None, residuals=None):
        super().__init__(message)
        self.solution = solution
        self.certificate = certificate
        self.residuals = residuals


class SchemaError(PickPeakError):
    """Problem document violates the input schema."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class IllConditionedWarning(UserWarning):
    """Interpolation on many clustered nodes may lose accuracy."""


class BudgetExhaustedWarning(UserWarning):
    """Randomized search budget ran out; the reported value is best-effort."""
