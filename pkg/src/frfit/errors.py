"""Exception and warning types shared across the package."""


class FrfitError(Exception):
    """Base class for all package-specific errors."""


class DomainError(FrfitError, ValueError):
    """An evaluation point lies outside the kernel's domain of validity."""


class DuplicateFrequencyError(FrfitError, ValueError):
    """A training set contains repeated frequencies."""

    def __init__(self, indices):
        self.indices = list(indices)
        super().__init__(f"duplicate training frequencies at indices {self.indices}")


class SymmetryViolationError(FrfitError, ValueError):
    """Training data are inconsistent with Hermitian symmetry f(-iw) = conj(f(iw))."""

    def __init__(self, indices, message):
        self.indices = list(indices)
        super().__init__(message)


class SingularSystemError(FrfitError, RuntimeError):
    """A linear system is numerically singular beyond the documented fallback."""


class SingularCovarianceError(SingularSystemError):
    """The augmented covariance matrix collapsed entirely."""


class OptimizationFailedError(FrfitError, RuntimeError):
    """No start of the hyperparameter search produced a finite objective."""


class FoldFailedError(FrfitError, RuntimeError):
    """A leave-one-out fold could not be fitted."""

    def __init__(self, index, cause):
        self.index = index
        super().__init__(f"leave-one-out fold {index} failed: {cause}")


class EvaluationAtPoleError(FrfitError, ValueError):
    """A benchmark function was evaluated at (or too close to) one of its poles."""


class NotUnderdampedError(FrfitError, ValueError):
    """A circuit branch violates the underdamped condition (R/2)*sqrt(C/L) < 1."""

    def __init__(self, branch):
        self.branch = branch
        super().__init__(f"circuit branch {branch} is not underdamped")


class IllConditionedWarning(UserWarning):
    """The assembled kernel system has an estimated condition number above 1e12."""


class DegenerateLambdaWarning(UserWarning):
    """The K=0 instability term vanished; the stabilization weight is set to 0."""


class BoundsEnlargedWarning(UserWarning):
    """Optimization bounds were enlarged to contain a warm start's poles."""
