"""Exception types shared across the package."""


class SyncGainError(Exception):
    """Base class for failures raised by this package."""


class HypothesisViolation(SyncGainError, ValueError):
    """An input violates a mathematical hypothesis of the method.

    Examples: a pair (A, B) that is not stabilizable, a disconnected
    coupling matrix, a coupling-strength target larger than the actual
    spectral gap, or a shift with real part below 1. The CLI maps this to
    exit code 2.
    """


class NumericalFailure(SyncGainError, RuntimeError):
    """A numerical routine could not meet its accuracy contract.

    Raised when an eigenvalue iteration fails to converge, a residual
    stays above its tolerance after refinement, or a trajectory leaves
    the range of finite floating-point numbers. The CLI maps this to
    exit code 3.
    """
