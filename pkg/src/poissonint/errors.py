"""Exception types shared across the package."""


class PoissonIntError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(PoissonIntError):
    """Raised on malformed expression text.

    Parameters
    ----------
    message : str
        Human-readable description.
    position : int
        1-based character offset of the offending token.
    """

    def __init__(self, message, position):
        super().__init__(f"{message} (offset {position})")
        self.position = position


class DomainError(PoissonIntError):
    """Raised when an elementary function is evaluated outside its domain."""


class UsageError(PoissonIntError):
    """Raised on structurally invalid arguments (shape or order mismatch)."""


class ConfigError(PoissonIntError):
    """Raised on an invalid run configuration."""


class NewtonDiverged(PoissonIntError):
    """Raised when the implicit step solver fails to converge.

    Attributes
    ----------
    iterations : int
        Iterations performed before giving up.
    residual : float
        Last residual max-norm, or nan if the iterate left the domain.
    """

    def __init__(self, message, iterations=0, residual=float("nan")):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class NumericalFailure(PoissonIntError):
    """Raised by the harness when a run aborts mid-trajectory.

    Attributes
    ----------
    step_index : int
        Index of the step that failed (0-based).
    """

    def __init__(self, message, step_index):
        super().__init__(f"{message} (step {step_index})")
        self.step_index = step_index
