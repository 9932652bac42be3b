"""Exceptions raised by so3-consensus."""


class RotationAverageError(ValueError):
    """Base class for all so3-consensus errors."""


class InvalidRotationError(RotationAverageError):
    """Input matrix is not a proper rotation within tolerance."""


class NonUnitQuaternionError(RotationAverageError):
    """Quaternion norm deviates from 1 beyond tolerance."""


class DegenerateProjectionError(RotationAverageError):
    """Nearest rotation to a matrix is not unique."""


class SizeMismatchError(RotationAverageError):
    """Population and weight vector have different lengths."""


class InvalidWeightsError(RotationAverageError):
    """Weights are negative, non-finite or all zero."""


class NoConvergenceError(RotationAverageError):
    """Iterative mean did not reach its tolerance."""

    def __init__(self, message: str, iterations: int, residual: float):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class DatasetParseError(RotationAverageError):
    """Dataset file has a malformed record or mixed arity."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
