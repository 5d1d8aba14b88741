"""Exception types shared across the package."""


class ComputationError(Exception):
    """A numerical step could not produce a trustworthy result."""


class NotPositiveDefiniteError(ComputationError):
    """A matrix required to be positive definite is not.

    ``pivot_index`` is the 0-based index of the Cholesky pivot that failed.
    """

    def __init__(self, message, pivot_index=None):
        super().__init__(message)
        self.pivot_index = pivot_index


class SingularSystemError(ComputationError):
    """A linear system is singular within the pivot tolerance."""


class InconsistentConstraintsError(ComputationError):
    """Equality constraints Ax = b admit no solution."""


class GameFormatError(ValueError):
    """A game or weight file does not follow the documented schema."""


class StationaryPointWarning(UserWarning):
    """A stationary point was returned without a positive-definiteness certificate."""
