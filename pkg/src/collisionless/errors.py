"""Exception types shared across the package."""


class CollisionlessError(Exception):
    """Base class for every error raised by this package."""


class InvalidModelError(CollisionlessError, ValueError):
    """A model definition violates a structural invariant or failed to parse."""


class InvalidParameterError(CollisionlessError, ValueError):
    """A numeric argument is outside its allowed range."""


class DegenerateSpectrumError(CollisionlessError):
    """Two eigenvalues coincide within tolerance; the mode analysis is ill-posed."""


class InterlacingError(CollisionlessError):
    """The free and contact spectra do not strictly interlace."""


class ZeroModeError(CollisionlessError):
    """An eigenvalue is numerically zero, which the generic solver does not support."""


class NormalizationError(CollisionlessError):
    """A normal mode has numerically zero amplitude on the contact coordinate."""


class PoleError(CollisionlessError):
    """Evaluation was requested too close to a pole of tan/cot.

    ``distance`` carries the distance to the nearest pole in phase units.
    """

    def __init__(self, message, distance=None):
        super().__init__(message)
        self.distance = distance


class NoRootError(CollisionlessError):
    """A bracketed search found no root in the requested interval."""


class ConvergenceError(CollisionlessError):
    """Iterative refinement failed to converge."""


class NoExistenceError(CollisionlessError):
    """The solution existence condition (largest contact eigenvalue > 0) fails."""


class DegenerateSolutionError(CollisionlessError):
    """The mode-weight linear system is singular at the root."""
