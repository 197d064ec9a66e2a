"""Exception types shared across the package."""


class CherenkovError(Exception):
    """Base class for all package errors."""


class NoCherenkov(CherenkovError, ValueError):
    """The Cherenkov condition beta * n > 1 is not met."""


class OutOfRange(CherenkovError, ValueError):
    """A frequency lies outside a tabulated refractive-index model."""


class DomainError(CherenkovError, ValueError):
    """An inverse trigonometric argument left its domain."""


class DegenerateGeometry(CherenkovError, ValueError):
    """The electron and photon velocities are collinear."""


class InvalidTriangle(CherenkovError, ValueError):
    """Transverse momenta do not close a triangle."""


class ZeroAmplitude(CherenkovError, ValueError):
    """The emission amplitude vanishes, so its phase is undefined."""


class StencilInvalid(CherenkovError, ValueError):
    """No finite-difference stencil stays inside the valid region."""


class InconsistentGradient(CherenkovError, ValueError):
    """Step-halving estimates of a phase gradient disagree."""


class QuadratureNotConverged(CherenkovError, RuntimeError):
    """The time integral did not reach the requested tolerance."""


class ParaxialViolation(CherenkovError, ValueError):
    """The emission angle is below the small-angle guard."""


class ConfigError(CherenkovError, ValueError):
    """A scenario configuration failed validation.

    ``fields`` lists the offending configuration keys.
    """

    def __init__(self, message, fields=()):
        super().__init__(message)
        self.fields = tuple(fields)
