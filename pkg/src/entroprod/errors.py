"""Exception types shared across the package."""


class EntroprodError(Exception):
    """Base class for all package errors."""


class ConstraintViolation(EntroprodError, ValueError):
    """State parameters violate the legitimacy constraints."""


class NonPhysical(EntroprodError, ValueError):
    """A matrix is not the covariance matrix of a bona fide quantum state."""


class NumericalFailure(EntroprodError, RuntimeError):
    """An eigenvalue or linear-algebra routine did not converge."""


class DomainError(EntroprodError, ValueError):
    """Argument outside of the mathematical domain of an operation."""


class ConvergenceError(EntroprodError, RuntimeError):
    """Adaptive quadrature failed to reach its tolerance."""


class RangeError(EntroprodError, ValueError):
    """Requested time lies outside the tabulated range."""


class StabilityError(EntroprodError, RuntimeError):
    """Numerical integration blew past the overflow guard."""


class DegenerateError(EntroprodError, ValueError):
    """Steady state undefined because the dissipation rate vanishes."""


class SingularityError(EntroprodError, ValueError):
    """Entropy-rate formula evaluated where the diffusion matrix is singular."""


class GridError(EntroprodError, ValueError):
    """A time grid is too short or malformed for the requested operation."""


class TailError(EntroprodError, ValueError):
    """Integrated entropy production requested on a trace whose tail has not decayed."""


class ConfigError(EntroprodError, ValueError):
    """Run configuration failed schema validation."""
