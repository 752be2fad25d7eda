"""Exception hierarchy shared across the library."""


class SlitchainError(Exception):
    """Base class for all library errors."""


class OrderError(SlitchainError):
    """A truncation order / index is out of the computable range."""


class NumericDomainError(SlitchainError):
    """Inputs left the numerical domain of validity of a formal identity."""


class PreconditionError(SlitchainError):
    """A documented operation precondition was violated."""


class IntegrationError(SlitchainError):
    """Adaptive ODE integration failed (step underflow, too many steps)."""


class StepError(SlitchainError):
    """A kinetic step violated its stability/consistency bound."""


class ShockError(SlitchainError):
    """Characteristics crossed: the requested field is multivalued."""

    def __init__(self, message, s_cross=None, x_cross=None):
        super().__init__(message)
        self.s_cross = s_cross
        self.x_cross = x_cross


class DegeneracyError(SlitchainError):
    """Characteristic velocities (or commuting speeds) collided."""


class SingularityError(SlitchainError):
    """A trajectory approached a pole of the defining ODE."""


class BlowUpError(SlitchainError):
    """Field magnitude exceeded the blow-up threshold during evolution."""


class ConfigError(SlitchainError):
    """Invalid or unknown entry in a run configuration."""
