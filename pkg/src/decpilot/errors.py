"""Exception types shared across the simulator."""


class DecPilotError(Exception):
    """Base class for all simulator errors."""


class ParameterDomainError(DecPilotError, ValueError):
    """A numeric parameter lies outside its valid domain."""


class ShapeError(DecPilotError, ValueError):
    """An input vector has the wrong length or shape."""


class EstimationError(DecPilotError, ArithmeticError):
    """Channel estimation failed (degenerate pilot, singular system)."""


class ConfigError(DecPilotError, ValueError):
    """An experiment configuration is inconsistent or incomplete."""
