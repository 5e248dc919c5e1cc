"""Decoder-provided pilots for channel estimation over time-varying fading links."""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("decpilot")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .errors import ConfigError, DecPilotError, EstimationError, ParameterDomainError, ShapeError

__all__ = ["ConfigError", "DecPilotError", "EstimationError", "ParameterDomainError", "ShapeError", "__version__"]
