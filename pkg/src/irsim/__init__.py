"""Behavioral simulator for a 555-timer based infrared anti-collision device."""

from irsim.errors import (
    InfeasibleTargetError,
    InsufficientHeadroomError,
    InvalidConfigError,
    InvalidPathError,
    InvalidStimulusError,
    IrsimError,
    ScenarioConfigError,
)

__version__ = "0.1.0"

__all__ = [
    "InfeasibleTargetError",
    "InsufficientHeadroomError",
    "InvalidConfigError",
    "InvalidPathError",
    "InvalidStimulusError",
    "IrsimError",
    "ScenarioConfigError",
    "__version__",
]
