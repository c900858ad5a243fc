"""Simulated quantum phase estimation: parallel (separable and entangled) and
sequential strategies, their precision bounds, and Monte Carlo checks that
the bounds are attained."""

from .errors import MetrologyError
from .genspec import Generator, extremal_superposition, ghz_state, delta_h, preset
from .protocols import (
    DigitEngine,
    EstimationResult,
    GhzPath,
    OperatingPoint,
    Protocol,
    StrategyConfig,
    run,
)

__all__ = [
    "MetrologyError",
    "Generator",
    "extremal_superposition",
    "ghz_state",
    "delta_h",
    "preset",
    "DigitEngine",
    "EstimationResult",
    "GhzPath",
    "OperatingPoint",
    "Protocol",
    "StrategyConfig",
    "run",
]
