"""Radiation-pressure optical bistability in a cavity with one moving mirror."""

from .params import DerivedParams, SystemParams, derive, thermal_scaling
from .steady import (RootSet, Stability, StateEquation, TurningPoints,
                     bistability_threshold, classify_stability, residual,
                     solve_steady_states, turning_points)

__all__ = [
    "DerivedParams", "SystemParams", "derive", "thermal_scaling",
    "RootSet", "Stability", "StateEquation", "TurningPoints",
    "bistability_threshold", "classify_stability", "residual",
    "solve_steady_states", "turning_points",
]
