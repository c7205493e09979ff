"""Physical parameters and the effective constants derived from them.

All frequencies are in arbitrary but consistent units (hbar = 1).  The
derived quantities feed the steady-state, dynamics and analogy modules:

    delta     = omega_c - omega_l
    kappa     = G / omega_m                 (overridable)
    chi_eff   = 3 omega_m kappa**2
    delta_eff = delta + chi_eff
    S         = g**2 |E|**2 exp(2 kappa**2 (nbar + 1/2))

Two independent convention switches exist.  ``mode`` selects the sign of the
intensity-dependent detuning in the state equation (``"paper"`` keeps the
printed ``Delta - 2 chi a``, ``"derived"`` uses ``Delta + 2 chi a`` obtained by
taking the modulus squared of the mean-field equation).  ``damping`` selects
what ``Gamma`` means: ``"paper"`` sets ``Gamma = gamma**2`` and
``"consistent"`` sets ``Gamma = gamma``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Literal, Optional

from .errors import (NegativeOccupation, NonPositiveFrequency, NumericalFailure,
                     ParameterError)

Mode = Literal["paper", "derived"]
Damping = Literal["paper", "consistent"]
ScalingVariant = Literal["transform", "drive"]

MODES = ("paper", "derived")
DAMPINGS = ("paper", "consistent")


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


@dataclass(frozen=True)
class SystemParams:
    """Raw inputs of the driven cavity with one moving mirror."""

    omega_c: float = 0.0
    omega_m: float = 1.0
    omega_l: float = 0.0
    G: float = 0.0
    g: float = 1.0
    E: complex = 0.0
    gamma: float = 1.0
    nbar: float = 0.0
    kappa_override: Optional[float] = None

    def validate(self) -> "SystemParams":
        for name in ("omega_c", "omega_m", "omega_l", "G", "g", "gamma", "nbar"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")
        if not cmath.isfinite(complex(self.E)):
            raise ParameterError("E must be finite")
        if self.omega_m <= 0:
            raise NonPositiveFrequency("omega_m must be > 0")
        if self.gamma <= 0:
            raise NonPositiveFrequency("gamma must be > 0")
        if self.nbar < 0:
            raise NegativeOccupation("nbar must be >= 0")
        if self.G < 0:
            raise ParameterError("G must be >= 0")
        return self

    @property
    def delta(self) -> float:
        return self.omega_c - self.omega_l


@dataclass(frozen=True)
class DerivedParams:
    """Effective constants of the mean-field model.

    ``S`` is the scaled input intensity; the complex drive amplitude entering
    the Langevin equation is ``sqrt(S) * exp(1j * drive_phase)``.  ``kappa`` is
    ``None`` when the instance was built directly from effective constants.
    """

    delta: float
    chi_eff: float
    Gamma: float
    S: float
    mode: Mode = "paper"
    kappa: Optional[float] = None
    drive_phase: float = 0.0
    delta_eff: float = field(init=False)

    def __post_init__(self):
        check_mode(self.mode)
        if not self.Gamma > 0:
            raise NonPositiveFrequency("Gamma must be > 0")
        if self.S < 0:
            raise ParameterError("S must be >= 0")
        object.__setattr__(self, "delta_eff", self.delta + self.chi_eff)

    @classmethod
    def from_effective(cls, Gamma: float, delta_eff: float, twochi: float,
                       S: float, mode: Mode = "paper",
                       drive_phase: float = 0.0) -> "DerivedParams":
        """Build from the constants that appear in the state equation."""
        chi = 0.5 * twochi
        return cls(delta=delta_eff - chi, chi_eff=chi, Gamma=Gamma, S=S,
                   mode=mode, drive_phase=drive_phase)

    @property
    def twochi(self) -> float:
        return 2.0 * self.chi_eff

    @property
    def drive(self) -> complex:
        return math.sqrt(self.S) * cmath.exp(1j * self.drive_phase)

    def with_input(self, S: float) -> "DerivedParams":
        return DerivedParams(delta=self.delta, chi_eff=self.chi_eff,
                             Gamma=self.Gamma, S=S, mode=self.mode,
                             kappa=self.kappa, drive_phase=self.drive_phase)


def displacement(params: SystemParams) -> float:
    if params.kappa_override is not None:
        return float(params.kappa_override)
    return params.G / params.omega_m


def thermal_scaling(kappa: float, nbar: float,
                    variant: ScalingVariant = "drive") -> float:
    """Thermal prefactor multiplying the mean field.

    ``variant="transform"`` gives exp(kappa**2 (nbar - 1/2)), the factor that
    relates the lab-frame and displaced-frame expectation of ``a``;
    ``variant="drive"`` gives exp(kappa**2 (nbar + 1/2)), the factor on the
    drive in the displaced-frame mean-field equation.
    """
    if nbar < 0:
        raise NegativeOccupation("nbar must be >= 0")
    if variant == "transform":
        return math.exp(kappa * kappa * (nbar - 0.5))
    if variant == "drive":
        return math.exp(kappa * kappa * (nbar + 0.5))
    raise ParameterError(f"unknown scaling variant {variant!r}")


def derive(params: SystemParams, mode: Mode = "paper",
           damping: Damping = "paper") -> DerivedParams:
    params.validate()
    check_mode(mode)
    if damping not in DAMPINGS:
        raise ParameterError(f"damping must be one of {DAMPINGS}")
    kappa = displacement(params)
    chi = 3.0 * params.omega_m * kappa * kappa
    E = complex(params.E)
    try:
        drive = params.g * E * thermal_scaling(kappa, params.nbar, "drive")
        S = abs(drive) ** 2
    except OverflowError:
        raise NumericalFailure("scaled drive overflows; kappa**2 * nbar too large") from None
    if not math.isfinite(S):
        raise NumericalFailure("scaled drive overflows; kappa**2 * nbar too large")
    Gamma = params.gamma ** 2 if damping == "paper" else params.gamma
    phase = cmath.phase(drive) if drive != 0 else 0.0
    return DerivedParams(delta=params.delta, chi_eff=chi, Gamma=Gamma, S=S,
                         mode=mode, kappa=kappa, drive_phase=phase)
