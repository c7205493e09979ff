"""Kerr-medium and classical counterparts of the moving-mirror cavity.

A fixed cavity filled with a Kerr medium of constant ``chi`` has the steady
state ``0 = S - Gamma a - (delta - 2 chi a)**2 a``, which is the moving-mirror
equation (paper sign convention) with ``chi -> 3 omega_m kappa**2`` and
``delta -> delta + 3 omega_m kappa**2``.  For the derived sign convention the
same map holds with ``chi -> -chi``.

The classical interferometer result for a moving mirror is

    I_i = I_o [1 + R (beta0 + beta2 I_o)**2 / T**2]
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

from .errors import NegativeIntensity, ParameterError
from .params import DerivedParams
from .steady import StateEquation


@dataclass(frozen=True)
class KerrParams:
    delta: float
    chi: float
    Gamma: float
    S: float

    def __post_init__(self):
        if not self.Gamma > 0:
            raise ParameterError("Gamma must be > 0")
        if self.S < 0:
            raise ParameterError("S must be >= 0")

    def state_equation(self) -> StateEquation:
        return StateEquation(self.S, self.Gamma, self.delta, 2.0 * self.chi, "paper")


@dataclass(frozen=True)
class ClassicalParams:
    R: float
    T: float
    beta0: float
    beta2: float

    def __post_init__(self):
        if self.R < 0:
            raise ParameterError("R must be >= 0")
        if not self.T > 0:
            raise ParameterError("T must be > 0")


def kerr_residual(kp: KerrParams, a: float) -> float:
    if a < 0:
        raise NegativeIntensity(f"intensity must be >= 0, got {a}")
    return kp.S - kp.Gamma * a - (kp.delta - 2.0 * kp.chi * a) ** 2 * a


def kerr_equivalent(dp: DerivedParams) -> KerrParams:
    return KerrParams(delta=dp.delta_eff, chi=dp.chi_eff, Gamma=dp.Gamma, S=dp.S)


def classical_input_intensity(cp: ClassicalParams, I_o: float) -> float:
    if I_o < 0:
        raise NegativeIntensity(f"output intensity must be >= 0, got {I_o}")
    return I_o * (1.0 + cp.R * (cp.beta0 + cp.beta2 * I_o) ** 2 / cp.T ** 2)


def classical_turning_points(cp: ClassicalParams) -> Tuple[float, ...]:
    """Output intensities where dI_i/dI_o = 0, ascending (empty if monotone).

    dI_i/dI_o = 0 reduces to 3 b2^2 I^2 + 4 b0 b2 I + b0^2 + T^2/R = 0, which
    has two positive roots iff b0 b2 < 0 and b0^2 > 3 T^2 / R.
    """
    if cp.R == 0 or cp.beta2 == 0:
        return ()
    qa = 3.0 * cp.beta2 ** 2
    qb = 4.0 * cp.beta0 * cp.beta2
    qc = cp.beta0 ** 2 + cp.T ** 2 / cp.R
    disc = qb * qb - 4.0 * qa * qc
    if disc <= 0:
        return ()
    sq = math.sqrt(disc)
    tmp = -0.5 * (qb + math.copysign(sq, qb))
    r1, r2 = sorted((tmp / qa, qc / tmp))
    if r1 <= 0:
        return ()
    return (r1, r2)


def table1_map(dp: DerivedParams, a: float) -> Tuple[float, float]:
    """Quantum counterparts (beta0, beta2 * I_o) of the classical phase terms."""
    if a < 0:
        raise NegativeIntensity(f"intensity must be >= 0, got {a}")
    return dp.delta_eff, -2.0 * dp.chi_eff * a
