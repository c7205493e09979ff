"""Steady states of the cubic input-output relation.

The state equation for the intracavity intensity ``a = |alpha|**2`` reads

    paper:    F(a) = S - Gamma a    - (Delta - twochi a)**2 a
    derived:  F(a) = S - Gamma**2 a - (Delta + twochi a)**2 a

Both are handled through a sign ``sigma`` (-1 paper, +1 derived) and a
linear coefficient (``Gamma`` or ``Gamma**2``), so that the input needed to
sustain an intensity ``a`` is ``S(a) = lin a + (Delta + sigma twochi a)**2 a``.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import NegativeIntensity, NumericalFailure, ParameterError
from .params import DerivedParams, Mode, check_mode

log = logging.getLogger(__name__)

TOL_ABS = 1e-12
TOL_REL = 1e-10
TANGENCY_GAP = 1e-8
_EPS = np.finfo(float).eps


class Stability(str, enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class StateEquation:
    S: float
    Gamma: float
    Delta: float
    twochi: float
    mode: Mode = "paper"

    def __post_init__(self):
        check_mode(self.mode)
        if not self.Gamma > 0:
            raise ParameterError("Gamma must be > 0")
        for name in ("S", "Delta", "twochi"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")

    @classmethod
    def from_derived(cls, dp: DerivedParams) -> "StateEquation":
        return cls(S=dp.S, Gamma=dp.Gamma, Delta=dp.delta_eff,
                   twochi=dp.twochi, mode=dp.mode)

    @property
    def sigma(self) -> float:
        return -1.0 if self.mode == "paper" else 1.0

    @property
    def linear(self) -> float:
        """Coefficient of the pure-damping term ``lin * a``."""
        return self.Gamma if self.mode == "paper" else self.Gamma ** 2

    def bracket(self, a):
        return self.Delta + self.sigma * self.twochi * a

    def input_of(self, a):
        """Input intensity that sustains the intracavity intensity ``a``."""
        return self.linear * a + self.bracket(a) ** 2 * a

    def slope(self, a):
        """dS/da along the input-output curve."""
        k = self.sigma * self.twochi
        return self.linear + (self.Delta + k * a) * (self.Delta + 3.0 * k * a)

    def curvature(self, a):
        k = self.sigma * self.twochi
        return 4.0 * k * self.Delta + 6.0 * k * k * a

    def coefficients(self) -> Tuple[float, float, float, float]:
        """Cubic ``c3 a^3 + c2 a^2 + c1 a + c0`` whose roots are the steady states."""
        k = self.twochi
        return (k * k, 2.0 * self.sigma * self.Delta * k,
                self.Delta ** 2 + self.linear, -self.S)

    def tolerance(self) -> float:
        return TOL_ABS + TOL_REL * abs(self.S)

    def with_input(self, S: float) -> "StateEquation":
        return StateEquation(S, self.Gamma, self.Delta, self.twochi, self.mode)


@dataclass(frozen=True)
class RootSet:
    roots: Tuple[float, ...]
    stability: Tuple[Stability, ...]
    multiplicity: Tuple[int, ...]

    @property
    def count(self) -> int:
        return len(self.roots)

    @property
    def stable_roots(self) -> List[float]:
        return [a for a, s in zip(self.roots, self.stability)
                if s is Stability.STABLE]

    def __iter__(self):
        return iter(zip(self.roots, self.stability))


@dataclass(frozen=True)
class TurningPoints:
    present: bool
    a_lower: float = math.nan
    a_upper: float = math.nan
    S_at_lower: float = math.nan
    S_at_upper: float = math.nan

    @property
    def fold_interval(self) -> Tuple[float, float]:
        """Input range (min, max) over which three steady states coexist."""
        return (min(self.S_at_lower, self.S_at_upper),
                max(self.S_at_lower, self.S_at_upper))


def residual(eq: StateEquation, a: float) -> float:
    if a < 0:
        raise NegativeIntensity(f"intensity must be >= 0, got {a}")
    if eq.mode == "paper":
        return eq.S - eq.Gamma * a - (eq.Delta - eq.twochi * a) ** 2 * a
    return eq.S - eq.Gamma ** 2 * a - (eq.Delta + eq.twochi * a) ** 2 * a


def cubic_roots(c3: float, c2: float, c1: float, c0: float) -> List[complex]:
    """All three roots of a real cubic via the trigonometric/Cardano forms."""
    if c3 == 0:
        raise ParameterError("leading coefficient vanishes")
    b, c, d = c2 / c3, c1 / c3, c0 / c3
    shift = b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc < 0:
        # three distinct real roots, p < 0 here
        r = 2.0 * math.sqrt(-p / 3.0)
        arg = (3.0 * q / (2.0 * p)) * math.sqrt(-3.0 / p)
        phi = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        ts = [r * math.cos(phi - 2.0 * math.pi * j / 3.0) for j in range(3)]
        return [complex(t - shift) for t in ts]
    A = -math.copysign(np.cbrt(abs(q) / 2.0 + math.sqrt(disc)), q)
    B = -p / (3.0 * A) if A != 0 else 0.0
    t1 = A + B
    re = -0.5 * t1
    im = 0.5 * math.sqrt(3.0) * (A - B)
    return [complex(t1 - shift), complex(re - shift, im), complex(re - shift, -im)]


def turning_points(eq: StateEquation) -> TurningPoints:
    k = eq.sigma * eq.twochi
    if k == 0:
        return TurningPoints(present=False)
    qa, qb, qc = 3.0 * k * k, 4.0 * k * eq.Delta, eq.Delta ** 2 + eq.linear
    disc = 4.0 * k * k * (eq.Delta ** 2 - 3.0 * eq.linear)
    if disc <= 0:
        return TurningPoints(present=False)
    sq = math.sqrt(disc)
    # stable quadratic formula
    tmp = -0.5 * (qb + math.copysign(sq, qb))
    r1, r2 = sorted((tmp / qa, qc / tmp))
    if r1 <= 0:
        return TurningPoints(present=False)
    return TurningPoints(True, r1, r2, float(eq.input_of(r1)),
                         float(eq.input_of(r2)))


def bistability_threshold(Gamma: float, twochi: float,
                          mode: Mode = "paper") -> Optional[float]:
    """Signed critical effective detuning beyond which the curve folds."""
    check_mode(mode)
    if not Gamma > 0:
        raise ParameterError("Gamma must be > 0")
    if twochi == 0:
        return None
    lin = Gamma if mode == "paper" else Gamma ** 2
    sign = math.copysign(1.0, twochi) * (1.0 if mode == "paper" else -1.0)
    return sign * math.sqrt(3.0 * lin)


def classify_stability(eq: StateEquation, a: float,
                       slope_tol: float = 1e-9) -> Stability:
    slope = eq.slope(a)
    scale = eq.linear + eq.Delta ** 2 + (eq.twochi * a) ** 2
    if abs(slope) <= slope_tol * scale:
        log.warning("marginal steady state at a=%.12g (dS/da=%.3g); "
                    "reported unstable", a, slope)
        return Stability.UNSTABLE
    return Stability.STABLE if slope > 0 else Stability.UNSTABLE


def branch_id(tp: TurningPoints, a: float) -> int:
    """0 for the lower branch, 1 for the middle, 2 for the upper branch.

    Without folds the curve is single valued and every point is on branch 0.
    """
    if not tp.present or a <= tp.a_lower:
        return 0
    if a >= tp.a_upper:
        return 2
    return 1


def _is_tangent(eq: StateEquation, a: float) -> bool:
    f = abs(residual(eq, a))
    mag = abs(eq.S) + eq.linear * a + eq.bracket(a) ** 2 * a
    window = abs(eq.curvature(a)) * TANGENCY_GAP ** 2 / 8.0
    return f <= max(window, 16.0 * _EPS * mag)


def _polish(eq: StateEquation, lo: float, hi: float, guess: float,
            max_iter: int = 100) -> float:
    """Newton iteration safeguarded by the bracket [lo, hi]."""
    tol = eq.tolerance()
    flo = residual(eq, lo)
    a = guess if lo <= guess <= hi else 0.5 * (lo + hi)
    for _ in range(max_iter):
        f = residual(eq, a)
        if not math.isfinite(f):
            raise NumericalFailure(f"non-finite residual at a={a}")
        if abs(f) <= tol:
            return a
        if (f > 0) == (flo > 0):
            lo, flo = a, f
        else:
            hi = a
        d = -eq.slope(a)  # dF/da
        step = a - f / d if d != 0 else math.nan
        a = step if lo < step < hi else 0.5 * (lo + hi)
        if hi - lo <= 4.0 * _EPS * max(1.0, hi):
            break
    if abs(residual(eq, a)) <= tol:
        return a
    raise NumericalFailure(
        f"root polishing did not converge near a={a} (|F|={abs(residual(eq, a)):.3g})")


def _closed_form_guesses(eq: StateEquation) -> List[float]:
    coeffs = eq.coefficients()
    if coeffs[0] == 0:
        return []
    try:
        with np.errstate(all="ignore"):
            roots = cubic_roots(*coeffs)
    except (OverflowError, ValueError, ZeroDivisionError):
        return []
    return [z.real for z in roots if math.isfinite(z.real)]


def solve_steady_states(eq: StateEquation) -> RootSet:
    if eq.S < 0:
        raise ParameterError("input intensity must be >= 0")
    if eq.S == 0:
        return RootSet((0.0,), (classify_stability(eq, 0.0),), (1,))
    a_max = eq.S / eq.linear
    if eq.twochi == 0:
        a = eq.S / (eq.linear + eq.Delta ** 2)
        return RootSet((a,), (Stability.STABLE,), (1,))

    guesses = _closed_form_guesses(eq)
    tp = turning_points(eq)
    nodes = [0.0]
    if tp.present:
        nodes += [x for x in (tp.a_lower, tp.a_upper) if x < a_max]
    nodes.append(a_max)
    values = [residual(eq, x) for x in nodes]

    found: List[Tuple[float, int]] = []
    for i in range(1, len(nodes) - 1):
        if _is_tangent(eq, nodes[i]):
            values[i] = 0.0
            found.append((nodes[i], 2))
    if abs(values[-1]) <= eq.tolerance():
        values[-1] = 0.0
        found.append((a_max, 1))
    for (x0, f0), (x1, f1) in zip(zip(nodes, values), zip(nodes[1:], values[1:])):
        if f0 == 0 or f1 == 0 or (f0 > 0) == (f1 > 0):
            continue
        inside = [g for g in guesses if x0 <= g <= x1]
        guess = min(inside, key=lambda g: abs(residual(eq, g))) if inside else 0.5 * (x0 + x1)
        found.append((_polish(eq, x0, x1, guess), 1))

    found.sort()
    roots = tuple(float(a) for a, _ in found)
    mult = tuple(m for _, m in found)
    stab = tuple(classify_stability(eq, a) for a in roots)
    return RootSet(roots, stab, mult)


def input_output_curve(eq: StateEquation, a_values: Sequence[float]):
    """Points (S(a), a, branch, stability) of the curve at the given intensities."""
    tp = turning_points(eq)
    rows = []
    for a in a_values:
        rows.append((float(eq.input_of(a)), float(a), branch_id(tp, a),
                     classify_stability(eq, a)))
    return rows
