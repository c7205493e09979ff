"""Mean-field dynamics of the driven cavity field.

The complex amplitude ``u = <a>`` obeys

    du/dt = F - (gamma_a + i Delta) u - i sigma twochi |u|^2 u

with ``F = sqrt(S) exp(i phi)``.  The sign ``sigma`` and the amplitude damping
``gamma_a`` are chosen per mode so that the fixed points of the flow are
exactly the roots of the matching state equation in :mod:`bistab.steady`:
``gamma_a = Gamma`` in derived mode and ``sqrt(Gamma)`` in paper mode (where
``Gamma`` already stands for the squared amplitude rate).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import NotAFixedPoint, ParameterError, StepUnderflow
from .params import DerivedParams
from .steady import (Stability, StateEquation, branch_id, solve_steady_states,
                     turning_points)

SETTLE_TOL = 1e-9
SETTLE_DWELL = 5

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
       187 / 2100, 1 / 40)
_ORDER = 5


def amplitude_damping(dp: DerivedParams) -> float:
    return math.sqrt(dp.Gamma) if dp.mode == "paper" else dp.Gamma


def _sigma(dp: DerivedParams) -> float:
    return -1.0 if dp.mode == "paper" else 1.0


def langevin_rhs(u: complex, dp: DerivedParams) -> complex:
    nl = _sigma(dp) * dp.twochi * (u.real * u.real + u.imag * u.imag)
    return dp.drive - (amplitude_damping(dp) + 1j * dp.delta_eff) * u - 1j * nl * u


def fixed_point(dp: DerivedParams, a: float) -> complex:
    """Complex amplitude of the steady state with intensity ``a``."""
    eq = StateEquation.from_derived(dp)
    return dp.drive / (amplitude_damping(dp) + 1j * eq.bracket(a))


@dataclass
class Trajectory:
    t: np.ndarray
    u: np.ndarray
    settled: bool
    settle_value: Optional[complex] = None
    n_rejected: int = 0

    @property
    def samples(self) -> List[Tuple[float, complex]]:
        return list(zip(self.t.tolist(), self.u.tolist()))

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.u) ** 2


def integrate(u0: complex, dp: DerivedParams, t_end: float, tol: float = 1e-10,
              *, settle: bool = True, settle_tol: float = SETTLE_TOL,
              dwell: int = SETTLE_DWELL, t_eval: Optional[Sequence[float]] = None,
              h0: Optional[float] = None, h_min: float = 1e-13,
              max_steps: int = 1_000_000) -> Trajectory:
    """Adaptive Dormand-Prince integration of the mean-field equation.

    Each accepted step has an estimated local error below
    ``tol * max(1, |u|)``.  With ``settle=True`` the run stops once ``|du/dt|``
    stays below ``settle_tol * max(1, |u|)`` for ``dwell`` consecutive accepted
    steps.  ``t_eval`` forces steps to land on the given times (each one is
    then present in the returned samples).
    """
    if not t_end > 0:
        raise ParameterError("t_end must be > 0")
    if not tol > 0:
        raise ParameterError("tol must be > 0")

    def f(y):
        return langevin_rhs(y, dp)

    checkpoints = sorted(float(x) for x in t_eval) if t_eval is not None else []
    checkpoints = [x for x in checkpoints if 0 < x < t_end] + [t_end]
    ci = 0

    t, y = 0.0, complex(u0)
    k1 = f(y)
    scale0 = max(1.0, abs(y))
    if h0 is not None:
        h = h0
    else:
        h = min(t_end, 0.1, 0.01 * scale0 / abs(k1)) if k1 else min(t_end, 0.1)
    ts, us = [t], [y]
    calm = 1 if abs(k1) < settle_tol * scale0 else 0
    rejected = 0
    for _ in range(max_steps):
        if abs(k1) < settle_tol * max(1.0, abs(y)):
            if settle and calm >= dwell:
                return Trajectory(np.array(ts), np.array(us), True, y, rejected)
        target = checkpoints[ci]
        h = min(h, target - t)
        if h < h_min * max(1.0, t):
            raise StepUnderflow(f"step size {h:.3g} below minimum at t={t:.6g}")
        k = [k1]
        for s in range(1, 7):
            ys = y + h * sum(a * kk for a, kk in zip(_A[s], k))
            k.append(f(ys))
        y5 = y + h * sum(b * kk for b, kk in zip(_B5, k))
        y4 = y + h * sum(b * kk for b, kk in zip(_B4, k))
        err = abs(y5 - y4) / (tol * max(1.0, abs(y), abs(y5)))
        if not math.isfinite(err):
            raise StepUnderflow(f"non-finite error estimate at t={t:.6g}")
        if err <= 1.0:
            t = target if h == target - t else t + h
            y = y5
            k1 = k[6]  # FSAL
            ts.append(t)
            us.append(y)
            calm = calm + 1 if abs(k1) < settle_tol * max(1.0, abs(y)) else 0
            if t >= checkpoints[ci]:
                ci += 1
                if ci == len(checkpoints):
                    settled = settle and calm >= dwell
                    return Trajectory(np.array(ts), np.array(us), settled,
                                      y if settled else None, rejected)
        else:
            rejected += 1
        fac = 0.9 * err ** (-1.0 / _ORDER) if err > 0 else 5.0
        h *= min(5.0, max(0.2, fac))
    raise StepUnderflow("maximum number of steps exceeded")


def jacobian(u: complex, dp: DerivedParams) -> np.ndarray:
    """Jacobian of (du/dt, du*/dt) with respect to (u, u*)."""
    k = _sigma(dp) * dp.twochi
    ga = amplitude_damping(dp)
    a = abs(u) ** 2
    return np.array([
        [-(ga + 1j * dp.delta_eff) - 2j * k * a, -1j * k * u * u],
        [1j * k * np.conj(u) ** 2, -(ga - 1j * dp.delta_eff) + 2j * k * a],
    ])


def jacobian_eigenvalues(u_fixed: complex, dp: DerivedParams,
                         tol: float = 1e-8) -> np.ndarray:
    r = langevin_rhs(u_fixed, dp)
    if abs(r) > tol * max(1.0, abs(dp.drive)):
        raise NotAFixedPoint(f"|du/dt| = {abs(r):.3g} at u = {u_fixed}")
    return np.linalg.eigvals(jacobian(u_fixed, dp))


def is_stable_fixed_point(u_fixed: complex, dp: DerivedParams) -> bool:
    return bool(np.max(jacobian_eigenvalues(u_fixed, dp).real) < 0)


@dataclass
class SweepPoint:
    S: float
    a: float
    branch_id: int
    stable: bool


@dataclass
class SweepResult:
    direction: str
    points: List[SweepPoint] = field(default_factory=list)
    jump_inputs: List[float] = field(default_factory=list)


def _sweep(eq: StateEquation, grid: np.ndarray, direction: str) -> SweepResult:
    tp = turning_points(eq)
    out = SweepResult(direction)
    branch = None
    a_prev = None
    for S in grid:
        rs = solve_steady_states(eq.with_input(float(S)))
        ids = [branch_id(tp, a) for a in rs.roots]
        if branch is None:
            idx = 0 if direction == "up" else rs.count - 1
        else:
            same = [i for i, b in enumerate(ids) if b == branch]
            if same:
                idx = min(same, key=lambda i: abs(rs.roots[i] - a_prev))
            else:
                stable = [i for i, s in enumerate(rs.stability)
                          if s is Stability.STABLE] or list(range(rs.count))
                idx = min(stable, key=lambda i: abs(rs.roots[i] - a_prev))
                out.jump_inputs.append(float(S))
        branch, a_prev = ids[idx], rs.roots[idx]
        out.points.append(SweepPoint(float(S), a_prev, branch,
                                     rs.stability[idx] is Stability.STABLE))
    return out


def hysteresis_sweep(dp_template: DerivedParams, S_min: float, S_max: float,
                     n_steps: int) -> Tuple[SweepResult, SweepResult]:
    """Quasi-static up and down sweeps of the input intensity.

    The followed branch is kept while it exists; when it disappears past a
    fold the state drops onto the nearest surviving stable branch and the
    input at which this happened is recorded.
    """
    if not 0 <= S_min < S_max:
        raise ParameterError("need 0 <= S_min < S_max")
    if n_steps < 2:
        raise ParameterError("n_steps must be >= 2")
    eq = StateEquation.from_derived(dp_template)
    grid = np.linspace(S_min, S_max, n_steps)
    return _sweep(eq, grid, "up"), _sweep(eq, grid[::-1], "down")
