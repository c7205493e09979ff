"""Truncated Fock-space oracle for the cavity + moving mirror.

The joint space is cavity (x) mirror, with cutoffs ``n_cavity`` and
``n_mirror`` (number of retained levels each).  The rotating-frame
Hamiltonian (hbar = 1)

    H = delta n + omega_m N - G n (b + b^dag) + i g E a^dag - i g E^* a

is evolved under the master equation

    drho/dt = -i[H, rho] + gamma (2 a rho a^dag - rho n - n rho)

with a fixed-step RK4 integrator.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import expm
from scipy.special import eval_laguerre

from .dynamics import integrate
from .errors import (CutoffTooSmall, DimensionOverflow, ParameterError,
                     ShapeMismatch, TruncationBreach)
from .params import SystemParams, derive

log = logging.getLogger(__name__)

BREACH_POPULATION = 1e-4


@dataclass(frozen=True)
class HilbertConfig:
    n_cavity: int = 10
    n_mirror: int = 10
    max_dim: int = 400

    def __post_init__(self):
        if self.n_cavity < 2:
            raise ParameterError("n_cavity must be >= 2")
        if self.n_mirror < 1:
            raise ParameterError("n_mirror must be >= 1")

    @property
    def dim(self) -> int:
        return self.n_cavity * self.n_mirror

    def check(self) -> "HilbertConfig":
        if self.dim > self.max_dim:
            raise DimensionOverflow(
                f"joint dimension {self.dim} exceeds limit {self.max_dim}")
        return self


def destroy(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1).astype(complex)


@dataclass(frozen=True)
class OperatorSet:
    a: np.ndarray
    ad: np.ndarray
    n: np.ndarray
    b: np.ndarray
    bd: np.ndarray
    N: np.ndarray

    @classmethod
    def build(cls, cfg: HilbertConfig) -> "OperatorSet":
        cfg.check()
        ic = np.eye(cfg.n_cavity)
        im = np.eye(cfg.n_mirror)
        a = np.kron(destroy(cfg.n_cavity), im)
        b = np.kron(ic, destroy(cfg.n_mirror))
        ad, bd = a.conj().T, b.conj().T
        return cls(a, ad, ad @ a, b, bd, bd @ b)


def build_hamiltonian(params: SystemParams, cfg: HilbertConfig,
                      ops: Optional[OperatorSet] = None) -> np.ndarray:
    params.validate()
    ops = ops or OperatorSet.build(cfg)
    drive = params.g * complex(params.E)
    return (params.delta * ops.n + params.omega_m * ops.N
            - params.G * ops.n @ (ops.bd + ops.b)
            + 1j * drive * ops.ad - 1j * np.conj(drive) * ops.a)


def lindblad_rhs(rho: np.ndarray, H: np.ndarray, gamma: float,
                 a: np.ndarray) -> np.ndarray:
    """Right-hand side of the master equation with photon loss through ``a``."""
    if not (rho.shape == H.shape == a.shape and rho.shape[0] == rho.shape[1]):
        raise ShapeMismatch(f"shapes {rho.shape}, {H.shape}, {a.shape}")
    ad = a.conj().T
    K = -1j * H - gamma * (ad @ a)
    return K @ rho + rho @ K.conj().T + 2.0 * gamma * (a @ rho @ ad)


def thermal_populations(nbar: float, n: int) -> np.ndarray:
    """Bose-Einstein populations of levels 0..n-1 (not renormalized)."""
    if nbar < 0:
        raise ParameterError("nbar must be >= 0")
    k = np.arange(n, dtype=float)
    if nbar == 0:
        return (k == 0).astype(float)
    r = nbar / (1.0 + nbar)
    return (1.0 - r) * r ** k


def initial_state(params: SystemParams, cfg: HilbertConfig) -> np.ndarray:
    """Cavity vacuum times a (renormalized) truncated thermal mirror state."""
    cav = np.zeros(cfg.n_cavity)
    cav[0] = 1.0
    p = thermal_populations(params.nbar, cfg.n_mirror)
    p /= p.sum()
    return np.kron(np.diag(cav), np.diag(p)).astype(complex)


def _cutoff_population(rho: np.ndarray, cfg: HilbertConfig) -> float:
    diag = np.real(np.diag(rho)).reshape(cfg.n_cavity, cfg.n_mirror)
    cav_top = diag[-1, :].sum()
    mir_top = diag[:, -1].sum() if cfg.n_mirror > 1 else 0.0
    return float(max(cav_top, mir_top))


@dataclass
class Evolution:
    t: np.ndarray
    a_mean: np.ndarray
    n_mean: np.ndarray
    N_mean: np.ndarray
    rho_final: np.ndarray
    max_trace_drift: float
    max_hermiticity_error: float
    min_eigenvalue: float
    max_cutoff_population: float


def evolve_rho(rho0: np.ndarray, params: SystemParams, cfg: HilbertConfig,
               t_end: float, dt: float, *, check_every: int = 10,
               breach_population: float = BREACH_POPULATION) -> Evolution:
    """RK4 evolution of the density matrix with invariant monitoring.

    Expectations are recorded at every step; trace, Hermiticity, positivity
    and cutoff populations are checked every ``check_every`` steps and at the
    end.
    """
    if not (t_end > 0 and dt > 0):
        raise ParameterError("t_end and dt must be > 0")
    ops = OperatorSet.build(cfg)
    H = build_hamiltonian(params, cfg, ops)
    if rho0.shape != H.shape:
        raise ShapeMismatch(f"rho0 has shape {rho0.shape}, expected {H.shape}")
    gamma = params.gamma
    a, ad = ops.a, ops.ad
    K = -1j * H - gamma * ops.n
    Kd = K.conj().T

    def f(r):
        return K @ r + r @ Kd + 2.0 * gamma * (a @ r @ ad)

    n_steps = int(round(t_end / dt))
    h = t_end / n_steps
    rho = rho0.astype(complex)
    tr0 = np.trace(rho).real
    ts = np.linspace(0.0, t_end, n_steps + 1)
    am = np.empty(n_steps + 1, complex)
    nm = np.empty(n_steps + 1)
    Nm = np.empty(n_steps + 1)
    drift = herm = 0.0
    min_eig = np.inf
    top = 0.0

    def record(i, r):
        am[i] = np.trace(a @ r)
        nm[i] = np.trace(ops.n @ r).real
        Nm[i] = np.trace(ops.N @ r).real

    def audit(r):
        nonlocal drift, herm, min_eig, top
        drift = max(drift, abs(np.trace(r) - tr0))
        herm = max(herm, float(np.max(np.abs(r - r.conj().T))))
        min_eig = min(min_eig, float(np.linalg.eigvalsh(0.5 * (r + r.conj().T))[0]))
        top = max(top, _cutoff_population(r, cfg))
        if top > breach_population:
            raise TruncationBreach(
                f"cutoff-level population {top:.3g} exceeds {breach_population:g}")

    record(0, rho)
    audit(rho)
    for i in range(1, n_steps + 1):
        k1 = f(rho)
        k2 = f(rho + 0.5 * h * k1)
        k3 = f(rho + 0.5 * h * k2)
        k4 = f(rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        record(i, rho)
        if i % check_every == 0 or i == n_steps:
            audit(rho)
    return Evolution(ts, am, nm, Nm, rho, drift, herm, min_eig, top)


def step_halving_gap(rho0, params, cfg, t_end, dt) -> float:
    """Max |<a>| difference between runs with ``dt`` and ``dt/2``."""
    coarse = evolve_rho(rho0, params, cfg, t_end, dt)
    fine = evolve_rho(rho0, params, cfg, t_end, dt / 2)
    return float(np.max(np.abs(coarse.a_mean - fine.a_mean[::2])))


def displacement_operator(kappa: float, cfg: HilbertConfig,
                          ops: Optional[OperatorSet] = None) -> np.ndarray:
    """exp(kappa n (b^dag - b)) on the joint truncated space."""
    ops = ops or OperatorSet.build(cfg)
    return expm(kappa * ops.n @ (ops.bd - ops.b))


@dataclass(frozen=True)
class DisplacementReport:
    truncated_sum: float
    closed_form: float
    paper_factor: float
    tail_mass: float

    @property
    def error(self) -> float:
        return abs(self.truncated_sum - self.closed_form)


def displacement_expectation(kappa: float, nbar: float, n_mirror: int = 60,
                             tail_tol: float = 1e-10) -> DisplacementReport:
    """Thermal average of the mirror displacement operator D(kappa).

    Sums p_n exp(-kappa^2/2) L_n(kappa^2) over the ``n_mirror`` retained levels,
    with the thermal populations renormalized to unit trace,
    and reports it next to the closed form exp(-kappa^2 (nbar + 1/2)) and the
    factor exp(kappa^2 (nbar - 1/2)) used to relate lab and displaced frames.
    """
    if nbar < 0:
        raise ParameterError("nbar must be >= 0")
    p = thermal_populations(nbar, n_mirror)
    tail = (nbar / (1.0 + nbar)) ** n_mirror if nbar > 0 else 0.0
    # unit-trace state on the retained levels, as in initial_state
    p /= p.sum()
    if tail > tail_tol:
        raise CutoffTooSmall(
            f"thermal tail mass {tail:.3g} beyond {n_mirror} levels exceeds {tail_tol:g}")
    x = kappa * kappa
    levels = np.arange(n_mirror)
    total = float(np.sum(p * math.exp(-0.5 * x) * eval_laguerre(levels, x)))
    return DisplacementReport(total, math.exp(-x * (nbar + 0.5)),
                              math.exp(x * (nbar - 0.5)), tail)


@dataclass
class MeanFieldReport:
    max_gap: float
    terminal_gap: float
    t: np.ndarray
    quantum: np.ndarray
    meanfield: np.ndarray


def meanfield_discrepancy(params: SystemParams, cfg: HilbertConfig,
                          t_end: float, dt: float = 0.01,
                          tol: float = 1e-10) -> MeanFieldReport:
    """Compare <a>(t) from the master equation with the mean-field flow.

    The mean field runs in derived mode with consistent damping (Gamma =
    gamma), so both descriptions share the same linear decay of <a>.
    """
    rho0 = initial_state(params, cfg)
    evo = evolve_rho(rho0, params, cfg, t_end, dt)
    dp = derive(params, mode="derived", damping="consistent")
    traj = integrate(0.0, dp, t_end, tol, settle=False, t_eval=evo.t[1:])
    lookup = dict(zip(traj.t.tolist(), traj.u.tolist()))
    mf = np.array([lookup[t] for t in evo.t.tolist()])
    gap = np.abs(evo.a_mean - mf)
    return MeanFieldReport(float(gap.max()), float(gap[-1]), evo.t, evo.a_mean, mf)
