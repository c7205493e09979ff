"""Exit criteria.  Each test records one PASS/FAIL line in the terminal summary."""

import csv
import io
import math
import time

import numpy as np
import pytest

from bistab.analogy import kerr_equivalent, kerr_residual
from bistab.cli import main
from bistab.dynamics import (amplitude_damping, fixed_point, hysteresis_sweep,
                             integrate, jacobian_eigenvalues)
from bistab.params import DerivedParams, SystemParams, derive
from bistab.quantum import (HilbertConfig, displacement_expectation, evolve_rho,
                            initial_state, meanfield_discrepancy)
from bistab.steady import (Stability, StateEquation, solve_steady_states,
                           turning_points)

from .oracles import scan_roots

SEED = 20041


def random_equation(rng):
    mode = "paper" if rng.random() < 0.5 else "derived"
    eq = StateEquation(0.0, rng.uniform(0.2, 3.0), rng.uniform(-6.0, 6.0),
                       rng.uniform(-2.0, 2.0), mode)
    tp = turning_points(eq)
    if tp.present and rng.random() < 0.5:
        S = rng.uniform(*tp.fold_interval)
    else:
        S = rng.uniform(0.0, 40.0)
    return eq.with_input(S)


def test_ac1_solver_matches_dense_scan(criterion):
    rng = np.random.default_rng(SEED)
    eqs = [random_equation(rng) for _ in range(1000)]
    t0 = time.perf_counter()
    solved = [solve_steady_states(eq) for eq in eqs]
    elapsed = time.perf_counter() - t0
    mismatches, worst, three = 0, 0.0, 0
    for eq, rs in zip(eqs, solved):
        scan = scan_roots(eq.S, eq.Gamma, eq.Delta, eq.twochi, eq.mode)
        three += rs.count == 3
        if len(scan) != rs.count:
            mismatches += 1
            continue
        worst = max([worst] + [abs(x - y) for x, y in zip(rs.roots, scan)])
    ok = mismatches == 0 and worst <= 1e-8 and elapsed < 10.0
    criterion("AC1 cubic solver vs dense scan", ok,
              f"1000 draws ({three} tristable), count mismatches={mismatches}, "
              f"max|diff|={worst:.2e}, solve time={elapsed:.2f}s")
    assert ok


def test_ac2_exact_factorization_fixtures(criterion):
    rs = solve_steady_states(StateEquation(4.0, 1.0, 3.0, 1.0, "paper"))
    expected = [2 - math.sqrt(2), 2.0, 2 + math.sqrt(2)]
    err_p = max(abs(x - y) for x, y in zip(rs.roots, expected)) if rs.count == 3 else math.inf
    rd = solve_steady_states(StateEquation(2.0, 1.0, -2.0, 1.0, "derived"))
    ok_d = (rd.count == 2 and rd.multiplicity == (2, 1)
            and abs(rd.roots[0] - 1.0) <= 1e-6 and abs(rd.roots[1] - 2.0) <= 1e-10)
    ok = err_p <= 1e-10 and ok_d
    criterion("AC2 exact factorization fixtures", ok,
              f"paper max err={err_p:.1e}; derived roots={rd.roots} mult={rd.multiplicity}")
    assert ok


def test_ac3_fig1_structure_and_threshold(criterion, capsys):
    assert main(["fig1"]) == 0
    data = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    folds = {}
    for d in (-3.0, -2.0, -1.0):
        S = np.array([float(r["scaled_input"]) for r in data if float(r["detuning"]) == d])
        dS = np.diff(S)
        folds[d] = int(np.count_nonzero(np.sign(dS[:-1]) != np.sign(dS[1:])))
        assert turning_points(StateEquation(0.0, 1.0, d, 1.0, "derived")).present is (folds[d] == 2)
    errs = []
    for Gamma in (0.5, 1.0, 2.0):
        lo, hi = 0.0, 10.0 * Gamma
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if turning_points(StateEquation(0.0, Gamma, -mid, 1.0, "derived")).present:
                hi = mid
            else:
                lo = mid
        errs.append(abs(0.5 * (lo + hi) - math.sqrt(3) * Gamma))
    ok = folds == {-3.0: 2, -2.0: 2, -1.0: 0} and max(errs) <= 1e-6
    criterion("AC3 fig1 fold structure + threshold", ok,
              f"turning points per detuning={folds}, max|Delta_c - sqrt3 Gamma|={max(errs):.1e}")
    assert ok


@pytest.mark.parametrize("mode, Gamma, Delta, twochi, smax", [
    ("derived", 1.0, -2.0, 1.0, 3.0),
    ("derived", 1.0, -3.0, 1.0, 10.0),
    ("derived", 0.7, -2.5, 2.0, 4.0),
    ("paper", 1.0, 3.0, 1.0, 8.0),
    ("paper", 0.5, -2.0, -0.5, 6.0),
])
def test_ac4_hysteresis_jumps(criterion, mode, Gamma, Delta, twochi, smax):
    n = 600
    step = smax / (n - 1)
    dp = DerivedParams.from_effective(Gamma, Delta, twochi, 0.0, mode)
    tp = turning_points(StateEquation.from_derived(dp))
    lo, hi = tp.fold_interval
    up, down = hysteresis_sweep(dp, 0.0, smax, n)
    ok = (len(up.jump_inputs) == 1 and len(down.jump_inputs) == 1
          and 0 <= up.jump_inputs[0] - hi <= step and 0 <= lo - down.jump_inputs[0] <= step)
    flat = DerivedParams.from_effective(Gamma, Delta, 0.0, 0.0, mode)
    fu, fd = hysteresis_sweep(flat, 0.0, smax, n)
    ok = ok and fu.jump_inputs == fd.jump_inputs == []
    criterion(f"AC4 hysteresis ({mode}, Delta={Delta})", ok,
              f"up={up.jump_inputs} vs fold {hi:.6f}; down={down.jump_inputs} vs fold "
              f"{lo:.6f}; step={step:.2e}; 2chi=0 loop absent={fu.jump_inputs == []}")
    assert ok


def test_ac5_eigenvalue_vs_slope_stability(criterion):
    rng = np.random.default_rng(SEED + 5)
    checked = disagreements = 0
    for _ in range(200):
        eq = random_equation(rng)
        dp = DerivedParams.from_effective(eq.Gamma, eq.Delta, eq.twochi, eq.S, eq.mode,
                                          drive_phase=rng.uniform(-np.pi, np.pi))
        for a, flag in solve_steady_states(eq):
            lam = jacobian_eigenvalues(fixed_point(dp, a), dp)
            checked += 1
            disagreements += (lam.real.max() > 0) != (eq.slope(a) < 0)
            disagreements += (flag is Stability.UNSTABLE) != (eq.slope(a) < 0)
    ok = disagreements == 0
    criterion("AC5 eigenvalue vs slope stability", ok,
              f"{checked} roots over 200 sets, disagreements={disagreements}")
    assert ok


def test_ac6_dynamics(criterion):
    decay_err = 0.0
    for Gamma in (0.5, 1.0, 2.0):
        for twochi in (0.0, 1.0, 5.0):
            dp = DerivedParams.from_effective(Gamma, 0.7, twochi, 0.0, "derived")
            t = 5.0 / Gamma
            tr = integrate(1.5 - 0.5j, dp, t)
            decay_err = max(decay_err, abs(abs(tr.u[-1]) - abs(1.5 - 0.5j) * math.exp(-Gamma * t)))
    rng = np.random.default_rng(SEED + 6)
    settled = landed = 0
    worst = 0.0
    for _ in range(60):
        eq = random_equation(rng)
        dp = DerivedParams.from_effective(eq.Gamma, eq.Delta, eq.twochi, eq.S, eq.mode)
        scale = math.sqrt(max(eq.S, 1e-12) / eq.linear)
        u0 = complex(*rng.normal(0.0, scale, 2))
        tr = integrate(u0, dp, 400.0 / amplitude_damping(dp))
        if not tr.settled:
            continue
        settled += 1
        rs = solve_steady_states(eq)
        a = abs(tr.settle_value) ** 2
        d = min(abs(a - r) for r in rs.stable_roots)
        worst = max(worst, d)
        landed += d <= 1e-6
    ok = decay_err <= 1e-8 and settled > 40 and landed == settled
    criterion("AC6 dynamics decay + settling", ok,
              f"decay err={decay_err:.1e}; settled {settled}/60, on stable root {landed}, "
              f"worst |a - root|={worst:.1e}")
    assert ok


def test_ac7_quantum_linear_cavity(criterion):
    t0 = time.perf_counter()
    worst_gap = drift = herm = 0.0
    for delta in (0.0, 1.0, -0.6):
        p = SystemParams(omega_c=delta, G=0.0, E=0.3, gamma=1.0)
        cfg = HilbertConfig(20, 1)
        ev = evolve_rho(initial_state(p, cfg), p, cfg, 20.0, 0.01)
        worst_gap = max(worst_gap, abs(ev.a_mean[-1] - 0.3 / (1.0 + 1j * delta)))
        drift = max(drift, ev.max_trace_drift)
        herm = max(herm, ev.max_hermiticity_error)
    elapsed = time.perf_counter() - t0
    ok = worst_gap <= 1e-4 and drift < 1e-8 and herm < 1e-10 and elapsed < 60
    criterion("AC7 quantum oracle, G=0 steady state", ok,
              f"|<a> - E/(gamma+i delta)|={worst_gap:.1e}, trace drift={drift:.1e}, "
              f"hermiticity={herm:.1e}, {elapsed:.1f}s")
    assert ok


def test_ac8_thermal_displacement_sum(criterion):
    failures = []
    worst = 0.0
    for nbar in (0.0, 0.5, 1.0, 2.0, 3.0):
        for kappa in (0.0, 0.1, 0.5, 1.0, 1.5):
            # measure the raw truncated sum, the tail guard is reported separately
            rep = displacement_expectation(kappa, nbar, 60, tail_tol=math.inf)
            assert math.isfinite(rep.paper_factor)
            worst = max(worst, rep.error)
            if rep.error > 1e-8:
                failures.append(f"(kappa={kappa}, nbar={nbar}): {rep.error:.1e}")
    ok = not failures
    criterion("AC8 thermal displacement sum vs closed form", ok,
              f"max err={worst:.1e}; cells above 1e-8: {failures or 'none'}")
    assert ok, failures


def test_ac9_kerr_equivalence(criterion):
    rng = np.random.default_rng(SEED + 9)
    worst = 0.0
    for _ in range(100):
        p = SystemParams(omega_c=rng.uniform(-5, 5), omega_m=rng.uniform(0.2, 5),
                         G=rng.uniform(0, 1), E=complex(*rng.normal(size=2)),
                         gamma=rng.uniform(0.1, 3), nbar=rng.uniform(0, 2))
        dp = derive(p, mode="paper")
        eq = StateEquation.from_derived(dp)
        kp = kerr_equivalent(dp)
        a = rng.uniform(0, 10)
        ref = eq.S - eq.Gamma * a - (eq.Delta - eq.twochi * a) ** 2 * a
        diff = abs(kerr_residual(kp, a) - ref) / max(1.0, abs(ref))
        assert kp.state_equation().coefficients() == eq.coefficients()
        worst = max(worst, diff)
    ok = worst <= 1e-12
    criterion("AC9 Kerr equivalence", ok, f"max relative difference={worst:.1e}")
    assert ok


def test_ac10_meanfield_trend(criterion):
    gaps = []
    for G in (0.2, 0.1, 0.05):
        p = SystemParams(omega_m=1.0, G=G, E=0.1, gamma=1.0)
        gaps.append(meanfield_discrepancy(p, HilbertConfig(5, 6), 20.0).max_gap)
    ok = gaps[0] > gaps[1] > gaps[2]
    criterion("AC10 mean field vs quantum trend", ok,
              "max gaps at G/omega_m=0.2,0.1,0.05: " + ", ".join(f"{g:.2e}" for g in gaps))
    assert ok
