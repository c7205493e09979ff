"""Command-line front end: ``bistab <command> [flags]``.

Every flag may also come from a flat JSON config (``--config`` or the
``BISTAB_CONFIG`` environment variable) whose keys are the flag names with
dashes replaced by underscores.  Flags always override the file.

Exit codes: 0 ok, 2 usage/config error, 3 numerical failure, 4 truncation
breach.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
from dataclasses import dataclass, fields
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import analogy, dynamics, quantum, steady
from .errors import BistabError, NumericalFailure, ParameterError, TruncationBreach
from .params import DerivedParams, SystemParams, derive

ENV_CONFIG = "BISTAB_CONFIG"
COMMANDS = ("steady", "sweep", "threshold", "evolve", "fig1", "kerr",
            "classical", "quantum-compare")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: Optional[str] = None
    mode: Optional[str] = None
    format: Optional[str] = None
    output: Optional[str] = None
    gamma2: Optional[float] = None
    gamma: Optional[float] = None
    consistent: Optional[bool] = None
    delta_eff: Optional[float] = None
    two_chi: Optional[float] = None
    input: Optional[float] = None
    smin: Optional[float] = None
    smax: Optional[float] = None
    steps: Optional[int] = None
    u0_re: Optional[float] = None
    u0_im: Optional[float] = None
    t_end: Optional[float] = None
    tol: Optional[float] = None
    ratio: Optional[float] = None
    detunings: Optional[List[float]] = None
    amax: Optional[float] = None
    points: Optional[int] = None
    omega_c: Optional[float] = None
    omega_m: Optional[float] = None
    omega_l: Optional[float] = None
    delta: Optional[float] = None
    G: Optional[float] = None
    g: Optional[float] = None
    E: Optional[float] = None
    E_im: Optional[float] = None
    nbar: Optional[float] = None
    chi: Optional[float] = None
    from_physical: Optional[bool] = None
    R: Optional[float] = None
    T: Optional[float] = None
    beta0: Optional[float] = None
    beta2: Optional[float] = None
    io_max: Optional[float] = None
    n_cavity: Optional[int] = None
    n_mirror: Optional[int] = None
    dt: Optional[float] = None

    @classmethod
    def from_mapping(cls, data: Dict[str, Any]) -> "RunConfig":
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        out = {}
        for key, value in data.items():
            out[key] = None if value is None else _coerce(key, known[key].type, value)
        return cls(**out)

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True, indent=2) + "\n"

    def merged(self, other: "RunConfig") -> "RunConfig":
        """Values of ``other`` override ours wherever they are set."""
        data = dataclasses.asdict(self)
        data.update({k: v for k, v in dataclasses.asdict(other).items() if v is not None})
        return RunConfig(**data)


def _coerce(key: str, annotation: str, value: Any) -> Any:
    try:
        if "bool" in annotation:
            if not isinstance(value, bool):
                raise TypeError
            return value
        if "List[float]" in annotation:
            return [float(v) for v in value]
        if "int" in annotation:
            if isinstance(value, bool) or float(value) != int(value):
                raise TypeError
            return int(value)
        if "float" in annotation:
            if isinstance(value, bool):
                raise TypeError
            return float(value)
        return str(value)
    except (TypeError, ValueError):
        raise UsageError(f"config key {key!r} has invalid value {value!r}") from None


# -- output ------------------------------------------------------------------

def _fmt(x: Any) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, (float, np.floating)):
        v = float(x)
        return "0" if v == 0 else f"{v:.9g}"
    return str(x)


def _jsonable(x: Any) -> Any:
    if isinstance(x, (float, np.floating)):
        return float(f"{float(x):.9g}")
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    return x


def render(columns: Sequence[str], rows: Sequence[Sequence[Any]], fmt: str,
           extra: Optional[Dict[str, Any]] = None) -> str:
    if fmt == "json":
        doc = {"columns": list(columns),
               "rows": [[_jsonable(v) for v in r] for r in rows]}
        if extra:
            doc.update(_jsonable(extra))
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


# -- commands ----------------------------------------------------------------

def _require(cfg: RunConfig, *names: str) -> None:
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise UsageError(f"{cfg.command}: missing required flag(s) {flags}")


def _Gamma(cfg: RunConfig) -> float:
    if cfg.gamma2 is not None:
        G = cfg.gamma2
    elif cfg.gamma is not None:
        if not cfg.consistent:
            raise UsageError("--gamma requires --consistent (otherwise pass --gamma2)")
        G = cfg.gamma
    else:
        G = 1.0
    if not G > 0:
        raise UsageError("damping must be > 0")
    return G


def _check_input(S: float) -> None:
    if S < 0:
        raise UsageError("input intensity must be ≥ 0")


def _mode(cfg: RunConfig, default: str) -> str:
    mode = cfg.mode or default
    if mode not in ("paper", "derived"):
        raise UsageError(f"--mode must be paper or derived, got {mode!r}")
    return mode


def _equation(cfg: RunConfig, S: float, default_mode: str = "paper") -> steady.StateEquation:
    return steady.StateEquation(S, _Gamma(cfg), cfg.delta_eff, cfg.two_chi,
                                _mode(cfg, default_mode))


def cmd_steady(cfg: RunConfig):
    _require(cfg, "input", "delta_eff", "two_chi")
    _check_input(cfg.input)
    rs = steady.solve_steady_states(_equation(cfg, cfg.input))
    rows = [(cfg.input, a, s is steady.Stability.STABLE) for a, s in rs]
    return ["S", "a", "stable"], rows, {"multiplicity": list(rs.multiplicity)}


def cmd_sweep(cfg: RunConfig):
    _require(cfg, "delta_eff", "two_chi", "smin", "smax")
    _check_input(cfg.smin)
    dp = DerivedParams.from_effective(_Gamma(cfg), cfg.delta_eff, cfg.two_chi,
                                      0.0, _mode(cfg, "paper"))
    if not cfg.smin < cfg.smax:
        raise UsageError("--smin must be < --smax")
    up, down = dynamics.hysteresis_sweep(dp, cfg.smin, cfg.smax, cfg.steps or 200)
    rows = [(r.direction, p.S, p.a, p.branch_id, p.stable)
            for r in (up, down) for p in r.points]
    extra = {"jump_inputs": {"up": up.jump_inputs, "down": down.jump_inputs}}
    return ["direction", "S", "a", "branch_id", "stable"], rows, extra


def cmd_threshold(cfg: RunConfig):
    mode = _mode(cfg, "paper")
    two_chi = 1.0 if cfg.two_chi is None else cfg.two_chi
    Gamma = _Gamma(cfg)
    dc = steady.bistability_threshold(Gamma, two_chi, mode)
    return ["mode", "Gamma", "two_chi", "delta_c"], [(mode, Gamma, two_chi,
                                                      "none" if dc is None else dc)], None


def cmd_evolve(cfg: RunConfig):
    _require(cfg, "input", "delta_eff", "two_chi")
    _check_input(cfg.input)
    dp = DerivedParams.from_effective(_Gamma(cfg), cfg.delta_eff, cfg.two_chi,
                                      cfg.input, _mode(cfg, "paper"))
    u0 = complex(cfg.u0_re or 0.0, cfg.u0_im or 0.0)
    tr = dynamics.integrate(u0, dp, cfg.t_end or 50.0, cfg.tol or 1e-10)
    rows = [(t, u.real, u.imag, abs(u) ** 2) for t, u in zip(tr.t, tr.u)]
    extra = {"settled": tr.settled,
             "settle_intensity": None if tr.settle_value is None else abs(tr.settle_value) ** 2}
    return ["t", "re", "im", "intensity"], rows, extra


def cmd_fig1(cfg: RunConfig):
    mode = _mode(cfg, "derived")
    ratio = 0.5 if cfg.ratio is None else cfg.ratio
    detunings = cfg.detunings if cfg.detunings is not None else [-3.0, -2.0, -1.0]
    n = cfg.points or 401
    a_grid = np.linspace(0.0, cfg.amax or 4.0, n)
    rows = []
    for d in detunings:
        # dimensionless units: Gamma = 1, chi_eff / Gamma = ratio
        eq = steady.StateEquation(0.0, 1.0, d, 2.0 * ratio, mode)
        for S, a, b, s in steady.input_output_curve(eq, a_grid):
            rows.append((d, S, b, a, s is steady.Stability.STABLE))
    return ["detuning", "scaled_input", "branch_id", "scaled_output", "stable"], rows, None


def _physical(cfg: RunConfig) -> SystemParams:
    omega_c = cfg.omega_c if cfg.omega_c is not None else (cfg.delta or 0.0)
    return SystemParams(
        omega_c=omega_c, omega_m=1.0 if cfg.omega_m is None else cfg.omega_m,
        omega_l=cfg.omega_l or 0.0, G=cfg.G or 0.0,
        g=1.0 if cfg.g is None else cfg.g,
        E=complex(cfg.E or 0.0, cfg.E_im or 0.0),
        gamma=1.0 if cfg.gamma is None else cfg.gamma, nbar=cfg.nbar or 0.0)


def cmd_kerr(cfg: RunConfig):
    if cfg.from_physical:
        dp = derive(_physical(cfg), mode="paper", damping="paper")
        kp = analogy.kerr_equivalent(dp)
    else:
        _require(cfg, "delta", "chi", "input")
        _check_input(cfg.input)
        kp = analogy.KerrParams(cfg.delta, cfg.chi, _Gamma(cfg), cfg.input)
    rs = steady.solve_steady_states(kp.state_equation())
    rows = [(kp.S, a, s is steady.Stability.STABLE, kp.delta, -2.0 * kp.chi * a)
            for a, s in rs]
    extra = {"kerr": {"delta": kp.delta, "chi": kp.chi, "Gamma": kp.Gamma, "S": kp.S}}
    return ["S", "a", "stable", "beta0", "beta2_io"], rows, extra


def cmd_classical(cfg: RunConfig):
    _require(cfg, "R", "T", "beta0", "beta2")
    cp = analogy.ClassicalParams(cfg.R, cfg.T, cfg.beta0, cfg.beta2)
    grid = np.linspace(0.0, cfg.io_max or 10.0, cfg.points or 201)
    rows = [(I, analogy.classical_input_intensity(cp, float(I))) for I in grid]
    return ["I_o", "I_i"], rows, {"turning_points": list(analogy.classical_turning_points(cp))}


def cmd_quantum_compare(cfg: RunConfig):
    p = _physical(cfg)
    hc = quantum.HilbertConfig(cfg.n_cavity or 10, cfg.n_mirror or 4)
    rep = quantum.meanfield_discrepancy(p, hc, cfg.t_end or 20.0, cfg.dt or 0.01)
    return ["max_gap", "terminal_gap"], [(rep.max_gap, rep.terminal_gap)], None


HANDLERS = {
    "steady": cmd_steady, "sweep": cmd_sweep, "threshold": cmd_threshold,
    "evolve": cmd_evolve, "fig1": cmd_fig1, "kerr": cmd_kerr,
    "classical": cmd_classical, "quantum-compare": cmd_quantum_compare,
}


# -- argument parsing --------------------------------------------------------

def _flag(p, name, **kw):
    p.add_argument("--" + name.replace("_", "-"), dest=name, default=None, **kw)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="JSON config file")
    common.add_argument("--dump-config", action="store_true",
                        help="print the effective config as JSON and exit")
    _flag(common, "mode", choices=["paper", "derived"])
    _flag(common, "format", choices=["csv", "json"])
    _flag(common, "output", help="write to this path instead of stdout")

    damping = argparse.ArgumentParser(add_help=False)
    _flag(damping, "gamma2", type=float, help="Gamma value entering the state equation")
    _flag(damping, "gamma", type=float)
    _flag(damping, "consistent", action="store_const", const=True,
          help="take --gamma as Gamma (amplitude damping)")

    effective = argparse.ArgumentParser(add_help=False)
    _flag(effective, "delta_eff", type=float)
    _flag(effective, "two_chi", type=float)

    physical = argparse.ArgumentParser(add_help=False)
    for name in ("omega_c", "omega_m", "omega_l", "delta", "G", "g", "E", "E_im", "nbar"):
        _flag(physical, name, type=float)

    parser = argparse.ArgumentParser(prog="bistab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("steady", parents=[common, damping, effective],
                       help="steady-state roots at one input")
    _flag(p, "input", type=float)

    p = sub.add_parser("sweep", parents=[common, damping, effective],
                       help="up/down hysteresis sweep")
    _flag(p, "smin", type=float)
    _flag(p, "smax", type=float)
    _flag(p, "steps", type=int)

    p = sub.add_parser("threshold", parents=[common, damping],
                       help="critical effective detuning")
    _flag(p, "two_chi", type=float)

    p = sub.add_parser("evolve", parents=[common, damping, effective],
                       help="integrate the mean-field equation")
    _flag(p, "input", type=float)
    _flag(p, "u0_re", type=float)
    _flag(p, "u0_im", type=float)
    _flag(p, "t_end", type=float)
    _flag(p, "tol", type=float)

    p = sub.add_parser("fig1", parents=[common], help="input-output curves")
    _flag(p, "ratio", type=float, help="chi_eff / Gamma (default 0.5)")
    _flag(p, "detunings", type=float, nargs="+")
    _flag(p, "amax", type=float)
    _flag(p, "points", type=int)

    p = sub.add_parser("kerr", parents=[common, damping, physical],
                       help="Kerr-medium equivalent and its steady states")
    _flag(p, "chi", type=float)
    _flag(p, "input", type=float)
    _flag(p, "from_physical", action="store_const", const=True)

    p = sub.add_parser("classical", parents=[common], help="classical input-output curve")
    for name in ("R", "T", "beta0", "beta2", "io_max"):
        _flag(p, name, type=float)
    _flag(p, "points", type=int)

    p = sub.add_parser("quantum-compare", parents=[common, physical],
                       help="master equation vs mean field")
    _flag(p, "gamma", type=float)
    _flag(p, "n_cavity", type=int)
    _flag(p, "n_mirror", type=int)
    _flag(p, "t_end", type=float)
    _flag(p, "dt", type=float)
    return parser


def load_config(path: Optional[str]) -> RunConfig:
    if not path:
        return RunConfig()
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config must be a single JSON object")
    return RunConfig.from_mapping(data)


def resolve(argv: Optional[Sequence[str]] = None):
    args = build_parser().parse_args(argv)
    ns = vars(args)
    path = ns.pop("config") or os.environ.get(ENV_CONFIG)
    dump = ns.pop("dump_config")
    base = load_config(path)
    flags = RunConfig(**ns)
    cfg = base.merged(flags)
    if cfg.format is not None and cfg.format not in ("csv", "json"):
        raise UsageError("--format must be csv or json")
    return cfg, dump


def run(cfg: RunConfig) -> str:
    columns, rows, extra = HANDLERS[cfg.command](cfg)
    fmt = cfg.format or "csv"
    if fmt == "csv" and extra:
        for key, value in extra.items():
            print(f"{key}={json.dumps(_jsonable(value), sort_keys=True)}", file=sys.stderr)
    return render(columns, rows, fmt, extra)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg, dump = resolve(argv)
        text = cfg.to_json() if dump else run(cfg)
    except UsageError as exc:
        print(f"bistab: error: {exc}", file=sys.stderr)
        return 2
    except ParameterError as exc:
        print(f"bistab: error: {exc}", file=sys.stderr)
        return 2
    except TruncationBreach as exc:
        print(f"bistab: truncation breach: {exc}", file=sys.stderr)
        return 4
    except NumericalFailure as exc:
        print(f"bistab: numerical failure: {exc}", file=sys.stderr)
        return 3
    except BistabError as exc:
        print(f"bistab: error: {exc}", file=sys.stderr)
        return 3
    if cfg.output and not dump:
        with open(cfg.output, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
