"""Command-line scans over the dimer model, CSV out.

Subcommands: spectrum, berry, witness, echo, triple.  --R and --v accept
either a fixed value ("1.5") or an axis spec ("start:stop:count"); everything
else is fixed per run.  A flat key = value config file can hold any flag;
explicit flags win.  Output is deterministic: identical configuration,
identical bytes.

Exit codes: 0 success, 1 computation or I/O failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .berry import berry_phase_closed_form
from .echo import (
    circular_drive,
    loschmidt_adiabatic,
    loschmidt_dynamical,
    nonlinearity_witness,
    trace_mean,
)
from .errors import DimerPhaseError, ModelDegenerateError
from .model import Eigenstate, ModelParams, stationary_states
from .triple import transport_sign

MODES = ("spectrum", "berry", "witness", "echo", "triple")

_DEFAULTS = {
    "R": "0",
    "v": "1",
    "c": "1",
    "phi": "0",
    "loop_points": "256",
    "dt": "0.002",
    "T": "20",
    "tol": "1e-9",
    "theta": repr(0.5 * math.pi),
    "amp": "1",
    "workers": "1",
}

_CONFIG_KEYS = set(_DEFAULTS) | {"out"}


class UsageError(Exception):
    """Bad flags or config; maps to exit code 2."""


@dataclass(frozen=True)
class ScanConfig:
    mode: str
    R: object  # float or 1-D ndarray
    v: object
    c: float
    phi: float
    loop_points: int
    dt: float
    T: float
    tol: float
    theta: float
    amp: float
    workers: int
    out: Optional[str]
    config_hash: str
    summary: str


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dimerphase",
        description="Scans over a nonlinear two-mode model: spectra, phases, witnesses, echoes.",
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        sp = sub.add_parser(mode, help=f"run a {mode} scan")
        sp.add_argument("--out", help="output CSV path (default: stdout)")
        sp.add_argument("--config", help="flat key = value config file")
        sp.add_argument("--R", help="bias: value or start:stop:count axis")
        sp.add_argument("--v", help="coupling: value or start:stop:count axis")
        sp.add_argument("--c", help="nonlinearity strength")
        sp.add_argument("--phi", help="coupling phase")
        sp.add_argument("--loop-points", help="loop samples for transport scans")
        sp.add_argument("--dt", help="integrator time step")
        sp.add_argument("--T", help="drive duration")
        sp.add_argument("--tol", help="validation tolerance")
        sp.add_argument("--theta", help="drive polar angle (echo)")
        sp.add_argument("--amp", help="drive amplitude (echo)")
        sp.add_argument("--workers", help="parallel workers for grid scans")
    return parser


def load_config_file(path: str) -> dict[str, str]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, _, val = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = val.strip()
    return values


def _parse_axis(text: str, name: str):
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"--{name}: axis spec must be start:stop:count")
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise UsageError(f"--{name}: bad axis spec {text!r}") from exc
        if count < 2:
            raise UsageError(f"--{name}: an axis needs at least 2 points")
        return np.linspace(start, stop, count)
    try:
        return float(text)
    except ValueError as exc:
        raise UsageError(f"--{name}: expected a number or axis spec") from exc


def _parse_float(text: str, name: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise UsageError(f"--{name}: expected a number, got {text!r}") from exc


def _parse_int(text: str, name: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise UsageError(f"--{name}: expected an integer, got {text!r}") from exc


def resolve_config(args: argparse.Namespace) -> ScanConfig:
    file_values: dict[str, str] = {}
    if args.config:
        file_values = load_config_file(args.config)

    def pick(key: str) -> str:
        flag = getattr(args, key, None)
        if flag is not None:
            return flag
        if key in file_values:
            return file_values[key]
        return _DEFAULTS[key]

    raw = {key: pick(key) for key in _DEFAULTS}
    out = args.out if args.out is not None else file_values.get("out")

    R = _parse_axis(raw["R"], "R")
    v = _parse_axis(raw["v"], "v")
    c = _parse_float(raw["c"], "c")
    phi = _parse_float(raw["phi"], "phi")
    loop_points = _parse_int(raw["loop_points"], "loop-points")
    dt = _parse_float(raw["dt"], "dt")
    T = _parse_float(raw["T"], "T")
    tol = _parse_float(raw["tol"], "tol")
    theta = _parse_float(raw["theta"], "theta")
    amp = _parse_float(raw["amp"], "amp")
    workers = _parse_int(raw["workers"], "workers")

    if tol <= 0 or dt <= 0 or T <= 0:
        raise UsageError("tol, dt, and T must all be positive")
    if loop_points < 16:
        raise UsageError("--loop-points: need at least 16")
    if workers < 1:
        raise UsageError("--workers: need at least 1")
    if not 0.0 <= theta <= math.pi:
        raise UsageError("--theta: must lie in [0, pi]")
    if amp < 0.0:
        raise UsageError("--amp: must be >= 0")
    if isinstance(v, float) and v < 0.0:
        raise UsageError("--v: coupling must be >= 0")
    if args.mode in ("echo", "triple"):
        for name, val in (("R", R), ("v", v)):
            if isinstance(val, np.ndarray):
                raise UsageError(f"--{name}: {args.mode} takes a fixed value, not an axis")

    canonical = "\n".join([f"mode={args.mode}"] + [f"{k}={raw[k]}" for k in sorted(raw)])
    digest = hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]
    summary = " ".join(f"{k}={raw[k]}" for k in sorted(raw))
    return ScanConfig(
        mode=args.mode,
        R=R,
        v=v,
        c=c,
        phi=phi,
        loop_points=loop_points,
        dt=dt,
        T=T,
        tol=tol,
        theta=theta,
        amp=amp,
        workers=workers,
        out=out,
        config_hash=digest,
        summary=summary,
    )


def _fmt(x: float) -> str:
    return "%.12g" % x


def _axis_values(spec) -> list[float]:
    if isinstance(spec, np.ndarray):
        return [float(x) for x in spec]
    return [float(spec)]


def _eval_point(task: tuple) -> tuple:
    """One grid point; module-level so worker processes can import it."""
    mode, R, v, c, phi, tol = task
    params = ModelParams(R=R, c=c, v=v, phi=phi)
    if mode == "spectrum":
        if v == 0.0 and R == 0.0:
            return (R, v, None, None, None, None)
        energies = list(stationary_states(params, tol).energies)
        energies += [None] * (4 - len(energies))
        return (R, v) + tuple(energies[:4])
    if mode == "berry":
        lowest = stationary_states(params, tol).states[0]
        gamma = berry_phase_closed_form(v, lowest.energy)
        return (R, v, gamma / math.pi)
    if mode == "witness":
        report = nonlinearity_witness(params, tol)
        ratio = v / c if c > 0 else None
        return (ratio, R, report.witness)
    raise ValueError(f"no point evaluator for mode {mode!r}")


def _map_tasks(tasks: list[tuple], workers: int) -> list[tuple]:
    if workers <= 1 or len(tasks) < 4:
        return [_eval_point(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_eval_point, tasks, chunksize=chunk))


def _grid_rows(cfg: ScanConfig) -> list[tuple]:
    tasks = [
        (cfg.mode, R, v, cfg.c, cfg.phi, cfg.tol)
        for R in _axis_values(cfg.R)
        for v in _axis_values(cfg.v)
    ]
    return _map_tasks(tasks, cfg.workers)


def run_spectrum_scan(cfg: ScanConfig):
    columns = ("R", "v", "E1", "E2", "E3", "E4")
    return columns, [], _grid_rows(cfg)


def run_berry_scan(cfg: ScanConfig):
    columns = ("R", "v", "gamma_over_pi")
    return columns, [], _grid_rows(cfg)


def run_witness_scan(cfg: ScanConfig):
    columns = ("v_over_c", "R", "witness")
    return columns, [], _grid_rows(cfg)


def _echo_initial(base: ModelParams, tol: float) -> Eigenstate:
    if base.v > 0.0 or base.R != 0.0:
        return stationary_states(base, tol).states[0]
    # Fully degenerate base: the first basis state is stationary at -c/2.
    return Eigenstate(1.0 + 0.0j, 0.0j, -0.5 * base.c, -1.0, 0.0)


def run_echo(cfg: ScanConfig):
    base = ModelParams(R=float(cfg.R), c=cfg.c, v=float(cfg.v), phi=cfg.phi)
    initial = _echo_initial(base, cfg.tol)
    if base.v > 0.0 or base.R != 0.0:
        try:
            s = nonlinearity_witness(base, cfg.tol).witness
        except ModelDegenerateError:
            s = 0.0
    else:
        s = 0.0
    drive = circular_drive(base, cfg.amp, cfg.theta, cfg.T)
    trace = loschmidt_dynamical(initial, base, drive, cfg.dt)
    comments = [
        "summary: theta=%s s=%s L_adiabatic=%s L_mean=%s"
        % (
            _fmt(cfg.theta),
            _fmt(s),
            _fmt(loschmidt_adiabatic(cfg.theta, s)),
            _fmt(trace_mean(trace)),
        )
    ]
    rows = list(zip(trace.times, trace.values))
    return ("t", "L"), comments, rows


def run_triple_table(cfg: ScanConfig):
    columns = ("loop", "psi_n_minus_1", "psi_n", "psi_n_plus_1")
    rows = []
    for loop_name in ("phi", "theta"):
        signs = [transport_sign(loop_name, lvl, cfg.loop_points) for lvl in (-1, 0, 1)]
        rows.append((loop_name, "%+d" % signs[0], "%+d" % signs[1], "%+d" % signs[2]))
    return columns, [], rows


def _render(cfg: ScanConfig, columns, comments, rows) -> str:
    lines = [
        f"# dimerphase {__version__}",
        f"# mode: {cfg.mode}",
        f"# config: {cfg.summary}",
        f"# config-hash: {cfg.config_hash}",
    ]
    lines.extend(f"# {c}" for c in comments)
    lines.append(",".join(columns))
    for row in rows:
        cells = []
        for x in row:
            if x is None:
                cells.append("")
            elif isinstance(x, str):
                cells.append(x)
            else:
                cells.append(_fmt(x))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


_RUNNERS = {
    "spectrum": run_spectrum_scan,
    "berry": run_berry_scan,
    "witness": run_witness_scan,
    "echo": run_echo,
    "triple": run_triple_table,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
    except UsageError as exc:
        print(f"dimerphase: {exc}", file=sys.stderr)
        return 2

    try:
        columns, comments, rows = _RUNNERS[cfg.mode](cfg)
        text = _render(cfg, columns, comments, rows)
        if cfg.out:
            with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"dimerphase: cannot write {cfg.out}: {exc}", file=sys.stderr)
        return 1
    except (DimerPhaseError, ValueError, ArithmeticError) as exc:
        print(f"dimerphase: {exc}", file=sys.stderr)
        return 1
    return 0


def entry() -> None:
    sys.exit(main())
