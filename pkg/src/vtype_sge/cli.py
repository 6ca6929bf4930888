"""Command-line front end.

    vtype-sge trajectory --preset R0.83 --r 1.2 --tmax 5
    vtype-sge steady --Gamma 0.96 --r 1.2 --Lambda 0.08
    vtype-sge sweep-pump --Gamma 0.96 --grid 0.005:0.5:0.005 --format json
    vtype-sge sweep-distance --Lambda 0.08
    vtype-sge optimum --Gamma 0.96 --bracket 0.005 0.5
    vtype-sge validate

Rates are in units of gamma1. ``--gamma1`` only rescales the time column of
``trajectory`` output. A JSON output file can be passed back through
``--config`` to repeat the run; explicit flags override config values.
"""
import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .dynamics import default_t_max, simulate
from .entanglement import negativity
from .model import BASIS_LABELS, PRESETS, ParameterError, SystemParams
from .steadystate import steady_analytic, steady_numeric
from .sweep import find_optimal_pump, parse_grid, sweep_distance, sweep_pump
from .validation import run_all

COMMANDS = ("trajectory", "steady", "sweep-pump", "sweep-distance", "optimum", "validate")

DEFAULTS = {
    "command": None,
    "gamma1": 1.0,
    "r": 1.2,
    "Gamma": None,
    "G": None,
    "Lambda": None,
    "Lambda1": None,
    "Lambda2": None,
    "preset": None,
    "presets": None,
    "tmax": None,
    "dt": 1e-3,
    "initial": "emu",
    "grid": "0.005:0.5:0.005",
    "bracket": [0.005, 0.5],
    "route": "analytic",
    "format": "csv",
    "seed": 0,
}

STATE_COLUMNS = [f"rho{i}{i}" for i in range(1, 10)] + [
    "re_rho37", "im_rho37", "re_rho68", "im_rho68"]

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_VALIDATION = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


def build_parser():
    p = argparse.ArgumentParser(prog="vtype-sge", description=__doc__.split("\n")[0])
    p.add_argument("command", nargs="?", choices=COMMANDS,
                   help="may be omitted when --config supplies it")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    phys = p.add_argument_group("physical parameters (units of gamma1)")
    phys.add_argument("--gamma1", type=float, help="gamma1 in output units; rescales time only")
    phys.add_argument("--r", type=float, help="frequency ratio omega2 / omega1 (default 1.2)")
    phys.add_argument("--Gamma", type=float, help="cross damping Gamma1")
    phys.add_argument("--G", type=float, help="level-shift coupling G1")
    phys.add_argument("--Lambda", type=float, help="pump rate for both channels")
    phys.add_argument("--Lambda1", type=float, help="pump rate |g> -> |e>")
    phys.add_argument("--Lambda2", type=float, help="pump rate |g> -> |mu>")
    phys.add_argument("--preset", choices=sorted(PRESETS), help="tabulated (Gamma, G) pair")
    run = p.add_argument_group("run controls")
    run.add_argument("--tmax", type=float, help="final time (default 10 relaxation times)")
    run.add_argument("--dt", type=float, help="nominal step (default 1e-3)")
    run.add_argument("--initial", choices=BASIS_LABELS, help="initial basis population")
    run.add_argument("--grid", help="pump grid start:stop:step")
    run.add_argument("--bracket", type=float, nargs=2, metavar=("LO", "HI"))
    run.add_argument("--presets", nargs="+", choices=sorted(PRESETS),
                     help="presets for sweep-distance (default all)")
    run.add_argument("--route", choices=("analytic", "numeric"), help="steady-state route")
    run.add_argument("--seed", type=int, help="seed for validate and sweep spot checks")
    out = p.add_argument_group("output")
    out.add_argument("--out", help="output path (default stdout)")
    out.add_argument("--format", choices=("csv", "json"))
    out.add_argument("--config", help="flat key-value file (JSON or key = value lines)")
    return p


def load_config(path):
    """Read a flat configuration; a JSON output document yields its run config."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            data[key] = _coerce(key, value)
    else:
        if isinstance(data, dict) and "metadata" in data and "config" in data["metadata"]:
            data = data["metadata"]["config"]
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: configuration must be a flat mapping")
    unknown = set(data) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    return data


def _coerce(key, value):
    if key in ("bracket", "presets"):
        parts = value.replace(",", " ").split()
        return [float(x) for x in parts] if key == "bracket" else parts
    if key in ("command", "preset", "initial", "grid", "route", "format"):
        return value
    if key == "seed":
        return int(value)
    return float(value)


def resolve(args):
    """Merge defaults, config file and flags (flags win)."""
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(load_config(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    if cfg["command"] is None:
        raise ConfigError("no command given (positional argument or 'command' in --config)")
    if cfg["command"] not in COMMANDS:
        raise ConfigError(f"unknown command {cfg['command']!r}")
    if cfg["preset"] is not None and (cfg["Gamma"] is not None or cfg["G"] is not None):
        raise ConfigError("--preset and explicit --Gamma/--G are mutually exclusive")
    if cfg["Lambda"] is not None and (cfg["Lambda1"] is not None or cfg["Lambda2"] is not None):
        raise ConfigError("--Lambda and --Lambda1/--Lambda2 are mutually exclusive")
    if cfg["gamma1"] <= 0:
        raise ConfigError("--gamma1 must be positive")
    return cfg


def make_params(cfg):
    if cfg["Lambda"] is not None:
        l1 = l2 = cfg["Lambda"]
    else:
        l1 = cfg["Lambda1"] or 0.0
        l2 = cfg["Lambda2"] or 0.0
    if cfg["preset"] is not None:
        return SystemParams.from_preset(cfg["preset"], r=cfg["r"], Lambda1=l1, Lambda2=l2)
    return SystemParams(gamma1=1.0, r=cfg["r"], Gamma1=cfg["Gamma"] or 0.0, G1=cfg["G"] or 0.0,
                        Lambda1=l1, Lambda2=l2)


def _state_cells(vector):
    return [float(x) for x in vector]


def run_trajectory(cfg):
    params = make_params(cfg)
    t_max = cfg["tmax"] if cfg["tmax"] is not None else default_t_max(params)
    traj = simulate(params, cfg["initial"], t_max=t_max, dt=cfg["dt"])
    columns = ["t"] + STATE_COLUMNS + ["negativity"]
    times = traj.times / cfg["gamma1"]
    rows = [[float(t)] + _state_cells(y) + [float(n)]
            for t, y, n in zip(times, traj.states, traj.negativities)]
    meta = {"params": params.to_dict(), "t_max": t_max, "trace_drift": traj.trace_drift(),
            **{k: v for k, v in traj.stats.items()}}
    return columns, rows, meta, EXIT_OK


def run_steady(cfg):
    params = make_params(cfg)
    ss = steady_analytic(params) if cfg["route"] == "analytic" else steady_numeric(params)
    neg = negativity(ss.state)
    columns = ["Lambda1", "Lambda2"] + STATE_COLUMNS + ["negativity", "residual", "route"]
    rows = [[params.Lambda1, params.Lambda2] + _state_cells(ss.state.vector)
            + [neg.value, ss.residual, ss.route]]
    meta = {"params": params.to_dict(), "ground_state_by_convention": ss.ground_state_by_convention}
    return columns, rows, meta, EXIT_OK


def _table_rows(table):
    rows = []
    for row in table.rows():
        cells = [row[table.key]]
        if table.labels is not None:
            cells = [row["preset"]] + cells
        cells += [row["negativity"], row["rho99"], row["rho37"].real, row["rho37"].imag,
                  row["rho68"].real, row["rho68"].imag, row["residual"]]
        rows.append(cells)
    return rows


_TABLE_TAIL = ["negativity", "rho99", "re_rho37", "im_rho37", "re_rho68", "im_rho68", "residual"]


def run_sweep_pump(cfg):
    params = make_params(cfg)
    table = sweep_pump(params, parse_grid(cfg["grid"]), seed=cfg["seed"])
    return ["Lambda"] + _TABLE_TAIL, _table_rows(table), table.metadata, EXIT_OK


def run_sweep_distance(cfg):
    if cfg["Lambda"] is None:
        raise ConfigError("sweep-distance needs --Lambda")
    presets = cfg["presets"] or list(PRESETS)
    table = sweep_distance(presets, cfg["Lambda"], r=cfg["r"])
    return ["preset", "R"] + _TABLE_TAIL, _table_rows(table), table.metadata, EXIT_OK


def run_optimum(cfg):
    params = make_params(cfg)
    opt = find_optimal_pump(params, cfg["bracket"])
    columns = ["Lambda_opt", "negativity", "status", "evaluations"]
    rows = [[opt.Lambda, opt.negativity, opt.status, opt.evaluations]]
    return columns, rows, {"params": params.to_dict()}, EXIT_OK


def run_validate(cfg):
    results = run_all(seed=cfg["seed"])
    columns = ["check", "passed", "value", "tolerance", "seconds", "detail"]
    rows = [[r.name, r.passed, r.value, r.tolerance, r.seconds, r.detail] for r in results]
    failed = [r.name for r in results if not r.passed]
    meta = {"failed": failed, "passed": len(results) - len(failed), "total": len(results)}
    return columns, rows, meta, EXIT_VALIDATION if failed else EXIT_OK


RUNNERS = {
    "trajectory": run_trajectory,
    "steady": run_steady,
    "sweep-pump": run_sweep_pump,
    "sweep-distance": run_sweep_distance,
    "optimum": run_optimum,
    "validate": run_validate,
}


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def render_csv(columns, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json_value(value):
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    return value


def render_json(columns, rows, metadata):
    doc = {"metadata": metadata,
           "rows": [{c: _json_value(v) for c, v in zip(columns, row)} for row in rows]}
    return json.dumps(doc, indent=1, default=_json_value, allow_nan=True) + "\n"


def _error_record(exc):
    return json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}})


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
    except (ConfigError, OSError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(_error_record(exc), file=sys.stderr)
        return EXIT_USAGE
    try:
        columns, rows, meta, status = RUNNERS[cfg["command"]](cfg)
    except (ParameterError, ConfigError, ValueError, RuntimeError, ArithmeticError) as exc:
        print(_error_record(exc), file=sys.stderr)
        return EXIT_ERROR

    meta = {"command": cfg["command"], "version": __version__,
            "generated": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "config": dict(cfg), **meta}
    text = render_json(columns, rows, meta) if cfg["format"] == "json" else render_csv(columns, rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if status == EXIT_VALIDATION:
        failed = ", ".join(meta["failed"])
        print(json.dumps({"error": {"type": "ValidationFailure", "message": failed}}),
              file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
