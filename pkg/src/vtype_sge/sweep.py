"""Pump-rate and distance sweeps of the steady-state negativity."""
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .entanglement import negativity
from .model import PRESETS, ParameterError, SystemParams
from .steadystate import RESIDUAL_TOL, steady_analytic, steady_numeric

WORKERS_ENV = "VTYPE_SGE_WORKERS"
SPOT_CHECKS = 5
SPOT_TOL = 1e-8
PRESCAN_POINTS = 20
OPTIMUM_TOL = 1e-4

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class SpotCheckError(RuntimeError):
    """Analytic and numeric steady states disagree at a sweep point."""


@dataclass
class SweepTable:
    """Steady-state observables along a one-parameter sweep.

    ``key`` names the swept column (``"Lambda"`` or ``"R"``).
    """

    key: str
    values: np.ndarray
    negativity: np.ndarray
    rho99: np.ndarray
    rho37: np.ndarray
    rho68: np.ndarray
    residual: np.ndarray
    metadata: dict = field(default_factory=dict)
    labels: list = None

    def __len__(self):
        return len(self.values)

    def rows(self):
        for i in range(len(self.values)):
            row = {self.key: float(self.values[i])}
            if self.labels is not None:
                row["preset"] = self.labels[i]
            row.update(negativity=float(self.negativity[i]), rho99=float(self.rho99[i]),
                       rho37=complex(self.rho37[i]), rho68=complex(self.rho68[i]),
                       residual=float(self.residual[i]))
            yield row

    def argmax(self):
        return int(np.argmax(self.negativity))


def worker_count(workers=None):
    if workers is not None:
        return max(1, int(workers))
    raw = os.environ.get(WORKERS_ENV, "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ParameterError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


def steady_point(params):
    """Analytic steady state and its negativity: ``(SteadyState, float)``."""
    ss = steady_analytic(params)
    return ss, negativity(ss.state).value


def steady_negativity(params):
    return steady_point(params)[1]


def _evaluate(param_list, workers):
    if workers > 1 and len(param_list) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(steady_point, param_list,
                                 chunksize=max(1, len(param_list) // (4 * workers))))
    return [steady_point(p) for p in param_list]


def _table(key, values, results, metadata, labels=None):
    states = [ss.state for ss, _ in results]
    return SweepTable(
        key=key,
        values=np.asarray(values, dtype=float),
        negativity=np.array([n for _, n in results]),
        rho99=np.array([s.populations[8] for s in states]),
        rho37=np.array([s.rho37 for s in states]),
        rho68=np.array([s.rho68 for s in states]),
        residual=np.array([ss.residual for ss, _ in results]),
        metadata=metadata,
        labels=labels,
    )


def _metadata(params, grid, **extra):
    meta = {"params": params.to_dict(), "grid": grid,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds")}
    meta.update(extra)
    return meta


def spot_check(param_list, results, count=SPOT_CHECKS, seed=0, tol=SPOT_TOL):
    """Compare analytic against numeric steady states at random sweep points.

    Returns the largest elementwise deviation; raises :class:`SpotCheckError`
    above ``tol``.
    """
    candidates = [i for i, p in enumerate(param_list) if p.pumped]
    if not candidates:
        return 0.0
    rng = np.random.default_rng(seed)
    picks = rng.choice(candidates, size=min(count, len(candidates)), replace=False)
    worst = 0.0
    for i in sorted(picks):
        numeric = steady_numeric(param_list[i]).state.vector
        dev = float(np.max(np.abs(results[i][0].state.vector - numeric)))
        worst = max(worst, dev)
        if dev > tol:
            raise SpotCheckError(
                f"analytic and numeric steady states differ by {dev:.3e} at {param_list[i]}"
            )
    return worst


def sweep_pump(params, lambda_grid, spot_checks=SPOT_CHECKS, seed=0, workers=None):
    """Steady negativity with ``Lambda1 = Lambda2 = Lambda`` over a grid."""
    grid = np.asarray(lambda_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("lambda grid must be a non-empty 1-D sequence")
    if np.any(grid < 0):
        raise ValueError("pump rates must be non-negative")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("lambda grid must be strictly increasing")
    param_list = [params.with_pump(lam) for lam in grid]
    results = _evaluate(param_list, worker_count(workers))
    worst = spot_check(param_list, results, spot_checks, seed)
    meta = _metadata(params, grid.tolist(), spot_check_max_deviation=worst)
    return _table("Lambda", grid, results, meta)


def sweep_distance(presets, Lambda, r=1.2, gamma1=1.0, workers=None):
    """Steady negativity for several tabulated distances at one pump rate.

    Rows are ordered by increasing ``R``.
    """
    unknown = [k for k in presets if k not in PRESETS]
    if unknown:
        raise ParameterError(
            f"unknown preset(s) {', '.join(unknown)}; valid keys: {', '.join(PRESETS)}"
        )
    if len(set(presets)) != len(presets):
        raise ValueError("preset keys must be distinct")
    if Lambda < 0:
        raise ValueError("pump rate must be non-negative")
    keys = sorted(presets, key=lambda k: PRESETS[k][0])
    param_list = [SystemParams.from_preset(k, gamma1=gamma1, r=r, Lambda1=Lambda, Lambda2=Lambda)
                  for k in keys]
    results = _evaluate(param_list, worker_count(workers))
    meta = _metadata(param_list[0], keys, Lambda=Lambda)
    meta.pop("params")
    meta.update(r=r, gamma1=gamma1)
    return _table("R", [PRESETS[k][0] for k in keys], results, meta, labels=keys)


# ------------------------------------------------------------ optimum


@dataclass(frozen=True)
class PumpOptimum:
    Lambda: float
    negativity: float
    status: str  # "golden_section", "grid_fallback" or "no_entanglement"
    evaluations: int = 0

    @property
    def entangled(self):
        return self.status != "no_entanglement"


def golden_section_max(f, a, b, tol):
    """Maximize a unimodal ``f`` on ``[a, b]`` to an interval width ``tol``.

    Returns ``(x, f(x), evaluations)``.
    """
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    evals = 2
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
        evals += 1
    x = 0.5 * (a + b)
    return x, f(x), evals + 1


def is_unimodal(values, rel_tol=1e-12):
    """True if ``values`` rise (weakly) to one peak and then fall (weakly)."""
    v = np.asarray(values, dtype=float)
    slack = rel_tol * max(1e-300, float(np.max(np.abs(v))))
    peak = int(np.argmax(v))
    rising = np.all(np.diff(v[: peak + 1]) >= -slack)
    falling = np.all(np.diff(v[peak:]) <= slack)
    return bool(rising and falling)


def find_optimal_pump(params, bracket, tol=OPTIMUM_TOL, prescan=PRESCAN_POINTS):
    """Pump rate maximizing the steady negativity inside ``bracket``.

    A coarse pre-scan guards the unimodality assumption of the golden-section
    search; a non-unimodal pre-scan falls back to a grid of spacing ``tol``.
    ``tol`` is in units of ``gamma1``.
    """
    low, high = map(float, bracket)
    if not 0 <= low < high:
        raise ValueError(f"bracket must satisfy 0 <= low < high, got ({low}, {high})")
    tol = tol * params.gamma1

    def f(lam):
        return steady_negativity(params.with_pump(lam))

    xs = np.linspace(low, high, prescan)
    ys = np.array([f(x) for x in xs])
    if not np.any(ys > 0):
        return PumpOptimum(Lambda=float("nan"), negativity=0.0, status="no_entanglement",
                           evaluations=prescan)
    if is_unimodal(ys):
        k = int(np.argmax(ys))
        a, b = xs[max(k - 1, 0)], xs[min(k + 1, prescan - 1)]
        x, fx, evals = golden_section_max(f, a, b, tol)
        return PumpOptimum(Lambda=float(x), negativity=float(fx), status="golden_section",
                           evaluations=prescan + evals)
    n = min(int(math.ceil((high - low) / tol)) + 1, 200_001)
    grid = np.linspace(low, high, n)
    vals = np.array([f(x) for x in grid])
    k = int(np.argmax(vals))
    return PumpOptimum(Lambda=float(grid[k]), negativity=float(vals[k]), status="grid_fallback",
                       evaluations=prescan + n)


def parse_grid(spec):
    """``"start:stop:step"`` -> inclusive, strictly increasing grid."""
    try:
        start, stop, step = (float(x) for x in spec.split(":"))
    except ValueError:
        raise ValueError(f"grid must look like start:stop:step, got {spec!r}") from None
    if step <= 0 or stop < start:
        raise ValueError(f"grid needs step > 0 and stop >= start, got {spec!r}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


__all__ = [
    "SweepTable", "PumpOptimum", "SpotCheckError", "sweep_pump", "sweep_distance",
    "find_optimal_pump", "golden_section_max", "is_unimodal", "parse_grid",
    "steady_negativity", "steady_point", "RESIDUAL_TOL",
]
