"""Invariant suite behind ``vtype-sge validate``.

Each check returns a :class:`CheckResult` holding the worst residual met and
the tolerance it was held to.
"""
import time
from dataclasses import dataclass

import numpy as np

from .dynamics import (analytic_pumpless_vectors, default_t_max, integrate, relaxation_time)
from .entanglement import negativity_generic, pt_eigenvalues_pumpless, pt_spectrum_generic
from .model import (PRESETS, ReducedState, SystemParams, apply_generator, build_generator,
                    rhs_pumped_kernel, rhs_pumpless_kernel)
from .steadystate import steady_analytic, steady_numeric
from .sweep import parse_grid, sweep_pump

R_DEFAULT = 1.2


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""
    seconds: float = 0.0


def _check(name, value, tolerance, detail="", higher_is_better=False):
    passed = value >= tolerance if higher_is_better else value < tolerance
    return CheckResult(name, bool(passed), float(value), float(tolerance), detail)


def min_density_eigenvalue(states, chunk=4096):
    """Smallest eigenvalue of the 9x9 matrices rebuilt from reduced states."""
    states = np.asarray(states)
    worst = np.inf
    for start in range(0, len(states), chunk):
        block = states[start:start + chunk]
        mats = np.zeros((len(block), 9, 9), dtype=np.complex128)
        idx = np.arange(9)
        mats[:, idx, idx] = block[:, :9]
        c37 = block[:, 9] + 1j * block[:, 10]
        c68 = block[:, 11] + 1j * block[:, 12]
        mats[:, 2, 6], mats[:, 6, 2] = c37, np.conj(c37)
        mats[:, 5, 7], mats[:, 7, 5] = c68, np.conj(c68)
        worst = min(worst, float(np.linalg.eigvalsh(mats).min()))
    return worst


def random_support_state(rng):
    p = rng.random(9)
    p /= p.sum()
    c37 = np.sqrt(p[2] * p[6]) * rng.random() * np.exp(2j * np.pi * rng.random())
    c68 = np.sqrt(p[5] * p[7]) * rng.random() * np.exp(2j * np.pi * rng.random())
    return ReducedState.from_elements(p, c37, c68)


def random_params(rng, pumped=True):
    lam = rng.uniform(1e-3, 2.0, size=2) if pumped else (0.0, 0.0)
    return SystemParams(gamma1=1.0, r=rng.uniform(0.5, 2.0), Gamma1=rng.uniform(0.0, 0.96),
                        G1=rng.uniform(-3.0, 8.0), Lambda1=lam[0], Lambda2=lam[1])


def check_generator(rng, samples=50):
    worst = 0.0
    for _ in range(samples):
        params = random_params(rng)
        gen = build_generator(params)
        state = random_support_state(rng)
        full = ReducedState.from_matrix(apply_generator(gen, state.to_matrix()))
        worst = max(worst, float(np.max(np.abs(full.vector - rhs_pumped_kernel(state.vector, params.rates())))))
    return _check("generator_matches_reduced_equations", worst, 1e-12)


def check_trace_annihilation(rng, samples=20):
    worst = 0.0
    for _ in range(samples):
        gen = build_generator(random_params(rng))
        x = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
        worst = max(worst, abs(np.trace(apply_generator(gen, x + x.conj().T))))
    return _check("generator_preserves_trace", worst, 1e-12)


def check_analytic_trajectories(r=R_DEFAULT, t_max=5.0, dt=1e-3):
    worst, rho22_err, drift, min_eig = 0.0, 0.0, 0.0, np.inf
    for key in PRESETS:
        params = SystemParams.from_preset(key, r=r)
        traj = integrate(rhs_pumpless_kernel, ReducedState.basis("emu"), t_max, dt, params)
        exact = analytic_pumpless_vectors(params, traj.times)
        worst = max(worst, float(np.max(np.abs(traj.states - exact))))
        law = np.exp(-2.0 * (params.gamma1 + params.gamma2) * traj.times)
        rho22_err = max(rho22_err, float(np.max(np.abs(traj.states[:, 1] - law))))
        drift = max(drift, traj.trace_drift())
        min_eig = min(min_eig, min_density_eigenvalue(traj.states))
    return [
        _check("pumpless_integrator_vs_closed_form", worst, 1e-6),
        _check("rho22_exponential_law", rho22_err, 1e-8),
        _check("trace_drift", drift, 1e-9),
        _check("min_density_eigenvalue", -min_eig, 1e-7, detail=f"min eigenvalue {min_eig:.3e}"),
    ]


def check_convergence_order(r=R_DEFAULT, dt=2.5e-3):
    ratios = []
    for key in PRESETS:
        params = SystemParams.from_preset(key, r=r)
        errs = []
        for step in (dt, dt / 2):
            traj = integrate(rhs_pumpless_kernel, ReducedState.basis("emu"), 5.0, step, params,
                             negativity=False)
            errs.append(np.max(np.abs(traj.states - analytic_pumpless_vectors(params, traj.times))))
        ratios.append(errs[0] / errs[1])
    return _check("fourth_order_convergence", min(ratios), 8.0, higher_is_better=True,
                  detail="min error ratio when halving dt")


def check_spectrum_routes(r=R_DEFAULT, samples=200):
    params = SystemParams.from_preset("R0.83", r=r)
    traj = integrate(rhs_pumpless_kernel, ReducedState.basis("emu"), 10.0, 1e-3, params,
                     negativity=False)
    picks = np.linspace(0, len(traj) - 1, samples).astype(int)
    worst, other_min = 0.0, np.inf
    for i in picks:
        state = traj.state(i)
        closed = pt_eigenvalues_pumpless(state)
        generic = pt_spectrum_generic(state.to_matrix())
        worst = max(worst, float(np.max(np.abs(np.sort(closed) - generic))))
        other_min = min(other_min, float(closed[:8].min()))
    return [
        _check("closed_form_pt_spectrum", worst, 1e-10),
        _check("only_lambda9_negative", max(0.0, -other_min), 1e-12),
    ]


def check_maximal_state():
    psi = np.zeros(9)
    psi[[0, 4, 8]] = 1.0 / np.sqrt(3.0)
    value = negativity_generic(np.outer(psi, psi)).value
    return _check("maximally_entangled_negativity", abs(value - 1.0), 1e-12)


def check_steady_routes(rng, samples=100):
    worst, resid = 0.0, 0.0
    for _ in range(samples):
        params = random_params(rng)
        a = steady_analytic(params)
        n = steady_numeric(params)
        worst = max(worst, float(np.max(np.abs(a.state.vector - n.state.vector))))
        resid = max(resid, a.residual / params.gamma1)
    return [
        _check("steady_analytic_vs_numeric", worst, 1e-8),
        _check("steady_analytic_residual", resid, 1e-9),
    ]


def check_g_independence(r=R_DEFAULT, Gamma=0.96, Lambda=0.08):
    states = [steady_numeric(SystemParams(1.0, r, Gamma, g, Lambda, Lambda)).state.vector
              for g in (-0.24, 0.9, 2.4, 8.0)]
    spread = float(np.max(np.ptp(np.array(states), axis=0)))
    return _check("steady_state_independent_of_G", spread, 1e-9)


def check_pump_curve(r=R_DEFAULT):
    grid = parse_grid("0.005:0.5:0.005")
    peaks = {}
    argmax = None
    for gamma in (0.8, 0.9, 0.96):
        table = sweep_pump(SystemParams(1.0, r, gamma, 0.0), grid)
        peaks[gamma] = float(table.negativity.max())
        if gamma == 0.96:
            argmax = float(table.values[table.argmax()])
    base = SystemParams(1.0, r, 0.96, 0.0)
    n0 = sweep_pump(base, [0.0, 1e-6]).negativity
    n_big = sweep_pump(base, [50.0]).negativity[0]
    ordered = peaks[0.96] > peaks[0.9] > peaks[0.8]
    return [
        _check("no_pump_no_steady_entanglement", max(n0), 1e-8),
        CheckResult("optimal_pump_near_0.08", 0.04 <= argmax <= 0.16, argmax, 0.16,
                    "argmax must lie in [0.04, 0.16]"),
        CheckResult("peak_negativity_ordered_by_Gamma", ordered, peaks[0.96], 0.0,
                    f"peaks {peaks}"),
        _check("strong_pump_kills_entanglement", n_big, 1e-4),
    ]


def check_transient_shape(r=R_DEFAULT):
    survival = {}
    results = []
    for key in ("R0.83", "R1.18", "R2.78"):
        params = SystemParams.from_preset(key, r=r)
        horizon = default_t_max(params)
        traj = integrate(rhs_pumpless_kernel, ReducedState.basis("emu"), horizon, 1e-3, params)
        neg = traj.negativities
        alive = traj.times[neg > 1e-3]
        survival[key] = float(alive[-1]) if alive.size else 0.0
        if key != "R2.78":
            results.append(_check(f"transient_peak_{key}", float(neg.max()), 1e-3,
                                  higher_is_better=True))
        results.append(_check(f"transient_decay_{key}", float(neg[-1]), 1e-4,
                              detail=f"N at t = {horizon:.3g} (10 relaxation times "
                                     f"{relaxation_time(params):.3g})"))
        results.append(_check(f"transient_starts_unentangled_{key}", float(neg[0]), 1e-300))
    results.append(CheckResult("survival_R0.83_exceeds_R2.78",
                               survival["R0.83"] > survival["R2.78"], survival["R0.83"],
                               survival["R2.78"], f"survival times {survival}"))
    return results


def run_all(seed=0):
    """Run every check; returns a list of :class:`CheckResult`."""
    rng = np.random.default_rng(seed)
    steps = [
        lambda: check_generator(rng),
        lambda: check_trace_annihilation(rng),
        check_analytic_trajectories,
        check_convergence_order,
        check_spectrum_routes,
        check_maximal_state,
        lambda: check_steady_routes(rng),
        check_g_independence,
        check_pump_curve,
        check_transient_shape,
    ]
    results = []
    for step in steps:
        start = time.perf_counter()
        out = step()
        elapsed = time.perf_counter() - start
        out = out if isinstance(out, list) else [out]
        results.extend(CheckResult(**{**r.__dict__, "seconds": elapsed / len(out)}) for r in out)
    return results
