"""Time evolution of the reduced two-atom state.

``integrate`` is a classic fourth-order Runge-Kutta stepper with a
step-doubling error estimate; the driver loop is a compiled kernel when numba
is available. ``analytic_pumpless`` evaluates the closed-form pumpless
solution started from ``|e mu>`` and serves as the oracle for the stepper.
"""
from dataclasses import dataclass, field

import numpy as np

from ._jit import HAS_NUMBA, njit, python_version
from .entanglement import negativity_batch
from .model import (IM37, IM68, RE37, RE68, STATE_SIZE, ParameterError, ReducedState,
                    SystemParams, rhs_pumped_kernel, rhs_pumpless_kernel)

LOCAL_TOL = 1e-9
MAX_HALVINGS = 6
DEFAULT_DT = 1e-3
RELAXATION_MULTIPLE = 10.0

_DONE, _BUFFER_FULL, _UNDERFLOW = 0, 1, 2
_CHUNK = 1 << 16


class StepUnderflowError(RuntimeError):
    def __init__(self, time, min_step):
        self.time = float(time)
        self.min_step = float(min_step)
        super().__init__(
            f"step-doubling error stayed above tolerance at t = {self.time:.6g} "
            f"with step {self.min_step:.3e}"
        )


@dataclass
class Trajectory:
    """Recorded reduced states along an integration.

    ``states`` is an ``(n, 13)`` array in :class:`ReducedState` vector layout.
    """

    times: np.ndarray
    states: np.ndarray
    negativities: np.ndarray
    params: SystemParams = None
    stats: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    def state(self, i):
        return ReducedState(self.states[i])

    def element(self, i, j):
        """Time series of ``rho_ij`` (populations real, coherences complex)."""
        if i == j:
            return self.states[:, i - 1].copy()
        key = (min(i, j), max(i, j))
        if key == (3, 7):
            c = self.states[:, RE37] + 1j * self.states[:, IM37]
        elif key == (6, 8):
            c = self.states[:, RE68] + 1j * self.states[:, IM68]
        else:
            return np.zeros(len(self.times), dtype=np.complex128)
        return c if i < j else np.conj(c)

    def trace_drift(self):
        return float(np.max(np.abs(self.states[:, :9].sum(axis=1) - 1.0)))


@njit
def _rk4(rhs, y, h, rates):
    k1 = rhs(y, rates)
    k2 = rhs(y + 0.5 * h * k1, rates)
    k3 = rhs(y + 0.5 * h * k2, rates)
    k4 = rhs(y + h * k3, rates)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@njit
def _integrate_kernel(rhs, step, rates, y0, n_start, n_total, dt, t_max, tol, max_halvings,
                      times, states, pos):
    """Advance nominal intervals ``n_start .. n_total - 1`` of width ``dt``.

    ``step`` is the single RK4 step (passed in so the uncompiled kernel can
    use the uncompiled stepper). Accepted steps are written to
    ``times``/``states`` from ``pos`` on.
    Returns ``(status, n_reached, pos, y, fail_time, max_err, halvings)``.
    """
    y = y0.copy()
    capacity = times.shape[0]
    max_err = 0.0
    halvings = 0
    n = n_start
    while n < n_total:
        if capacity - pos < (1 << max_halvings) + 1:
            return 1, n, pos, y, 0.0, max_err, halvings
        t_a = n * dt
        t_b = t_max if n == n_total - 1 else (n + 1) * dt
        span = t_b - t_a
        h = span
        level = 0
        done = 0.0
        while done < span:
            last = done + h >= span * (1.0 - 1e-12)
            if last:
                h = span - done
            y_full = step(rhs, y, h, rates)
            y_mid = step(rhs, y, 0.5 * h, rates)
            y_half = step(rhs, y_mid, 0.5 * h, rates)
            err = np.max(np.abs(y_half - y_full))
            if err > tol:
                if level >= max_halvings:
                    return 2, n, pos, y, t_a + done, err, halvings
                level += 1
                halvings += 1
                h = span / (1 << level)
                continue
            if err > max_err:
                max_err = err
            y = y_half
            done = span if last else done + h
            times[pos] = t_b if last else t_a + done
            states[pos] = y
            pos += 1
        n += 1
    return 0, n, pos, y, 0.0, max_err, halvings


def _is_compiled(f):
    return hasattr(f, "py_func")


def integrate(rhs, initial, t_max, dt=DEFAULT_DT, params=None, *, tol=LOCAL_TOL,
              max_halvings=MAX_HALVINGS, negativity=True):
    """Integrate a reduced right-hand side from ``t = 0`` to ``t_max``.

    Parameters
    ----------
    rhs : callable
        Kernel ``f(y, rates) -> dy/dt`` on 13-vectors, e.g.
        :func:`~vtype_sge.model.rhs_pumped_kernel`.
    initial : ReducedState or array_like
        State at ``t = 0``.
    t_max, dt : float
        Final time and nominal step.
    params : SystemParams, optional
        Supplies the rate vector; zeros when omitted.
    tol : float
        Max-norm bound on the step-doubling error estimate. A failing step
        is halved, at most ``max_halvings`` times.
    negativity : bool
        Also compute the negativity of every recorded state.

    Returns
    -------
    Trajectory
        Every accepted step, starting with the initial state at ``t = 0``.
        No trace renormalization is applied.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not t_max >= dt:
        raise ValueError(f"t_max must be at least dt, got t_max={t_max}, dt={dt}")
    y0 = np.array(initial.vector if isinstance(initial, ReducedState) else initial,
                  dtype=np.float64)
    if y0.shape != (STATE_SIZE,):
        raise ValueError(f"initial state must have {STATE_SIZE} entries")
    rates = params.rates() if params is not None else np.zeros(8)

    kernel, step = _integrate_kernel, _rk4
    if not (HAS_NUMBA and _is_compiled(rhs)):
        kernel, step = python_version(_integrate_kernel), python_version(_rk4)
        rhs = python_version(rhs)

    n_total = int(np.ceil(t_max / dt - 1e-9))
    capacity = min(n_total + 1, _CHUNK) + (1 << max_halvings) + 1
    time_chunks, state_chunks = [np.zeros(1)], [y0[None, :].copy()]
    n, y = 0, y0
    max_err, halvings = 0.0, 0
    while True:
        times = np.empty(capacity)
        states = np.empty((capacity, STATE_SIZE))
        status, n, pos, y, fail_t, err, halv = kernel(
            rhs, step, rates, y, n, n_total, float(dt), float(t_max), float(tol),
            int(max_halvings), times, states, 0)
        time_chunks.append(times[:pos])
        state_chunks.append(states[:pos])
        max_err = max(max_err, err)
        halvings += halv
        if status == _UNDERFLOW:
            raise StepUnderflowError(fail_t, dt / (1 << max_halvings))
        if status == _DONE:
            break

    times = np.concatenate(time_chunks)
    states = np.concatenate(state_chunks)
    negs = negativity_batch(states) if negativity else np.full(len(times), np.nan)
    return Trajectory(times=times, states=states, negativities=negs, params=params,
                      stats={"max_local_error": max_err, "halvings": halvings, "dt": dt,
                             "tol": tol})


# ------------------------------------------------------------ closed form


def relaxation_time(params):
    """Slowest decay time of the channel-1 exchange coherence."""
    g, G = params.gamma1, params.Gamma1
    if abs(abs(G) - g) <= 1e-15 * g:
        raise ParameterError(
            "relaxation time diverges for |Gamma1| = gamma1; supply t_max explicitly"
        )
    return max(1.0 / (2.0 * (g + G)), 1.0 / (2.0 * (g - G)))


def default_t_max(params):
    return RELAXATION_MULTIPLE * relaxation_time(params)


_SERIES_BELOW = 1e-5


def _exp_divided_difference(a, b):
    """``(exp(a) - exp(b)) / (a - b)`` without cancellation or overflow."""
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    m = np.maximum(a, b)
    d = np.abs(a - b)
    safe = np.where(d < _SERIES_BELOW, 1.0, d)
    ratio = np.where(d < _SERIES_BELOW, 1.0 - d / 2.0 + d * d / 6.0, -np.expm1(-safe) / safe)
    return np.exp(m) * ratio


def _channel(t, g_own, g_src, cross, shift):
    """Populations and coherence of one exchange channel.

    ``g_own`` decays the excited level of the channel, ``g_src`` is the rate
    feeding it from ``|e mu>``. Returns ``(fed, partner, coherence)``: the
    population directly fed from ``|e mu>``, the population reached only via
    exchange, and the exchange coherence oriented from the fed state.
    """
    # exp(-2 g_own t) * (exp(+-2 cross t) - exp(-2 g_src t)) / (g_src +- cross)
    lo = -2.0 * (g_own + g_src) * t
    plus = 2.0 * t * _exp_divided_difference(2.0 * (cross - g_own) * t, lo)
    minus = 2.0 * t * _exp_divided_difference(-2.0 * (cross + g_own) * t, lo)
    hyper_pop = 0.5 * (plus + minus)
    hyper_coh = 0.5 * (minus - plus)

    decay = np.exp(-2.0 * g_own * t)
    tail = np.exp(-2.0 * g_src * t)
    denom = g_src * g_src + shift * shift
    osc_pop = decay * (g_src * np.cos(2 * shift * t) + shift * np.sin(2 * shift * t)
                       - g_src * tail) / denom
    osc_coh = decay * (shift * np.cos(2 * shift * t) - g_src * np.sin(2 * shift * t)
                       - shift * tail) / denom

    fed = 0.5 * g_src * (hyper_pop + osc_pop)
    partner = 0.5 * g_src * (hyper_pop - osc_pop)
    coherence = 0.5 * g_src * (hyper_coh - 1j * osc_coh)
    return fed, partner, coherence


def analytic_pumpless_vectors(params, times):
    """Closed-form pumpless solution from ``|e mu>`` on an array of times.

    Returns an ``(n, 13)`` array. ``rho99`` closes the trace including
    ``rho22``; see :func:`ground_population_without_rho22`.
    """
    if params.pumped:
        raise ParameterError("closed-form solution requires Lambda1 = Lambda2 = 0")
    t = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(t < 0):
        raise ValueError("times must be non-negative")
    g1, g2 = params.gamma1, params.gamma2
    p33, p77, c37 = _channel(t, g1, g2, params.Gamma1, params.G1)
    p88, p66, c86 = _channel(t, g2, g1, params.Gamma2, params.G2)
    p22 = np.exp(-2.0 * (g1 + g2) * t)
    out = np.zeros((t.size, STATE_SIZE))
    out[:, 1] = p22
    out[:, 2] = p33
    out[:, 5] = p66
    out[:, 6] = p77
    out[:, 7] = p88
    out[:, 8] = 1.0 - p22 - p33 - p66 - p77 - p88
    out[:, RE37] = c37.real
    out[:, IM37] = c37.imag
    out[:, RE68] = c86.real
    out[:, IM68] = -c86.imag
    return out


def analytic_pumpless(params, t):
    """Closed-form pumpless reduced state at time ``t`` from ``|e mu>``."""
    return ReducedState(analytic_pumpless_vectors(params, [t])[0])


def ground_population_without_rho22(params, t):
    """``1 - rho33 - rho66 - rho77 - rho88``: the closure that omits rho22.

    Exceeds the trace-preserving ``rho99`` by exactly ``rho22(t)``.
    """
    v = analytic_pumpless_vectors(params, [t])[0]
    return float(1.0 - v[2] - v[5] - v[6] - v[7])


def simulate(params, initial="emu", t_max=None, dt=None, tol=LOCAL_TOL):
    """Trajectory from a basis population with library defaults.

    Uses the pumpless equations when the pump is off and the initial state
    lies on the pumpless support, the pumped equations otherwise.
    """
    state = initial if isinstance(initial, ReducedState) else ReducedState.basis(initial)
    if t_max is None:
        t_max = default_t_max(params)
    if dt is None:
        dt = DEFAULT_DT / params.gamma1
    pumpless = not params.pumped and state.is_pumpless_support()
    rhs = rhs_pumpless_kernel if pumpless else rhs_pumped_kernel
    return integrate(rhs, state, t_max, dt, params, tol=tol)
