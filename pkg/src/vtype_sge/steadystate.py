"""Steady state of the incoherently pumped pair.

Two independent routes:

* :func:`steady_analytic` evaluates the closed-form stationary elements,
  which do not involve the level shifts ``G1``, ``G2``;
* :func:`steady_numeric` solves the 13x13 reduced linear system with the
  trace condition replacing one row, falling back to long-time integration
  when that system is ill-conditioned.
"""
from dataclasses import dataclass

import numpy as np

from .dynamics import integrate
from .model import (IM37, IM68, RE37, RE68, STATE_SIZE, ReducedState, reduced_jacobian,
                    rhs_pumped_kernel)

RESIDUAL_TOL = 1e-9
COND_LIMIT = 1e12
LONG_TIME = 200.0
NULL_RANK_TOL = 1e-10

ROUTES = ("analytic", "nullspace", "long_time")


class DegenerateSteadyStateError(RuntimeError):
    """The generator has more than one stationary direction."""


@dataclass(frozen=True)
class SteadyState:
    state: ReducedState
    residual: float
    route: str
    ground_state_by_convention: bool = False


def residual(state, params):
    """Max-norm of the pumped right-hand side at ``state``."""
    return float(np.max(np.abs(rhs_pumped_kernel(state.vector, params.rates()))))


def _ground_state():
    return ReducedState.basis("gg")


def analytic_coefficients(params):
    """Auxiliary quantities of the closed form: ``beta1, beta2, a1, a2, b``.

    ``b`` is the normalization making the nine populations sum to one.
    """
    g = (params.gamma1, params.gamma2)
    cross = (params.Gamma1, params.Gamma2)
    pump = (params.Lambda1, params.Lambda2)
    s = (params.s1, params.s2)
    total = pump[0] + pump[1]
    g1, g2 = g
    l1, l2 = pump
    gsum = g1 + g2
    beta1, beta2 = (
        (s[j] * g[j] ** 2 + cross[j] ** 2 * (pump[j] - g[j])) / (2.0 * s[j] * g[j] * total)
        for j in (0, 1)
    )
    a1 = l2 * (g1 + 2.0 * beta1 * gsum)
    a2 = l1 * (g2 + 2.0 * beta2 * gsum)
    # sum of the population numerators; the commonly quoted grouping carries
    # an extra overall factor (gamma1 + gamma2) that breaks unit trace
    b = (2.0 * g1 * g2 * ((beta1 + 1.0) * a2 + (beta2 + 1.0) * a1)
         + (a2 * g2 * l1 + a1 * g1 * l2)
         + 2.0 * g1 * g2 * (a2 * l2 + a1 * l1) / gsum)
    return beta1, beta2, a1, a2, b


def steady_analytic(params):
    """Closed-form steady state under pumping.

    With both pump rates zero the closed form is 0/0; the ground state
    ``|gg>`` is returned and flagged.
    """
    if not params.pumped:
        gs = _ground_state()
        return SteadyState(gs, residual(gs, params), "analytic", ground_state_by_convention=True)
    g1, g2 = params.gamma1, params.gamma2
    l1, l2 = params.Lambda1, params.Lambda2
    beta1, beta2, a1, a2, b = analytic_coefficients(params)
    v = np.zeros(STATE_SIZE)
    v[0] = g2 * l1 * a2 / b
    v[1] = g1 * g2 * (a1 * l1 + a2 * l2) / (b * (g1 + g2))
    v[2] = g1 * g2 * a2 / b
    v[3] = v[1]
    v[4] = g1 * a1 * l2 / b
    v[5] = g1 * g2 * a1 / b
    v[6] = v[2]
    v[7] = v[5]
    v[8] = 2.0 * g1 * g2 * (beta1 * a2 + a1 * beta2) / b
    v[RE37] = params.Gamma1 * g2 * (l1 - g1) * a2 / (params.s1 * b)
    v[IM37] = 0.0
    v[RE68] = g1 * params.Gamma2 * (l2 - g2) * a1 / (params.s2 * b)
    v[IM68] = 0.0
    state = ReducedState(v)
    return SteadyState(state, residual(state, params), "analytic")


def _constrained_system(params):
    m = reduced_jacobian(params)
    rhs = np.zeros(STATE_SIZE)
    # the rho99 row is redundant with population conservation
    m[8, :] = 0.0
    m[8, :9] = 1.0
    rhs[8] = 1.0
    return m, rhs


def null_dimension(params):
    """Number of stationary directions of the reduced generator."""
    sv = np.linalg.svd(reduced_jacobian(params), compute_uv=False)
    return int(np.sum(sv <= NULL_RANK_TOL * max(1.0, sv[0])))


def steady_long_time(params, initial="emu", t_long=None, dt=None):
    """Stationary state reached by integrating for a long time."""
    state = initial if isinstance(initial, ReducedState) else ReducedState.basis(initial)
    t_long = LONG_TIME / params.gamma1 if t_long is None else t_long
    dt = 1e-3 / params.gamma1 if dt is None else dt
    traj = integrate(rhs_pumped_kernel, state, t_long, dt, params, negativity=False)
    final = traj.state(-1)
    return SteadyState(final, residual(final, params), "long_time")


def steady_numeric(params):
    """Steady state from the reduced linear system.

    Raises
    ------
    DegenerateSteadyStateError
        When the generator has more than one stationary direction.
    """
    nulls = null_dimension(params)
    if nulls > 1:
        raise DegenerateSteadyStateError(
            f"reduced generator has {nulls} stationary directions; steady state is not unique"
        )
    m, rhs = _constrained_system(params)
    if np.linalg.cond(m) > COND_LIMIT:
        return steady_long_time(params)
    state = ReducedState(np.linalg.solve(m, rhs))
    return SteadyState(state, residual(state, params), "nullspace")
