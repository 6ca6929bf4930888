"""Two V-type atoms coupled through a common vacuum.

Basis ordering for the product space ``|i_A j_B>`` (ordinal = 3 * i + j + 1
with ``e = 0, mu = 1, g = 2``)::

    1 |ee>   2 |e mu>   3 |eg>
    4 |mu e> 5 |mu mu>  6 |mu g>
    7 |ge>   8 |g mu>   9 |gg>

The dynamics started from any population of this basis stays on the
13-element support of nine populations plus the coherences rho_37
(``|eg><ge|``) and rho_68 (``|mu g><g mu|``). The reduced state is stored as
a real 13-vector ``[rho_11 .. rho_99, Re rho_37, Im rho_37, Re rho_68,
Im rho_68]``; all rates are in the same inverse-time unit as ``gamma1``.
"""
from dataclasses import asdict, dataclass, replace

import numpy as np

from ._jit import njit

BASIS_LABELS = ("ee", "emu", "eg", "mue", "mumu", "mug", "ge", "gmu", "gg")
_ORDINAL = {label: k + 1 for k, label in enumerate(BASIS_LABELS)}

# positions in the 13-vector
POPULATIONS = slice(0, 9)
RE37, IM37, RE68, IM68 = 9, 10, 11, 12
STATE_SIZE = 13

# rate-vector layout consumed by the kernels
RATE_NAMES = ("gamma1", "gamma2", "Gamma1", "Gamma2", "G1", "G2", "Lambda1", "Lambda2")

# tabulated distances: R / lambda_0 -> (Gamma1 / gamma1, G1 / gamma1)
PRESETS = {
    "R0.50": (0.50, 0.96, 8.0),
    "R0.83": (0.83, 0.9, 2.4),
    "R1.18": (1.18, 0.8, 0.9),
    "R2.78": (2.78, 0.2, -0.24),
}


def ordinal(label):
    """1-based ordinal of a product-basis label such as ``"emu"``."""
    try:
        return _ORDINAL[label]
    except KeyError:
        raise ValueError(f"unknown basis label {label!r}; expected one of {BASIS_LABELS}") from None


def label(ordinal_):
    if not 1 <= ordinal_ <= 9:
        raise ValueError(f"basis ordinal must be in 1..9, got {ordinal_}")
    return BASIS_LABELS[ordinal_ - 1]


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class SystemParams:
    """Rates and couplings of the two-atom system.

    Channel 1 is ``|e> <-> |g>``, channel 2 is ``|mu> <-> |g>``. Channel-2
    quantities follow from channel 1 through the frequency ratio ``r``.
    """

    gamma1: float = 1.0
    r: float = 1.2
    Gamma1: float = 0.0
    G1: float = 0.0
    Lambda1: float = 0.0
    Lambda2: float = 0.0

    def __post_init__(self):
        for name in ("gamma1", "r", "Gamma1", "G1", "Lambda1", "Lambda2"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, float(value))
        if self.gamma1 <= 0:
            raise ParameterError(f"gamma1 must be positive, got {self.gamma1}")
        if self.r <= 0:
            raise ParameterError(f"r must be positive, got {self.r}")
        if self.Lambda1 < 0 or self.Lambda2 < 0:
            raise ParameterError(
                f"pump rates must be non-negative, got Lambda1={self.Lambda1}, Lambda2={self.Lambda2}"
            )
        if abs(self.Gamma1) > self.gamma1:
            raise ParameterError(
                f"|Gamma1| = {abs(self.Gamma1)} exceeds gamma1 = {self.gamma1}"
            )

    @property
    def gamma2(self):
        return self.r * self.gamma1

    @property
    def Gamma2(self):
        return self.r * self.Gamma1

    @property
    def G2(self):
        return self.r * self.G1

    @property
    def s1(self):
        return self.gamma1 + self.Lambda1 + self.Lambda2

    @property
    def s2(self):
        return self.gamma2 + self.Lambda1 + self.Lambda2

    @property
    def pumped(self):
        return self.Lambda1 > 0 or self.Lambda2 > 0

    @classmethod
    def from_preset(cls, key, gamma1=1.0, r=1.2, Lambda1=0.0, Lambda2=0.0):
        """Parameters for one of the tabulated interatomic distances."""
        if key not in PRESETS:
            raise ParameterError(f"unknown preset {key!r}; valid keys: {', '.join(PRESETS)}")
        _, gamma_ratio, g_ratio = PRESETS[key]
        return cls(gamma1=gamma1, r=r, Gamma1=gamma_ratio * gamma1, G1=g_ratio * gamma1,
                   Lambda1=Lambda1, Lambda2=Lambda2)

    def with_pump(self, Lambda1, Lambda2=None):
        return replace(self, Lambda1=Lambda1, Lambda2=Lambda1 if Lambda2 is None else Lambda2)

    def without_pump(self):
        return replace(self, Lambda1=0.0, Lambda2=0.0)

    def exchanged(self):
        """Same physics with the roles of the two channels swapped."""
        return SystemParams(gamma1=self.gamma2, r=1.0 / self.r, Gamma1=self.Gamma2,
                            G1=self.G2, Lambda1=self.Lambda2, Lambda2=self.Lambda1)

    def rates(self, pumped=True):
        """Rate vector in ``RATE_NAMES`` order."""
        l1, l2 = (self.Lambda1, self.Lambda2) if pumped else (0.0, 0.0)
        return np.array([self.gamma1, self.gamma2, self.Gamma1, self.Gamma2,
                         self.G1, self.G2, l1, l2], dtype=np.float64)

    def to_dict(self):
        return asdict(self)


class ReducedState:
    """The 13 non-vanishing density-matrix elements.

    Wraps a real vector; derivatives returned by the right-hand sides use the
    same container. Invariants are checked on request by :meth:`check`, not
    on construction.
    """

    __slots__ = ("vector",)

    def __init__(self, vector):
        v = np.array(vector, dtype=np.float64)
        if v.shape != (STATE_SIZE,):
            raise ValueError(f"reduced state needs {STATE_SIZE} reals, got shape {v.shape}")
        self.vector = v

    @classmethod
    def from_elements(cls, populations=None, rho37=0.0, rho68=0.0, **pops):
        """Build from populations and the two complex coherences.

        Populations may be given as a length-9 sequence or as keywords
        ``rho11=...`` through ``rho99=...``.
        """
        v = np.zeros(STATE_SIZE)
        if populations is not None:
            v[POPULATIONS] = populations
        for key, value in pops.items():
            if len(key) != 5 or not key.startswith("rho") or key[3] != key[4]:
                raise TypeError(f"unexpected keyword {key!r}")
            v[int(key[3]) - 1] = value
        v[RE37], v[IM37] = complex(rho37).real, complex(rho37).imag
        v[RE68], v[IM68] = complex(rho68).real, complex(rho68).imag
        return cls(v)

    @classmethod
    def basis(cls, label_):
        v = np.zeros(STATE_SIZE)
        v[ordinal(label_) - 1] = 1.0
        return cls(v)

    @classmethod
    def from_matrix(cls, rho, support_tol=None):
        """Extract the support elements of a 9x9 matrix.

        With ``support_tol`` set, raise if anything outside the support
        exceeds it.
        """
        rho = np.asarray(rho)
        v = np.zeros(STATE_SIZE)
        v[POPULATIONS] = np.diag(rho).real
        v[RE37], v[IM37] = rho[2, 6].real, rho[2, 6].imag
        v[RE68], v[IM68] = rho[5, 7].real, rho[5, 7].imag
        if support_tol is not None:
            rest = np.array(rho, dtype=np.complex128)
            rest[np.diag_indices(9)] = 0
            rest[2, 6] = rest[6, 2] = rest[5, 7] = rest[7, 5] = 0
            leak = float(np.max(np.abs(rest)))
            if leak > support_tol:
                raise ValueError(f"matrix leaves the 13-element support (max stray entry {leak:.3e})")
        return cls(v)

    @property
    def populations(self):
        return self.vector[POPULATIONS]

    @property
    def rho37(self):
        return complex(self.vector[RE37], self.vector[IM37])

    @property
    def rho68(self):
        return complex(self.vector[RE68], self.vector[IM68])

    def population(self, ordinal_):
        return float(self.vector[ordinal_ - 1])

    def trace(self):
        return float(self.populations.sum())

    def to_matrix(self):
        return state_matrix(self.vector)

    def is_pumpless_support(self, tol=1e-10):
        p = self.vector
        return abs(p[0]) <= tol and abs(p[3]) <= tol and abs(p[4]) <= tol

    def check(self, trace_tol=1e-9, pos_tol=1e-8):
        """Raise ``ValueError`` if the state is not a valid density matrix."""
        p = self.populations
        if p.min() < -pos_tol:
            raise ValueError(f"negative population {p.min():.3e}")
        if abs(p.sum() - 1.0) > trace_tol:
            raise ValueError(f"populations sum to {p.sum():.12f}")
        if abs(self.rho37) ** 2 > p[2] * p[6] + pos_tol:
            raise ValueError("|rho37|^2 exceeds rho33 * rho77")
        if abs(self.rho68) ** 2 > p[5] * p[7] + pos_tol:
            raise ValueError("|rho68|^2 exceeds rho66 * rho88")
        return self

    def allclose(self, other, atol):
        return bool(np.max(np.abs(self.vector - other.vector)) <= atol)

    def __repr__(self):
        p = ", ".join(f"{x:.6g}" for x in self.populations)
        return f"ReducedState(pops=[{p}], rho37={self.rho37:.6g}, rho68={self.rho68:.6g})"


def state_matrix(vector):
    """Assemble the 9x9 density matrix from a reduced 13-vector."""
    rho = np.zeros((9, 9), dtype=np.complex128)
    rho[np.diag_indices(9)] = vector[POPULATIONS]
    c37 = vector[RE37] + 1j * vector[IM37]
    c68 = vector[RE68] + 1j * vector[IM68]
    rho[2, 6], rho[6, 2] = c37, np.conj(c37)
    rho[5, 7], rho[7, 5] = c68, np.conj(c68)
    return rho


# ---------------------------------------------------------------- kernels


@njit
def rhs_pumped_kernel(y, rates):
    """Thirteen-element equations of motion under incoherent pumping."""
    g1, g2, ga1, ga2, gg1, gg2, l1, l2 = (rates[0], rates[1], rates[2], rates[3],
                                          rates[4], rates[5], rates[6], rates[7])
    s1 = g1 + l1 + l2
    s2 = g2 + l1 + l2
    p11, p22, p33, p44, p55, p66, p77, p88, p99 = (y[0], y[1], y[2], y[3], y[4],
                                                   y[5], y[6], y[7], y[8])
    u, v, w, z = y[9], y[10], y[11], y[12]
    dy = np.empty(13)
    dy[0] = -4.0 * g1 * p11 + 2.0 * l1 * (p77 + p33)
    dy[1] = -2.0 * (g1 + g2) * p22 + 2.0 * l1 * p88 + 2.0 * l2 * p33
    dy[2] = (-2.0 * s1 * p33 + 2.0 * g2 * p22 + 2.0 * g1 * p11 + 2.0 * l1 * p99
             - 2.0 * gg1 * v - 2.0 * ga1 * u)
    dy[3] = -2.0 * (g1 + g2) * p44 + 2.0 * l1 * p66 + 2.0 * l2 * p77
    dy[4] = -4.0 * g2 * p55 + 2.0 * l2 * (p66 + p88)
    dy[5] = (-2.0 * s2 * p66 + 2.0 * g1 * p44 + 2.0 * g2 * p55 + 2.0 * l2 * p99
             - 2.0 * gg2 * z - 2.0 * ga2 * w)
    dy[6] = (-2.0 * s1 * p77 + 2.0 * g1 * p11 + 2.0 * g2 * p44 + 2.0 * l1 * p99
             - 2.0 * ga1 * u + 2.0 * gg1 * v)
    dy[7] = (-2.0 * s2 * p88 + 2.0 * g1 * p22 + 2.0 * g2 * p55 + 2.0 * l2 * p99
             - 2.0 * ga2 * w + 2.0 * gg2 * z)
    dy[8] = (2.0 * g1 * (p33 + p77) + 2.0 * g2 * (p66 + p88) - 4.0 * (l1 + l2) * p99
             + 4.0 * ga1 * u + 4.0 * ga2 * w)
    # rho37
    dy[9] = -2.0 * s1 * u - ga1 * (p77 + p33) + 2.0 * ga1 * p11
    dy[10] = -2.0 * s1 * v - gg1 * (p77 - p33)
    # rho68; the |mu mu> source carries Gamma2 (exchange partner of 2 Gamma1 rho11)
    dy[11] = -2.0 * s2 * w - ga2 * (p88 + p66) + 2.0 * ga2 * p55
    dy[12] = -2.0 * s2 * z - gg2 * (p88 - p66)
    return dy


@njit
def rhs_pumpless_kernel(y, rates):
    """Ten surviving elements without pumping; rho11, rho44, rho55 stay put."""
    g1, g2, ga1, ga2, gg1, gg2 = rates[0], rates[1], rates[2], rates[3], rates[4], rates[5]
    p22, p33, p66, p77, p88 = y[1], y[2], y[5], y[6], y[7]
    c37 = y[9] + 1j * y[10]
    c68 = y[11] + 1j * y[12]
    c73 = np.conj(c37)
    c86 = np.conj(c68)
    d33 = -2.0 * g1 * p33 + 2.0 * g2 * p22 - ga1 * (c73 + c37) - 1j * gg1 * (c73 - c37)
    d37 = -2.0 * g1 * c37 - ga1 * (p77 + p33) - 1j * gg1 * (p77 - p33)
    d66 = -2.0 * g2 * p66 - ga2 * (c86 + c68) - 1j * gg2 * (c86 - c68)
    d68 = -2.0 * g2 * c68 - ga2 * (p88 + p66) - 1j * gg2 * (p88 - p66)
    d77 = -2.0 * g1 * p77 - ga1 * (c37 + c73) - 1j * gg1 * (c37 - c73)
    d88 = -2.0 * g2 * p88 + 2.0 * g1 * p22 - ga2 * (c86 + c68) - 1j * gg2 * (c68 - c86)
    d99 = (2.0 * g1 * (p33 + p77) + 2.0 * g2 * (p66 + p88)
           + 2.0 * ga1 * (c37 + c73) + 2.0 * ga2 * (c68 + c86))
    dy = np.zeros(13)
    dy[1] = -2.0 * (g1 + g2) * p22
    dy[2] = d33.real
    dy[5] = d66.real
    dy[6] = d77.real
    dy[7] = d88.real
    dy[8] = d99.real
    dy[9] = d37.real
    dy[10] = d37.imag
    dy[11] = d68.real
    dy[12] = d68.imag
    return dy


def rhs_pumpless(state, params):
    """Time derivative of a pumpless-support state (pump rates ignored)."""
    if not state.is_pumpless_support():
        raise ValueError("pumpless equations need rho11 = rho44 = rho55 = 0")
    return ReducedState(rhs_pumpless_kernel(state.vector, params.rates(pumped=False)))


def rhs_pumped(state, params):
    """Time derivative of a reduced state with incoherent pumping."""
    return ReducedState(rhs_pumped_kernel(state.vector, params.rates()))


def reduced_jacobian(params, pumped=True):
    """13x13 real matrix ``J`` with ``d/dt y = J @ y``."""
    rates = params.rates(pumped)
    eye = np.eye(STATE_SIZE)
    return np.column_stack([rhs_pumped_kernel(eye[k], rates) for k in range(STATE_SIZE)])


# ------------------------------------------------------- full generator


def _sigma(i, j):
    m = np.zeros((3, 3))
    m[i, j] = 1.0
    return m


_E, _MU, _G = 0, 1, 2
_I3 = np.eye(3)
_I9 = np.eye(9)


def _on_a(op):
    return np.kron(op, _I3)


def _on_b(op):
    return np.kron(_I3, op)


def _left(x):
    # row-major vec: vec(X rho) = (X kron I) vec(rho)
    return np.kron(x, _I9)


def _right(x):
    # vec(rho X) = (I kron X^T) vec(rho)
    return np.kron(_I9, x.T)


def _dissipator(rate, jump, partner):
    """``rate * (2 J rho K - K J rho - rho K J)`` as a superoperator."""
    kj = partner @ jump
    return rate * (2.0 * _left(jump) @ _right(partner) - _left(kj) - _right(kj))


def build_generator(params, pumped=True):
    """81x81 complex matrix ``L`` with ``vec(d rho / dt) = L @ vec(rho)``.

    ``vec`` is row-major (``rho.reshape(81)``). With ``pumped=False`` the pump
    terms are dropped regardless of the pump rates in ``params``.
    """
    g1, g2 = params.gamma1, params.gamma2
    couplings = ((params.Gamma1, params.G1, _E), (params.Gamma2, params.G2, _MU))

    v_dd = np.zeros((9, 9))
    for _, shift, lvl in couplings:
        v_dd += shift * _on_a(_sigma(lvl, _G)) @ _on_b(_sigma(_G, lvl))
    v_dd = v_dd + v_dd.T
    gen = -1j * (_left(v_dd) - _right(v_dd))

    for on in (_on_a, _on_b):
        gen = gen + _dissipator(g1, on(_sigma(_G, _E)), on(_sigma(_E, _G)))
        gen = gen + _dissipator(g2, on(_sigma(_G, _MU)), on(_sigma(_MU, _G)))
        if pumped:
            # pumping is time-reversed decay: both channels deplete |g>
            gen = gen + _dissipator(params.Lambda1, on(_sigma(_E, _G)), on(_sigma(_G, _E)))
            gen = gen + _dissipator(params.Lambda2, on(_sigma(_MU, _G)), on(_sigma(_G, _MU)))

    for cross, _, lvl in couplings:
        lower_b, raise_a = _on_b(_sigma(_G, lvl)), _on_a(_sigma(lvl, _G))
        lower_a, raise_b = _on_a(_sigma(_G, lvl)), _on_b(_sigma(lvl, _G))
        gen = gen + _dissipator(cross, lower_b, raise_a) + _dissipator(cross, lower_a, raise_b)
    return gen


def apply_generator(gen, rho):
    return (gen @ np.asarray(rho, dtype=np.complex128).reshape(81)).reshape(9, 9)
