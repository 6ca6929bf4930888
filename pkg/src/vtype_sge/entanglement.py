"""Partial-transpose negativity of the two-atom state.

Three routes give the spectrum of the partial transpose:

* ``generic``: Jacobi eigensolver on the full 9x9 ``rho^{T_A}``;
* ``closed_form_pumpless``: explicit eigenvalues for the pumpless support;
* ``cubic_pumped``: six diagonal eigenvalues plus the roots of the cubic
  characteristic polynomial of the ``{|ee>, |mu mu>, |gg>}`` block.

On the 13-element support ``rho^{T_A}`` is diagonal except for that 3x3
block, whose off-diagonal entries are rho_37 and rho_68.
"""
from dataclasses import dataclass

import numpy as np

from ._jit import njit
from .linalg import hermitian_eigenvalues, partial_transpose_a
from .model import IM37, IM68, RE37, RE68

NEGATIVE_THRESHOLD = -1e-12
TRACE_TOL = 1e-8
PUMPLESS_SUPPORT_TOL = 1e-10
COMPLEX_ROOT_TOL = 1e-10
_EPS = float(np.finfo(np.float64).eps)
_TINY = 1e-300

METHODS = ("generic", "closed_form_pumpless", "cubic_pumped")


class CubicRootError(ArithmeticError):
    """The block cubic produced a complex root pair; the input is corrupt."""


@dataclass(frozen=True)
class NegativityResult:
    value: float
    negative_eigenvalues: tuple
    method: str

    def __float__(self):
        return self.value


def negativity_from_spectrum(eigenvalues, method):
    eigenvalues = np.asarray(eigenvalues, dtype=np.float64)
    neg = np.sort(eigenvalues[eigenvalues < NEGATIVE_THRESHOLD])
    value = -float(neg.sum()) if neg.size else 0.0
    return NegativityResult(value=value, negative_eigenvalues=tuple(neg.tolist()), method=method)


def pt_spectrum_generic(rho):
    """Ascending spectrum of ``rho^{T_A}`` via the Jacobi eigensolver."""
    return hermitian_eigenvalues(partial_transpose_a(rho))


def negativity_generic(rho):
    """Negativity of an arbitrary 9x9 density matrix."""
    rho = np.asarray(rho, dtype=np.complex128)
    tr = np.trace(rho)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"density matrix trace is {tr.real:.12g}{tr.imag:+.3g}j, expected 1")
    return negativity_from_spectrum(pt_spectrum_generic(rho), "generic")


def pt_eigenvalues_pumpless(state):
    """Closed-form partial-transpose spectrum on the pumpless support.

    Returns ``[0, 0, rho22, rho33, rho66, rho77, rho88, lambda8, lambda9]``
    where ``lambda8,9 = rho99 / 2 +- sqrt(rho99^2 + 4 (|rho37|^2 + |rho68|^2)) / 2``.
    """
    p = state.populations
    stray = max(abs(p[0]), abs(p[3]), abs(p[4]))
    if stray > PUMPLESS_SUPPORT_TOL:
        raise ValueError(
            f"closed form needs rho11 = rho44 = rho55 = 0 (largest is {stray:.3e})"
        )
    p99 = p[8]
    coh = abs(state.rho37) ** 2 + abs(state.rho68) ** 2
    root = np.sqrt(p99 * p99 + 4.0 * coh)
    lam8 = 0.5 * (p99 + root)
    # product form avoids cancellation when the coherences are tiny
    lam9 = -2.0 * coh / (p99 + root) if root > 0 else 0.0
    return np.array([0.0, 0.0, p[1], p[2], p[5], p[6], p[7], lam8, lam9])


@njit
def _block_det(x, p11, p55, p99, c2, d2):
    # factored form: accurate near clustered roots, unlike the expanded cubic
    return (p11 - x) * (p55 - x) * (p99 - x) - c2 * (p55 - x) - d2 * (p11 - x)


@njit
def _block_det_slope(x, p11, p55, p99, c2, d2):
    a, b, c = p11 - x, p55 - x, p99 - x
    return -(b * c + a * c + a * b) + c2 + d2


@njit
def _polish(x, lo, hi, p11, p55, p99, c2, d2):
    """Safeguarded Newton for the single root of the block determinant in [lo, hi]."""
    g_lo = _block_det(lo, p11, p55, p99, c2, d2)
    if g_lo == 0.0:
        return lo
    g_hi = _block_det(hi, p11, p55, p99, c2, d2)
    if g_hi == 0.0:
        return hi
    if (g_lo > 0.0) == (g_hi > 0.0):
        # no sign change (cannot happen for exact arithmetic); keep the guess
        return min(max(x, lo), hi)
    if not lo < x < hi:
        x = 0.5 * (lo + hi)
    for _ in range(200):
        g = _block_det(x, p11, p55, p99, c2, d2)
        if g == 0.0:
            return x
        if (g > 0.0) == (g_lo > 0.0):
            lo, g_lo = x, g
        else:
            hi = x
        slope = _block_det_slope(x, p11, p55, p99, c2, d2)
        nxt = x - g / slope if slope != 0.0 else 0.5 * (lo + hi)
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - x) <= 2.0 * _EPS * max(abs(x), _TINY) or hi - lo <= 2.0 * _EPS * max(
                abs(lo), abs(hi), _TINY):
            return nxt
        x = nxt
    return x


@njit
def block_roots(p11, p55, p99, c2, d2):
    """Ascending roots of ``(p11-x)(p55-x)(p99-x) - c2 (p55-x) - d2 (p11-x) = 0``.

    ``c2 = |rho37|^2`` and ``d2 = |rho68|^2``. Returns the roots and the
    largest imaginary part met along the way (zero for valid input).

    The trigonometric solution of the cubic supplies starting values. Each is
    then polished inside its interlacing bracket ``x1 <= min(p11, p55) <= x2
    <= max(p11, p55) <= x3``, which restores full accuracy at clustered roots.
    """
    out = np.empty(3)
    if c2 == 0.0 and d2 == 0.0:
        out[0], out[1], out[2] = p11, p55, p99
        out.sort()
        return out, 0.0
    if d2 == 0.0 or c2 == 0.0 or p11 == p55:
        # a decoupled diagonal entry plus a 2x2 block; with p11 == p55 the
        # block couples p99 to one rotated combination of the two
        if p11 == p55:
            free, x, off2 = p11, p11, c2 + d2
        elif d2 == 0.0:
            free, x, off2 = p55, p11, c2
        else:
            free, x, off2 = p11, p55, d2
        mean = 0.5 * (x + p99)
        half = np.sqrt(0.25 * (x - p99) ** 2 + off2)
        big = mean + half if mean >= 0.0 else mean - half
        small = (x * p99 - off2) / big if big != 0.0 else 0.0
        out[0] = free
        out[1] = min(big, small)
        out[2] = max(big, small)
        out.sort()
        return out, 0.0

    # x^3 - a x^2 + b x - c with a = trace, b = 2x2 principal minors, c = det
    a = p11 + p55 + p99
    b = p11 * p55 + p11 * p99 + p55 * p99 - c2 - d2
    c = p11 * p55 * p99 - c2 * p55 - d2 * p11
    shift = a / 3.0
    p = b - a * a / 3.0
    q = -2.0 * a ** 3 / 27.0 + a * b / 3.0 - c
    imag = 0.0
    # coefficients carry relative roundoff ~eps; near-degenerate real roots
    # can push p or the discriminant across zero by that much
    noise = 64.0 * _EPS
    if p >= 0.0:
        # only a triple root is consistent with real roots here
        if p > noise * (a * a / 3.0 + abs(b)):
            imag = np.sqrt(p)
        out[:] = shift
    else:
        m = 2.0 * np.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        if arg > 1.0 or arg < -1.0:
            disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
            if disc > noise * ((q / 2.0) ** 2 + abs(p / 3.0) ** 3):
                sq = np.sqrt(disc)
                u = np.cbrt(-q / 2.0 + sq)
                v = np.cbrt(-q / 2.0 - sq)
                imag = 0.5 * np.sqrt(3.0) * abs(u - v)
            arg = min(1.0, max(-1.0, arg))
        theta = np.arccos(arg) / 3.0
        for k in range(3):
            out[k] = shift + m * np.cos(theta - 2.0 * np.pi * k / 3.0)
    out.sort()

    lo, hi = min(p11, p55), max(p11, p55)
    # Gershgorin puts the spectrum within ``reach`` of the diagonal; doubling
    # it keeps the outer bracket ends strictly clear of any root
    reach = 2.0 * (np.sqrt(c2) + np.sqrt(d2))
    floor = min(lo, p99) - reach
    ceil = max(hi, p99) + reach
    out[0] = _polish(out[0], floor, lo, p11, p55, p99, c2, d2)
    out[1] = _polish(out[1], lo, hi, p11, p55, p99, c2, d2)
    out[2] = _polish(out[2], hi, ceil, p11, p55, p99, c2, d2)
    return out, imag


def _block_inputs(vector):
    c2 = vector[RE37] ** 2 + vector[IM37] ** 2
    d2 = vector[RE68] ** 2 + vector[IM68] ** 2
    return vector[0], vector[4], vector[8], c2, d2


def pt_eigenvalues_pumped(state):
    """Partial-transpose spectrum on the full 13-element support.

    Returns ``[rho22, rho33, rho44, rho66, rho77, rho88, x1, x2, x3]`` with
    ``x1 <= x2 <= x3`` the roots of the block cubic.
    """
    roots, imag = block_roots(*_block_inputs(state.vector))
    if imag > COMPLEX_ROOT_TOL:
        raise CubicRootError(f"block cubic has a complex root pair (|Im| = {imag:.3e})")
    p = state.populations
    return np.concatenate([[p[1], p[2], p[3], p[5], p[6], p[7]], roots])


def negativity(state, method="cubic_pumped"):
    """Negativity of a reduced state by the requested route."""
    if method == "cubic_pumped":
        spectrum = pt_eigenvalues_pumped(state)
    elif method == "closed_form_pumpless":
        spectrum = pt_eigenvalues_pumpless(state)
    elif method == "generic":
        return negativity_generic(state.to_matrix())
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    return negativity_from_spectrum(spectrum, method)


@njit
def negativity_batch(states):
    """Negativity for each row of an ``(n, 13)`` array of reduced states."""
    n = states.shape[0]
    out = np.empty(n)
    for i in range(n):
        y = states[i]
        c2 = y[9] * y[9] + y[10] * y[10]
        d2 = y[11] * y[11] + y[12] * y[12]
        roots, _ = block_roots(y[0], y[4], y[8], c2, d2)
        total = 0.0
        for k in range(3):
            if roots[k] < NEGATIVE_THRESHOLD:
                total -= roots[k]
        for k in (1, 2, 3, 5, 6, 7):
            if y[k] < NEGATIVE_THRESHOLD:
                total -= y[k]
        out[i] = total
    return out


def min_pt_eigenvalue_outside_lambda9(state):
    """Smallest closed-form eigenvalue other than lambda9 (pumpless support)."""
    return float(np.min(pt_eigenvalues_pumpless(state)[:8]))
