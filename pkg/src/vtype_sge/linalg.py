"""Dense complex linear algebra sized for the two-atom problem.

Matrices are plain ``numpy`` complex arrays. The eigensolver is a cyclic
Jacobi method working directly on the complex Hermitian matrix; at the sizes
used here (9 and 81) it is accurate to a few ulps and needs no LAPACK.
"""
import numpy as np

from ._jit import njit

HERMITIAN_TOL = 1e-10
OFFDIAG_TOL = 1e-12
MAX_SWEEPS = 100


class NotHermitianError(ValueError):
    """Input matrix is not Hermitian within tolerance."""

    def __init__(self, max_asymmetry):
        self.max_asymmetry = float(max_asymmetry)
        super().__init__(f"matrix is not Hermitian: max |M - M^H| = {self.max_asymmetry:.3e}")


class ConvergenceError(RuntimeError):
    """Jacobi sweeps hit the iteration cap."""

    def __init__(self, off_norm, sweeps):
        self.off_norm = float(off_norm)
        self.sweeps = int(sweeps)
        super().__init__(
            f"Jacobi eigensolver did not converge in {sweeps} sweeps "
            f"(off-diagonal norm {self.off_norm:.3e})"
        )


@njit
def _offdiag_norm(a):
    n = a.shape[0]
    s = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                s += a[i, j].real ** 2 + a[i, j].imag ** 2
    return np.sqrt(s)


@njit
def _jacobi_kernel(a, v, want_vectors, threshold, max_sweeps):
    """Diagonalize Hermitian ``a`` in place; accumulate rotations into ``v``.

    Returns ``(sweeps_used, final_offdiag_norm)``. ``sweeps_used`` equal to
    ``max_sweeps + 1`` signals non-convergence.
    """
    n = a.shape[0]
    off = _offdiag_norm(a)
    sweep = 0
    while off > threshold:
        if sweep >= max_sweeps:
            return max_sweeps + 1, off
        sweep += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                # phase removal turns the (p, q) block real symmetric
                phase = apq / mag
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # U = [[c, s], [-s conj(phase), c conj(phase)]] on (p, q)
                u_pp = c + 0j
                u_pq = s + 0j
                u_qp = -s * np.conj(phase)
                u_qq = c * np.conj(phase)
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = akp * u_pp + akq * u_qp
                    a[k, q] = akp * u_pq + akq * u_qq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = np.conj(u_pp) * apk + np.conj(u_qp) * aqk
                    a[q, k] = np.conj(u_pq) * apk + np.conj(u_qq) * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                if want_vectors:
                    for k in range(n):
                        vkp = v[k, p]
                        vkq = v[k, q]
                        v[k, p] = vkp * u_pp + vkq * u_qp
                        v[k, q] = vkp * u_pq + vkq * u_qq
        off = _offdiag_norm(a)
    return sweep, off


def max_asymmetry(m):
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def _prepare(m, hermitian_tol):
    a = np.array(m, dtype=np.complex128, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    asym = max_asymmetry(a)
    if asym > hermitian_tol:
        raise NotHermitianError(asym)
    # symmetrize so the rotations act on an exactly Hermitian matrix
    return 0.5 * (a + a.conj().T)


def hermitian_eigh(m, hermitian_tol=HERMITIAN_TOL, max_sweeps=MAX_SWEEPS):
    """Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.

    Parameters
    ----------
    m : array_like, shape (n, n)
        Complex Hermitian matrix.
    hermitian_tol : float
        Largest accepted ``|M - M^H|`` entry.
    max_sweeps : int
        Cap on cyclic Jacobi sweeps.

    Returns
    -------
    w : ndarray, shape (n,)
        Real eigenvalues in ascending order.
    v : ndarray, shape (n, n)
        Unitary matrix whose columns are the matching eigenvectors.
    """
    a = _prepare(m, hermitian_tol)
    w, v = _solve(a, True, max_sweeps)
    return w, v


def hermitian_eigenvalues(m, tol=1e-10, hermitian_tol=HERMITIAN_TOL, max_sweeps=MAX_SWEEPS):
    """Ascending real spectrum of a Hermitian matrix.

    The eigenvalue sum is checked against the trace to within ``tol``.
    """
    a = _prepare(m, hermitian_tol)
    w, _ = _solve(a, False, max_sweeps)
    drift = abs(w.sum() - np.trace(a).real)
    if drift > tol * max(1.0, float(np.abs(np.diag(a)).sum())):
        raise ConvergenceError(drift, max_sweeps)
    return w


def _solve(a, want_vectors, max_sweeps):
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = max(1.0, float(np.sqrt(np.sum(np.abs(a) ** 2))))
    sweeps, off = _jacobi_kernel(a, v, want_vectors, OFFDIAG_TOL * scale, max_sweeps)
    if sweeps > max_sweeps:
        raise ConvergenceError(off, max_sweeps)
    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def partial_transpose_a(rho):
    """Transpose the atom-A indices of a 9x9 two-atom density matrix.

    Entry ``((i, j), (k, l))`` of the result is entry ``((k, j), (i, l))`` of
    the input, with composite index ``3 * i + j``.
    """
    rho = np.asarray(rho)
    if rho.shape != (9, 9):
        raise ValueError(f"partial transpose needs a 9x9 matrix, got shape {rho.shape}")
    return rho.reshape(3, 3, 3, 3).transpose(2, 1, 0, 3).reshape(9, 9)


partial_transpose_A = partial_transpose_a
