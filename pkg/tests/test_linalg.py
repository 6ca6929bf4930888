import numpy as np
import pytest
from hypothesis import given, strategies as st

from vtype_sge.linalg import (ConvergenceError, NotHermitianError, hermitian_eigenvalues,
                              hermitian_eigh, partial_transpose_A, partial_transpose_a)

from conftest import random_density, random_hermitian


def brute_partial_transpose(rho):
    out = np.zeros_like(rho)
    for i in range(3):
        for j in range(3):
            for k in range(3):
                for l in range(3):
                    out[3 * i + j, 3 * k + l] = rho[3 * k + j, 3 * i + l]
    return out


def test_identity_spectrum():
    np.testing.assert_array_equal(hermitian_eigenvalues(np.eye(9)), np.ones(9))


def test_diagonal_spectrum_sorted():
    w = hermitian_eigenvalues(np.diag(np.arange(9, 0, -1.0)))
    np.testing.assert_allclose(w, np.arange(1.0, 10.0), atol=0)


def test_pauli_x():
    np.testing.assert_allclose(hermitian_eigenvalues([[0, 1], [1, 0]]), [-1.0, 1.0], atol=1e-15)


def test_pauli_y_complex_entries():
    np.testing.assert_allclose(hermitian_eigenvalues([[0, -1j], [1j, 0]]), [-1.0, 1.0],
                               atol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 9, 27, 81])
def test_matches_lapack(rng, n):
    m = random_hermitian(rng, n)
    np.testing.assert_allclose(hermitian_eigenvalues(m), np.linalg.eigvalsh(m), atol=1e-11)


@pytest.mark.parametrize("n", [9, 81])
def test_trace_equals_eigenvalue_sum(rng, n):
    for _ in range(3):
        m = random_hermitian(rng, n)
        assert abs(hermitian_eigenvalues(m).sum() - np.trace(m).real) < 1e-10


@pytest.mark.parametrize("n", [4, 9, 81])
def test_eigenvectors_reconstruct(rng, n):
    m = random_hermitian(rng, n)
    w, v = hermitian_eigh(m)
    assert np.max(np.abs(v @ np.diag(w) @ v.conj().T - m)) < 1e-10
    assert np.max(np.abs(v.conj().T @ v - np.eye(n))) < 1e-12


def test_degenerate_spectrum(rng):
    q, _ = np.linalg.qr(rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9)))
    m = q @ np.diag([1, 1, 1, 2, 2, 3, 3, 3, 3.0]) @ q.conj().T
    np.testing.assert_allclose(hermitian_eigenvalues(m), [1, 1, 1, 2, 2, 3, 3, 3, 3], atol=1e-12)


def test_rejects_non_hermitian():
    m = np.array([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(NotHermitianError) as info:
        hermitian_eigenvalues(m)
    assert info.value.max_asymmetry == pytest.approx(2.0)


def test_rejects_non_square():
    with pytest.raises(ValueError):
        hermitian_eigenvalues(np.zeros((2, 3)))


def test_iteration_cap_reports_offdiagonal_norm(rng):
    with pytest.raises(ConvergenceError) as info:
        hermitian_eigh(random_hermitian(rng, 20), max_sweeps=1)
    assert info.value.off_norm > 0


def test_partial_transpose_matches_brute_force(rng):
    rho = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
    np.testing.assert_array_equal(partial_transpose_a(rho), brute_partial_transpose(rho))
    assert partial_transpose_A is partial_transpose_a


def test_partial_transpose_diagonal_unchanged(rng):
    d = np.diag(rng.random(9)).astype(complex)
    np.testing.assert_array_equal(partial_transpose_a(d), d)


def test_partial_transpose_moves_eg_ge_coherence():
    c = 0.3 - 0.2j
    rho = np.zeros((9, 9), dtype=complex)
    rho[2, 6], rho[6, 2] = c, np.conj(c)
    out = partial_transpose_a(rho)
    expected = np.zeros_like(rho)
    expected[8, 0], expected[0, 8] = c, np.conj(c)
    np.testing.assert_array_equal(out, expected)


def test_partial_transpose_rejects_wrong_size():
    with pytest.raises(ValueError):
        partial_transpose_a(np.eye(4))


def test_partial_transpose_involution_and_invariants(rng):
    for _ in range(100):
        rho = random_hermitian(rng, 9)
        pt = partial_transpose_a(rho)
        np.testing.assert_array_equal(partial_transpose_a(pt), rho)
        np.testing.assert_array_equal(pt, pt.conj().T)
        assert np.trace(pt) == np.trace(rho)


def test_product_state_spectrum(rng):
    a, b = random_density(rng, 3), random_density(rng, 3)
    expected = np.sort(np.outer(np.linalg.eigvalsh(a), np.linalg.eigvalsh(b)).ravel())
    spectrum = hermitian_eigenvalues(partial_transpose_a(np.kron(a, b)))
    np.testing.assert_allclose(spectrum, expected, atol=1e-12)


@given(st.integers(min_value=1, max_value=12), st.integers(min_value=0, max_value=2**32 - 1))
def test_spectrum_property(n, seed):
    m = random_hermitian(np.random.default_rng(seed), n, scale=10.0)
    w = hermitian_eigenvalues(m)
    assert np.all(np.diff(w) >= 0)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(m), atol=1e-10)
