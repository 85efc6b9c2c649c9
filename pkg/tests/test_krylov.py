import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import eigh, expm

from boostprobe.errors import ConvergenceError
from boostprobe.krylov import krylov_propagate, lanczos_basis, lanczos_ground_state


def _random_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (A + A.conj().T) / 2


def test_lanczos_basis_is_orthonormal_and_tridiagonalises():
    H = _random_hermitian(40, 1)
    v0 = np.ones(40, dtype=complex)
    V, alpha, beta = lanczos_basis(H.dot, v0, 15)
    m = len(alpha)
    np.testing.assert_allclose(V @ V.conj().T, np.eye(m), atol=1e-12)
    T = np.diag(alpha) + np.diag(beta[: m - 1], 1) + np.diag(beta[: m - 1], -1)
    np.testing.assert_allclose(V.conj() @ H @ V.T, T, atol=1e-10)


def test_lanczos_breakdown_on_invariant_subspace():
    H = np.diag(np.arange(10.0))
    v0 = np.zeros(10, dtype=complex)
    v0[[2, 5]] = 1.0
    V, alpha, _ = lanczos_basis(H.dot, v0, 10)
    assert len(alpha) == 2


@settings(max_examples=20, deadline=None)
@given(st.integers(5, 120), st.integers(0, 2**31 - 1))
def test_ground_state_vs_dense(n, seed):
    H = _random_hermitian(n, seed)
    w, _ = eigh(H)
    e, v, res = lanczos_ground_state(H.dot, n, tol=1e-10)
    assert abs(e - w[0]) <= 1e-9 * max(1.0, abs(w[0]))
    assert res <= 1e-10
    assert abs(np.linalg.norm(v) - 1.0) < 1e-12


def test_ground_state_is_deterministic():
    H = _random_hermitian(60, 3)
    a = lanczos_ground_state(H.dot, 60)
    b = lanczos_ground_state(H.dot, 60)
    assert a[0] == b[0]
    assert np.array_equal(a[1], b[1])


def test_ground_state_convergence_error():
    H = _random_hermitian(300, 4)
    with pytest.raises(ConvergenceError):
        lanczos_ground_state(H.dot, 300, tol=1e-14, krylov_dim=4, max_restarts=2)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 100), st.floats(0.01, 20.0), st.integers(0, 2**31 - 1))
def test_propagation_vs_expm(n, t, seed):
    H = _random_hermitian(n, seed)
    rng = np.random.default_rng(seed + 1)
    psi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    psi /= np.linalg.norm(psi)
    exact = expm(-1j * t * H) @ psi
    got = krylov_propagate(H.dot, psi, t, tol=1e-12, norm_estimate=np.abs(H).sum(1).max())
    assert np.linalg.norm(got - exact) < 1e-9
    assert abs(np.linalg.norm(got) - 1.0) < 1e-10


def test_propagation_composes():
    H = _random_hermitian(30, 7)
    psi = np.zeros(30, dtype=complex)
    psi[0] = 1
    one = krylov_propagate(H.dot, psi, 3.0)
    two = krylov_propagate(H.dot, krylov_propagate(H.dot, psi, 1.2), 1.8)
    assert np.linalg.norm(one - two) < 1e-10


def test_zero_and_negative_duration():
    H = _random_hermitian(5, 0)
    psi = np.ones(5, dtype=complex) / np.sqrt(5)
    np.testing.assert_array_equal(krylov_propagate(H.dot, psi, 0.0), psi)
    with pytest.raises(ValueError):
        krylov_propagate(H.dot, psi, -1.0)
