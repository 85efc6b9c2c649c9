"""Lanczos ground-state solver and short-iterative Lanczos propagator.

Both routines only need a matrix-vector product.  Krylov vectors are fully
reorthogonalised; subspaces here are at most a few dozen vectors, so the
extra cost is negligible next to the stability gained.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConvergenceError, StepSizeUnderflowError

_START_SEED = 20_170_601


def lanczos_basis(matvec, v0, m_max, breakdown_tol=1e-13):
    """Run up to ``m_max`` Lanczos steps from ``v0``.

    Returns ``(V, alpha, beta)`` with ``V`` of shape ``(m, n)`` and ``beta``
    holding the ``m`` off-diagonals, the last being the residual norm.
    A happy breakdown shortens ``m``.
    """
    n = v0.shape[0]
    m_max = min(m_max, n)
    V = np.zeros((m_max, n), dtype=np.complex128)
    alpha = np.zeros(m_max)
    beta = np.zeros(m_max)
    V[0] = v0 / np.linalg.norm(v0)
    scale = 0.0
    for j in range(m_max):
        w = matvec(V[j])
        alpha[j] = np.vdot(V[j], w).real
        w = w - alpha[j] * V[j]
        if j > 0:
            w = w - beta[j - 1] * V[j - 1]
        # two passes of classical Gram-Schmidt
        for _ in range(2):
            w = w - V[: j + 1].T @ (V[: j + 1].conj() @ w)
        beta[j] = np.linalg.norm(w)
        scale = max(scale, abs(alpha[j]), beta[j])
        if beta[j] <= breakdown_tol * max(scale, 1.0) or j + 1 == m_max:
            if beta[j] <= breakdown_tol * max(scale, 1.0):
                beta[j] = 0.0
            return V[: j + 1], alpha[: j + 1], beta[: j + 1]
        V[j + 1] = w / beta[j]
    return V, alpha, beta


def _tridiag_eig(alpha, beta):
    if alpha.size == 1:
        return alpha.copy(), np.ones((1, 1))
    return eigh_tridiagonal(alpha, beta[:-1])


def lanczos_ground_state(matvec, dim, tol=1e-10, krylov_dim=60, max_restarts=200, v0=None):
    """Lowest eigenpair of a Hermitian operator by restarted Lanczos.

    Each restart begins from the current Ritz vector.  Iteration stops when
    the true residual ``||Hv - Ev||`` drops to ``tol``.
    """
    if v0 is None:
        rng = np.random.default_rng(_START_SEED)
        v0 = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v = np.asarray(v0, dtype=np.complex128)
    v = v / np.linalg.norm(v)
    residual = np.inf
    energy = np.nan
    for _ in range(max_restarts):
        V, alpha, beta = lanczos_basis(matvec, v, krylov_dim)
        evals, evecs = _tridiag_eig(alpha, beta)
        v = evecs[:, 0] @ V
        v /= np.linalg.norm(v)
        hv = matvec(v)
        energy = np.vdot(v, hv).real
        residual = np.linalg.norm(hv - energy * v)
        if residual <= tol:
            return energy, v, residual
    raise ConvergenceError(
        f"Lanczos did not reach residual {tol:g} after {max_restarts} restarts "
        f"(last residual {residual:.3e}, energy {energy:.12g})"
    )


def _step_coefficients(alpha, beta, tau):
    """Krylov coefficients of ``exp(-i tau T) e_0`` and the error estimate."""
    evals, evecs = _tridiag_eig(alpha, beta)
    coeffs = evecs @ (np.exp(-1j * evals * tau) * evecs[0].conj())
    return coeffs, beta[-1] * abs(coeffs[-1])


def krylov_propagate(matvec, psi, duration, tol=1e-12, krylov_dim=30, norm_estimate=None,
                     min_step_fraction=1e-12, check_every=3):
    """Approximate ``exp(-i H duration) psi`` with adaptive Lanczos steps.

    The local error of a step of size ``tau`` is estimated by the standard
    a-posteriori bound ``beta_m |[exp(-i tau T_m)]_{m-1, 0}|``.  The Lanczos
    recursion stops as soon as the estimate meets the budget
    ``tol * tau / duration``; if ``krylov_dim`` vectors are not enough the
    step is halved instead.  Successful cheap steps let ``tau`` grow again.
    """
    psi = np.asarray(psi, dtype=np.complex128)
    if duration < 0:
        raise ValueError("duration must be non-negative")
    if duration == 0.0:
        return psi.copy()
    n = psi.shape[0]
    m_max = min(krylov_dim, n)
    if norm_estimate:
        tau = min(duration, max(1.0, m_max / 4.0) / norm_estimate)
    else:
        tau = duration
    min_step = min_step_fraction * duration
    V = np.zeros((m_max, n), dtype=np.complex128)
    alpha = np.zeros(m_max)
    beta = np.zeros(m_max)
    t = 0.0
    while duration - t > 1e-15 * duration:
        tau = min(tau, duration - t)
        budget = lambda tau_: tol * max(tau_ / duration, 1e-3)
        nrm = np.linalg.norm(psi)
        V[0] = psi / nrm
        scale = 0.0
        coeffs = None
        for j in range(m_max):
            w = matvec(V[j])
            alpha[j] = np.vdot(V[j], w).real
            w = w - alpha[j] * V[j]
            if j > 0:
                w = w - beta[j - 1] * V[j - 1]
            for _ in range(2):
                w = w - V[: j + 1].T @ (V[: j + 1].conj() @ w)
            beta[j] = np.linalg.norm(w)
            scale = max(scale, abs(alpha[j]), beta[j])
            m = j + 1
            if beta[j] <= 1e-13 * max(scale, 1.0):
                beta[j] = 0.0
                coeffs, err = _step_coefficients(alpha[:m], beta[:m], tau)
                break
            if m == m_max or (m >= 4 and m % check_every == 0):
                coeffs, err = _step_coefficients(alpha[:m], beta[:m], tau)
                if err * nrm <= budget(tau) or m == m_max:
                    break
            V[m] = w / beta[j]
        while err * nrm > budget(tau):
            tau *= 0.5
            if tau < min_step:
                raise StepSizeUnderflowError(
                    f"Krylov step fell below {min_step:.3e} at t={t:.6g}; "
                    "operator norm too large for the requested tolerance"
                )
            coeffs, err = _step_coefficients(alpha[:m], beta[:m], tau)
        psi = nrm * (coeffs @ V[:m])
        t += tau
        if m < m_max:
            tau *= 2.0
    return psi
