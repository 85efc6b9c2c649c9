"""Continuous 1D single-particle solver for ``V(x) = V0 cos^2(pi x / a)``.

Links the continuum lattice to the tight-binding parameters used by the
many-body model: the hopping ``J`` is read off the width of the lowest band.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh_tridiagonal
from scipy.sparse.linalg import eigsh

from .errors import BandIdentificationError, ConvergenceError

MIN_POINTS_PER_PERIOD = 16


@dataclass(frozen=True)
class ContinuousLattice:
    V0: float
    a: float = 1.0
    n_cells: int = 32
    boundary: str = "periodic"
    points_per_period: int = 64
    n_planewaves: int = 41
    mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("lattice period a must be positive")
        if self.n_cells < 1:
            raise ValueError("n_cells must be >= 1")
        if self.boundary not in ("periodic", "hard-wall"):
            raise ValueError(f"boundary must be 'periodic' or 'hard-wall', got {self.boundary!r}")
        if self.points_per_period < MIN_POINTS_PER_PERIOD:
            raise ValueError(f"need at least {MIN_POINTS_PER_PERIOD} grid points per period")

    @property
    def length(self):
        return self.n_cells * self.a

    @property
    def wavelength(self):
        return 2.0 * self.a

    def potential(self, x):
        return self.V0 * np.cos(np.pi * np.asarray(x) / self.a) ** 2


@dataclass(frozen=True)
class BandResult:
    eigenvalues: np.ndarray
    alpha: float
    hop_J: float
    band_fit_residual: float
    boundary: str = "periodic"

    def rabi_period(self, hbar=1.0):
        """Two-site tunnelling period ``h / (2 J)``."""
        return 2.0 * math.pi * hbar / (2.0 * self.hop_J)


def recoil_energy(lat):
    """``E_R = h^2 / (2 m lambda^2)`` with ``lambda = 2a``."""
    h = 2.0 * math.pi * lat.hbar
    return h**2 / (2.0 * lat.mass * lat.wavelength**2)


def _fd_eigenvalues(lat, n_levels, points_per_period):
    n = lat.n_cells * points_per_period
    kin = lat.hbar**2 / (2.0 * lat.mass)
    if lat.boundary == "hard-wall":
        h = lat.length / n
        x = np.arange(1, n) * h
        diag = 2.0 * kin / h**2 + lat.potential(x)
        off = np.full(n - 2, -kin / h**2)
        if n_levels > diag.size:
            raise ValueError("n_levels exceeds the number of grid points")
        return eigh_tridiagonal(diag, off, select="i", select_range=(0, n_levels - 1),
                                eigvals_only=True)
    h = lat.length / n
    x = np.arange(n) * h
    diag = 2.0 * kin / h**2 + lat.potential(x)
    off = np.full(n - 1, -kin / h**2)
    H = sp.diags([off, diag, off], [-1, 0, 1], format="lil")
    H[0, n - 1] = -kin / h**2
    H[n - 1, 0] = -kin / h**2
    if n_levels >= n - 1:
        return np.linalg.eigvalsh(H.toarray())[:n_levels]
    shift = float(diag.min() - 2.0 * kin / h**2) - 1.0
    # fixed start vector: ARPACK's default is random and breaks byte reproducibility
    v0 = np.cos(2.0 * np.pi * np.arange(n) / n) + 1.0
    vals = eigsh(H.tocsc(), k=n_levels, sigma=shift, which="LM", v0=v0,
                 return_eigenvectors=False)
    return np.sort(vals)


def _planewave_eigenvalues(lat, n_levels):
    if lat.boundary != "periodic":
        raise ValueError("plane-wave basis is only available for periodic boundaries")
    K = lat.n_planewaves // 2
    G = 2.0 * np.pi * np.arange(-K, K + 1) / lat.a
    kin = lat.hbar**2 / (2.0 * lat.mass)
    # V0 cos^2(pi x/a) = V0/2 + V0/4 (e^{2 pi i x/a} + c.c.)
    off = np.full(G.size - 1, lat.V0 / 4.0)
    per_q = max(1, -(-n_levels // lat.n_cells) + 1)
    vals = []
    for n in range(lat.n_cells):
        q = 2.0 * np.pi * n / lat.length
        diag = kin * (q + G) ** 2 + lat.V0 / 2.0
        vals.append(eigh_tridiagonal(diag, off, select="i",
                                     select_range=(0, min(per_q, G.size) - 1),
                                     eigvals_only=True))
    return np.sort(np.concatenate(vals))[:n_levels]


def solve_spectrum(lat, n_levels, method="fd", tol=1e-6, max_points_per_period=1 << 14):
    """Lowest ``n_levels`` eigenvalues of ``-hbar^2/2m d^2/dx^2 + V(x)``.

    ``method="fd"`` uses second-order central differences and doubles the
    grid until no eigenvalue moves by more than ``tol`` relative; the finest
    grid is returned.  ``method="planewave"`` diagonalises Bloch blocks in a
    truncated reciprocal-lattice basis (periodic boundary only), and likewise
    grows the cutoff until converged.
    """
    if n_levels < 1:
        raise ValueError("n_levels must be >= 1")
    if method == "planewave":
        prev = _planewave_eigenvalues(lat, n_levels)
        cut = lat.n_planewaves
        while True:
            cut = 2 * cut + 1
            cur = _planewave_eigenvalues(replace(lat, n_planewaves=cut), n_levels)
            if _rel_change(prev, cur) <= tol:
                return cur
            if cut > 4096:
                raise ConvergenceError("plane-wave spectrum did not converge")
            prev = cur
    if method != "fd":
        raise ValueError(f"unknown method {method!r}")
    P = lat.points_per_period
    if n_levels > lat.n_cells * P:
        raise ValueError("n_levels exceeds the grid size")
    prev = _fd_eigenvalues(lat, n_levels, P)
    while True:
        P *= 2
        if P > max_points_per_period:
            raise ConvergenceError(
                f"finite-difference spectrum not converged to {tol:g} at {P // 2} points per period"
            )
        cur = _fd_eigenvalues(lat, n_levels, P)
        if _rel_change(prev, cur) <= tol:
            return cur
        prev = cur


def _rel_change(old, new):
    scale = max(np.max(np.abs(new)), np.finfo(float).tiny)
    return float(np.max(np.abs(new - old)) / scale)


def tight_binding_band(alpha, J, n_sites, boundary="periodic", a=1.0):
    """Sorted tight-binding energies ``alpha - 2 J cos(q a)``."""
    return np.sort(alpha - 2.0 * J * np.cos(_band_momenta(n_sites, boundary, a) * a))


def _band_momenta(n_sites, boundary, a=1.0):
    if boundary == "periodic":
        return 2.0 * np.pi * np.arange(n_sites) / (n_sites * a)
    return np.pi * np.arange(1, n_sites + 1) / ((n_sites + 1) * a)


def tunneling_from_band(eigenvalues, n_sites, boundary="periodic", a=1.0):
    """Hopping ``J`` and band centre from the first ``n_sites`` eigenvalues.

    The bandwidth is divided by the width of ``-2 cos(q a)`` over the allowed
    momenta: 4 for an even periodic chain, giving ``J = (E_{M-1} - E_0) / 4``,
    and ``4 cos(pi/(M+1))`` for a hard-wall chain.  The residual is the RMS
    deviation of the sorted band from the least-squares tight-binding fit,
    relative to the bandwidth.
    """
    if boundary not in ("periodic", "hard-wall"):
        raise ValueError(f"unknown boundary {boundary!r}")
    E = np.sort(np.asarray(eigenvalues, dtype=float))
    if E.size < n_sites:
        raise BandIdentificationError(
            f"need {n_sites} eigenvalues for the first band, got {E.size}"
        )
    band = E[:n_sites]
    width = band[-1] - band[0]
    if E.size > n_sites:
        gap = E[n_sites] - band[-1]
        spacing = np.max(np.diff(band)) if n_sites > 1 else 0.0
        if gap <= spacing:
            raise BandIdentificationError(
                f"no gap above the first band (gap {gap:.4g}, max in-band spacing {spacing:.4g})"
            )
    shape = np.sort(-2.0 * np.cos(_band_momenta(n_sites, boundary, a) * a))
    J = width / (shape[-1] - shape[0])
    alpha = 0.5 * (band[0] + band[-1])
    design = np.column_stack([np.ones(n_sites), shape])
    coef, *_ = np.linalg.lstsq(design, band, rcond=None)
    resid = band - design @ coef
    residual = float(np.sqrt(np.mean(resid**2)) / width) if width > 0 else 0.0
    return BandResult(band.copy(), float(alpha), float(J), residual, boundary)
