"""Bose-Hubbard Hamiltonian with an optional linear tilt, as a sparse operator.

    H = -J sum_<ij> (a_i^dagger a_j + h.c.) + U/2 sum_i n_i (n_i - 1)
        + sum_i (eps_i + gamma x_i) n_i

with hbar = 1, so energies are angular frequencies.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatchError
from .fock import hop_targets, site_positions


@dataclass(frozen=True)
class BoseHubbardModel:
    hop_J: float = 1.0
    onsite_U: float = 0.0
    site_energies: tuple | None = None
    tilt_gamma: float = 0.0
    lattice_constant: float = 1.0
    boundary: str = "open"

    def __post_init__(self):
        if self.hop_J < 0:
            raise ValueError("hop_J must be non-negative")
        if self.lattice_constant <= 0:
            raise ValueError("lattice_constant must be positive")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"boundary must be 'open' or 'periodic', got {self.boundary!r}")
        if self.site_energies is not None:
            object.__setattr__(self, "site_energies", tuple(float(e) for e in self.site_energies))

    def bonds(self, n_sites):
        """Nearest-neighbour bonds ``(i, right neighbour of i)``.

        A periodic two-site chain has a single bond; the wrap bond would
        duplicate it.
        """
        out = [(i, i + 1) for i in range(n_sites - 1)]
        if self.boundary == "periodic" and n_sites > 2:
            out.append((n_sites - 1, 0))
        return out

    def energies(self, n_sites):
        if self.site_energies is None:
            return np.zeros(n_sites)
        eps = np.asarray(self.site_energies, dtype=float)
        if eps.shape != (n_sites,):
            raise ValueError(f"site_energies has {eps.size} entries for {n_sites} sites")
        return eps

    def diagonal_potential(self, n_sites):
        """Per-site single-particle energy ``eps_i + gamma x_i``."""
        x = site_positions(n_sites, self.lattice_constant)
        return self.energies(n_sites) + self.tilt_gamma * x

    def with_(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class SparseHamiltonian:
    basis: object
    model: BoseHubbardModel
    matrix: sp.csr_matrix = field(repr=False)

    @property
    def dimension(self):
        return self.matrix.shape[0]

    def entries(self):
        """``(rows, cols, values)`` in row-major order."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return coo.row[order], coo.col[order], coo.data[order]

    def toarray(self):
        return self.matrix.toarray()

    def norm_estimate(self):
        """Cheap upper bound on the spectral norm (max absolute row sum)."""
        return float(abs(self.matrix).sum(axis=1).max()) if self.dimension else 0.0


def diagonal_energies(basis, model):
    states = basis.states.astype(float)
    interaction = 0.5 * model.onsite_U * np.sum(states * (states - 1.0), axis=1)
    return interaction + states @ model.diagonal_potential(basis.n_sites)


def build_hamiltonian(basis, model):
    dim = basis.dimension
    rows, cols, vals = [], [], []
    if model.hop_J != 0.0:
        for i, j in model.bonds(basis.n_sites):
            for dest, src in ((i, j), (j, i)):
                c, r, v = hop_targets(basis, dest, src)
                rows.append(r)
                cols.append(c)
                vals.append(-model.hop_J * v)
    diag = diagonal_energies(basis, model)
    rows.append(np.arange(dim))
    cols.append(np.arange(dim))
    vals.append(diag)
    matrix = sp.csr_matrix(
        (np.concatenate(vals).astype(np.complex128), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )
    matrix.sum_duplicates()
    matrix.sort_indices()
    return SparseHamiltonian(basis, model, matrix)


def apply_hamiltonian(h, v):
    v = np.asarray(v)
    if v.shape[0] != h.dimension:
        raise DimensionMismatchError(f"vector length {v.shape[0]} != dimension {h.dimension}")
    return h.matrix @ v
