"""Occupation-number basis, many-body states and static observables.

Bosons on a 1D chain of ``M`` sites are described in the fixed-``N`` Fock
basis.  States are ordered lexicographically descending, so the first state
is ``(N, 0, ..., 0)`` and the last is ``(0, ..., 0, N)``.  Basis lookup uses
a combinatorial ranking table rather than a hash map, which keeps index
computation vectorised for large bases.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np
from scipy.special import gammaln

from .errors import BasisMismatchError, DimensionOverflowError, FillingMismatchError

DEFAULT_DIMENSION_CAP = 5_000_000
NORM_TOL = 1e-10


def fock_dimension(n_atoms, n_sites):
    return comb(n_atoms + n_sites - 1, n_sites - 1)


@lru_cache(maxsize=64)
def _enumerate(n_atoms, n_sites):
    # descending lexicographic order
    if n_sites == 1:
        return np.array([[n_atoms]], dtype=np.int64)
    blocks = []
    for first in range(n_atoms, -1, -1):
        rest = _enumerate(n_atoms - first, n_sites - 1)
        head = np.full((rest.shape[0], 1), first, dtype=np.int64)
        blocks.append(np.hstack([head, rest]))
    return np.vstack(blocks)


def _rank_table(n_atoms, n_sites):
    """table[i, r, v] = number of states that precede, at site i with ``r``
    atoms still to place, every state whose site-i occupation is ``v``."""
    table = np.zeros((n_sites, n_atoms + 1, n_atoms + 1), dtype=np.int64)
    for i in range(n_sites - 1):
        remaining_sites = n_sites - i - 1
        for r in range(n_atoms + 1):
            acc = 0
            for v in range(r, -1, -1):
                table[i, r, v] = acc
                acc += comb(r - v + remaining_sites - 1, remaining_sites - 1)
    return table


@dataclass(frozen=True, eq=False)
class FockBasis:
    """Fixed-N occupation basis for ``n_atoms`` bosons on ``n_sites`` sites."""

    n_atoms: int
    n_sites: int
    states: np.ndarray = field(repr=False)
    _table: np.ndarray = field(repr=False)

    @property
    def dimension(self):
        return self.states.shape[0]

    def __len__(self):
        return self.dimension

    def __eq__(self, other):
        if not isinstance(other, FockBasis):
            return NotImplemented
        return self.n_atoms == other.n_atoms and self.n_sites == other.n_sites

    def __hash__(self):
        return hash((self.n_atoms, self.n_sites))

    def index_of(self, occupations):
        """Basis position(s) of one occupation vector or an ``(K, M)`` array."""
        occ = np.asarray(occupations, dtype=np.int64)
        single = occ.ndim == 1
        occ = np.atleast_2d(occ)
        if occ.shape[1] != self.n_sites:
            raise ValueError(f"expected {self.n_sites} occupations, got {occ.shape[1]}")
        if np.any(occ < 0) or np.any(occ.sum(axis=1) != self.n_atoms):
            raise ValueError("occupation vector is not in this basis")
        remaining = self.n_atoms - np.cumsum(occ, axis=1) + occ
        sites = np.arange(self.n_sites)
        idx = self._table[sites[None, :], remaining, occ].sum(axis=1)
        return int(idx[0]) if single else idx

    def __getitem__(self, position):
        return tuple(int(v) for v in self.states[position])


def build_basis(n_atoms, n_sites, cap=DEFAULT_DIMENSION_CAP):
    if n_atoms < 1:
        raise ValueError("n_atoms must be >= 1")
    if n_sites < 2:
        raise ValueError("n_sites must be >= 2")
    dim = fock_dimension(n_atoms, n_sites)
    if dim > cap:
        raise DimensionOverflowError(
            f"Fock dimension {dim} for N={n_atoms}, M={n_sites} exceeds cap {cap}"
        )
    states = _enumerate(n_atoms, n_sites).copy()
    states.setflags(write=False)
    table = _rank_table(n_atoms, n_sites)
    table.setflags(write=False)
    return FockBasis(n_atoms, n_sites, states, table)


@dataclass(frozen=True, eq=False)
class ManyBodyState:
    basis: FockBasis
    amplitudes: np.ndarray = field(repr=False)
    time: float = 0.0

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.basis.dimension,):
            raise ValueError(
                f"amplitude vector has shape {amps.shape}, basis dimension is {self.basis.dimension}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalised (norm={norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_vector(cls, basis, vector, time=0.0):
        """Normalise ``vector`` and wrap it."""
        v = np.asarray(vector, dtype=np.complex128)
        return cls(basis, v / np.linalg.norm(v), time)

    def with_amplitudes(self, amplitudes, time=None):
        return ManyBodyState(self.basis, amplitudes, self.time if time is None else time)


@dataclass(frozen=True)
class OneBodyRDM:
    """Matrix of ``<a_i^dagger a_j>``."""

    matrix: np.ndarray

    @property
    def n_atoms(self):
        return float(np.trace(self.matrix).real)


@dataclass(frozen=True)
class NaturalSpectrum:
    occupations: np.ndarray
    condensate_fraction: float


def site_positions(n_sites, lattice_constant=1.0):
    """Centred site coordinates ``(i - (M-1)/2) * a``."""
    return (np.arange(n_sites) - (n_sites - 1) / 2.0) * lattice_constant


def make_superfluid_state(basis, orbital=None):
    """Normalised ``(sum_i phi_i a_i^dagger)^N |0>``.

    With ``orbital=None`` the uniform orbital is used.  The coefficient of
    ``|n_1 ... n_M>`` is ``prod_i phi_i**n_i / sqrt(n_i!)`` up to normalisation.
    """
    states = basis.states
    if orbital is None:
        log_mag = -0.5 * gammaln(states + 1.0).sum(axis=1)
        amps = np.exp(log_mag - log_mag.max()).astype(np.complex128)
    else:
        phi = np.asarray(orbital, dtype=np.complex128)
        if phi.shape != (basis.n_sites,):
            raise ValueError("orbital length must equal n_sites")
        amps = np.prod(phi[None, :] ** states, axis=1) * np.exp(
            -0.5 * gammaln(states + 1.0).sum(axis=1)
        )
    return ManyBodyState.from_vector(basis, amps)


def make_mott_state(basis, filling=None):
    """Single Fock state; default is commensurate filling N/M atoms per site."""
    if filling is None:
        if basis.n_atoms % basis.n_sites:
            raise FillingMismatchError("N is not a multiple of M; give an explicit filling")
        filling = [basis.n_atoms // basis.n_sites] * basis.n_sites
    filling = np.asarray(filling, dtype=np.int64)
    if filling.shape != (basis.n_sites,) or np.any(filling < 0):
        raise FillingMismatchError(f"filling {filling.tolist()} does not fit {basis.n_sites} sites")
    if filling.sum() != basis.n_atoms:
        raise FillingMismatchError(
            f"filling sums to {int(filling.sum())}, basis holds {basis.n_atoms} atoms"
        )
    amps = np.zeros(basis.dimension, dtype=np.complex128)
    amps[basis.index_of(filling)] = 1.0
    return ManyBodyState(basis, amps)


@lru_cache(maxsize=4096)
def hop_targets(basis, dest, src):
    """Action of ``a_dest^dagger a_src`` on every basis state.

    Returns read-only ``(columns, rows, matrix_elements)`` restricted to
    states with an atom on ``src``.  Cached per (N, M, dest, src).
    """
    states = basis.states
    cols = np.nonzero(states[:, src] > 0)[0]
    moved = states[cols].copy()
    values = np.sqrt(moved[:, src] * (moved[:, dest] + 1.0))
    moved[:, src] -= 1
    moved[:, dest] += 1
    rows = basis.index_of(moved)
    for arr in (cols, rows, values):
        arr.setflags(write=False)
    return cols, rows, values


def _coherence(state, i, j, rdm=None):
    if rdm is not None:
        return rdm.matrix[i, j]
    psi = state.amplitudes
    cols, rows, vals = hop_targets(state.basis, i, j)
    return np.sum(np.conj(psi[rows]) * vals * psi[cols])


def one_body_rdm(state):
    basis = state.basis
    psi = state.amplitudes
    m = basis.n_sites
    rho = np.zeros((m, m), dtype=np.complex128)
    prob = np.abs(psi) ** 2
    rho[np.diag_indices(m)] = prob @ basis.states
    for i in range(m):
        for j in range(i + 1, m):
            cols, rows, vals = hop_targets(basis, i, j)
            rho[i, j] = np.sum(np.conj(psi[rows]) * vals * psi[cols])
            rho[j, i] = np.conj(rho[i, j])
    return OneBodyRDM(rho)


def natural_spectrum(rdm):
    occ = np.linalg.eigvalsh(rdm.matrix)[::-1].copy()
    n_atoms = rdm.n_atoms
    return NaturalSpectrum(occ, float(occ[0] / n_atoms))


def site_densities(state):
    return (np.abs(state.amplitudes) ** 2) @ state.basis.states


def mean_position(state, lattice_constant=1.0):
    x = site_positions(state.basis.n_sites, lattice_constant)
    return float(site_densities(state) @ x / state.basis.n_atoms)


def current_expectation(state, model, rdm=None):
    """Particle current ``N d<x>/dt`` through the nearest-neighbour bonds.

    Per bond ``(i, j)`` with ``j`` the right neighbour of ``i`` the
    contribution is ``2 J a Im<a_i^dagger a_j>`` (hbar = 1), so a positive
    value means atoms flow towards larger ``x``.
    """
    total = 0.0
    for i, j in model.bonds(state.basis.n_sites):
        total += 2.0 * _coherence(state, i, j, rdm).imag
    return float(model.hop_J * model.lattice_constant * total)


def state_fidelity(a, b):
    if a.basis != b.basis:
        raise BasisMismatchError(
            f"basis (N={a.basis.n_atoms}, M={a.basis.n_sites}) vs "
            f"(N={b.basis.n_atoms}, M={b.basis.n_sites})"
        )
    return float(min(1.0, abs(np.vdot(a.amplitudes, b.amplitudes))))
