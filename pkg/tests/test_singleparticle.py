import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import eigh

from boostprobe.errors import BandIdentificationError
from boostprobe.singleparticle import (ContinuousLattice, recoil_energy, solve_spectrum,
                                       tight_binding_band, tunneling_from_band)


def test_free_particle_ring():
    # V0 = 0 on a ring of length L: E = (2 pi n / L)^2 / 2, doubly degenerate
    lat = ContinuousLattice(V0=0.0, n_cells=4, points_per_period=32)
    E = solve_spectrum(lat, 5, method="fd")
    L = lat.length
    ref = 0.5 * (2 * np.pi / L) ** 2 * np.array([0, 1, 1, 4, 4])
    np.testing.assert_allclose(E, ref, rtol=1e-5, atol=1e-10)


def test_box_against_dense_diagonalisation():
    # hard-wall FD on a coarse grid equals the dense matrix it discretises
    lat = ContinuousLattice(V0=5.0, n_cells=3, boundary="hard-wall", points_per_period=16)
    from boostprobe.singleparticle import _fd_eigenvalues
    n = 3 * 16
    h = lat.length / n
    x = np.arange(1, n) * h
    H = (np.diag(1.0 / h**2 + lat.potential(x)) - 0.5 / h**2 * (np.eye(n - 1, k=1) + np.eye(n - 1, k=-1)))
    np.testing.assert_allclose(_fd_eigenvalues(lat, 6, 16), eigh(H, eigvals_only=True)[:6],
                               atol=1e-10)


def test_fd_and_planewave_agree():
    lat = ContinuousLattice(V0=8.0, n_cells=6)
    fd = solve_spectrum(lat, 12, method="fd")
    pw = solve_spectrum(lat, 12, method="planewave")
    np.testing.assert_allclose(fd, pw, rtol=1e-5)


def test_recoil_energy_units():
    lat = ContinuousLattice(V0=1.0, a=1.0)
    # lambda = 2a = 2, h = 2 pi: E_R = 4 pi^2 / 8
    assert recoil_energy(lat) == pytest.approx(math.pi**2 / 2)


@given(st.floats(-3, 3), st.floats(0.01, 2.0), st.integers(2, 40),
       st.sampled_from(["periodic", "hard-wall"]))
def test_tight_binding_roundtrip(alpha, J, m, boundary):
    band = tight_binding_band(alpha, J, m, boundary)
    res = tunneling_from_band(band, m, boundary)
    assert res.hop_J == pytest.approx(J, rel=1e-10)
    assert res.band_fit_residual < 1e-10


def test_band_gap_required():
    band = np.linspace(0, 1, 8)
    with pytest.raises(BandIdentificationError):
        tunneling_from_band(band, 4)
    with pytest.raises(BandIdentificationError):
        tunneling_from_band(band[:3], 4)


def test_deep_lattice_band_is_tight_binding():
    lat = ContinuousLattice(V0=25.0, n_cells=8)
    E = solve_spectrum(lat, 9, method="planewave")
    res = tunneling_from_band(E, 8)
    # next-nearest hopping leaves a small but visible deviation
    assert res.band_fit_residual < 0.05
    assert res.rabi_period() == pytest.approx(math.pi / res.hop_J)


def test_lattice_validation():
    with pytest.raises(ValueError):
        ContinuousLattice(V0=1.0, points_per_period=8)
    with pytest.raises(ValueError):
        ContinuousLattice(V0=1.0, boundary="mirror")
    with pytest.raises(ValueError):
        solve_spectrum(ContinuousLattice(V0=1.0, boundary="hard-wall"), 3, method="planewave")


def test_sparse_path_is_reproducible():
    lat = ContinuousLattice(V0=10.0, n_cells=6)
    first = solve_spectrum(lat, 7)
    assert np.array_equal(first, solve_spectrum(lat, 7))
