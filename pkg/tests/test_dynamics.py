import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boostprobe.dynamics import (QuenchProtocol, apply_phase_imprint, apply_tilt_pulse,
                                 ground_state, ground_state_family, gradient_phases, propagate,
                                 run_quench, step_phases)
from boostprobe.fock import (ManyBodyState, build_basis, current_expectation, make_mott_state,
                             make_superfluid_state, mean_position, natural_spectrum,
                             one_body_rdm, site_densities)
from boostprobe.model import BoseHubbardModel, build_hamiltonian

from oracles import dense_evolve, dense_ground, dense_hamiltonian


@settings(max_examples=15, deadline=None)
@given(st.tuples(st.integers(1, 4), st.integers(2, 5)), st.floats(0.0, 20.0))
def test_ground_state_vs_dense(nm, U):
    n, m = nm
    basis = build_basis(n, m)
    state, e = ground_state(build_hamiltonian(basis, BoseHubbardModel(onsite_U=U)))
    e_ref, v_ref = dense_ground(dense_hamiltonian(n, m, 1.0, U))
    assert abs(e - e_ref) <= 1e-9 * max(1.0, abs(e_ref))
    assert abs(abs(np.vdot(v_ref, state.amplitudes)) - 1.0) < 1e-8
    k = np.argmax(np.abs(state.amplitudes))
    assert state.amplitudes[k].real > 0 and abs(state.amplitudes[k].imag) < 1e-15


def test_ground_state_is_stationary():
    basis = build_basis(3, 3)
    h = build_hamiltonian(basis, BoseHubbardModel(onsite_U=2.0))
    g, _ = ground_state(h)
    later = propagate(g, h, 5.0)
    assert abs(abs(np.vdot(g.amplitudes, later.amplitudes)) - 1.0) < 1e-10
    assert abs(current_expectation(g, h.model)) < 1e-10


def test_double_well_mott_limit_fraction():
    # U/J = 50: the condensate fraction sits near 1/2 but above it
    basis = build_basis(2, 2)
    g, _ = ground_state(build_hamiltonian(basis, BoseHubbardModel(onsite_U=50.0)))
    n = natural_spectrum(one_body_rdm(g)).condensate_fraction
    assert 0.5 < n < 0.6


def test_five_site_mott_limit_fraction():
    basis = build_basis(5, 5)
    g, _ = ground_state(build_hamiltonian(basis, BoseHubbardModel(onsite_U=50.0)))
    assert 0.2 <= natural_spectrum(one_body_rdm(g)).condensate_fraction <= 0.3


def test_family_fraction_decreases():
    fam = ground_state_family(build_basis(3, 3), BoseHubbardModel(), [0.0, 1.0, 4.0, 20.0])
    fracs = [f for _, _, f in fam]
    assert fracs[0] == pytest.approx(1.0, abs=1e-10)
    assert all(b < a for a, b in zip(fracs, fracs[1:]))
    with pytest.raises(ValueError):
        ground_state_family(build_basis(2, 2), BoseHubbardModel(), [2.0, 1.0])


@settings(max_examples=25, deadline=None)
@given(st.tuples(st.integers(1, 3), st.integers(2, 4)), st.floats(-4, 4), st.integers(0, 2**31 - 1))
def test_imprint_preserves_densities_and_norm(nm, dphi, seed):
    n, m = nm
    basis = build_basis(n, m)
    rng = np.random.default_rng(seed)
    psi = rng.standard_normal(basis.dimension) + 1j * rng.standard_normal(basis.dimension)
    s = ManyBodyState.from_vector(basis, psi)
    out = apply_phase_imprint(s, step_phases(m, dphi))
    assert abs(np.linalg.norm(out.amplitudes) - 1.0) < 1e-12
    np.testing.assert_allclose(site_densities(out), site_densities(s), atol=1e-12)
    # coherences pick up the phase difference of their sites
    rho0, rho1 = one_body_rdm(s).matrix, one_body_rdm(out).matrix
    i, j = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    np.testing.assert_allclose(rho1, rho0 * np.exp(-1j * (i - j) * dphi), atol=1e-12)


def test_zero_imprint_is_identity():
    s = make_superfluid_state(build_basis(3, 4))
    assert np.array_equal(apply_phase_imprint(s, np.zeros(4)).amplitudes, s.amplitudes)
    with pytest.raises(ValueError):
        apply_phase_imprint(s, np.zeros(3))


def test_gradient_phases_centred():
    np.testing.assert_allclose(gradient_phases(3, 0.5), [-0.5, 0.0, 0.5])
    np.testing.assert_allclose(np.diff(gradient_phases(6, 0.3, 2.0)), 0.6)


def test_mott_imprint_carries_no_current():
    basis = build_basis(5, 5)
    model = BoseHubbardModel()
    s = apply_phase_imprint(make_mott_state(basis), step_phases(5, math.pi / 2))
    assert abs(current_expectation(s, model)) < 1e-14


@pytest.mark.parametrize("dphi", [0.3, math.pi / 2, 2.5])
def test_double_well_closed_form(dphi):
    # U=0 double well: <x>(t) = 0.5 sin(dphi) sin(2 J t) for any N
    J = 0.8
    basis = build_basis(3, 2)
    model = BoseHubbardModel(hop_J=J)
    initial = make_superfluid_state(basis)
    ts = run_quench(basis, model, initial,
                    QuenchProtocol(dphi=dphi, total_time=6.0, dt_sample=0.1))
    np.testing.assert_allclose(ts.mean_x, 0.5 * math.sin(dphi) * np.sin(2 * J * ts.times),
                               atol=1e-10)


def test_current_is_number_times_velocity():
    basis = build_basis(3, 4)
    model = BoseHubbardModel(onsite_U=0.7, lattice_constant=1.0)
    s = apply_phase_imprint(make_superfluid_state(basis), step_phases(4, 1.1))
    h = build_hamiltonian(basis, model)
    dt = 1e-5
    xp = mean_position(propagate(s, h, dt))
    xm = mean_position(propagate(s, h.__class__(basis, model, -h.matrix), dt))
    velocity = (xp - xm) / (2 * dt)
    assert current_expectation(s, model) == pytest.approx(basis.n_atoms * velocity, rel=1e-6)
    assert current_expectation(s, model) > 0


def test_run_quench_vs_dense_oracle():
    n, m = 3, 4
    basis = build_basis(n, m)
    model = BoseHubbardModel(onsite_U=1.5)
    g, _ = ground_state(build_hamiltonian(basis, model))
    proto = QuenchProtocol(dphi=0.9, probe_U=0.4, total_time=4.0, dt_sample=0.5)
    ts = run_quench(basis, model, g, proto)
    H = dense_hamiltonian(n, m, 1.0, 0.4)
    psi0 = apply_phase_imprint(g, step_phases(m, 0.9)).amplitudes
    x = np.arange(m) - (m - 1) / 2
    for t, mx, dens in zip(ts.times, ts.mean_x, ts.densities):
        psi = dense_evolve(H, psi0, t)
        ref = (np.abs(psi) ** 2) @ basis.states
        np.testing.assert_allclose(dens, ref, atol=1e-9)
        assert abs(mx - ref @ x / n) < 1e-9


def test_tilt_pulse_impulse_limit_matches_imprint():
    basis = build_basis(2, 3)
    model = BoseHubbardModel()
    s = make_superfluid_state(basis)
    T = 1e-3
    pulsed = apply_tilt_pulse(s, model, gamma=-0.7 / T, T=T)
    imprinted = apply_phase_imprint(s, step_phases(3, 0.7))
    assert abs(abs(np.vdot(pulsed.amplitudes, imprinted.amplitudes)) - 1.0) < 1e-5
    # number of sub-steps does not matter
    split = apply_tilt_pulse(s, model, gamma=-0.7 / T, T=T, steps=4)
    assert np.linalg.norm(split.amplitudes - pulsed.amplitudes) < 1e-10


def test_tilt_pulse_quench_drives_positive_flow():
    basis = build_basis(2, 2)
    model = BoseHubbardModel()
    proto = QuenchProtocol.tilt_for_phase(math.pi / 2, T=0.05, total_time=3.0, dt_sample=0.05)
    ts = run_quench(basis, model, make_superfluid_state(basis), proto)
    assert ts.mean_x[10] > 0
    assert ts.meta["window"] == [0.0, 3.0]


def test_energy_and_norm_conserved_after_boost():
    basis = build_basis(4, 4)
    model = BoseHubbardModel(onsite_U=1.0)
    h = build_hamiltonian(basis, model)
    s = apply_phase_imprint(make_superfluid_state(basis), step_phases(4, 1.0))
    later = propagate(s, h, 7.3)
    e0 = np.vdot(s.amplitudes, h.matrix @ s.amplitudes).real
    e1 = np.vdot(later.amplitudes, h.matrix @ later.amplitudes).real
    assert abs(e1 - e0) < 1e-10
    assert abs(np.linalg.norm(later.amplitudes) - 1.0) < 1e-12
    assert later.time == pytest.approx(7.3)


def test_protocol_validation():
    with pytest.raises(ValueError):
        QuenchProtocol(boost="kick")
    with pytest.raises(ValueError):
        QuenchProtocol(boost="tilt_pulse", T=5.0, total_time=30.0)
    with pytest.raises(ValueError):
        QuenchProtocol(dt_sample=0)
    assert QuenchProtocol(total_time=30.0, dt_sample=0.05).n_samples == 601


def test_moving_initial_state_warns():
    basis = build_basis(2, 2)
    moving = apply_phase_imprint(make_superfluid_state(basis), step_phases(2, 1.0))
    with pytest.warns(RuntimeWarning):
        run_quench(basis, BoseHubbardModel(), moving, QuenchProtocol(total_time=1, dt_sample=0.5))


def test_unboosted_ground_state_stays_put():
    basis = build_basis(2, 3)
    model = BoseHubbardModel(onsite_U=1.0)
    g, _ = ground_state(build_hamiltonian(basis, model))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ts = run_quench(basis, model, g, QuenchProtocol(boost="none", probe_U=1.0,
                                                        total_time=5, dt_sample=0.5))
    assert np.max(np.abs(ts.mean_x)) < 1e-10


def test_tilt_pulse_without_hopping_is_exact_imprint():
    basis = build_basis(3, 4)
    model = BoseHubbardModel(hop_J=0.0, onsite_U=0.0, lattice_constant=1.5)
    s = make_superfluid_state(basis)
    gamma, T = 0.8, 0.6
    out = apply_tilt_pulse(s, model, gamma, T)
    x = (np.arange(4) - 1.5) * 1.5
    ref = apply_phase_imprint(s, -gamma * x * T)
    np.testing.assert_allclose(out.amplitudes, ref.amplitudes, atol=1e-12)


def test_zero_tilt_is_plain_propagation():
    basis = build_basis(2, 3)
    model = BoseHubbardModel(onsite_U=1.0)
    s = apply_phase_imprint(make_superfluid_state(basis), step_phases(3, 0.4))
    a = apply_tilt_pulse(s, model, 0.0, 0.7)
    b = propagate(s, build_hamiltonian(basis, model), 0.7)
    np.testing.assert_allclose(a.amplitudes, b.amplitudes, atol=1e-12)


def test_impulse_limit_fidelity_grows_monotonically():
    basis = build_basis(3, 3)
    model = BoseHubbardModel(onsite_U=0.5)
    g, _ = ground_state(build_hamiltonian(basis, model))
    target = apply_phase_imprint(g, step_phases(3, math.pi / 2)).amplitudes
    fids = []
    for T in (0.4, 0.2, 0.1, 0.05, 0.01, 0.001):
        pulsed = apply_tilt_pulse(g, model, -(math.pi / 2) / T, T)
        fids.append(abs(np.vdot(target, pulsed.amplitudes)))
    assert all(b > a for a, b in zip(fids, fids[1:]))
    assert fids[-1] > 1 - 1e-5


def test_long_propagation_drift():
    basis = build_basis(4, 5)
    h = build_hamiltonian(basis, BoseHubbardModel(onsite_U=2.0, tilt_gamma=0.3))
    s = apply_phase_imprint(make_superfluid_state(basis), step_phases(5, 1.2))
    out = propagate(s, h, 200.0)
    e0 = np.vdot(s.amplitudes, h.matrix @ s.amplitudes).real
    e1 = np.vdot(out.amplitudes, h.matrix @ out.amplitudes).real
    assert abs(np.linalg.norm(out.amplitudes) - 1.0) <= 1e-9
    assert abs(e1 - e0) <= 1e-8 * abs(e0)


def test_densities_sum_to_atom_number():
    basis = build_basis(4, 4)
    model = BoseHubbardModel(onsite_U=1.0)
    ts = run_quench(basis, model, make_superfluid_state(basis),
                    QuenchProtocol(total_time=5, dt_sample=0.25))
    np.testing.assert_allclose(ts.densities.sum(axis=1), 4.0, atol=1e-8)
