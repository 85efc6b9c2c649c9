"""Ground states, momentum boosts and real-time quench runs."""
from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import fock
from .fock import ManyBodyState, site_positions
from .krylov import krylov_propagate, lanczos_ground_state
from .model import build_hamiltonian

STATIONARITY_TOL = 1e-8
BOOST_KINDS = ("none", "imprint_step", "imprint_gradient", "tilt_pulse")


def ground_state(h, tol=1e-10, krylov_dim=60, max_restarts=200):
    """Lowest eigenpair of ``h`` as ``(ManyBodyState, energy)``.

    The global phase is fixed so the largest-magnitude amplitude is real and
    positive.
    """
    energy, vec, _ = lanczos_ground_state(
        h.matrix.dot, h.dimension, tol=tol, krylov_dim=krylov_dim, max_restarts=max_restarts
    )
    k = int(np.argmax(np.abs(vec)))
    vec = vec * (abs(vec[k]) / vec[k])
    return ManyBodyState.from_vector(h.basis, vec), float(energy)


def ground_state_family(basis, base_model, U_list, **solver_kw):
    """Ground states for each preparation interaction in ``U_list``.

    Returns a list of ``(U, state, condensate_fraction)`` in input order.
    """
    U_list = [float(u) for u in U_list]
    if not U_list:
        raise ValueError("U_list is empty")
    if any(b < a for a, b in zip(U_list, U_list[1:])):
        raise ValueError("U_list must be ascending")
    out = []
    for U in U_list:
        h = build_hamiltonian(basis, base_model.with_(onsite_U=U))
        state, _ = ground_state(h, **solver_kw)
        frac = fock.natural_spectrum(fock.one_body_rdm(state)).condensate_fraction
        out.append((U, state, frac))
    fracs = [f for _, _, f in out]
    if any(b > a + 1e-9 for a, b in zip(fracs, fracs[1:])):
        warnings.warn("condensate fraction is not monotone in U for this family", RuntimeWarning)
    return out


def apply_phase_imprint(state, phases):
    """Multiply each Fock amplitude by ``exp(i sum_j phi_j n_j)``."""
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (state.basis.n_sites,):
        raise ValueError("need one phase per site")
    factor = np.exp(1j * (state.basis.states @ phases))
    return state.with_amplitudes(state.amplitudes * factor)


def step_phases(n_sites, dphi):
    """Discrete step imprint ``phi_j = j * dphi``."""
    return np.arange(n_sites) * dphi


def gradient_phases(n_sites, k, lattice_constant=1.0):
    """Plane-wave imprint ``phi_j = k x_j`` on centred site coordinates."""
    return k * site_positions(n_sites, lattice_constant)


def propagate(state, h, duration, tolerance=1e-12, krylov_dim=30):
    """Evolve ``state`` under the time-independent ``h`` for ``duration``."""
    if duration < 0:
        raise ValueError("duration must be non-negative")
    if duration == 0:
        return state
    psi = krylov_propagate(
        h.matrix.dot, state.amplitudes, duration, tol=tolerance,
        krylov_dim=krylov_dim, norm_estimate=h.norm_estimate(),
    )
    return ManyBodyState(state.basis, psi, state.time + duration)


def apply_tilt_pulse(state, model, gamma, T, steps=1, tolerance=1e-12):
    """Evolve under ``model`` plus the linear tilt ``gamma * sum_i x_i n_i`` for ``T``.

    Adjacent sites pick up a relative phase of about ``-gamma a T`` in the
    impulse limit.  ``steps`` splits the pulse into equal propagation
    segments; the result does not depend on it beyond ``tolerance``.
    """
    if T <= 0:
        raise ValueError("pulse duration T must be positive")
    h = build_hamiltonian(state.basis, model.with_(tilt_gamma=model.tilt_gamma + gamma))
    out = state
    for _ in range(max(1, int(steps))):
        out = propagate(out, h, T / max(1, int(steps)), tolerance)
    return out


@dataclass(frozen=True)
class QuenchProtocol:
    boost: str = "imprint_step"
    dphi: float = np.pi / 2
    k: float = 0.0
    gamma: float = 0.0
    T: float = 0.0
    probe_U: float = 0.0
    total_time: float = 30.0
    dt_sample: float = 0.05
    propagator_tolerance: float = 1e-12

    def __post_init__(self):
        if self.boost not in BOOST_KINDS:
            raise ValueError(f"unknown boost {self.boost!r}; expected one of {BOOST_KINDS}")
        if self.total_time <= 0:
            raise ValueError("total_time must be positive")
        if self.dt_sample <= 0:
            raise ValueError("dt_sample must be positive")
        if self.boost == "tilt_pulse":
            if self.T <= 0:
                raise ValueError("tilt pulse needs T > 0")
            if not self.T < self.total_time / 10:
                raise ValueError("tilt pulse must be shorter than total_time/10")

    @property
    def n_samples(self):
        return int(round(self.total_time / self.dt_sample)) + 1

    @classmethod
    def tilt_for_phase(cls, dphi, T, lattice_constant=1.0, **kw):
        """Tilt pulse whose impulse-limit neighbour phase step is ``dphi``."""
        return cls(boost="tilt_pulse", gamma=-dphi / (lattice_constant * T), T=T, dphi=dphi, **kw)


@dataclass(frozen=True)
class TimeSeries:
    times: np.ndarray
    mean_x: np.ndarray
    densities: np.ndarray
    current: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.times)
        if not (len(self.mean_x) == n and len(self.current) == n and len(self.densities) == n):
            raise ValueError("time series columns have unequal length")

    @classmethod
    def from_signal(cls, times, mean_x):
        """Series carrying only ``<x>/a``; other columns are zero."""
        times = np.asarray(times, dtype=float)
        return cls(times, np.asarray(mean_x, dtype=float), np.zeros((times.size, 0)),
                   np.zeros(times.size))

    @property
    def dt(self):
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else 0.0


def _observe(state, model):
    dens = fock.site_densities(state)
    x = site_positions(state.basis.n_sites, 1.0)
    mx = float(dens @ x / state.basis.n_atoms)
    cur = fock.current_expectation(state, model)
    return mx, dens, cur


def run_quench(basis, model, initial, protocol):
    """Boost ``initial``, switch the interaction to ``protocol.probe_U`` and sample.

    ``model`` is the preparation model; its interaction is replaced by the
    probe value for the boost and the whole sampled evolution.  For a tilt
    pulse the clock starts when the pulse switches on, so samples with
    ``t < T`` are taken inside the pulse.
    """
    if initial.basis != basis:
        raise ValueError("initial state lives in a different basis")
    j0 = fock.current_expectation(initial, model)
    if abs(j0) > STATIONARITY_TOL * model.hop_J * model.lattice_constant:
        warnings.warn(
            f"initial state carries current {j0:.3e}; the diagnostic assumes a stationary state",
            RuntimeWarning,
        )
    probe = model.with_(onsite_U=protocol.probe_U)
    h = build_hamiltonian(basis, probe)
    tol = protocol.propagator_tolerance
    state = ManyBodyState(basis, initial.amplitudes, 0.0)
    if protocol.boost == "imprint_step":
        state = apply_phase_imprint(state, step_phases(basis.n_sites, protocol.dphi))
    elif protocol.boost == "imprint_gradient":
        state = apply_phase_imprint(
            state, gradient_phases(basis.n_sites, protocol.k, model.lattice_constant)
        )

    times = np.arange(protocol.n_samples) * protocol.dt_sample
    h_tilt = None
    pulse_end = 0.0
    if protocol.boost == "tilt_pulse":
        h_tilt = build_hamiltonian(basis, probe.with_(tilt_gamma=probe.tilt_gamma + protocol.gamma))
        pulse_end = protocol.T

    mean_x = np.empty(times.size)
    current = np.empty(times.size)
    dens = np.empty((times.size, basis.n_sites))
    t = 0.0
    for n, t_next in enumerate(times):
        # piecewise-constant segments: tilt on [0, T), probe afterwards
        if h_tilt is not None and t < pulse_end:
            seg = min(t_next, pulse_end)
            state = propagate(state, h_tilt, seg - t, tol)
            t = seg
        if t_next > t:
            state = propagate(state, h, t_next - t, tol)
            t = t_next
        mean_x[n], dens[n], current[n] = _observe(state, probe)

    meta = {
        "protocol": asdict(protocol),
        "model": asdict(model),
        "probe_U": protocol.probe_U,
        "n_atoms": basis.n_atoms,
        "n_sites": basis.n_sites,
        "window": [float(times[0]), float(times[-1])],
    }
    return TimeSeries(times, mean_x, dens, current, meta)


__all__ = [
    "QuenchProtocol", "TimeSeries", "apply_phase_imprint",
    "apply_tilt_pulse", "ground_state", "ground_state_family", "gradient_phases",
    "propagate", "run_quench", "step_phases",
]
