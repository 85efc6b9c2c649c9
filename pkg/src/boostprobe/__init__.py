"""Momentum-boost diagnostics of the condensate fraction in 1D Bose lattices."""

__version__ = "0.1.0"

from .fock import (FockBasis, ManyBodyState, NaturalSpectrum, OneBodyRDM, build_basis,
                   current_expectation, make_mott_state, make_superfluid_state,
                   mean_position, natural_spectrum, one_body_rdm, site_densities,
                   state_fidelity)
from .model import BoseHubbardModel, SparseHamiltonian, apply_hamiltonian, build_hamiltonian
from .dynamics import (QuenchProtocol, TimeSeries, apply_phase_imprint, apply_tilt_pulse,
                       ground_state, ground_state_family, propagate, run_quench)
