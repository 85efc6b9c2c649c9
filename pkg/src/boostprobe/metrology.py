"""Gradiometer estimates in SI units.

A lattice tilted by angle ``theta`` for a time ``T`` in a field gradient
``Gamma`` that couples through ``V = q Gamma z`` imprints a neighbour phase
step ``q Gamma a sin(theta) T / hbar``.  The oscillation period of a boosted
superfluid then follows from the tight-binding frequency law.

Only horizontal gradients are meaningful: a vertical tilt would add the
gravitational phase on top of the measured one.  This is not checked.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .analysis import tb_frequency
from .errors import ZeroCouplingError

# CODATA 2018
HBAR = 1.054571817e-34  # J s
PLANCK = 6.62607015e-34  # J s
BOHR_MAGNETON = 9.2740100783e-24  # J/T
ATOMIC_MASS_UNIT = 1.66053906660e-27  # kg
STANDARD_GRAVITY = 9.8  # m/s^2, rounded as used for the Rb estimate

MASS_RB87 = 86.909180531 * ATOMIC_MASS_UNIT
MASS_CR52 = 51.940504713 * ATOMIC_MASS_UNIT

SPECIES = {
    # charge couples to the gradient; lattice constant is half the laser wavelength
    "rb87": {"charge": MASS_RB87, "lattice_constant": 780e-9 / 2, "gradient": STANDARD_GRAVITY,
             "coupling": "gravity (charge = mass, gradient in m/s^2)"},
    "cr52": {"charge": 6 * BOHR_MAGNETON, "lattice_constant": 1064e-9 / 2, "gradient": 3000e-9,
             "coupling": "magnetic (charge = 6 Bohr magnetons, gradient in T/m)"},
}


@dataclass(frozen=True)
class GradiometerParams:
    charge: float
    gradient: float
    lattice_constant: float
    tilt_angle: float = math.pi / 2
    tilt_time: float = 0.0
    hbar: float = HBAR

    def __post_init__(self):
        if self.lattice_constant <= 0:
            raise ValueError("lattice_constant must be positive")
        if self.tilt_time < 0:
            raise ValueError("tilt_time must be non-negative")
        if not 0.0 <= self.tilt_angle <= math.pi / 2:
            raise ValueError("tilt_angle must lie in [0, pi/2]")

    @classmethod
    def for_species(cls, species, gradient=None, **kw):
        s = SPECIES[species]
        return cls(charge=s["charge"], gradient=s["gradient"] if gradient is None else gradient,
                   lattice_constant=s["lattice_constant"], **kw)


def gradiometer_phase(p):
    return p.charge * p.gradient * p.lattice_constant * math.sin(p.tilt_angle) * p.tilt_time / p.hbar


def required_tilt_product(charge, gradient, lattice_constant, target_phase=math.pi / 2, hbar=HBAR):
    """``sin(theta) T`` that produces ``target_phase`` between neighbouring sites."""
    coupling = charge * gradient * lattice_constant
    if not coupling > 0:
        raise ZeroCouplingError("q * Gamma * a must be positive")
    return target_phase * hbar / coupling


def oscillation_period_estimate(J, n_sites, ka, hbar=HBAR):
    """Period ``2 pi / omega`` of the boosted-superfluid oscillation.

    Returns ``inf`` (with a warning) where the frequency vanishes.
    """
    omega = abs(float(tb_frequency(ka, J, n_sites, hbar)))
    if omega < 1e-300 or abs(math.sin(ka)) < 1e-12:
        warnings.warn(f"oscillation period diverges at ka={ka}", RuntimeWarning)
        return math.inf
    return 2.0 * math.pi / omega
