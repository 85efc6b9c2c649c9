"""Shipped scenario presets, stored as config text so they go through the
same parser and validation as user files."""

PRESETS = {}
DESCRIPTIONS = {}


def _add(name, description, text):
    PRESETS[name] = text.strip() + "\n"
    DESCRIPTIONS[name] = description


_add("double-well-sf", "double well, superfluid, pi/2 step imprint: <x>(t) oscillation", """
[scenario]
kind = double_well
[model]
n_sites = 2
n_atoms = 2
J = 1.0
U = 0.0
initial = ground
[protocol]
boost = imprint_step
dphi = pi/2
probe_U = 0.0
total_time = 30
dt_sample = 0.05
""")

_add("double-well-mi", "double well, Mott-like |11>, pi/2 step imprint: no net current", """
[scenario]
kind = double_well
[model]
n_sites = 2
n_atoms = 2
J = 1.0
initial = mott
[protocol]
boost = imprint_step
dphi = pi/2
probe_U = 0.0
total_time = 30
dt_sample = 0.05
""")

_add("double-well-gradient", "double well, superfluid, plane-wave imprint with ka = pi/2", """
[scenario]
kind = double_well
[model]
n_sites = 2
n_atoms = 2
J = 1.0
initial = ground
[protocol]
boost = imprint_gradient
k = pi/2
total_time = 30
dt_sample = 0.05
""")

_add("double-well-tilt", "double well, superfluid, brief tilt giving a pi/2 phase step", """
[scenario]
kind = double_well
[model]
n_sites = 2
n_atoms = 2
J = 1.0
initial = ground
[protocol]
boost = tilt_pulse
dphi = pi/2
T = 0.1
total_time = 30
dt_sample = 0.05
""")

_add("double-well-sweep", "double well: oscillation amplitude vs condensate fraction (tilt boost)", """
[scenario]
kind = lattice_sweep_n
[model]
n_sites = 2
n_atoms = 2
J = 1.0
[protocol]
boost = tilt_pulse
dphi = pi/2
T = 0.1
probe_U = 0.0
total_time = 30
dt_sample = 0.05
[sweep]
U_list = 0, 0.5, 1, 2, 4, 8, 16, 50
""")

_add("lattice5-sweep", "5 atoms on 5 sites: amplitude vs condensate fraction, non-interacting probe", """
[scenario]
kind = lattice_sweep_n
[model]
n_sites = 5
n_atoms = 5
J = 1.0
boundary = open
[protocol]
boost = tilt_pulse
dphi = pi/2
T = 0.1
probe_U = 0.0
total_time = 30
dt_sample = 0.05
[sweep]
U_list = 0, 0.5, 1, 2, 3, 5, 8, 15, 50
""")

_add("lattice5-interacting", "5 atoms on 5 sites: same sweep with a weakly interacting probe", """
[scenario]
kind = lattice_interacting
[model]
n_sites = 5
n_atoms = 5
J = 1.0
boundary = open
[protocol]
boost = tilt_pulse
dphi = pi/2
T = 0.1
probe_U = 0.1
total_time = 30
dt_sample = 0.05
[sweep]
U_list = 0, 0.5, 1, 2, 3, 5, 8, 15, 50
""")

_add("ka-sweep-32", "32-site superfluid: oscillation frequency vs imprinted ka", """
[scenario]
kind = ka_sweep
[model]
n_sites = 32
n_atoms = 1
J = 1.0
boundary = open
initial = ground
[protocol]
total_time = 1000
dt_sample = 2
[ka_sweep]
ka_list = 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0, 2.1, 2.2, 2.3, 2.4, 2.5, 2.6, 2.7, 2.8
""")

_add("bands-lattice32", "continuum lattice V0=25 cos^2(pi x), 32 periodic cells: J from bandwidth", """
[scenario]
kind = bands
[bands]
V0 = 25
a = 1
n_cells = 32
boundary = periodic
n_levels = 33
method = both
""")

_add("bands-double-well", "continuum double well V0=2 cos^2(0.2 pi x), hard walls: J and Rabi period", """
[scenario]
kind = bands
[bands]
V0 = 2
a = 5
n_cells = 2
boundary = hard-wall
n_levels = 3
method = fd
""")

_add("rb87-gravity", "87Rb in a 780 nm lattice under g: tilt product for a pi/2 phase step", """
[scenario]
kind = gradiometer
[gradiometer]
species = rb87
gradient = 9.8
target_phase = pi/2
""")

_add("cr52-magnetic", "52Cr (6 Bohr magnetons), 1064 nm lattice, 3000 nT/m; period at J = h x 2.5 Hz", """
[scenario]
kind = gradiometer
[gradiometer]
species = cr52
gradient = 3000e-9
target_phase = pi/2
J_hz = 2.5
n_sites = 1000
ka = pi/2
""")


def list_presets():
    width = max(len(n) for n in PRESETS)
    return "\n".join(f"{name:<{width}}  {DESCRIPTIONS[name]}" for name in PRESETS) + "\n"
