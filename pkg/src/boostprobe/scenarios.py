"""Scenario execution: turn a validated config into CSV tables and a manifest."""
from __future__ import annotations

import hashlib
import io
import json
import math
import os
import shutil
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import extract_amplitude, extract_frequency, linear_fit, tb_frequency
from .dynamics import QuenchProtocol, ground_state, run_quench
from .fock import (build_basis, make_mott_state, make_superfluid_state, natural_spectrum,
                   one_body_rdm)
from .metrology import (PLANCK, SPECIES, GradiometerParams, gradiometer_phase,
                        oscillation_period_estimate, required_tilt_product)
from .model import BoseHubbardModel, build_hamiltonian
from .singleparticle import ContinuousLattice, recoil_energy, solve_spectrum, tunneling_from_band


def fmt(value):
    """Shortest round-trip decimal for floats; ``str`` for everything else."""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def csv_bytes(header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue().encode("utf-8")


@dataclass
class RunManifest:
    config: dict
    version: str
    wall_clock_s: float
    checksums: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps({"config": self.config, "version": self.version,
                           "wall_clock_s": self.wall_clock_s, "outputs": self.checksums,
                           "summary": self.summary}, indent=2, sort_keys=True)


def _model(cfg):
    return BoseHubbardModel(hop_J=cfg.get("model", "J", 1.0), onsite_U=cfg.get("model", "U", 0.0),
                            lattice_constant=cfg.get("model", "a", 1.0),
                            boundary=cfg.get("model", "boundary", "open"))


def _protocol(cfg, **override):
    a = cfg.get("model", "a", 1.0)
    kw = dict(
        boost=cfg.get("protocol", "boost", "imprint_step"),
        dphi=cfg.get("protocol", "dphi", math.pi / 2),
        k=cfg.get("protocol", "k", 0.0),
        T=cfg.get("protocol", "T", 0.0),
        probe_U=cfg.get("protocol", "probe_U", 0.0),
        total_time=cfg.get("protocol", "total_time"),
        dt_sample=cfg.get("protocol", "dt_sample"),
        propagator_tolerance=cfg.get("protocol", "tolerance", 1e-12),
    )
    kw.update(override)
    if kw["boost"] == "tilt_pulse":
        gamma = cfg.get("protocol", "gamma")
        kw["gamma"] = -kw["dphi"] / (a * kw["T"]) if gamma is None else gamma
    return QuenchProtocol(**kw)


def _window(cfg):
    w = cfg.get("protocol", "smoothing_window", "auto")
    return None if w == "auto" else int(w)


def _initial(basis, model, kind):
    if kind == "superfluid":
        return make_superfluid_state(basis)
    if kind == "mott":
        return make_mott_state(basis)
    state, _ = ground_state(build_hamiltonian(basis, model))
    return state


def _timeseries_csv(ts):
    m = ts.densities.shape[1]
    header = ["t_s", "mean_x_over_a", "current"] + [f"n_site_{i + 1}" for i in range(m)]
    rows = ([t, x, j, *d] for t, x, j, d in zip(ts.times, ts.mean_x, ts.current, ts.densities))
    return csv_bytes(header, rows)


SUMMARY_HEADER = ["U", "condensate_fraction", "amplitude_over_a"]


def _single_run(cfg):
    m = cfg.get("model", "n_sites")
    basis = build_basis(cfg.get("model", "n_atoms", m), m)
    model = _model(cfg)
    initial = _initial(basis, model, cfg.get("model", "initial", "ground"))
    frac = natural_spectrum(one_body_rdm(initial)).condensate_fraction
    ts = run_quench(basis, model, initial, _protocol(cfg))
    amp = extract_amplitude(ts, _window(cfg))
    files = {
        "timeseries.csv": _timeseries_csv(ts),
        "summary.csv": csv_bytes(SUMMARY_HEADER, [[model.onsite_U, frac, amp.amplitude]]),
    }
    return files, {"condensate_fraction": frac, "amplitude_over_a": amp.amplitude,
                   "smoothing_window": amp.smoothing_window, "window": ts.meta["window"]}


def _sweep(cfg):
    m = cfg.get("model", "n_sites")
    basis = build_basis(cfg.get("model", "n_atoms", m), m)
    base = _model(cfg)
    protocol = _protocol(cfg)
    files, rows = {}, []
    for i, U in enumerate(cfg.get("sweep", "U_list")):
        prep = base.with_(onsite_U=U)
        state, _ = ground_state(build_hamiltonian(basis, prep))
        frac = natural_spectrum(one_body_rdm(state)).condensate_fraction
        ts = run_quench(basis, prep, state, protocol)
        amp = extract_amplitude(ts, _window(cfg)).amplitude
        rows.append([U, frac, amp])
        files[f"timeseries_{i:02d}.csv"] = _timeseries_csv(ts)
    files["summary.csv"] = csv_bytes(SUMMARY_HEADER, rows)
    summary = {"n_points": len(rows), "window": [0.0, protocol.total_time]}
    if len(rows) >= 2 and np.ptp([r[1] for r in rows]) > 0:
        fit = linear_fit([r[1] for r in rows], [r[2] for r in rows])
        files["linear_fit.csv"] = csv_bytes(["slope", "intercept", "r_squared"],
                                            [[fit.slope, fit.intercept, fit.r_squared]])
        summary.update(slope=fit.slope, intercept=fit.intercept, r_squared=fit.r_squared)
    return files, summary


def _ka_sweep(cfg):
    m = cfg.get("model", "n_sites")
    basis = build_basis(cfg.get("model", "n_atoms", 1), m)
    model = _model(cfg)
    a = model.lattice_constant
    initial = _initial(basis, model, cfg.get("model", "initial", "ground"))
    rows = []
    for ka in cfg.get("ka_sweep", "ka_list"):
        ts = run_quench(basis, model, initial,
                        _protocol(cfg, boost="imprint_gradient", k=ka / a))
        omega = extract_frequency(ts).frequency
        rows.append([ka, omega, float(tb_frequency(ka, model.hop_J, m))])
    worst = max(abs(r[1] / r[2] - 1.0) for r in rows)
    files = {"ka_sweep.csv": csv_bytes(["ka_rad", "omega_extracted", "omega_tight_binding"], rows)}
    return files, {"max_relative_error": worst}


def _bands(cfg):
    lat = ContinuousLattice(
        V0=cfg.get("bands", "V0"), a=cfg.get("bands", "a", 1.0),
        n_cells=cfg.get("bands", "n_cells", 32), boundary=cfg.get("bands", "boundary", "periodic"),
        points_per_period=cfg.get("bands", "points_per_period", 64),
    )
    n_levels = cfg.get("bands", "n_levels", lat.n_cells + 1)
    method = cfg.get("bands", "method", "fd")
    methods = ["fd", "planewave"] if method == "both" else [method]
    e_r = recoil_energy(lat)
    files, summary, rows = {}, {}, []
    for meth in methods:
        E = solve_spectrum(lat, n_levels, method=meth)
        band = tunneling_from_band(E, lat.n_cells, boundary=lat.boundary, a=lat.a)
        name = "bands.csv" if meth == methods[0] else f"bands_{meth}.csv"
        files[name] = csv_bytes(["level", "energy"], ([i, e] for i, e in enumerate(E)))
        rows.append([meth, band.hop_J, band.hop_J / (2 * math.pi * lat.hbar), band.alpha,
                     band.band_fit_residual, band.rabi_period(lat.hbar), e_r, lat.V0 / e_r])
        summary[meth] = {"hop_J": band.hop_J, "J_over_h": rows[-1][2]}
    files["band_summary.csv"] = csv_bytes(
        ["method", "hop_J", "J_over_h", "alpha", "band_fit_residual", "rabi_period",
         "recoil_energy", "V0_over_recoil"], rows)
    if len(methods) == 2:
        summary["fd_planewave_rel_diff_J"] = abs(rows[0][1] - rows[1][1]) / abs(rows[1][1])
    return files, summary


def _gradiometer(cfg):
    species = cfg.get("gradiometer", "species")
    info = SPECIES[species]
    gradient = cfg.get("gradiometer", "gradient", info["gradient"])
    a = cfg.get("gradiometer", "lattice_constant", info["lattice_constant"])
    target = cfg.get("gradiometer", "target_phase", math.pi / 2)
    product = required_tilt_product(info["charge"], gradient, a, target)
    angle = cfg.get("gradiometer", "tilt_angle", math.pi / 2)
    tilt_time = cfg.get("gradiometer", "tilt_time", product / math.sin(angle) if angle else 0.0)
    params = GradiometerParams(info["charge"], gradient, a, angle, tilt_time)
    dphi = gradiometer_phase(params)
    header = ["species", "charge", "gradient", "lattice_constant", "tilt_angle", "tilt_time",
              "delta_phi", "target_phase", "required_sin_theta_T"]
    row = [species, info["charge"], gradient, a, angle, tilt_time, dphi, target, product]
    summary = {"required_sin_theta_T": product, "delta_phi": dphi}
    J_hz = cfg.get("gradiometer", "J_hz")
    if J_hz is not None:
        n_sites = cfg.get("gradiometer", "n_sites", 1000)
        ka = cfg.get("gradiometer", "ka", math.pi / 2)
        period = oscillation_period_estimate(PLANCK * J_hz, n_sites, ka)
        header += ["J_hz", "n_sites", "ka", "period_estimate_s"]
        row += [J_hz, n_sites, ka, period]
        summary["period_estimate_s"] = period
    return {"gradiometer.csv": csv_bytes(header, [row])}, summary


RUNNERS = {
    "double_well": _single_run,
    "custom": _single_run,
    "lattice_sweep_n": _sweep,
    "lattice_interacting": _sweep,
    "ka_sweep": _ka_sweep,
    "bands": _bands,
    "gradiometer": _gradiometer,
}


def compute_outputs(cfg):
    """Run the scenario in memory; returns ``({filename: bytes}, summary)``."""
    return RUNNERS[cfg.kind](cfg)


def run_scenario(cfg, out_dir):
    """Execute ``cfg`` and write its CSVs plus ``manifest.json`` into ``out_dir``.

    Files are staged in a sibling temporary directory and moved into place
    only after every computation succeeded, so a failed run leaves no
    partial output behind.
    """
    start = time.perf_counter()
    files, summary = compute_outputs(cfg)
    checksums = {name: hashlib.sha256(data).hexdigest() for name, data in sorted(files.items())}
    manifest = RunManifest(cfg.echo(), __version__, time.perf_counter() - start, checksums,
                           _jsonable(summary))
    out_dir = Path(out_dir)
    out_dir.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=".staging-", dir=out_dir.parent))
    try:
        for name, data in files.items():
            (staging / name).write_bytes(data)
        (staging / "manifest.json").write_text(manifest.to_json() + "\n", encoding="utf-8")
        out_dir.mkdir(exist_ok=True)
        for entry in sorted(staging.iterdir()):
            os.replace(entry, out_dir / entry.name)
    finally:
        shutil.rmtree(staging, ignore_errors=True)
    return manifest


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj
