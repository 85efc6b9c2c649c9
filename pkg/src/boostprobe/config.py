"""Scenario configuration files.

Grammar (one statement per line)::

    # comment            ; comment
    [section]
    key = value

Values are numbers, bare words, or comma-separated lists.  Numeric values
may use ``pi`` with ``+ - * /`` and parentheses, e.g. ``dphi = pi/2``.
Every key is checked against the schema of its section before anything is
computed; unknown sections or keys are errors that cite the line number.
"""
from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field

from .errors import ConfigError

KINDS = ("double_well", "lattice_sweep_n", "lattice_interacting", "ka_sweep", "bands",
         "gradiometer", "custom")

_num, _int, _str, _list = "number", "integer", "word", "number list"

SCHEMA = {
    "scenario": {"kind": _str, "name": _str, "output": _str, "seed": _int},
    "model": {"n_sites": _int, "n_atoms": _int, "J": _num, "U": _num, "a": _num,
              "boundary": _str, "initial": _str},
    "protocol": {"boost": _str, "dphi": _num, "k": _num, "gamma": _num, "T": _num,
                 "probe_U": _num, "total_time": _num, "dt_sample": _num, "tolerance": _num,
                 "smoothing_window": _str},
    "sweep": {"U_list": _list},
    "ka_sweep": {"ka_list": _list},
    "bands": {"V0": _num, "a": _num, "n_cells": _int, "boundary": _str,
              "points_per_period": _int, "n_levels": _int, "method": _str},
    "gradiometer": {"species": _str, "gradient": _num, "target_phase": _num,
                    "lattice_constant": _num, "tilt_angle": _num, "tilt_time": _num,
                    "J_hz": _num, "n_sites": _int, "ka": _num},
}

SECTIONS_FOR_KIND = {
    "double_well": {"scenario", "model", "protocol"},
    "custom": {"scenario", "model", "protocol"},
    "lattice_sweep_n": {"scenario", "model", "protocol", "sweep"},
    "lattice_interacting": {"scenario", "model", "protocol", "sweep"},
    "ka_sweep": {"scenario", "model", "protocol", "ka_sweep"},
    "bands": {"scenario", "bands"},
    "gradiometer": {"scenario", "gradiometer"},
}

CHOICES = {
    ("model", "boundary"): ("open", "periodic"),
    ("model", "initial"): ("ground", "superfluid", "mott"),
    ("protocol", "boost"): ("none", "imprint_step", "imprint_gradient", "tilt_pulse"),
    ("bands", "boundary"): ("periodic", "hard-wall"),
    ("bands", "method"): ("fd", "planewave", "both"),
    ("gradiometer", "species"): ("rb87", "cr52"),
    ("scenario", "kind"): KINDS,
}

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.USub: operator.neg, ast.UAdd: operator.pos}


def parse_number(text):
    """Evaluate a numeric literal or a small arithmetic expression in ``pi``."""
    try:
        return float(text)
    except ValueError:
        pass
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"not a number: {text!r}") from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError(f"not a number: {text!r}")

    return ev(tree)


@dataclass
class ScenarioConfig:
    kind: str
    sections: dict
    lines: dict = field(default_factory=dict, repr=False)
    source: str = "<string>"

    def get(self, section, key, default=None):
        return self.sections.get(section, {}).get(key, default)

    def echo(self):
        return {s: dict(v) for s, v in self.sections.items()}


def _convert(kind, raw, where):
    try:
        if kind == _num:
            return parse_number(raw)
        if kind == _int:
            v = parse_number(raw)
            if v != int(v):
                raise ValueError
            return int(v)
        if kind == _list:
            items = [p.strip() for p in raw.split(",") if p.strip()]
            if not items:
                raise ValueError
            return [parse_number(p) for p in items]
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{where}: expected {kind}, got {raw!r}") from None
    return raw.strip()


def parse_config(text, source="<string>"):
    sections = {}
    lines = {}
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].split(";", 1)[0].strip()
        if not stripped:
            continue
        where = f"{source}:{lineno}"
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ConfigError(f"{where}: malformed section header {stripped!r}")
            current = stripped[1:-1].strip()
            if current not in SCHEMA:
                raise ConfigError(f"{where}: unknown section [{current}]")
            if current in sections:
                raise ConfigError(f"{where}: duplicate section [{current}]")
            sections[current] = {}
            continue
        if "=" not in stripped:
            raise ConfigError(f"{where}: expected 'key = value', got {stripped!r}")
        if current is None:
            raise ConfigError(f"{where}: key outside of any section")
        key, raw = (p.strip() for p in stripped.split("=", 1))
        if key not in SCHEMA[current]:
            raise ConfigError(f"{where}: unknown key {key!r} in [{current}]")
        if key in sections[current]:
            raise ConfigError(f"{where}: duplicate key {key!r} in [{current}]")
        value = _convert(SCHEMA[current][key], raw, f"{where}: [{current}] {key}")
        allowed = CHOICES.get((current, key))
        if allowed and value not in allowed:
            raise ConfigError(f"{where}: {key} must be one of {', '.join(allowed)}; got {value!r}")
        sections[current][key] = value
        lines[(current, key)] = lineno

    kind = sections.get("scenario", {}).get("kind")
    if kind is None:
        raise ConfigError(f"{source}: missing [scenario] kind")
    extra = set(sections) - SECTIONS_FOR_KIND[kind]
    if extra:
        raise ConfigError(
            f"{source}: section(s) {', '.join(sorted(extra))} not used by kind {kind!r}"
        )
    cfg = ScenarioConfig(kind, sections, lines, source)
    validate(cfg)
    return cfg


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), source=str(path))


def _require(cfg, section, key):
    value = cfg.get(section, key)
    if value is None:
        raise ConfigError(f"{cfg.source}: kind {cfg.kind!r} requires [{section}] {key}")
    return value


def _fail(cfg, section, key, msg):
    line = cfg.lines.get((section, key))
    loc = f"{cfg.source}:{line}" if line else cfg.source
    raise ConfigError(f"{loc}: [{section}] {key}: {msg}")


def validate(cfg):
    """Cross-key checks that do not need any numerics."""
    kind = cfg.kind
    if kind in ("double_well", "custom", "lattice_sweep_n", "lattice_interacting", "ka_sweep"):
        m = _require(cfg, "model", "n_sites")
        if m < 2:
            _fail(cfg, "model", "n_sites", "need at least 2 sites")
        n = cfg.get("model", "n_atoms", 1 if kind == "ka_sweep" else m)
        if n < 1:
            _fail(cfg, "model", "n_atoms", "need at least one atom")
        if kind == "double_well" and m != 2:
            _fail(cfg, "model", "n_sites", "double_well needs exactly 2 sites")
        if cfg.get("model", "J", 1.0) < 0:
            _fail(cfg, "model", "J", "must be non-negative")
        if cfg.get("model", "a", 1.0) <= 0:
            _fail(cfg, "model", "a", "must be positive")
        if cfg.get("model", "initial") == "mott" and n % m:
            _fail(cfg, "model", "initial", "mott initial state needs N divisible by M")
        for key in ("total_time", "dt_sample"):
            if _require(cfg, "protocol", key) <= 0:
                _fail(cfg, "protocol", key, "must be positive")
        boost = cfg.get("protocol", "boost", "imprint_step")
        if boost == "tilt_pulse":
            T = cfg.get("protocol", "T")
            if T is None or T <= 0:
                _fail(cfg, "protocol", "T", "tilt_pulse needs T > 0")
            if not T < cfg.get("protocol", "total_time") / 10:
                _fail(cfg, "protocol", "T", "pulse must be shorter than total_time/10")
        win = cfg.get("protocol", "smoothing_window", "auto")
        if win != "auto" and (not win.isdigit() or int(win) % 2 == 0 or int(win) < 1):
            _fail(cfg, "protocol", "smoothing_window", "must be 'auto' or a positive odd integer")
    if kind in ("lattice_sweep_n", "lattice_interacting"):
        U_list = _require(cfg, "sweep", "U_list")
        if any(b < a for a, b in zip(U_list, U_list[1:])):
            _fail(cfg, "sweep", "U_list", "values must be ascending")
        if kind == "lattice_interacting" and not cfg.get("protocol", "probe_U", 0.0) > 0:
            _fail(cfg, "protocol", "probe_U", "lattice_interacting needs probe_U > 0")
    if kind == "ka_sweep":
        _require(cfg, "ka_sweep", "ka_list")
    if kind == "bands":
        if _require(cfg, "bands", "V0") < 0:
            _fail(cfg, "bands", "V0", "must be non-negative")
        if cfg.get("bands", "points_per_period", 64) < 16:
            _fail(cfg, "bands", "points_per_period", "need at least 16")
        if cfg.get("bands", "method", "fd") != "fd" and cfg.get("bands", "boundary", "periodic") != "periodic":
            _fail(cfg, "bands", "method", "plane-wave path needs a periodic boundary")
    if kind == "gradiometer":
        _require(cfg, "gradiometer", "species")
        angle = cfg.get("gradiometer", "tilt_angle")
        if angle is not None and not 0 <= angle <= math.pi / 2:
            _fail(cfg, "gradiometer", "tilt_angle", "must lie in [0, pi/2]")
