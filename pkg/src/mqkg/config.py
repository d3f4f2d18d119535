"""Run configuration: one JSON document, validated before any computation."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ConfigError, MQKGError
from .lattice import FourMomentum, LatticeConfig, MomentumLattice
from . import states as st

SCHEMA_VERSION = 1


def _num(node: dict, key: str, where: str, default=None, positive=False, integer=False):
    if key not in node:
        if default is None:
            raise ConfigError(f"{where}.{key} is required")
        return default
    val = node[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number, got {val!r}")
    if not math.isfinite(val):
        raise ConfigError(f"{where}.{key} must be finite")
    if positive and val <= 0:
        raise ConfigError(f"{where}.{key} must be positive, got {val}")
    if integer:
        if int(val) != val:
            raise ConfigError(f"{where}.{key} must be an integer, got {val}")
        return int(val)
    return float(val)


def parse_complex(val, where: str) -> complex:
    if isinstance(val, bool):
        raise ConfigError(f"{where} must be a number or [re, im]")
    if isinstance(val, (int, float)):
        return complex(val)
    if isinstance(val, list) and len(val) == 2 and all(isinstance(x, (int, float)) for x in val):
        return complex(val[0], val[1])
    raise ConfigError(f"{where} must be a number or [re, im], got {val!r}")


@dataclass(frozen=True)
class PhysicsConfig:
    hbar: float = 1.0
    mass: float = 1.0
    delta: float = 0.5
    lambda_cutoff: float = 3.0
    window_shape: str = "top-hat"


@dataclass(frozen=True)
class LatticeSection:
    dimension: int = 1
    spacing: Any = 0.1
    sites: int = 64
    site_spacing: float = 0.2


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    format: str = "json"


@dataclass(frozen=True)
class RunConfig:
    physics: PhysicsConfig
    lattice: LatticeSection
    state: dict
    tasks: dict
    output: OutputConfig
    base_dir: Path = field(default=Path("."))
    seed: int = 0

    def lattice_config(self) -> LatticeConfig:
        p = self.physics
        return LatticeConfig(p.mass, p.delta, p.lambda_cutoff, self.lattice.spacing,
                             self.lattice.dimension, p.window_shape, p.hbar)

    def task(self, name: str) -> dict:
        node = self.tasks.get(name, {})
        if not isinstance(node, dict):
            raise ConfigError(f"tasks.{name} must be an object")
        return node


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}")
    return parse_config(doc, base_dir=path.parent)


def parse_config(doc: dict, base_dir: Path = Path(".")) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    version = doc.get("schemaVersion", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schemaVersion {version!r}")

    ph = doc.get("physics", {})
    if not isinstance(ph, dict):
        raise ConfigError("physics must be an object")
    shape = ph.get("windowShape", "top-hat")
    if shape not in ("top-hat", "bump"):
        raise ConfigError(f"physics.windowShape must be 'top-hat' or 'bump', got {shape!r}")
    physics = PhysicsConfig(
        hbar=_num(ph, "hbar", "physics", 1.0, positive=True),
        mass=_num(ph, "mass", "physics", 1.0, positive=True),
        delta=_num(ph, "delta", "physics", 0.5, positive=True),
        lambda_cutoff=_num(ph, "lambdaCutoff", "physics", 3.0, positive=True),
        window_shape=shape,
    )

    la = doc.get("lattice", {})
    if not isinstance(la, dict):
        raise ConfigError("lattice must be an object")
    dim = _num(la, "dimension", "lattice", 1, integer=True)
    if dim not in (1, 2, 3):
        raise ConfigError(f"lattice.dimension must be 1, 2 or 3, got {dim}")
    spacing = la.get("spacing", 0.1)
    if isinstance(spacing, list):
        if len(spacing) != dim + 1 or not all(isinstance(h, (int, float)) and h > 0 for h in spacing):
            raise ConfigError(f"lattice.spacing must list {dim + 1} positive numbers")
        spacing = tuple(float(h) for h in spacing)
    else:
        spacing = _num(la, "spacing", "lattice", 0.1, positive=True)
    extent = la.get("extent", {})
    if not isinstance(extent, dict):
        raise ConfigError("lattice.extent must be an object")
    sites = _num(extent, "sites", "lattice.extent", 64, positive=True, integer=True)
    if sites < 8:
        raise ConfigError(f"lattice.extent.sites must be at least 8, got {sites}")
    lattice = LatticeSection(dim, spacing, sites,
                             _num(extent, "spacing", "lattice.extent", 0.2, positive=True))

    state = doc.get("state", {"type": "vacuum"})
    if not isinstance(state, dict) or "type" not in state:
        raise ConfigError("state must be an object with a 'type'")
    if state["type"] not in STATE_TYPES:
        raise ConfigError(f"state.type must be one of {sorted(STATE_TYPES)}, got {state['type']!r}")

    tasks = doc.get("tasks", {})
    if not isinstance(tasks, dict):
        raise ConfigError("tasks must be an object")
    seed = _num(tasks, "seed", "tasks", 0, integer=True)

    out = doc.get("output", {})
    if not isinstance(out, dict):
        raise ConfigError("output must be an object")
    fmt = out.get("format", "json")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"output.format must be 'csv' or 'json', got {fmt!r}")
    output = OutputConfig(str(out.get("directory", "out")), fmt)

    cfg = RunConfig(physics, lattice, state, tasks, output, Path(base_dir), seed)
    try:
        cfg.lattice_config()
    except MQKGError as exc:
        raise ConfigError(str(exc))
    return cfg


# --- state construction -----------------------------------------------------------

STATE_TYPES = {"vacuum", "one_particle", "vacuum_one", "two_particle", "coherent",
               "coherent_mixture", "coherent_superposition", "thermal"}


def build_test_function(node, lattice: MomentumLattice, where: str, base_dir: Path) -> st.FieldModes:
    from .io import read_field_modes
    if not isinstance(node, dict):
        raise ConfigError(f"{where} must be an object")
    if "file" in node:
        return read_field_modes(base_dir / node["file"], lattice)
    profile = node.get("profile", "gaussian")
    if profile == "gaussian":
        center = node.get("center")
        if not (isinstance(center, list) and 1 <= len(center) <= 4
                and all(isinstance(c, (int, float)) for c in center)):
            raise ConfigError(f"{where}.center must list up to four numbers")
        width = _num(node, "width", where, positive=True)
        amp = parse_complex(node.get("amplitude", 1.0), f"{where}.amplitude")
        return st.FieldModes.from_function(lattice, st.gaussian_profile(center, width, amp))
    if profile == "point":
        idx = _num(node, "index", where, integer=True)
        if not 0 <= idx < len(lattice):
            raise ConfigError(f"{where}.index {idx} outside lattice of {len(lattice)} points")
        return st.FieldModes.point(lattice, idx, parse_complex(node.get("value", 1.0), f"{where}.value"))
    raise ConfigError(f"{where}.profile must be 'gaussian' or 'point', got {profile!r}")


def build_state(cfg: RunConfig, lattice: MomentumLattice) -> st.StateSpec:
    node = cfg.state
    kind = node["type"]
    tf = lambda key: build_test_function(node.get(key), lattice, f"state.{key}", cfg.base_dir)
    cx = lambda key, default=None: parse_complex(node.get(key, default), f"state.{key}") \
        if key in node or default is not None else _missing(key)
    if kind == "vacuum":
        return st.Vacuum()
    if kind == "one_particle":
        return st.OneParticle(tf("g"))
    if kind == "vacuum_one":
        return st.VacuumOne(cx("u"), cx("v"), tf("g"))
    if kind == "two_particle":
        return st.TwoParticle(tf("g1"), tf("g2"))
    if kind == "coherent":
        return st.Coherent(tf("g"))
    if kind == "coherent_mixture":
        comps = node.get("components")
        if not isinstance(comps, list) or not comps:
            raise ConfigError("state.components must be a non-empty list")
        built = []
        for i, c in enumerate(comps):
            if not isinstance(c, dict):
                raise ConfigError(f"state.components[{i}] must be an object")
            built.append((_num(c, "weight", f"state.components[{i}]"),
                          build_test_function(c.get("g"), lattice, f"state.components[{i}].g", cfg.base_dir)))
        return st.CoherentMixture(tuple(built))
    if kind == "coherent_superposition":
        return st.CoherentSuperposition(cx("c1"), tf("g1"), cx("c2"), tf("g2"))
    if kind == "thermal":
        frame = node.get("frame", [1.0, 0.0, 0.0, 0.0])
        if not (isinstance(frame, list) and len(frame) == 4):
            raise ConfigError("state.frame must list four numbers")
        return st.Thermal(_num(node, "kT", "state", positive=True), FourMomentum(*map(float, frame)))
    raise ConfigError(f"unknown state type {kind!r}")


def _missing(key):
    raise ConfigError(f"state.{key} is required")
