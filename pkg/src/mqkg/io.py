"""CSV and JSON emission and the field-mode file format."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, OffShellSupport
from .lattice import MomentumLattice
from .states import FieldModes

FIELD_HEADER = ["k0", "k1", "k2", "k3", "re", "im"]
MATCH_TOL = 1e-9


def fmt(x) -> str:
    """17 significant digits, enough to round-trip a double."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17g" % float(x)
    return str(x)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) for x in row])
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def write_json(path: Path, doc: dict) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n")
    return path


def read_field_modes(path: str | Path, lattice: MomentumLattice) -> FieldModes:
    """Read ``k0,k1,k2,k3,re,im`` rows onto the lattice; absent points are zero."""
    path = Path(path)
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise ConfigError(f"cannot open field file {path}: {exc.strerror}")
    values = np.zeros(len(lattice), dtype=complex)
    seen = set()
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != FIELD_HEADER:
            raise ConfigError(f"{path}:1: header must be {','.join(FIELD_HEADER)}")
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 6:
                raise ConfigError(f"{path}:{line}: expected 6 columns, got {len(row)}")
            try:
                nums = [float(c) for c in row]
            except ValueError:
                raise ConfigError(f"{path}:{line}: non-numeric entry in {row!r}")
            if not all(math.isfinite(x) for x in nums):
                raise ConfigError(f"{path}:{line}: non-finite entry")
            idx = lattice.index_of(nums[:4], MATCH_TOL)
            if idx is None:
                raise OffShellSupport(
                    f"{path}:{line}: momentum {nums[:4]} is not a lattice point inside the shell window")
            if idx in seen:
                raise ConfigError(f"{path}:{line}: duplicate momentum {nums[:4]}")
            seen.add(idx)
            values[idx] = complex(nums[4], nums[5])
    return FieldModes(lattice, values)


def write_field_modes(path: str | Path, modes: FieldModes, skip_zero: bool = False) -> Path:
    rows = []
    for k, v in zip(modes.lattice.points, modes.values):
        if skip_zero and v == 0:
            continue
        rows.append([*k, v.real, v.imag])
    return write_csv(Path(path), FIELD_HEADER, rows)
