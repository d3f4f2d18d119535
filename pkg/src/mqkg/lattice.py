"""Momentum-space domain for the modified Klein-Gordon field.

Metric signature is (+, -, -, -). Every Minkowski square in the package goes
through :func:`minkowski_square`.

The lattice keeps only forward-cone modes (k0 > 0). A real field's
negative-energy modes follow from conjugate symmetry w(-k) = conj(w(k)) and
are never stored.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
from scipy.integrate import quad

from .errors import BadConfig, EmptyLattice

TOP_HAT = "top-hat"
BUMP = "bump"
WINDOW_SHAPES = (TOP_HAT, BUMP)

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])


@dataclass(frozen=True)
class FourMomentum:
    k0: float
    k1: float = 0.0
    k2: float = 0.0
    k3: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(c) for c in self.as_tuple()):
            raise ValueError(f"non-finite four-momentum {self.as_tuple()}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.k0, self.k1, self.k2, self.k3)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple(), dtype=float)

    @classmethod
    def from_array(cls, arr) -> "FourMomentum":
        a = [float(x) for x in np.asarray(arr, dtype=float).ravel()]
        a += [0.0] * (4 - len(a))
        return cls(*a[:4])


def _as_components(k) -> np.ndarray:
    if isinstance(k, FourMomentum):
        return k.as_array()
    return np.asarray(k, dtype=float)


def minkowski_square(k) -> np.ndarray | float:
    """k0^2 - k1^2 - k2^2 - k3^2 for a FourMomentum or an array (..., 4)."""
    a = _as_components(k)
    s = a[..., 0] ** 2 - np.sum(a[..., 1:] ** 2, axis=-1)
    return float(s) if np.ndim(s) == 0 else s


def minkowski_dot(k, q) -> np.ndarray | float:
    a, b = _as_components(k), _as_components(q)
    s = a[..., 0] * b[..., 0] - np.sum(a[..., 1:] * b[..., 1:], axis=-1)
    return float(s) if np.ndim(s) == 0 else s


def boost_matrix(rapidity: float, axis: int = 1) -> np.ndarray:
    """Pure boost along spatial ``axis`` (1, 2 or 3) acting on contravariant vectors."""
    if axis not in (1, 2, 3):
        raise ValueError("axis must be 1, 2 or 3")
    b = np.eye(4)
    ch, sh = math.cosh(rapidity), math.sinh(rapidity)
    b[0, 0] = b[axis, axis] = ch
    b[0, axis] = b[axis, 0] = sh
    return b


@functools.lru_cache(maxsize=None)
def _bump_integral() -> float:
    # integral of exp(-1/(1-t^2)) over (-1, 1)
    val, _ = quad(lambda t: math.exp(-1.0 / (1.0 - t * t)), -1.0, 1.0,
                  epsabs=0.0, epsrel=1e-13, limit=200)
    return val


@dataclass(frozen=True)
class ShellWindow:
    """Unit-measure window F(s) replacing the mass-shell delta in s = k.k."""

    mass: float
    width: float
    shape: str = TOP_HAT
    hbar: float = 1.0

    def __post_init__(self):
        if not (self.mass > 0 and math.isfinite(self.mass)):
            raise BadConfig(f"mass must be positive, got {self.mass}")
        if not (self.width > 0 and math.isfinite(self.width)):
            raise BadConfig(f"window width must be positive, got {self.width}")
        if not (self.hbar > 0 and math.isfinite(self.hbar)):
            raise BadConfig(f"hbar must be positive, got {self.hbar}")
        if self.shape not in WINDOW_SHAPES:
            raise BadConfig(f"unknown window shape {self.shape!r}; use one of {WINDOW_SHAPES}")

    @property
    def lower(self) -> float:
        return self.mass ** 2

    @property
    def upper(self) -> float:
        return self.mass ** 2 + self.width


def window_value(window: ShellWindow, s):
    """Evaluate F(s); zero outside [m^2, m^2 + delta]."""
    s_arr = np.asarray(s, dtype=float)
    lo, hi = window.lower, window.upper
    if window.shape == TOP_HAT:
        out = np.where((s_arr >= lo) & (s_arr <= hi), 1.0 / window.width, 0.0)
    else:
        t = 2.0 * (s_arr - lo) / window.width - 1.0
        inside = np.abs(t) < 1.0
        tt = np.where(inside, t, 0.0)
        bump = np.exp(-1.0 / (1.0 - tt * tt))
        norm = 2.0 / (window.width * _bump_integral())
        out = np.where(inside, norm * bump, 0.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class LatticeConfig:
    mass: float
    width: float
    cutoff: float
    spacing: float | Sequence[float]
    dimension: int = 1
    shape: str = TOP_HAT
    hbar: float = 1.0

    def __post_init__(self):
        if self.dimension not in (1, 2, 3):
            raise BadConfig(f"spatial dimension must be 1, 2 or 3, got {self.dimension}")
        if not (self.cutoff > 0 and math.isfinite(self.cutoff)):
            raise BadConfig(f"cutoff must be positive, got {self.cutoff}")
        steps = self.steps
        if any(not (h > 0 and math.isfinite(h)) for h in steps):
            raise BadConfig(f"grid spacing must be positive, got {self.spacing}")
        self.window  # validates mass, width, hbar, shape

    @property
    def steps(self) -> tuple[float, ...]:
        """Grid spacing for (k0, k1, ..., kd)."""
        if np.ndim(self.spacing) == 0:
            return (float(self.spacing),) * (self.dimension + 1)
        steps = tuple(float(h) for h in self.spacing)
        if len(steps) != self.dimension + 1:
            raise BadConfig(
                f"need {self.dimension + 1} spacings for dimension {self.dimension}, got {len(steps)}")
        return steps

    @property
    def window(self) -> ShellWindow:
        return ShellWindow(self.mass, self.width, self.shape, self.hbar)


@dataclass(frozen=True, eq=False)
class MomentumLattice:
    """Forward-cone grid momenta inside the shell window and the cutoff ball.

    ``points`` has shape (n, 4); unused spatial components are zero.
    ``weights`` is the cell volume divided by (2 pi)^(d+1).
    """

    points: np.ndarray
    weights: np.ndarray
    cutoff: float
    window: ShellWindow
    dimension: int = 1
    steps: tuple[float, ...] = field(default=())

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True).reshape(-1, 4)
        w = np.array(self.weights, dtype=float, copy=True).reshape(-1)
        if len(pts) != len(w):
            raise ValueError("points and weights differ in length")
        if np.any(w <= 0):
            raise ValueError("lattice weights must be strictly positive")
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MomentumLattice):
            return NotImplemented
        return (self.window == other.window and self.cutoff == other.cutoff
                and self.dimension == other.dimension
                and np.array_equal(self.points, other.points)
                and np.array_equal(self.weights, other.weights))

    def __hash__(self):
        return hash((self.window, self.cutoff, self.dimension, len(self)))

    @functools.cached_property
    def squares(self) -> np.ndarray:
        return minkowski_square(self.points)

    @functools.cached_property
    def window_values(self) -> np.ndarray:
        """F(k.k) at every lattice point."""
        return np.atleast_1d(window_value(self.window, self.squares))

    @property
    def hbar(self) -> float:
        return self.window.hbar

    def momentum(self, i: int) -> FourMomentum:
        return FourMomentum.from_array(self.points[i])

    def index_of(self, k, atol: float = 1e-9) -> int | None:
        d = np.max(np.abs(self.points - _as_components(k)), axis=1)
        i = int(np.argmin(d)) if len(d) else 0
        return i if len(d) and d[i] <= atol else None


def in_shell_region(points: np.ndarray, window: ShellWindow, cutoff: float) -> np.ndarray:
    """Mask of the three retention predicates (window, forward cone, cutoff ball)."""
    s = minkowski_square(points)
    return ((s > window.lower) & (s < window.upper) & (points[..., 0] > 0)
            & (np.sqrt(np.sum(points ** 2, axis=-1)) < cutoff))


def _axis_nodes(h: float, cutoff: float, positive: bool) -> np.ndarray:
    n = int(math.ceil(cutoff / h))
    idx = np.arange(1 if positive else -n, n + 1)
    nodes = idx * h
    return nodes[np.abs(nodes) < cutoff]


def iter_forward_grid(config: LatticeConfig) -> Iterator[np.ndarray]:
    """Yield (n, 4) blocks of forward-cone grid nodes inside the cutoff ball,
    one block per k0 value, in lexicographic order."""
    steps = config.steps
    k0_nodes = _axis_nodes(steps[0], config.cutoff, positive=True)
    spatial = [_axis_nodes(h, config.cutoff, positive=False) for h in steps[1:]]
    mesh = np.meshgrid(*spatial, indexing="ij")
    flat = np.stack([m.ravel() for m in mesh], axis=-1)
    block = np.zeros((len(flat), 4))
    block[:, 1:1 + config.dimension] = flat
    for k0 in k0_nodes:
        b = block.copy()
        b[:, 0] = k0
        keep = np.sqrt(np.sum(b ** 2, axis=1)) < config.cutoff
        yield b[keep]


def cell_weight(config: LatticeConfig) -> float:
    return float(np.prod(config.steps)) / (2 * math.pi) ** (config.dimension + 1)


def build_shell_lattice(config: LatticeConfig) -> MomentumLattice:
    window = config.window
    kept = []
    for block in iter_forward_grid(config):
        mask = in_shell_region(block, window, config.cutoff)
        if np.any(mask):
            kept.append(block[mask])
    if not kept:
        raise EmptyLattice(
            f"no grid momenta inside window [{window.lower}, {window.upper}] "
            f"with spacing {config.steps} and cutoff {config.cutoff}")
    points = np.concatenate(kept)
    weights = np.full(len(points), cell_weight(config))
    return MomentumLattice(points, weights, config.cutoff, window,
                           config.dimension, config.steps)
