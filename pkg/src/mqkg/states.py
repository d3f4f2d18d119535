"""Closed-form trajectory Wigner quasidensities chi_psi[w] for mQKG states.

Every evaluator returns a :class:`ChiValue`: a real multinomial prefactor
times exp(-exponent), where the exponent is the vacuum Gaussian shared by all
Fock-space states (and its thermal deformation). The vacuum is normalised to
one at w = 0 and the prefactors are the printed multinomials in the pairings
<<g, w>>; no other normalisation constant is carried.

Conventions fixed here, consistent with a brute-force Fourier transform of
<psi|exp(i phi_f)|psi> on small lattices:

* ``(f, g) = hbar * sum weight * 2 pi F(k.k) * conj(f) * g``
* ``<<g, w>> = sum weight * conj(g) * w``
* per-mode Fourier pairing of a test function with a trajectory is
  ``Re <<f, w>>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from scipy.linalg import expm

from .errors import (BadFrame, BadTemperature, BadWeights, DegenerateState,
                     ImaginaryResidue, LatticeMismatch, OffShellSupport,
                     TruncationTooSmall)
from .gaussian import invert_gaussian_characteristic, ladder_operators
from .lattice import (FourMomentum, LatticeConfig, MomentumLattice,
                      build_shell_lattice, in_shell_region, iter_forward_grid,
                      minkowski_dot, minkowski_square, window_value)

IMAG_TOL = 1e-10
DEGENERATE_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class FieldModes:
    """Complex Fourier coefficients, one per lattice point."""

    lattice: MomentumLattice
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex, copy=True).reshape(-1)
        if len(v) != len(self.lattice):
            raise LatticeMismatch(f"{len(v)} coefficients for a lattice of {len(self.lattice)} points")
        if not np.all(np.isfinite(v)):
            raise ValueError("field mode values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, lattice: MomentumLattice) -> "FieldModes":
        return cls(lattice, np.zeros(len(lattice), dtype=complex))

    @classmethod
    def from_function(cls, lattice: MomentumLattice, fn: Callable[[np.ndarray], np.ndarray]) -> "FieldModes":
        return cls(lattice, fn(lattice.points))

    @classmethod
    def point(cls, lattice: MomentumLattice, index: int, value: complex = 1.0) -> "FieldModes":
        v = np.zeros(len(lattice), dtype=complex)
        v[index] = value
        return cls(lattice, v)

    def _check(self, other: "FieldModes"):
        if other.lattice is not self.lattice and other.lattice != self.lattice:
            raise LatticeMismatch("field modes live on different lattices")

    def __add__(self, other: "FieldModes") -> "FieldModes":
        self._check(other)
        return FieldModes(self.lattice, self.values + other.values)

    def __sub__(self, other: "FieldModes") -> "FieldModes":
        self._check(other)
        return FieldModes(self.lattice, self.values - other.values)

    def __mul__(self, scalar: complex) -> "FieldModes":
        return FieldModes(self.lattice, self.values * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "FieldModes":
        return FieldModes(self.lattice, -self.values)


def gaussian_profile(center: Sequence[float], width: float, amplitude: complex = 1.0):
    """w(k) = amplitude * exp(-|k - center|^2 / (2 width^2)), Euclidean norm."""
    c = np.zeros(4)
    c[:len(center)] = center

    def profile(points: np.ndarray) -> np.ndarray:
        d2 = np.sum((np.asarray(points) - c) ** 2, axis=-1)
        return amplitude * np.exp(-d2 / (2.0 * width * width))

    return profile


# --- pairings ---------------------------------------------------------------------

def _same_lattice(f: FieldModes, g: FieldModes):
    f._check(g)


def commutator_weights(lattice: MomentumLattice) -> np.ndarray:
    """Per-mode commutator alpha(k) = hbar * weight * 2 pi F(k.k), the diagonal
    of :func:`inner_product`."""
    return lattice.hbar * lattice.weights * 2 * math.pi * lattice.window_values


def inner_product(f: FieldModes, g: FieldModes) -> complex:
    _same_lattice(f, g)
    return complex(np.sum(commutator_weights(f.lattice) * np.conj(f.values) * g.values))


def neutral_pairing(g: FieldModes, w: FieldModes) -> complex:
    _same_lattice(g, w)
    return complex(np.sum(g.lattice.weights * np.conj(g.values) * w.values))


# --- state descriptions -----------------------------------------------------------

@dataclass(frozen=True)
class Vacuum:
    pass


@dataclass(frozen=True)
class OneParticle:
    g: FieldModes


@dataclass(frozen=True)
class VacuumOne:
    """(v + u a_g^dagger)|0>."""
    u: complex
    v: complex
    g: FieldModes


@dataclass(frozen=True)
class TwoParticle:
    g1: FieldModes
    g2: FieldModes


@dataclass(frozen=True)
class Coherent:
    g: FieldModes


@dataclass(frozen=True)
class CoherentMixture:
    components: tuple[tuple[float, FieldModes], ...]

    def __post_init__(self):
        comps = tuple((float(wt), g) for wt, g in self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise BadWeights("coherent mixture needs at least one component")
        weights = np.array([wt for wt, _ in comps])
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
            raise BadWeights(f"mixture weights must be >= 0 and sum to 1, got {weights.tolist()}")


@dataclass(frozen=True)
class CoherentSuperposition:
    """(c1 exp(a_g1^dagger) + c2 exp(a_g2^dagger))|0>."""
    c1: complex
    g1: FieldModes
    c2: complex
    g2: FieldModes


@dataclass(frozen=True)
class Thermal:
    kT: float
    frame: FourMomentum = field(default_factory=lambda: FourMomentum(1.0))

    def __post_init__(self):
        if not (self.kT > 0 and math.isfinite(self.kT)):
            raise BadTemperature(f"kT must be positive, got {self.kT}")
        _check_frame(self.frame)


StateSpec = Union[Vacuum, OneParticle, VacuumOne, TwoParticle, Coherent,
                  CoherentMixture, CoherentSuperposition, Thermal]


def _check_frame(frame: FourMomentum):
    if not (abs(minkowski_square(frame) - 1.0) <= 1e-12 and frame.k0 > 0):
        raise BadFrame(f"thermal frame must be unit forward timelike, got {frame.as_tuple()}")


def smearing_functions(state: StateSpec) -> list[FieldModes]:
    if isinstance(state, (OneParticle, VacuumOne, Coherent)):
        return [state.g]
    if isinstance(state, (TwoParticle, CoherentSuperposition)):
        return [state.g1, state.g2]
    if isinstance(state, CoherentMixture):
        return [g for _, g in state.components]
    return []


# --- factored value ---------------------------------------------------------------

@dataclass(frozen=True)
class ChiValue:
    """value = prefactor * exp(-exponent)."""

    prefactor: float
    exponent: float

    def __post_init__(self):
        if not self.exponent >= 0:
            raise ValueError(f"Gaussian exponent must be >= 0, got {self.exponent}")

    @property
    def value(self) -> float:
        return self.prefactor * math.exp(-self.exponent)

    @property
    def sign(self) -> int:
        return int(np.sign(self.prefactor))

    @property
    def log_abs(self) -> float | None:
        """log|value|, or None when the prefactor is exactly zero."""
        if self.prefactor == 0:
            return None
        return math.log(abs(self.prefactor)) - self.exponent


def _real(z, scale=None, what: str = "prefactor"):
    z = np.asarray(z)
    if not np.iscomplexobj(z):
        return z.astype(float)
    ref = np.abs(z) if scale is None else np.asarray(scale)
    bad = np.abs(z.imag) > IMAG_TOL * np.maximum(ref, np.finfo(float).tiny)
    if np.any(bad):
        raise ImaginaryResidue(f"{what} has relative imaginary part above {IMAG_TOL:g}")
    return z.real


# --- exponent kernels -------------------------------------------------------------

def vacuum_mode_kernel(k, window, hbar: float = 1.0):
    """Coefficient of weight * |w(k)|^2 in the vacuum exponent: 1 / (2 hbar 2 pi F(k.k))."""
    return 1.0 / (2.0 * hbar * 2.0 * math.pi * window_value(window, minkowski_square(k)))


def thermal_mode_kernel(k, frame, kT: float, window, hbar: float = 1.0):
    """Vacuum kernel damped by tanh(hbar (k.T) / (2 kT))."""
    return np.tanh(hbar * minkowski_dot(k, frame) / (2.0 * kT)) * vacuum_mode_kernel(k, window, hbar)


def _vacuum_exponent(w: FieldModes) -> float:
    lat = w.lattice
    F = lat.window_values
    mass = lat.weights * np.abs(w.values) ** 2
    if np.any((F <= 0) & (mass > 0)):
        raise OffShellSupport(
            "trajectory has support where F(k.k) = 0; the Gaussian exponent would divide by "
            "zero, as in the unmodified field's delta-function denominator")
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(mass > 0, mass / (2.0 * lat.hbar * 2.0 * math.pi * F), 0.0)
    return float(np.sum(terms))


# --- prefactor multinomials on arrays of pairings ---------------------------------
# p, p1, p2 are <<g, w>> values (scalars or arrays); s.. are Gram entries (g_i, g_j).

def _one_particle_pref(s, p):
    return -s + np.abs(p) ** 2


def _vacuum_one_pref(u, v, s, p):
    return -abs(u) ** 2 * s + np.abs(v + u * p) ** 2


def _two_particle_pref(s11, s22, s12, s21, p1, p2):
    a1, a2 = np.abs(p1) ** 2, np.abs(p2) ** 2
    z = (s12 * s21 + s11 * s22 - a1 * s22 - p1 * np.conj(p2) * s21
         - p2 * np.conj(p1) * s12 - a2 * s11 + a1 * a2)
    scale = (abs(s12 * s21) + abs(s11 * s22) + a1 * abs(s22) + 2 * np.abs(p1 * p2 * s12)
             + a2 * abs(s11) + a1 * a2)
    return _real(z, scale)


def _coherent_pref(p):
    return np.exp(2.0 * np.real(p))


def _mixture_pref(weights, ps):
    return sum(wt * np.exp(2.0 * np.real(p)) for wt, p in zip(weights, ps))


def _superposition_pref(c1, c2, s11, s22, s12, s21, p1, p2):
    # the four printed terms c_i^* c_j exp(<<g_i,w>> + <<w,g_j>> - (g_i,g_j))
    cs, ps = (c1, c2), (p1, p2)
    gram = ((s11, s12), (s21, s22))
    z = 0
    scale = 0
    for i in range(2):
        for j in range(2):
            t = np.conj(cs[i]) * cs[j] * np.exp(ps[i] + np.conj(ps[j]) - gram[i][j])
            z = z + t
            scale = scale + np.abs(t)
    return _real(z, scale)


# --- evaluators -------------------------------------------------------------------

def _norm_checked(g: FieldModes) -> float:
    s = inner_product(g, g).real
    if s <= DEGENERATE_TOL:
        raise DegenerateState(f"(g, g) = {s:.3e} is not positive")
    return s


def chi_vacuum(w: FieldModes) -> ChiValue:
    return ChiValue(1.0, _vacuum_exponent(w))


def chi_one_particle(g: FieldModes, w: FieldModes) -> ChiValue:
    s = _norm_checked(g)
    return ChiValue(float(_one_particle_pref(s, neutral_pairing(g, w))), _vacuum_exponent(w))


def chi_vacuum_one_superposition(u: complex, v: complex, g: FieldModes, w: FieldModes) -> ChiValue:
    if abs(u) + abs(v) == 0:
        raise DegenerateState("u and v are both zero")
    s = _norm_checked(g)
    return ChiValue(float(_vacuum_one_pref(u, v, s, neutral_pairing(g, w))), _vacuum_exponent(w))


def _gram(g1: FieldModes, g2: FieldModes):
    return (inner_product(g1, g1).real, inner_product(g2, g2).real,
            inner_product(g1, g2), inner_product(g2, g1))


def chi_two_particle(g1: FieldModes, g2: FieldModes, w: FieldModes) -> ChiValue:
    _norm_checked(g1)
    _norm_checked(g2)
    s11, s22, s12, s21 = _gram(g1, g2)
    pref = _two_particle_pref(s11, s22, s12, s21, neutral_pairing(g1, w), neutral_pairing(g2, w))
    return ChiValue(float(pref), _vacuum_exponent(w))


def chi_coherent(g: FieldModes, w: FieldModes) -> ChiValue:
    return ChiValue(float(_coherent_pref(neutral_pairing(g, w))), _vacuum_exponent(w))


def chi_coherent_mixture(components, w: FieldModes) -> ChiValue:
    mix = components if isinstance(components, CoherentMixture) else CoherentMixture(tuple(components))
    weights = [wt for wt, _ in mix.components]
    ps = [neutral_pairing(g, w) for _, g in mix.components]
    return ChiValue(float(_mixture_pref(weights, ps)), _vacuum_exponent(w))


def chi_coherent_superposition(c1: complex, g1: FieldModes, c2: complex, g2: FieldModes,
                               w: FieldModes) -> ChiValue:
    if abs(c1) + abs(c2) == 0:
        raise DegenerateState("c1 and c2 are both zero")
    s11, s22, s12, s21 = _gram(g1, g2)
    pref = _superposition_pref(c1, c2, s11, s22, s12, s21,
                               neutral_pairing(g1, w), neutral_pairing(g2, w))
    return ChiValue(float(pref), _vacuum_exponent(w))


def chi_thermal(kT: float, frame: FourMomentum, w: FieldModes) -> ChiValue:
    if not (kT > 0 and math.isfinite(kT)):
        raise BadTemperature(f"kT must be positive, got {kT}")
    _check_frame(frame)
    lat = w.lattice
    _vacuum_exponent(w)  # support check
    kern = np.atleast_1d(thermal_mode_kernel(lat.points, frame.as_array(), kT, lat.window, lat.hbar))
    return ChiValue(1.0, float(np.sum(lat.weights * kern * np.abs(w.values) ** 2)))


def chi(state: StateSpec, w: FieldModes) -> ChiValue:
    if isinstance(state, Vacuum):
        return chi_vacuum(w)
    if isinstance(state, OneParticle):
        return chi_one_particle(state.g, w)
    if isinstance(state, VacuumOne):
        return chi_vacuum_one_superposition(state.u, state.v, state.g, w)
    if isinstance(state, TwoParticle):
        return chi_two_particle(state.g1, state.g2, w)
    if isinstance(state, Coherent):
        return chi_coherent(state.g, w)
    if isinstance(state, CoherentMixture):
        return chi_coherent_mixture(state, w)
    if isinstance(state, CoherentSuperposition):
        return chi_coherent_superposition(state.c1, state.g1, state.c2, state.g2, w)
    if isinstance(state, Thermal):
        return chi_thermal(state.kT, state.frame, w)
    raise TypeError(f"unknown state {state!r}")


# --- thermal single-mode characteristic function ----------------------------------

def thermal_characteristic_single_mode(z: complex, lam: float, alpha: float) -> float:
    """Q_T(z) = exp(-alpha |z|^2 / (2 tanh(lam alpha / 2)))."""
    if not (lam * alpha > 0):
        raise BadTemperature(f"lambda * alpha must be positive, got {lam * alpha}")
    return math.exp(-alpha * abs(z) ** 2 / (2.0 * math.tanh(lam * alpha / 2.0)))


def thermal_characteristic_candidate(z: complex, lam: float, alpha: float) -> float:
    """The alternative reading exp(-alpha |z|^2 / (2 tanh(lam alpha))); kept for adjudication."""
    return math.exp(-alpha * abs(z) ** 2 / (2.0 * math.tanh(lam * alpha)))


def thermal_trace_oracle(z: complex, lam: float, alpha: float, n: int = 200) -> float:
    """Tr[exp(-lam a^dag a) exp(i(a^dag z* + a z))] / Tr[exp(-lam a^dag a)] on an
    n-level truncation with [a, a^dag] = alpha."""
    if n < 50:
        raise TruncationTooSmall(f"truncation {n} below the minimum of 50")
    if math.exp(-lam * alpha * n) >= 1e-12:
        raise TruncationTooSmall(
            f"exp(-lambda alpha N) = {math.exp(-lam * alpha * n):.2e} is not below 1e-12")
    a, ad = ladder_operators(n, alpha)
    boltz = np.exp(-lam * alpha * np.arange(n))  # a^dag a = alpha * number
    disp = expm(1j * (ad * np.conj(z) + a * z))
    val = np.sum(boltz * np.diag(disp)) / np.sum(boltz)
    if abs(val.imag) > 1e-10 * max(abs(val), 1e-300):
        raise ImaginaryResidue(f"thermal trace has imaginary part {val.imag:.2e}")
    return float(val.real)


def thermal_kernel_from_trace(lattice: MomentumLattice, index: int, kT: float,
                              frame: FourMomentum, n: int = 200, z: complex = 1.0) -> float:
    """Per-mode chi_thermal coefficient rebuilt from the truncated-trace oracle.

    Uses alpha(k) = hbar * weight * 2 pi F(k.k) and lambda * alpha = hbar (k.T) / kT.
    The single-mode characteristic exp(-A|z|^2) transforms under the pairing
    weight * Re(conj(f) w) to exp(-weight^2 |w|^2 / (4A)); dividing by weight
    gives the coefficient multiplying weight * |w|^2.
    """
    alpha = float(commutator_weights(lattice)[index])
    k = lattice.points[index]
    lam = lattice.hbar * minkowski_dot(k, frame.as_array()) / kT / alpha
    q = thermal_trace_oracle(z, lam, alpha, n)
    A = -math.log(q) / abs(z) ** 2
    # real 2-D form A (a^2 + b^2) for f = a + i b; pairing vector y = weight * (Re w, Im w)
    inv = invert_gaussian_characteristic(np.eye(2) * A)
    wt = lattice.weights[index]
    return inv.exponent(np.array([wt, 0.0])) / wt


# --- negativity scan --------------------------------------------------------------

NEG_FOUND = "negativity-found"
NONE_FOUND = "none-found"


@dataclass(frozen=True)
class NegativityReport:
    min_prefactor: float
    witness: tuple[complex, complex]
    verdict: str
    analytic_witness: bool
    grid_points: int
    slice_units: str


def _slice_basis(state: StateSpec, lattice: MomentumLattice, probes=None):
    gs = smearing_functions(state)
    if probes is not None:
        basis = list(probes)
        units = "probe"
    elif isinstance(state, (Coherent, CoherentMixture, CoherentSuperposition)):
        # unit pairing per test function: phases of the cross terms sweep the grid directly
        basis = [g * (1.0 / neutral_pairing(g, g).real) for g in gs[:2]]
        units = "unit-pairing"
    elif gs:
        basis = [g * (math.sqrt(inner_product(g, g).real) / neutral_pairing(g, g).real) for g in gs[:2]]
        units = "sqrt-norm"
    else:
        v = np.ones(len(lattice), dtype=complex)
        alt = np.where(np.arange(len(lattice)) % 2 == 0, 1.0, -1.0).astype(complex)
        basis = [FieldModes(lattice, v), FieldModes(lattice, alt)]
        units = "probe"
    if len(basis) == 1:
        basis.append(basis[0] * 1j)
    return basis[:2], units


def _prefactor_on_pairings(state: StateSpec, P: dict) -> np.ndarray:
    """Vectorised prefactor given pairings P[i] = <<g_i, w>> over a grid."""
    if isinstance(state, (Vacuum, Thermal)):
        return np.ones_like(np.real(next(iter(P.values()))) if P else np.ones(1))
    gs = smearing_functions(state)
    if isinstance(state, OneParticle):
        return _one_particle_pref(inner_product(gs[0], gs[0]).real, P[0])
    if isinstance(state, VacuumOne):
        return _vacuum_one_pref(state.u, state.v, inner_product(gs[0], gs[0]).real, P[0])
    if isinstance(state, Coherent):
        return _coherent_pref(P[0])
    if isinstance(state, CoherentMixture):
        return _mixture_pref([wt for wt, _ in state.components], [P[i] for i in range(len(gs))])
    s11, s22, s12, s21 = _gram(gs[0], gs[1])
    if isinstance(state, TwoParticle):
        return _two_particle_pref(s11, s22, s12, s21, P[0], P[1])
    return _superposition_pref(state.c1, state.c2, s11, s22, s12, s21, P[0], P[1])


def scan_negativity(state: StateSpec, lattice: MomentumLattice, points: int = 41,
                    span: float = 4.0, phases: Sequence[float] = (0.0, math.pi / 2),
                    probes: Sequence[FieldModes] | None = None) -> NegativityReport:
    """Grid scan of the prefactor over w = a u1 + b u2 in the slice spanned by the
    state's test functions.

    a and b run over ``points`` real values in [-span, span], each multiplied by
    every phase in ``phases``; the origin w = 0 is the analytic witness and is
    always tried first.
    """
    basis, units = _slice_basis(state, lattice, probes)
    gs = smearing_functions(state)
    zero = FieldModes.zeros(lattice)
    p0 = chi(state, zero).prefactor
    best, witness, analytic = p0, (0j, 0j), p0 < 0
    if not analytic:
        t = np.linspace(-span, span, points)
        A, B = np.meshgrid(t, t, indexing="ij")
        G = np.array([[neutral_pairing(g, u) for u in basis] for g in gs]) if gs else None
        for pa in phases:
            for pb in phases:
                a = A * np.exp(1j * pa)
                b = B * np.exp(1j * pb)
                P = {i: G[i, 0] * a + G[i, 1] * b for i in range(len(gs))} if gs else {0: a}
                pref = np.broadcast_to(_prefactor_on_pairings(state, P), A.shape)
                idx = np.unravel_index(np.argmin(pref), pref.shape)
                if pref[idx] < best:
                    best, witness = float(pref[idx]), (complex(a[idx]), complex(b[idx]))
    verdict = NEG_FOUND if best < 0 else NONE_FOUND
    n_grid = 1 if analytic else points * points * len(phases) ** 2
    return NegativityReport(float(best), witness, verdict, analytic, n_grid, units)


def witness_field(state: StateSpec, lattice: MomentumLattice, report: NegativityReport,
                  probes=None) -> FieldModes:
    basis, _ = _slice_basis(state, lattice, probes)
    a, b = report.witness
    return basis[0] * a + basis[1] * b


# --- singular QKG limit -----------------------------------------------------------

@dataclass(frozen=True)
class SingularProbeReport:
    deltas: tuple[float, ...]
    on_window_exponent: tuple[float, ...]
    off_window_mass: tuple[float, ...]
    lattice_points: tuple[int, ...]
    fitted_power: float
    divergence_flag: bool


def qkg_singular_probe(template: Callable[[np.ndarray, object], np.ndarray],
                       deltas: Sequence[float], base: LatticeConfig,
                       mass_tol: float = 1e-12) -> SingularProbeReport:
    """Follow the vacuum exponent as the window width shrinks.

    ``template(points, window)`` gives w(k) on any (n, 4) array of momenta.
    For each width the lattice is rebuilt, the template is projected onto it,
    and the l2 mass the template keeps outside the window (inside the forward
    cone and cutoff ball) is reported as the part that has no finite limit.
    """
    deltas = tuple(float(d) for d in deltas)
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("window widths must be strictly decreasing")
    exps, off, npts = [], [], []
    for d in deltas:
        cfg = LatticeConfig(base.mass, d, base.cutoff, base.spacing, base.dimension,
                            base.shape, base.hbar)
        lat = build_shell_lattice(cfg)
        w = FieldModes(lat, template(lat.points, lat.window))
        exps.append(chi_vacuum(w).exponent)
        npts.append(len(lat))
        cell = lat.weights[0]
        mass = 0.0
        for block in iter_forward_grid(cfg):
            outside = ~in_shell_region(block, lat.window, cfg.cutoff)
            if np.any(outside):
                vals = np.asarray(template(block[outside], lat.window))
                mass += float(np.sum(np.abs(vals) ** 2)) * cell
        off.append(mass)
    e = np.array(exps)
    if np.all(e > 0):
        power = float(np.polyfit(np.log(deltas), np.log(e), 1)[0])
    else:
        power = float("nan")
    flag = bool(min(off) > mass_tol)
    return SingularProbeReport(deltas, tuple(exps), tuple(off), tuple(npts), power, flag)


def window_indicator_template(points, window):
    """1 on the open window m^2 < k.k < m^2 + delta (forward cone), else 0."""
    s = np.atleast_1d(minkowski_square(points))
    pts = np.atleast_2d(points)
    return ((s > window.lower) & (s < window.upper) & (pts[:, 0] > 0)).astype(complex)
