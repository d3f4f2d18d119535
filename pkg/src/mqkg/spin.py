"""Spin-1 commutator inner product and the spin-1/2 vacuum kernel.

Gamma matrices are in the Dirac representation. Their anticommutator
{g^mu, g^nu} = 2 eta^{mu nu} is checked when the module is imported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ImaginaryResidue, LatticeMismatch, OffShell, OffShellSupport
from .lattice import METRIC, FourMomentum, MomentumLattice, minkowski_square

_I2 = np.eye(2, dtype=complex)
_Z2 = np.zeros((2, 2), dtype=complex)
_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

GAMMA = np.array(
    [np.block([[_I2, _Z2], [_Z2, -_I2]])]
    + [np.block([[_Z2, s], [-s, _Z2]]) for s in _PAULI]
)
GAMMA0 = GAMMA[0]
IDENTITY4 = np.eye(4, dtype=complex)


def check_gamma_algebra(gamma: np.ndarray = GAMMA, tol: float = 1e-14) -> None:
    for mu in range(4):
        for nu in range(4):
            anti = gamma[mu] @ gamma[nu] + gamma[nu] @ gamma[mu]
            if np.max(np.abs(anti - 2.0 * METRIC[mu, nu] * IDENTITY4)) > tol:
                raise RuntimeError(f"gamma matrices violate the Clifford algebra at ({mu}, {nu})")
        if np.max(np.abs(GAMMA0 @ gamma[mu] - (GAMMA0 @ gamma[mu]).conj().T)) > tol:
            raise RuntimeError(f"gamma^0 gamma^{mu} is not Hermitian")


check_gamma_algebra()


# --- spin 1 -----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PolarizedModes:
    """Covariant components f_mu(k), shape (n_points, 4)."""

    lattice: MomentumLattice
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex, copy=True)
        if v.shape != (len(self.lattice), 4):
            raise LatticeMismatch(f"expected shape {(len(self.lattice), 4)}, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("polarized mode values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def _raw_spin1(f: PolarizedModes, g: PolarizedModes) -> complex:
    if f.lattice is not g.lattice and f.lattice != g.lattice:
        raise LatticeMismatch("polarized modes live on different lattices")
    lat = f.lattice
    k_up = lat.points                      # contravariant k^mu
    eta = np.diag(METRIC)
    fg = np.sum(np.conj(f.values) * eta * g.values, axis=1)        # f*_mu g^mu
    kf = np.sum(k_up * np.conj(f.values), axis=1)                  # k^mu f*_mu
    kg = np.sum(k_up * g.values, axis=1)                           # k^nu g_nu
    integrand = fg - kf * kg / lat.squares
    return complex(lat.hbar * np.sum(lat.weights * 2 * math.pi * lat.window_values * integrand))


def resolve_spin1_sign(lattice: MomentumLattice, probes: int = 16, seed: int = 0) -> int:
    """Sign that makes the spin-1 form non-negative, fixed by a random probe."""
    rng = np.random.default_rng(seed)
    vals = []
    for _ in range(probes):
        v = rng.standard_normal((len(lattice), 4)) + 1j * rng.standard_normal((len(lattice), 4))
        f = PolarizedModes(lattice, v)
        vals.append(_raw_spin1(f, f).real)
    vals = np.array(vals)
    if np.all(vals <= 0):
        return -1
    if np.all(vals >= 0):
        return 1
    raise RuntimeError("spin-1 form is indefinite on the probe set")


def spin1_inner_product(f: PolarizedModes, g: PolarizedModes, sign: int | None = None) -> complex:
    """hbar sum weight 2 pi F [f*_mu g^mu - (k^mu f*_mu)(k_nu g^nu)/(k.k)], times the
    resolved sign."""
    if sign is None:
        sign = resolve_spin1_sign(f.lattice)
    return sign * _raw_spin1(f, g)


# --- spin 1/2 ---------------------------------------------------------------------

def _components(k) -> np.ndarray:
    return k.as_array() if isinstance(k, FourMomentum) else np.asarray(k, dtype=float)


def slash(k) -> np.ndarray:
    """k_mu gamma^mu for contravariant components k."""
    a = _components(k)
    k_low = METRIC.diagonal() * a
    return np.tensordot(k_low, GAMMA, axes=(0, 0))


def _on_shell(k) -> float:
    a = _components(k)
    s = minkowski_square(a)
    if not (s > 0 and a[0] > 0):
        raise OffShell(f"need k.k > 0 and k0 > 0, got k.k = {s}, k0 = {a[0]}")
    return s


def dirac_kernel(k) -> np.ndarray:
    """M(k) = k_mu gamma^mu + sqrt(k.k); equals 2 sqrt(k.k) times a rank-2 projector."""
    s = _on_shell(k)
    return slash(k) + math.sqrt(s) * IDENTITY4


def dirac_pseudo_inverse(k) -> np.ndarray:
    """M / (4 k.k).

    Satisfies M X M = M and X M X = X at every on-shell k. It coincides with
    the Moore-Penrose inverse in the rest frame, where M is Hermitian; for
    moving k, M is not Hermitian and this is the reflexive generalised
    inverse sharing M's range and kernel.
    """
    s = _on_shell(k)
    return dirac_kernel(k) / (4.0 * s)


@dataclass(frozen=True, eq=False)
class DiracModes:
    """Four-spinor coefficients zeta(k), shape (n_points, 4)."""

    lattice: MomentumLattice
    values: np.ndarray
    gamma: np.ndarray = GAMMA

    def __post_init__(self):
        v = np.array(self.values, dtype=complex, copy=True)
        if v.shape != (len(self.lattice), 4):
            raise LatticeMismatch(f"expected shape {(len(self.lattice), 4)}, got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class DiracExponent:
    exponent: float
    null_residual: float       # weighted norm of the kernel-of-M component
    norm: float                # weighted norm of zeta
    psd_probe_min: float       # smallest eigenvalue of gamma^0 M^+ seen, relative


def dirac_vacuum_exponent(zeta: DiracModes, imag_tol: float = 1e-10) -> DiracExponent:
    """(1/hbar) sum weight zetabar M^+ zeta / (2 pi F), with the ker(M) part split off
    as a delta-constrained residual."""
    lat = zeta.lattice
    F = lat.window_values
    total = 0j
    scale = 0.0
    resid = 0.0
    norm = 0.0
    psd_min = math.inf
    for i, k in enumerate(lat.points):
        z = zeta.values[i]
        w = lat.weights[i]
        zz = float(np.vdot(z, z).real)
        norm += w * zz
        if zz == 0:
            continue
        if F[i] <= 0:
            raise OffShellSupport(f"spinor has support at k = {k.tolist()} where F vanishes")
        M = dirac_kernel(k)
        X = M / (4.0 * lat.squares[i])
        P = M / (2.0 * math.sqrt(lat.squares[i]))
        z_null = z - P @ z
        z_rng = P @ z
        resid += w * float(np.vdot(z_null, z_null).real)
        h = GAMMA0 @ X
        q = np.vdot(z_rng, h @ z_rng)
        total += w * q / (2 * math.pi * F[i])
        scale += w * float(np.vdot(z_rng, z_rng).real) * np.max(np.abs(h)) / (2 * math.pi * F[i])
        ev = np.linalg.eigvalsh((h + h.conj().T) / 2)
        psd_min = min(psd_min, float(ev[0] / max(np.max(np.abs(ev)), 1e-300)))
    if abs(total.imag) > imag_tol * max(abs(total.real), scale, 1e-300):
        raise ImaginaryResidue(f"Dirac exponent has imaginary part {total.imag:.2e}")
    return DiracExponent(float(total.real) / lat.hbar, math.sqrt(resid), math.sqrt(norm),
                         psd_min if math.isfinite(psd_min) else 0.0)
