"""Finite-dimensional Gaussian characteristic functions.

Transform convention used everywhere in the package::

    integral exp(-i y.x) exp(-x^H Q x) dx  ~  exp(-1/4 y^H Q^+ y)

so the inverse quadratic form carries the factor 1/4. Normalisation
constants are never tracked; callers compare ratios against a reference
point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import DomainTooLarge, NotNormalized, NotPSD, TruncationTooSmall

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
DEFAULT_SPLIT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class QuadraticForm:
    """q(x) = x^H Q x for a Hermitian positive semi-definite Q."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, copy=True)
        if m.ndim == 0:
            m = m.reshape(1, 1)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"quadratic form needs a square matrix, got shape {m.shape}")
        scale = max(np.max(np.abs(m)), 1.0) if m.size else 1.0
        if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL * scale:
            raise ValueError("quadratic form matrix is not Hermitian")
        if not np.iscomplexobj(m) or np.max(np.abs(m.imag), initial=0.0) == 0.0:
            m = m.real.astype(float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, x) -> float:
        x = np.asarray(x)
        return float(np.real(np.vdot(x, self.matrix @ x)))


@dataclass(frozen=True, eq=False)
class DegenerateGaussian:
    """Transform of exp(-q): delta constraints on ``null_basis`` times
    exp(-inverse_form(y)) on the positive subspace."""

    null_basis: np.ndarray
    range_basis: np.ndarray
    inverse_form: QuadraticForm
    split_tolerance: float = DEFAULT_SPLIT_TOL
    eigenvalues: np.ndarray = field(default=None, repr=False)

    @property
    def dimension(self) -> int:
        return self.inverse_form.dimension

    @property
    def nullity(self) -> int:
        return self.null_basis.shape[1]

    def exponent(self, y) -> float:
        return self.inverse_form(y)

    def null_component(self, y) -> np.ndarray:
        """Coordinates of y along the delta-constrained directions."""
        return self.null_basis.conj().T @ np.asarray(y)

    def null_projector(self) -> np.ndarray:
        return self.null_basis @ self.null_basis.conj().T


def invert_gaussian_characteristic(q: QuadraticForm | np.ndarray,
                                   split_tolerance: float = DEFAULT_SPLIT_TOL) -> DegenerateGaussian:
    if not isinstance(q, QuadraticForm):
        q = QuadraticForm(q)
    lam, vec = np.linalg.eigh(q.matrix)
    lam_max = float(np.max(np.abs(lam))) if lam.size else 0.0
    if lam.size and lam[0] < -PSD_TOL * max(lam_max, np.finfo(float).tiny):
        raise NotPSD(f"eigenvalue {lam[0]:.3e} below -{PSD_TOL:g} * lambda_max ({lam_max:.3e})")
    null = lam <= split_tolerance * lam_max
    v1 = vec[:, ~null]
    inv = (v1 / lam[~null]) @ v1.conj().T / 4.0
    inv = (inv + inv.conj().T) / 2.0
    return DegenerateGaussian(null_basis=vec[:, null], range_basis=v1,
                              inverse_form=QuadraticForm(inv),
                              split_tolerance=split_tolerance, eigenvalues=lam)


def quadrature_ft_oracle(q: QuadraticForm | np.ndarray, y, half_width: float = 8.0,
                         step: float = 0.01, max_nodes: int = 5_000_000) -> complex:
    """Riemann sum of exp(-i y.x) exp(-x^T Q x) over the box [-half_width, half_width]^n."""
    if not isinstance(q, QuadraticForm):
        q = QuadraticForm(q)
    n = q.dimension
    if n > 3:
        raise DomainTooLarge(f"quadrature oracle supports dimension <= 3, got {n}")
    nodes_1d = np.arange(-half_width, half_width + step / 2, step)
    total = len(nodes_1d) ** n
    if total > max_nodes:
        raise DomainTooLarge(f"{total} quadrature nodes exceed the budget of {max_nodes}")
    y = np.asarray(y, dtype=float).reshape(n)
    Q = np.real(q.matrix)
    vol = step ** n
    if n == 1:
        x = nodes_1d
        return complex(np.sum(np.exp(-1j * y[0] * x - Q[0, 0] * x * x)) * vol)
    acc = 0j
    # slab over the first coordinate keeps memory at len^(n-1)
    rest = np.stack([g.ravel() for g in np.meshgrid(*([nodes_1d] * (n - 1)), indexing="ij")], axis=-1)
    Qrr = Q[1:, 1:]
    quad_rest = np.einsum("ij,jk,ik->i", rest, Qrr, rest)
    phase_rest = rest @ y[1:]
    cross = rest @ Q[0, 1:]
    for x0 in nodes_1d:
        expo = Q[0, 0] * x0 * x0 + 2.0 * x0 * cross + quad_rest
        acc += np.sum(np.exp(-1j * (y[0] * x0 + phase_rest) - expo))
    return complex(acc * vol)


# --- single-mode conventional Wigner function -------------------------------------

@dataclass(frozen=True)
class WignerGrid:
    """(theta, omega) grid for the characteristic function and the (x, p)
    grid the transform is evaluated on."""

    char_extent: float = 8.0
    char_points: int = 65
    phase_extent: float = 3.5
    phase_points: int = 71

    def char_axis(self) -> np.ndarray:
        return np.linspace(-self.char_extent, self.char_extent, self.char_points)

    def phase_axis(self) -> np.ndarray:
        return np.linspace(-self.phase_extent, self.phase_extent, self.phase_points)


def ladder_operators(n: int, commutator: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Truncated a and a^dagger with [a, a^dagger] = commutator (below the top level)."""
    a = np.diag(np.sqrt(commutator * np.arange(1, n)), k=1).astype(complex)
    return a, a.conj().T


def characteristic_single_mode(state, theta, omega, hbar: float = 1.0) -> np.ndarray:
    """<psi| exp(i x theta + i p omega) |psi> on the outer grid theta x omega."""
    psi = np.asarray(state, dtype=complex)
    a, ad = ladder_operators(len(psi))
    x_op = math.sqrt(hbar / 2.0) * (a + ad)
    p_op = 1j * math.sqrt(hbar / 2.0) * (ad - a)
    theta = np.asarray(theta, dtype=float)
    omega = np.asarray(omega, dtype=float)
    out = np.empty((len(theta), len(omega)), dtype=complex)
    done = np.zeros(out.shape, dtype=bool)
    # C(-theta, -omega) = conj C(theta, omega); reuse when the grid is symmetric
    ti = {round(t, 12): i for i, t in enumerate(theta)}
    oj = {round(o, 12): j for j, o in enumerate(omega)}
    for i, th in enumerate(theta):
        for j, om in enumerate(omega):
            if done[i, j]:
                continue
            out[i, j] = np.vdot(psi, expm(1j * (th * x_op + om * p_op)) @ psi)
            done[i, j] = True
            mi, mj = ti.get(round(-th, 12)), oj.get(round(-om, 12))
            if mi is not None and mj is not None and not done[mi, mj]:
                out[mi, mj] = np.conj(out[i, j])
                done[mi, mj] = True
    return out


def conventional_wigner_single_mode(state, grid: WignerGrid | None = None,
                                    hbar: float = 1.0):
    """Wigner function of a truncated oscillator state.

    Returns ``(x, p, W)`` with ``W[i, j]`` the density at ``(x[i], p[j])``,
    normalised so its integral over phase space is one.
    """
    grid = grid or WignerGrid()
    psi = np.asarray(state, dtype=complex).ravel()
    n = len(psi)
    if n < 3 or n > 64:
        raise TruncationTooSmall(f"number-basis truncation must lie in [3, 64], got {n}")
    norm = float(np.vdot(psi, psi).real)
    if abs(norm - 1.0) > 1e-10:
        raise NotNormalized(f"<psi|psi> = {norm!r}")
    if np.sum(np.abs(psi[-2:]) ** 2) > 1e-8:
        raise TruncationTooSmall("state has more than 1e-8 weight on the top two levels")

    th = grid.char_axis()
    char = characteristic_single_mode(psi, th, th, hbar)
    x = grid.phase_axis()
    d = th[1] - th[0]
    kernel = np.exp(-1j * np.outer(x, th))
    w = kernel @ char @ kernel.T * (d * d) / (2 * math.pi) ** 2
    if np.max(np.abs(w.imag)) > 1e-8:
        raise ValueError(f"Wigner transform has imaginary part {np.max(np.abs(w.imag)):.2e}")
    return x, x.copy(), w.real
