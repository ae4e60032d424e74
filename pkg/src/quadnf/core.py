"""Fundamental symplectic linear algebra for quadratic Hamiltonians.

A quadratic Hamiltonian of N bosonic modes is specified by a real
symmetric matrix M of size 2N x 2N acting on the quadrature vector
(x_1..x_N, p_1..p_N).  The linear Heisenberg dynamics is generated by
the equation-of-motion matrix K = J M, where J is the standard
symplectic form.  This module provides J, the construction and
validation of K, the action of canonical transformations, the
conversion to the bosonic (creation/annihilation) representation, and a
matrix-exponential propagator with a boundedness oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .config import DEFAULT, Config, maxnorm
from .errors import (
    ContractViolationError,
    IllConditionedError,
    InvalidDimensionError,
    SaturationError,
    StructureError,
)

__all__ = [
    "symplectic_form",
    "apply_form",
    "form_product",
    "require_hamiltonian_matrix",
    "build_eom",
    "EomDiagnostics",
    "validate_eom_structure",
    "symplectic_residual",
    "require_symplectic",
    "transform_hamiltonian",
    "similarity",
    "bosonic_conversion",
    "to_bosonic",
    "propagate",
    "stability_oracle",
]


def _even_dim(a: np.ndarray) -> int:
    """Return N for a square 2N x 2N array, raising on bad shapes."""
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidDimensionError(f"expected a square matrix, got shape {a.shape}")
    dim = a.shape[0]
    if dim == 0 or dim % 2 != 0:
        raise InvalidDimensionError(f"dimension must be a positive even number, got {dim}")
    return dim // 2


def symplectic_form(n_modes: int) -> np.ndarray:
    """Standard symplectic form J = [[0, I], [-I, 0]] for ``n_modes`` modes.

    Parameters
    ----------
    n_modes : int
        Number of modes N; the result is 2N x 2N with integer entries.
    """
    if n_modes < 1:
        raise InvalidDimensionError(f"n_modes must be >= 1, got {n_modes}")
    n = int(n_modes)
    j = np.zeros((2 * n, 2 * n))
    j[:n, n:] = np.eye(n)
    j[n:, :n] = -np.eye(n)
    return j


def apply_form(v: np.ndarray) -> np.ndarray:
    """Apply J to a 2N vector without materializing J."""
    n = v.shape[0] // 2
    return np.concatenate([v[n:], -v[:n]])


def form_product(x: np.ndarray, y: np.ndarray) -> complex:
    """Bilinear symplectic product x^T J y (no conjugation)."""
    n = x.shape[0] // 2
    return complex(x[:n] @ y[n:] - x[n:] @ y[:n])


def require_hamiltonian_matrix(m, cfg: Config = DEFAULT) -> np.ndarray:
    """Validate and return M as a float array (symmetric, even-dimensional)."""
    m = np.asarray(m, dtype=float)
    _even_dim(m)
    asym = maxnorm(m - m.T)
    if asym > cfg.tol(maxnorm(m)):
        raise StructureError(f"matrix is not symmetric: max |M - M^T| = {asym:.3e}")
    return m


def build_eom(m, cfg: Config = DEFAULT) -> np.ndarray:
    """Equation-of-motion matrix K = J M for a symmetric M.

    The result satisfies J K + K^T J = 0 to round-off, which is the
    structure preserving the canonical commutation relations.
    """
    m = require_hamiltonian_matrix(m, cfg)
    n = m.shape[0] // 2
    # J M without forming J: top rows take the p-block, bottom rows negate the x-block.
    return np.vstack([m[n:, :], -m[:n, :]])


@dataclass(frozen=True)
class EomDiagnostics:
    """Residuals of the structural constraints on an equation-of-motion matrix."""

    hamiltonian_residual: float
    upper_block_asymmetry: float
    lower_block_asymmetry: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return (
            self.hamiltonian_residual <= self.tolerance
            and self.upper_block_asymmetry <= self.tolerance
            and self.lower_block_asymmetry <= self.tolerance
        )


def validate_eom_structure(k, tol: float | None = None, cfg: Config = DEFAULT) -> EomDiagnostics:
    """Check J K + K^T J = 0 and the symmetry of the off-diagonal N x N blocks.

    Returns diagnostics rather than raising; ``passed`` is True when all
    residuals are within tolerance.
    """
    k = np.asarray(k, dtype=float)
    n = _even_dim(k)
    j = symplectic_form(n)
    residual = maxnorm(j @ k + k.T @ j)
    a_r = k[:n, n:]
    a_l = k[n:, :n]
    if tol is None:
        tol = cfg.tol(maxnorm(k))
    return EomDiagnostics(
        hamiltonian_residual=residual,
        upper_block_asymmetry=maxnorm(a_r - a_r.T),
        lower_block_asymmetry=maxnorm(a_l - a_l.T),
        tolerance=float(tol),
    )


def symplectic_residual(t: np.ndarray) -> float:
    """Max-norm of T J T^T - J, the defect of the symplectic condition."""
    t = np.asarray(t)
    n = _even_dim(t)
    j = symplectic_form(n)
    return maxnorm(t @ j @ t.T - j)


def require_symplectic(t, cfg: Config = DEFAULT) -> np.ndarray:
    """Validate that T is a real symplectic matrix and return it as float array."""
    t = np.asarray(t)
    if np.iscomplexobj(t):
        if maxnorm(t.imag) > cfg.tol(maxnorm(t)):
            raise ContractViolationError("transformation matrix must be real")
        t = t.real
    t = t.astype(float)
    res = symplectic_residual(t)
    scale = 1.0 + maxnorm(t) ** 2
    if res > cfg.tol(scale) * scale:
        raise ContractViolationError(
            f"matrix is not symplectic: max |T J T^T - J| = {res:.3e}"
        )
    return t


def transform_hamiltonian(m, t, cfg: Config = DEFAULT) -> np.ndarray:
    """New Hamiltonian matrix N = T^T M T under a canonical transformation T."""
    m = require_hamiltonian_matrix(m, cfg)
    t = require_symplectic(t, cfg)
    n = t.T @ m @ t
    return (n + n.T) / 2.0


def similarity(k, t, cfg: Config = DEFAULT) -> np.ndarray:
    """Similarity transformation T^{-1} K T (spectrum preserving).

    Refuses matrices whose condition estimate exceeds ``cfg.cond_limit``,
    beyond which the result would be numerical noise.
    """
    k = np.asarray(k, dtype=float)
    t = np.asarray(t, dtype=float)
    _even_dim(k)
    cond = np.linalg.cond(t)
    if not np.isfinite(cond) or cond > cfg.cond_limit:
        raise IllConditionedError(f"condition estimate {cond:.3e} exceeds {cfg.cond_limit:.1e}")
    return np.linalg.solve(t, k @ t)


def bosonic_conversion(n_modes: int) -> np.ndarray:
    """Unitary G mapping (a_1..a_N, a_1^+..a_N^+) to the quadrature ordering."""
    if n_modes < 1:
        raise InvalidDimensionError(f"n_modes must be >= 1, got {n_modes}")
    n = int(n_modes)
    eye = np.eye(n)
    return np.block([[eye, eye], [-1j * eye, 1j * eye]]) / np.sqrt(2.0)


def to_bosonic(t) -> np.ndarray:
    """Canonical transformation in the bosonic representation, T_C = G^+ T G.

    For real T the result maps (b, b^+) consistently: the lower-right
    N x N block is the conjugate of the upper-left one, and the
    lower-left block the conjugate of the upper-right one.
    """
    t = np.asarray(t, dtype=float)
    n = _even_dim(t)
    g = bosonic_conversion(n)
    return g.conj().T @ t @ g


def propagate(k, t: float, cfg: Config = DEFAULT) -> np.ndarray:
    """Matrix exponential exp(K t), the linear Heisenberg propagator.

    Raises ``SaturationError`` when the exponential overflows (strongly
    unstable K at large t); the error carries the norm of K t.
    """
    k = np.asarray(k, dtype=float)
    _even_dim(k)
    if not np.isfinite(t):
        raise ContractViolationError("propagation time must be finite")
    with np.errstate(over="ignore", invalid="ignore"):
        result = expm(k * t)
    if not np.all(np.isfinite(result)):
        raise SaturationError(
            f"exp(K t) overflowed at t = {t:g} (|K t| = {maxnorm(k) * abs(t):.3e})",
            norm=maxnorm(k) * abs(t),
            t=t,
        )
    return result


def stability_oracle(
    k,
    t_max: float,
    growth_threshold: float,
    cfg: Config = DEFAULT,
) -> bool:
    """Empirical boundedness check of the propagator, independent of spectra.

    Samples ||exp(K t)||_2 on a uniform grid over [0, t_max] and reports
    True iff the supremum stays within ``growth_threshold``.  Overflow
    counts as unbounded.  This is a cross-check for the spectral
    stability verdict, not a replacement for it.
    """
    k = np.asarray(k, dtype=float)
    _even_dim(k)
    if t_max <= 0:
        raise ContractViolationError("t_max must be positive")
    steps = max(int(cfg.oracle_samples), 1)
    dt = t_max / steps
    with np.errstate(over="ignore", invalid="ignore"):
        step = expm(k * dt)
    if not np.all(np.isfinite(step)):
        return False
    prop = np.eye(k.shape[0])
    for _ in range(steps):
        with np.errstate(over="ignore", invalid="ignore"):
            prop = step @ prop
        if not np.all(np.isfinite(prop)):
            return False
        if np.linalg.norm(prop, 2) > growth_threshold:
            return False
    return True
