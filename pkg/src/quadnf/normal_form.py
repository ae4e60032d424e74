"""Assembly of the real canonical transformation and the normal form.

Given the symplectically orthonormalized Jordan chains of K = J M, each
of the six chain cases prescribes real column vectors for the
transformation T = (T_+ T_-).  The same data determines the real Jordan
normal form K_N = T^{-1} K T block by block, and the transformed
Hamiltonian matrix N = T^T M T = -J K_N decomposes into a short list of
elementary quadratic terms (oscillators, free particles, squeezers,
beam splitters).  This module builds the columns, assembles and
verifies T, generates the expected blocks, emits the term list, decides
the stability verdict, and provides the fast Bogoliubov path for the
diagonalizable purely-imaginary case.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .algebra import (
    bogoliubov_orthonormalize,
    orthonormalize_imaginary,
    orthonormalize_real_complex,
    orthonormalize_zero,
    zero_odd_pairing,
)
from .config import DEFAULT, Config, maxnorm
from .core import build_eom, similarity, symplectic_form, symplectic_residual
from .errors import AssemblyError, ConstructionError, VerificationError, WrongPathError
from .spectrum import (
    EigenvalueKind,
    JordanChain,
    SpectrumReport,
    _nullspace,
    assign_cases,
    classify_spectrum,
    extract_class_chains,
)

__all__ = [
    "NormalFormBlock",
    "TermKind",
    "HamiltonianTerm",
    "ColumnGroup",
    "CanonicalTransform",
    "Verdict",
    "NormalFormReport",
    "build_case_columns",
    "assemble_transform",
    "expected_blocks",
    "expected_kn",
    "emit_terms",
    "bogoliubov_transform",
    "normal_form",
]

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class NormalFormBlock:
    """One real Jordan block of K_N: case label, eigenvalue data, and the
    three sub-blocks entering [[I_I, I_R], [I_L, -I_I^T]]."""

    case: int
    eigenvalue: complex
    rank: int
    sigma: complex | None
    i_i: np.ndarray
    i_r: np.ndarray
    i_l: np.ndarray

    @property
    def size(self) -> int:
        return self.i_i.shape[0]

    @property
    def exp_rate(self) -> float:
        return abs(self.eigenvalue.real)

    @property
    def poly_order(self) -> int:
        return self.rank - 1


class TermKind(Enum):
    HARMONIC_OSCILLATOR = "harmonic_oscillator"  # c (X_k^2 + P_k^2)
    FREE_PARTICLE_X = "free_particle_x"          # c X_k^2
    FREE_PARTICLE_P = "free_particle_p"          # c P_k^2
    SINGLE_MODE_SQUEEZE = "single_mode_squeeze"  # c X_k P_k
    BEAM_SPLITTER_XP = "beam_splitter_xp"        # c (X_a P_b - X_b P_a)
    BEAM_SPLITTER_XXPP = "beam_splitter_xxpp"    # c (X_a X_b + P_a P_b)
    SQUEEZE_BEAM_SPLITTER = "squeeze_beam_splitter"  # c X_a P_b
    POSITION_COUPLING = "position_coupling"      # c X_a X_b (case 5, rank >= 4)
    MOMENTUM_COUPLING = "momentum_coupling"      # c P_a P_b (case 5, rank >= 4)


@dataclass(frozen=True)
class HamiltonianTerm:
    """One elementary term of the normal-form Hamiltonian.

    ``modes`` are 1-based normal-mode indices; the coefficient is the
    full prefactor of the quadratic expression named by ``kind``.
    """

    kind: TermKind
    coefficient: float
    modes: tuple[int, ...]

    def symbol(self) -> str:
        c = self.coefficient
        prefix = f"{c:g}*" if c != 1 else ""
        if self.kind is TermKind.HARMONIC_OSCILLATOR:
            (k,) = self.modes
            return f"{prefix}(X{k}^2 + P{k}^2)"
        if self.kind is TermKind.FREE_PARTICLE_X:
            (k,) = self.modes
            return f"{prefix}X{k}^2"
        if self.kind is TermKind.FREE_PARTICLE_P:
            (k,) = self.modes
            return f"{prefix}P{k}^2"
        if self.kind is TermKind.SINGLE_MODE_SQUEEZE:
            (k,) = self.modes
            return f"{prefix}X{k}*P{k}"
        if self.kind is TermKind.BEAM_SPLITTER_XP:
            a, b = self.modes
            return f"{prefix}(X{a}*P{b} - X{b}*P{a})"
        if self.kind is TermKind.BEAM_SPLITTER_XXPP:
            a, b = self.modes
            return f"{prefix}(X{a}*X{b} + P{a}*P{b})"
        if self.kind is TermKind.POSITION_COUPLING:
            a, b = self.modes
            return f"{prefix}X{a}*X{b}"
        if self.kind is TermKind.MOMENTUM_COUPLING:
            a, b = self.modes
            return f"{prefix}P{a}*P{b}"
        a, b = self.modes
        return f"{prefix}X{a}*P{b}"


@dataclass(frozen=True)
class ColumnGroup:
    """Layout metadata for one chain's worth of columns in T."""

    case: int
    eigenvalue: complex
    rank: int
    sigma: complex | None
    modes: tuple[int, ...]  # 1-based normal-mode indices


@dataclass(frozen=True)
class CanonicalTransform:
    """Real symplectic transformation with its column layout."""

    matrix: np.ndarray
    layout: tuple[ColumnGroup, ...]

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    @property
    def plus(self) -> np.ndarray:
        return self.matrix[:, : self.n_modes]

    @property
    def minus(self) -> np.ndarray:
        return self.matrix[:, self.n_modes:]


class Verdict(Enum):
    STABLE = "stable"
    MARGINAL = "marginal"
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class NormalFormReport:
    """Everything the pipeline knows about one Hamiltonian matrix."""

    n_modes: int
    spectrum: SpectrumReport
    transform: CanonicalTransform
    k_normal: np.ndarray
    n_matrix: np.ndarray
    blocks: tuple[NormalFormBlock, ...]
    terms: tuple[HamiltonianTerm, ...]
    verdict: Verdict
    reasons: tuple[str, ...]
    zero_frequency_modes: int
    residuals: dict = field(default_factory=dict)


@dataclass(frozen=True)
class _Unit:
    """One chain's contribution: its columns, block, and ordering key."""

    case: int
    eigenvalue: complex
    rank: int
    sigma: complex | None
    t_cols: list
    s_cols: list


def _real_columns(cols, tol: float):
    out = []
    for c in cols:
        c = np.asarray(c)
        if np.iscomplexobj(c):
            imag = maxnorm(c.imag)
            if imag > tol * (1.0 + maxnorm(c)):
                raise ConstructionError(
                    f"transformation column has imaginary residual {imag:.3e}"
                )
            c = c.real
        out.append(c.astype(float))
    return out


def _chain_powers(chain: JordanChain) -> list[np.ndarray]:
    """[e, A e, ..., A^(D-1) e] for the chain's generator e."""
    return list(reversed(chain.vectors))


def build_case_columns(case: int, k, data, cfg: Config = DEFAULT) -> _Unit:
    """Columns of T for one orthonormalized chain (or f/h pair).

    ``data`` depends on the case: (e_chain, partner_chain) for cases 1
    and 2, (chain, sigma) for cases 3, 5 and 6, and (f_chain, h_chain)
    for case 4.  Output columns are validated to be real.
    """
    k = np.asarray(k, dtype=float)
    tol = cfg.tol(1.0 + maxnorm(k))
    if case == 1:
        e_chain, et_chain = data
        lam, d = e_chain.eigenvalue, e_chain.rank
        z = _chain_powers(e_chain)
        w = [(-1.0) ** (d - kk) * et_chain.vectors[kk - 1] for kk in range(1, d + 1)]
        t_cols, s_cols = z, w
        sigma = None
    elif case == 2:
        e_chain, et_chain = data
        lam, d = e_chain.eigenvalue, e_chain.rank
        z = _chain_powers(e_chain)
        w = [(-1.0) ** (d - kk) * et_chain.vectors[kk - 1] for kk in range(1, d + 1)]
        t_cols, s_cols = [], []
        for kk in range(1, 2 * d + 1):
            if kk % 2 == 1:
                t_cols.append(SQRT2 * np.real(z[(kk - 1) // 2]))
                s_cols.append(SQRT2 * np.real(w[(kk - 1) // 2]))
            else:
                t_cols.append(SQRT2 * np.imag(z[kk // 2 - 1]))
                s_cols.append(-SQRT2 * np.imag(w[kk // 2 - 1]))
        sigma = None
    elif case == 3:
        chain, sigma = data
        lam, d = chain.eigenvalue, chain.rank
        z = _chain_powers(chain)
        s = float(np.real(sigma))
        t_cols = [s ** (kk - 1) * z[kk - 1] for kk in range(1, d // 2 + 1)]
        s_cols = [(-s) ** (d - kk) * chain.vectors[kk - 1] for kk in range(1, d // 2 + 1)]
    elif case == 4:
        f_chain, h_chain = data
        lam, d = f_chain.eigenvalue, f_chain.rank
        t_cols = _chain_powers(f_chain)
        s_cols = [(-1.0) ** (d - kk) * h_chain.vectors[kk - 1] for kk in range(1, d + 1)]
        sigma = None
    elif case == 5:
        chain, sigma = data
        lam, d = chain.eigenvalue, chain.rank
        z = _chain_powers(chain)
        w = [sigma * (-1.0) ** kk * np.conj(z[d - kk]) for kk in range(1, d + 1)]
        t_cols, s_cols = [], []
        for kk in range(1, d + 1):
            if kk % 2 == 1:
                t_cols.append(SQRT2 * np.real(z[kk - 1]))
                s_cols.append(SQRT2 * np.real(w[kk - 1]))
            else:
                t_cols.append(SQRT2 * np.imag(z[kk - 1]))
                s_cols.append(-SQRT2 * np.imag(w[kk - 1]))
    elif case == 6:
        chain, sigma = data
        lam, d = chain.eigenvalue, chain.rank
        z = _chain_powers(chain)
        eps = float(np.real(-1j * sigma))
        t_cols = [SQRT2 * np.real(z[kk - 1]) for kk in range(1, d + 1)]
        s_cols = [eps * (-1.0) ** kk * SQRT2 * np.imag(z[d - kk]) for kk in range(1, d + 1)]
    else:
        raise ValueError(f"unknown case {case}")
    return _Unit(
        case=case,
        eigenvalue=complex(lam),
        rank=d,
        sigma=None if sigma is None else complex(sigma),
        t_cols=_real_columns(t_cols, tol),
        s_cols=_real_columns(s_cols, tol),
    )


def _unit_sort_key(unit: _Unit):
    lam = unit.eigenvalue
    sigma = unit.sigma if unit.sigma is not None else 0j
    return (unit.case, -abs(lam), -lam.imag, -unit.rank, -sigma.real, -sigma.imag)


def _block_for_unit(unit: _Unit) -> NormalFormBlock:
    c, lam, d, sigma = unit.case, unit.eigenvalue, unit.rank, unit.sigma
    nu = lam.imag
    if c == 1:
        i_i = lam.real * np.eye(d) + np.eye(d, k=-1)
        i_r = np.zeros((d, d))
        i_l = np.zeros((d, d))
    elif c == 2:
        size = 2 * d
        i_i = np.zeros((size, size))
        rot = np.array([[lam.real, nu], [-nu, lam.real]])
        for b in range(d):
            i_i[2 * b: 2 * b + 2, 2 * b: 2 * b + 2] = rot
            if b + 1 < d:
                i_i[2 * b + 2: 2 * b + 4, 2 * b: 2 * b + 2] = np.eye(2)
        i_r = np.zeros((size, size))
        i_l = np.zeros((size, size))
    elif c == 3:
        size = d // 2
        s = float(np.real(sigma))
        i_i = s * np.eye(size, k=-1)
        i_r = np.zeros((size, size))
        i_l = np.zeros((size, size))
        i_l[size - 1, size - 1] = s * (-1.0) ** (d // 2)
    elif c == 4:
        i_i = np.eye(d, k=-1)
        i_r = np.zeros((d, d))
        i_l = np.zeros((d, d))
    elif c == 5:
        s = float(np.real(sigma))
        i_i = np.zeros((d, d))
        i_r = np.zeros((d, d))
        i_l = np.zeros((d, d))
        for r in range(1, d + 1):
            i_r[r - 1, d - r] = s * nu
            i_l[r - 1, d - r] = -s * nu
            if 2 <= r:
                col = d + 2 - r
                i_r[r - 1, col - 1] = s if r % 2 == 0 else -s
            if r <= d - 1:
                col = d - r
                i_l[r - 1, col - 1] = s if r % 2 == 0 else -s
    else:
        s6 = float(np.real(1j * sigma))
        i_i = np.eye(d, k=-1)
        i_r = np.zeros((d, d))
        i_l = np.zeros((d, d))
        for r in range(1, d + 1):
            i_r[r - 1, d - r] = s6 * nu * (-1.0) ** (r + 1)
            i_l[r - 1, d - r] = s6 * nu * (-1.0) ** r
    return NormalFormBlock(
        case=c, eigenvalue=lam, rank=d, sigma=sigma, i_i=i_i, i_r=i_r, i_l=i_l
    )


def expected_blocks(units) -> tuple[NormalFormBlock, ...]:
    """Real Jordan blocks implied by case labels, eigenvalues, ranks and signs."""
    return tuple(_block_for_unit(u) for u in units)


def expected_kn(blocks, n_modes: int) -> np.ndarray:
    """Assemble the full expected K_N = [[O_I, O_R], [O_L, -O_I^T]]."""
    o_i = np.zeros((n_modes, n_modes))
    o_r = np.zeros((n_modes, n_modes))
    o_l = np.zeros((n_modes, n_modes))
    offset = 0
    for b in blocks:
        end = offset + b.size
        o_i[offset:end, offset:end] = b.i_i
        o_r[offset:end, offset:end] = b.i_r
        o_l[offset:end, offset:end] = b.i_l
        offset = end
    if offset != n_modes:
        raise AssemblyError(f"blocks cover {offset} modes, expected {n_modes}")
    return np.block([[o_i, o_r], [o_l, -o_i.T]])


def assemble_transform(units, n_modes: int, cfg: Config = DEFAULT) -> CanonicalTransform:
    """Stack unit columns into T = (T_+ T_-) and check the symplectic condition.

    Units must already be in final mode order.  On failure, the raised
    ``AssemblyError`` carries the offending Gram residual matrix.
    """
    t_cols, s_cols, layout = [], [], []
    offset = 0
    for u in units:
        width = len(u.t_cols)
        layout.append(
            ColumnGroup(
                case=u.case,
                eigenvalue=u.eigenvalue,
                rank=u.rank,
                sigma=u.sigma,
                modes=tuple(range(offset + 1, offset + width + 1)),
            )
        )
        t_cols.extend(u.t_cols)
        s_cols.extend(u.s_cols)
        offset += width
    if offset != n_modes:
        raise AssemblyError(f"column groups cover {offset} modes, expected {n_modes}")
    t = np.column_stack(t_cols + s_cols)
    res = symplectic_residual(t)
    scale = 1.0 + maxnorm(t) ** 2
    if res > cfg.tol(scale) * scale * 100:
        j = symplectic_form(n_modes)
        raise AssemblyError(
            f"assembled transformation is not symplectic: residual {res:.3e}",
            gram_residual=t @ j @ t.T - j,
        )
    return CanonicalTransform(matrix=t, layout=tuple(layout))


def emit_terms(blocks, layout) -> tuple[tuple[HamiltonianTerm, ...], int]:
    """Elementary Hamiltonian terms of N = -J K_N, plus the count of
    zero-frequency modes (case 4 of rank 1, which contribute nothing)."""
    terms: list[HamiltonianTerm] = []
    zero_modes = 0
    for block, group in zip(blocks, layout):
        modes = group.modes
        c, d = block.case, block.rank
        lam = block.eigenvalue
        nu = lam.imag
        s = float(np.real(block.sigma)) if c in (3, 5) else None
        if c == 1:
            for k in range(d):
                terms.append(HamiltonianTerm(TermKind.SINGLE_MODE_SQUEEZE, lam.real, (modes[k],)))
            for k in range(d - 1):
                terms.append(
                    HamiltonianTerm(TermKind.SQUEEZE_BEAM_SPLITTER, 1.0, (modes[k], modes[k + 1]))
                )
        elif c == 2:
            for k in range(2 * d):
                terms.append(HamiltonianTerm(TermKind.SINGLE_MODE_SQUEEZE, lam.real, (modes[k],)))
            for k in range(d):
                terms.append(
                    HamiltonianTerm(TermKind.BEAM_SPLITTER_XP, nu, (modes[2 * k + 1], modes[2 * k]))
                )
            for k in range(2 * d - 2):
                terms.append(
                    HamiltonianTerm(TermKind.SQUEEZE_BEAM_SPLITTER, 1.0, (modes[k], modes[k + 2]))
                )
        elif c == 3:
            half = d // 2
            for k in range(half - 1):
                terms.append(
                    HamiltonianTerm(TermKind.SQUEEZE_BEAM_SPLITTER, s, (modes[k], modes[k + 1]))
                )
            coeff = (-1.0) ** (d // 2 + 1) * s / 2.0
            terms.append(HamiltonianTerm(TermKind.FREE_PARTICLE_X, coeff, (modes[half - 1],)))
        elif c == 4:
            if d == 1:
                zero_modes += 1
            for k in range(d - 1):
                terms.append(
                    HamiltonianTerm(TermKind.SQUEEZE_BEAM_SPLITTER, 1.0, (modes[k], modes[k + 1]))
                )
        elif c == 5:
            # Antidiagonal couplings (k, D+1-k) carry matched XX and PP
            # pieces and combine into beam splitters.
            for a in range(1, d // 2 + 1):
                b = d + 1 - a
                terms.append(
                    HamiltonianTerm(TermKind.BEAM_SPLITTER_XXPP, s * nu, (modes[a - 1], modes[b - 1]))
                )
            # The remaining pieces pair X_k with X_{D-k} and P_{k+1} with
            # P_{D+1-k}; the mode pairs differ, so they stay separate.
            for k in range(1, d):
                sign = (-1.0) ** (k + 1)
                a, b = k, d - k
                if a == b:
                    terms.append(HamiltonianTerm(TermKind.FREE_PARTICLE_X, sign * s / 2.0, (modes[a - 1],)))
                elif a < b:
                    terms.append(
                        HamiltonianTerm(TermKind.POSITION_COUPLING, sign * s, (modes[a - 1], modes[b - 1]))
                    )
                a2, b2 = k + 1, d + 1 - k
                if a2 == b2:
                    terms.append(HamiltonianTerm(TermKind.FREE_PARTICLE_P, sign * s / 2.0, (modes[a2 - 1],)))
                elif a2 < b2:
                    terms.append(
                        HamiltonianTerm(TermKind.MOMENTUM_COUPLING, sign * s, (modes[a2 - 1], modes[b2 - 1]))
                    )
        else:
            coeff = float(np.real(1j * block.sigma)) * nu / 2.0
            for k in range(1, d + 1):
                sign = (-1.0) ** (k + 1)
                a, b = modes[k - 1], modes[d - k]
                if a == b:
                    terms.append(HamiltonianTerm(TermKind.HARMONIC_OSCILLATOR, sign * coeff, (a,)))
                elif a < b:
                    terms.append(
                        HamiltonianTerm(TermKind.BEAM_SPLITTER_XXPP, 2.0 * sign * coeff, (a, b))
                    )
            for k in range(d - 1):
                terms.append(
                    HamiltonianTerm(TermKind.SQUEEZE_BEAM_SPLITTER, 1.0, (modes[k], modes[k + 1]))
                )
    return tuple(terms), zero_modes


def terms_matrix(terms, n_modes: int) -> np.ndarray:
    """Rebuild the Hamiltonian matrix (1/2) rho^T N rho from a term list.

    Inverse of ``emit_terms`` up to the zero-frequency modes (which
    contribute nothing); useful as a consistency check against -J K_N.
    """
    n = np.zeros((2 * n_modes, 2 * n_modes))

    def x(k):
        return k - 1

    def p(k):
        return n_modes + k - 1

    for t in terms:
        c = t.coefficient
        if t.kind is TermKind.HARMONIC_OSCILLATOR:
            (k,) = t.modes
            n[x(k), x(k)] += 2 * c
            n[p(k), p(k)] += 2 * c
        elif t.kind is TermKind.FREE_PARTICLE_X:
            (k,) = t.modes
            n[x(k), x(k)] += 2 * c
        elif t.kind is TermKind.FREE_PARTICLE_P:
            (k,) = t.modes
            n[p(k), p(k)] += 2 * c
        elif t.kind is TermKind.SINGLE_MODE_SQUEEZE:
            (k,) = t.modes
            n[x(k), p(k)] += c
            n[p(k), x(k)] += c
        elif t.kind is TermKind.SQUEEZE_BEAM_SPLITTER:
            a, b = t.modes
            n[x(a), p(b)] += c
            n[p(b), x(a)] += c
        elif t.kind is TermKind.BEAM_SPLITTER_XP:
            a, b = t.modes
            n[x(a), p(b)] += c
            n[p(b), x(a)] += c
            n[x(b), p(a)] -= c
            n[p(a), x(b)] -= c
        elif t.kind is TermKind.BEAM_SPLITTER_XXPP:
            a, b = t.modes
            n[x(a), x(b)] += c
            n[x(b), x(a)] += c
            n[p(a), p(b)] += c
            n[p(b), p(a)] += c
        elif t.kind is TermKind.POSITION_COUPLING:
            a, b = t.modes
            n[x(a), x(b)] += c
            n[x(b), x(a)] += c
        elif t.kind is TermKind.MOMENTUM_COUPLING:
            a, b = t.modes
            n[p(a), p(b)] += c
            n[p(b), p(a)] += c
    return n


def _fmt_eig(lam: complex) -> str:
    if lam.imag == 0:
        return f"{lam.real:.6g}"
    if lam.real == 0:
        return f"{lam.imag:.6g}i"
    return f"{lam.real:.6g}{'+' if lam.imag >= 0 else '-'}{abs(lam.imag):.6g}i"


def _verdict(blocks) -> tuple[Verdict, tuple[str, ...]]:
    reasons = []
    stable = True
    zero_modes = False
    for b in blocks:
        if b.case == 6 and b.rank == 1:
            continue
        stable = False
        if b.case == 4 and b.rank == 1:
            zero_modes = True
            continue
        lam = _fmt_eig(b.eigenvalue)
        if b.case in (1, 2):
            msg = f"case {b.case} block at {lam}: exponential growth rate {b.exp_rate:.6g}"
            if b.rank > 1:
                msg += f", polynomial order {b.poly_order}"
        else:
            msg = f"case {b.case} block at {lam}: polynomial growth order {b.poly_order}"
        reasons.append(msg)
    if stable:
        return Verdict.STABLE, ()
    if not reasons and zero_modes:
        return Verdict.MARGINAL, ("zero-frequency modes present (bounded, non-oscillatory)",)
    if zero_modes:
        reasons.append("zero-frequency modes present")
    return Verdict.UNSTABLE, tuple(reasons)


def _finish_report(m, k, spectrum, units, cfg: Config) -> NormalFormReport:
    n_modes = k.shape[0] // 2
    units = sorted(units, key=_unit_sort_key)
    transform = assemble_transform(units, n_modes, cfg)
    blocks = expected_blocks(units)
    kn_expected = expected_kn(blocks, n_modes)
    t = transform.matrix
    kn_actual = similarity(k, t, cfg)
    cond = np.linalg.cond(t)
    block_residual = maxnorm(kn_actual - kn_expected)
    budget = cfg.verify_tol * (1.0 + maxnorm(k)) * max(1.0, cond)
    if block_residual > budget:
        raise VerificationError(
            f"normal form mismatch: |T^-1 K T - expected| = {block_residual:.3e} "
            f"exceeds {budget:.3e}",
            residual=kn_actual - kn_expected,
        )
    n_matrix = t.T @ m @ t
    n_matrix = (n_matrix + n_matrix.T) / 2.0
    j = symplectic_form(n_modes)
    terms, zero_modes = emit_terms(blocks, transform.layout)
    verdict, reasons = _verdict(blocks)
    residuals = {
        "symplectic": symplectic_residual(t),
        "block_match": block_residual,
        "n_reconstruction": maxnorm(n_matrix - (-j @ kn_expected)),
        "condition": float(cond),
    }
    return NormalFormReport(
        n_modes=n_modes,
        spectrum=spectrum,
        transform=transform,
        k_normal=kn_actual,
        n_matrix=n_matrix,
        blocks=blocks,
        terms=terms,
        verdict=verdict,
        reasons=reasons,
        zero_frequency_modes=zero_modes,
        residuals=residuals,
    )


def _bogoliubov_applicable(spectrum: SpectrumReport) -> bool:
    return all(
        c.kind is EigenvalueKind.IMAGINARY_PAIR and c.geometric == c.algebraic
        for c in spectrum.classes
    )


def bogoliubov_transform(m, cfg: Config = DEFAULT, spectrum: SpectrumReport | None = None):
    """Fast diagonalization path for K diagonalizable with imaginary spectrum.

    Under this precondition the Hamiltonian is a sum of independent
    harmonic oscillators: N = T^T M T is diagonal with paired entries
    (the K_N it induces is in real Jordan form, not diagonal).  Raises
    ``WrongPathError`` when any other eigenvalue family is present or
    any eigenvalue is defective.
    """
    m = np.asarray(m, dtype=float)
    k = build_eom(m, cfg)
    if spectrum is None:
        spectrum = classify_spectrum(k, cfg=cfg)
    if not _bogoliubov_applicable(spectrum):
        raise WrongPathError(
            "spectrum is not diagonalizable-imaginary; use the general pipeline"
        )
    units = []
    for cls in spectrum.classes:
        lam = cls.representative
        shift = k - lam * np.eye(k.shape[0])
        vecs = _nullspace(shift, cfg)
        if vecs.shape[1] != cls.algebraic:
            raise WrongPathError(
                f"eigenspace of {lam:.6g} has dimension {vecs.shape[1]}, "
                f"expected {cls.algebraic}"
            )
        for e, sigma in bogoliubov_orthonormalize(k, lam, vecs.T, cfg):
            unit = _Unit(
                case=6,
                eigenvalue=lam,
                rank=1,
                sigma=sigma,
                t_cols=[SQRT2 * np.real(e)],
                s_cols=[float(np.real(1j * sigma)) * SQRT2 * np.imag(e)],
            )
            units.append(unit)
    return _finish_report(m, k, spectrum, units, cfg)


def _attempt_normal_form(m, k, cfg: Config, fast_path: bool) -> NormalFormReport:
    spectrum = classify_spectrum(k, cfg=cfg)
    if fast_path and _bogoliubov_applicable(spectrum):
        return bogoliubov_transform(m, cfg, spectrum)

    units: list[_Unit] = []
    for cls in spectrum.classes:
        chains = assign_cases(extract_class_chains(k, cls, cfg))
        kind = cls.kind
        if kind in (EigenvalueKind.REAL_PAIR, EigenvalueKind.COMPLEX_QUADRUPLET):
            case = 1 if kind is EigenvalueKind.REAL_PAIR else 2
            pairs = orthonormalize_real_complex(
                k, cls.representative, chains.chains, chains.partners, cfg
            )
            units.extend(build_case_columns(case, k, pair, cfg) for pair in pairs)
        elif kind is EigenvalueKind.ZERO:
            case3, case4 = orthonormalize_zero(k, chains.chains, cfg)
            units.extend(build_case_columns(3, k, item, cfg) for item in case3)
            units.extend(
                build_case_columns(4, k, pair, cfg)
                for pair in zero_odd_pairing(k, case4, cfg)
            )
        else:
            for chain, sigma in orthonormalize_imaginary(
                k, cls.representative, chains.chains, cfg
            ):
                case = 5 if chain.rank % 2 == 0 else 6
                units.append(build_case_columns(case, k, (chain, sigma), cfg))
    return _finish_report(m, k, spectrum, units, cfg)


def normal_form(m, cfg: Config = DEFAULT, fast_path: bool = True) -> NormalFormReport:
    """Full pipeline: spectrum, chains, orthonormalization, T, blocks, verdict.

    The Bogoliubov fast path is taken automatically when the spectrum is
    purely imaginary and diagonalizable (disable with
    ``fast_path=False`` to force the general construction).

    A defective eigenvalue of rank D splits under round-off like
    eps^(1/D), which no fixed clustering radius can absorb for every D.
    When the spectral stage fails structurally at the configured
    tolerance, it is retried with the clustering and rank thresholds
    widened tenfold, up to four times; the first consistent structure
    wins.  Clean spectra never trigger the escalation.
    """
    from dataclasses import replace

    from .errors import PipelineError

    m = np.asarray(m, dtype=float)
    k = build_eom(m, cfg)
    last: Exception | None = None
    tol = cfg.clustering_tol
    for _ in range(5):
        attempt_cfg = replace(
            cfg, clustering_tol=tol, rank_tol=max(cfg.rank_tol, tol)
        )
        try:
            return _attempt_normal_form(m, k, attempt_cfg, fast_path)
        except (PipelineError, VerificationError) as exc:
            last = exc
            tol *= 10.0
    raise last
