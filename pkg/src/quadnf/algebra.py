"""Truncated polynomial algebra and generalized symplectic orthonormalization.

For an eigenvalue lam of the equation-of-motion matrix K, matrices of
the form ``Phi = sum_k phi_k (K - lam I)^(k-1)`` form a commutative
algebra under coefficient convolution (the shift ``K - lam I`` is
nilpotent on the generalized eigenspace).  The generalized symplectic
Gram form ``Omega(x, y)`` with coefficients
``omega_k = ((K - lam I)^(D-k) x)^T J y`` lives in the same algebra and
generalizes the symplectic inner product ``alpha`` (its leading
coefficient).

Orthonormalizing the Jordan chains against this form is what makes the
normal-form columns symplectic.  Each eigenvalue family gets its own
routine below; all of them share the pattern pivot / normalize /
square-root / deflate, with the degenerate-pivot superposition fixes
for the zero and imaginary families, the f/h pairing for odd-rank zero
chains, and the plain Bogoliubov Gram-Schmidt for the diagonalizable
imaginary case.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Config, maxnorm
from .errors import ContractViolationError, NondegeneracyError
from .spectrum import JordanChain, make_chain

__all__ = [
    "NilpotentPoly",
    "identity_poly",
    "poly_product",
    "poly_sqrt",
    "poly_inverse",
    "poly_star",
    "apply_poly",
    "omega",
    "alpha",
    "orthonormalize_real_complex",
    "orthonormalize_zero",
    "zero_odd_pairing",
    "orthonormalize_imaginary",
    "bogoliubov_orthonormalize",
]


@dataclass(frozen=True)
class NilpotentPoly:
    """Coefficient vector of ``sum_k coef[k-1] (K - eigenvalue I)^(k-1)``."""

    eigenvalue: complex
    coef: tuple

    def __post_init__(self):
        object.__setattr__(self, "coef", tuple(complex(c) for c in self.coef))

    @property
    def rank_bound(self) -> int:
        return len(self.coef)

    @property
    def leading(self) -> complex:
        return self.coef[0]

    def array(self) -> np.ndarray:
        return np.array(self.coef, dtype=complex)


def identity_poly(lam: complex, d: int) -> NilpotentPoly:
    return NilpotentPoly(lam, (1.0,) + (0.0,) * (d - 1))


def _check_compatible(a: NilpotentPoly, b: NilpotentPoly):
    if a.eigenvalue != b.eigenvalue:
        raise ContractViolationError(
            f"polynomial eigenvalues differ: {a.eigenvalue} vs {b.eigenvalue}"
        )
    if a.rank_bound != b.rank_bound:
        raise ContractViolationError(
            f"polynomial lengths differ: {a.rank_bound} vs {b.rank_bound}"
        )


def poly_product(a: NilpotentPoly, b: NilpotentPoly) -> NilpotentPoly:
    """Product in the truncated algebra: coefficient convolution."""
    _check_compatible(a, b)
    d = a.rank_bound
    pa, pb = a.array(), b.array()
    out = np.zeros(d, dtype=complex)
    for k in range(d):
        out[k] = np.dot(pa[: k + 1], pb[k::-1])
    return NilpotentPoly(a.eigenvalue, out)


def poly_sqrt(w: NilpotentPoly) -> NilpotentPoly:
    """Square root in the algebra, solved coefficient by coefficient.

    The leading coefficient takes the principal complex square root;
    the rest follow from the convolution recursion.  Requires an
    invertible leading coefficient.
    """
    if w.leading == 0:
        raise NondegeneracyError("cannot take the square root of a nilpotent element")
    d = w.rank_bound
    cw = w.array()
    phi = np.zeros(d, dtype=complex)
    phi[0] = np.sqrt(complex(cw[0]))
    for k in range(1, d):
        conv = np.dot(phi[1:k], phi[k - 1:0:-1]) if k >= 2 else 0.0
        phi[k] = (cw[k] - conv) / (2.0 * phi[0])
    return NilpotentPoly(w.eigenvalue, phi)


def poly_inverse(p: NilpotentPoly) -> NilpotentPoly:
    """Multiplicative inverse in the algebra (leading coefficient nonzero)."""
    if p.leading == 0:
        raise NondegeneracyError("polynomial with vanishing leading coefficient is singular")
    d = p.rank_bound
    cp = p.array()
    q = np.zeros(d, dtype=complex)
    q[0] = 1.0 / cp[0]
    for k in range(1, d):
        q[k] = -np.dot(cp[1: k + 1], q[k - 1:: -1]) / cp[0]
    return NilpotentPoly(p.eigenvalue, q)


def poly_star(p: NilpotentPoly) -> NilpotentPoly:
    """Adjoint under the symplectic pairing: alternate signs, and
    conjugate the coefficients iff the eigenvalue is purely imaginary
    and nonzero."""
    lam = complex(p.eigenvalue)
    conj = lam.real == 0 and lam != 0
    coef = p.array()
    if conj:
        coef = coef.conj()
    signs = np.array([(-1.0) ** k for k in range(p.rank_bound)])
    return NilpotentPoly(p.eigenvalue, coef * signs)


def _rebase(p: NilpotentPoly, lam: complex) -> NilpotentPoly:
    """Same coefficients, evaluated at a different eigenvalue."""
    return NilpotentPoly(lam, p.coef)


def apply_poly(p: NilpotentPoly, k, x: np.ndarray) -> np.ndarray:
    """Evaluate ``p`` as a matrix polynomial in (K - lam I) acting on x.

    Powers are accumulated by repeated application, never by explicit
    matrix powers.
    """
    k = np.asarray(k)
    lam = complex(p.eigenvalue)
    real = lam.imag == 0 and not np.iscomplexobj(x) and all(c.imag == 0 for c in p.coef)
    shift = k - lam * np.eye(k.shape[0])
    if real:
        shift = shift.real
        coefs = [c.real for c in p.coef]
    else:
        coefs = list(p.coef)
    acc = coefs[0] * x
    vec = x
    for c in coefs[1:]:
        vec = shift @ vec
        acc = acc + c * vec
    return acc


def _chain_down(k, lam: complex, x: np.ndarray, depth: int) -> list[np.ndarray]:
    """[x, Ax, ..., A^(depth-1) x] for A = K - lam I."""
    k = np.asarray(k)
    shift = k - lam * np.eye(k.shape[0])
    if lam.imag == 0 and not np.iscomplexobj(x):
        shift = shift.real
    out = [x]
    for _ in range(depth - 1):
        out.append(shift @ out[-1])
    return out


def _form_product(x: np.ndarray, y: np.ndarray) -> complex:
    n = x.shape[0] // 2
    return complex(x[:n] @ y[n:] - x[n:] @ y[:n])


def omega(k, lam: complex, x: np.ndarray, y: np.ndarray, rank: int) -> NilpotentPoly:
    """Generalized symplectic Gram form of x against y at eigenvalue lam.

    ``omega_k = ((K - lam I)^(rank-k) x)^T J y`` for k = 1..rank.  The
    rank is that of the pivot chain driving the computation; powers at
    or beyond the actual rank of x vanish, so a longer rank only pads
    leading zeros.
    """
    down = _chain_down(k, lam, x, rank)
    coefs = [_form_product(down[rank - kk], y) for kk in range(1, rank + 1)]
    return NilpotentPoly(lam, coefs)


def alpha(k, lam: complex, x: np.ndarray, y: np.ndarray, rank: int) -> complex:
    """Leading Gram coefficient ((K - lam I)^(rank-1) x)^T J y."""
    down = _chain_down(k, lam, x, rank)
    return _form_product(down[rank - 1], y)


def _alpha_threshold(cfg: Config, x: np.ndarray, y: np.ndarray) -> float:
    return cfg.alpha_tol * (1.0 + maxnorm(x)) * (1.0 + maxnorm(y))


def _unit(v: np.ndarray) -> np.ndarray:
    nrm = np.linalg.norm(v)
    return v / nrm if nrm > 0 else v


def orthonormalize_real_complex(
    k,
    lam: complex,
    chains: list[JordanChain],
    partners: list[JordanChain],
    cfg: Config = DEFAULT,
):
    """Symplectic orthonormalization for a real pair or complex quadruplet.

    Transforms generators g (at lam) and partner generators (at -lam)
    into e, e~ with Omega(e_j, e~_j') = delta_jj' * identity.  Pivot
    pairs are chosen among equal-rank chains, descending rank first,
    then by largest pairing magnitude (the Gram pairing between the
    generalized eigenspaces of lam and -lam is nondegenerate, so a
    usable pivot always exists in exact arithmetic).

    Returns a list of (chain, partner_chain) in descending rank order.
    """
    k = np.asarray(k, dtype=float)
    work = [(c.generator.copy(), c.rank) for c in chains]
    work_p = [(c.generator.copy(), c.rank) for c in partners]
    done: list[tuple[JordanChain, JordanChain]] = []

    while work:
        ranks = sorted({r for _, r in work}, reverse=True)
        best = None
        for r in ranks:
            for i, (g, rg) in enumerate(work):
                if rg != r:
                    continue
                for j, (gt, rt) in enumerate(work_p):
                    if rt != r:
                        continue
                    a = alpha(k, lam, g, gt, r)
                    if best is None or abs(a) > abs(best[0]):
                        best = (a, i, j, r)
            if best is not None and abs(best[0]) > _alpha_threshold(
                cfg, work[best[1]][0], work_p[best[2]][0]
            ):
                break
            best = None
        if best is None:
            raise NondegeneracyError(
                f"no nonvanishing chain pairing left for eigenvalue {lam:.6g}"
            )
        a, i, j, r = best
        g, _ = work.pop(i)
        gt, _ = work_p.pop(j)
        gt = gt / a
        w = omega(k, lam, g, gt, r)
        phi = poly_sqrt(w)
        e_vec = apply_poly(poly_inverse(phi), k, g)
        et_vec = apply_poly(_rebase(poly_inverse(poly_star(phi)), -lam), k, gt)
        done.append((make_chain(k, lam, e_vec, r), make_chain(k, -lam, et_vec, r)))

        for idx, (g_o, r_o) in enumerate(work):
            w_o = omega(k, lam, g_o, et_vec, r)
            g_new = _unit(g_o - apply_poly(w_o, k, e_vec))
            work[idx] = (g_new, r_o)
        for idx, (gt_o, r_o) in enumerate(work_p):
            w_o = poly_star(omega(k, lam, e_vec, gt_o, r))
            gt_new = _unit(gt_o - apply_poly(_rebase(w_o, -lam), k, et_vec))
            work_p[idx] = (gt_new, r_o)

    done.sort(key=lambda pair: -pair[0].rank)
    return done


def orthonormalize_zero(k, chains: list[JordanChain], cfg: Config = DEFAULT):
    """Symplectic orthonormalization of the zero-eigenvalue chains.

    Even-rank chains (case 3) are normalized to Omega(e_j, e_j) =
    sigma_j * identity with sigma_j = +-1 and mutually orthogonal Gram
    pairings, including against the odd-rank chains.  When every
    remaining even-rank chain has a vanishing self-pairing, equal-rank
    pairs are recombined as g +- g' (which cannot all vanish, by
    nondegeneracy) and the loop continues.  Odd-rank chains (case 4,
    self-pairing identically zero) are deflated against the case-3
    pivots and returned untouched for ``zero_odd_pairing``.

    Returns ``(case3, case4)`` where case3 is a list of (chain, sigma)
    in descending rank order and case4 the list of remaining chains.
    """
    k = np.asarray(k, dtype=float)
    work = [(c.generator.copy().astype(float), c.rank) for c in chains]
    case3: list[tuple[JordanChain, int]] = []

    while any(r % 2 == 0 for _, r in work):
        best = None
        ranks = sorted({r for _, r in work if r % 2 == 0}, reverse=True)
        for r in ranks:
            for i, (g, rg) in enumerate(work):
                if rg != r:
                    continue
                a = alpha(k, 0.0, g, g, r).real
                if abs(a) > _alpha_threshold(cfg, g, g):
                    if best is None or abs(a) > abs(best[0]):
                        best = (a, i, r)
            if best is not None:
                break
        if best is None:
            _zero_superposition_fix(k, work, cfg)
            continue
        a, i, r = best
        g, _ = work.pop(i)
        sigma = 1 if a > 0 else -1
        w = omega(k, 0.0, g, g, r)
        phi = poly_sqrt(NilpotentPoly(0.0, sigma * w.array()))
        e_vec = apply_poly(poly_inverse(phi), k, g).real
        case3.append((make_chain(k, 0.0, e_vec, r), sigma))
        for idx, (g_o, r_o) in enumerate(work):
            w_o = poly_star(omega(k, 0.0, e_vec, g_o, r))
            g_new = _unit(g_o - sigma * apply_poly(w_o, k, e_vec).real)
            work[idx] = (g_new, r_o)

    case3.sort(key=lambda pair: -pair[0].rank)
    case4 = [make_chain(k, 0.0, g, r) for g, r in work]
    case4.sort(key=lambda c: -c.rank)
    return case3, case4


def _zero_superposition_fix(k, work, cfg: Config):
    """Recombine one equal-rank pair of stuck even-rank zero chains."""
    best = None
    ranks = sorted({r for _, r in work if r % 2 == 0}, reverse=True)
    for r in ranks:
        idxs = [i for i, (_, rg) in enumerate(work) if rg == r]
        for ii, i in enumerate(idxs):
            for j in idxs[ii + 1:]:
                a = alpha(k, 0.0, work[i][0], work[j][0], r).real
                if abs(a) > _alpha_threshold(cfg, work[i][0], work[j][0]):
                    if best is None or abs(a) > abs(best[0]):
                        best = (a, i, j, r)
        if best is not None:
            break
    if best is None:
        raise NondegeneracyError(
            "even-rank zero chains have a fully degenerate Gram pairing"
        )
    _, i, j, _ = best
    gi, r = work[i]
    gj, _ = work[j]
    work[i] = (_unit(gi + gj), r)
    work[j] = (_unit(gi - gj), r)


def zero_odd_pairing(k, chains: list[JordanChain], cfg: Config = DEFAULT):
    """Pair odd-rank zero chains into (f, h) with Omega(f, h) = identity.

    The 2n chains of case 4 are combined pairwise (equal ranks, largest
    pairing first) into f/h pairs with ``Omega(f, f) = Omega(h, h) = 0``
    and ``Omega(f_j, h_j') = delta_jj' * identity``.  The quadratic
    correction ``Omega(e1,e1) - 2 Psi - Psi^2 Omega(e2,e2) = 0`` is
    solved coefficient-recursively, and the final
    ``h = e2 - Omega(e2,e2) f / 2`` step zeroes the self-pairing of h.

    Returns a list of (f_chain, h_chain) in descending rank order.
    """
    k = np.asarray(k, dtype=float)
    if len(chains) % 2 != 0:
        raise NondegeneracyError(
            f"odd-rank zero chains must come in pairs, got {len(chains)}"
        )
    work = [(c.generator.copy().astype(float), c.rank) for c in chains]
    pairs: list[tuple[JordanChain, JordanChain]] = []

    while work:
        best = None
        ranks = sorted({r for _, r in work}, reverse=True)
        for r in ranks:
            idxs = [i for i, (_, rg) in enumerate(work) if rg == r]
            for ii, i in enumerate(idxs):
                for j in idxs[ii + 1:]:
                    a = alpha(k, 0.0, work[i][0], work[j][0], r).real
                    if abs(a) > _alpha_threshold(cfg, work[i][0], work[j][0]):
                        if best is None or abs(a) > abs(best[0]):
                            best = (a, i, j, r)
            if best is not None:
                break
        if best is None:
            raise NondegeneracyError(
                "no odd-rank zero chain pair with a nonzero Gram pairing"
            )
        a, i, j, r = best
        e1 = work[i][0]
        e2 = work[j][0] / a
        work = [w for idx, w in enumerate(work) if idx not in (i, j)]

        w12 = omega(k, 0.0, e1, e2, r)
        phi = poly_sqrt(w12)
        e1 = apply_poly(poly_inverse(phi), k, e1).real
        e2 = apply_poly(poly_inverse(poly_star(phi)), k, e2).real

        a11 = omega(k, 0.0, e1, e1, r)
        a22 = omega(k, 0.0, e2, e2, r)
        psi = _solve_quadratic_correction(a11, a22)
        f = e1 + apply_poly(psi, k, e2).real

        w_f2 = omega(k, 0.0, f, e2, r)
        phi2 = poly_sqrt(w_f2)
        f = apply_poly(poly_inverse(phi2), k, f).real
        e2 = apply_poly(poly_inverse(poly_star(phi2)), k, e2).real

        b22 = omega(k, 0.0, e2, e2, r)
        h = e2 - 0.5 * apply_poly(b22, k, f).real

        for idx, (g_o, r_o) in enumerate(work):
            corr = apply_poly(poly_star(omega(k, 0.0, h, g_o, r)), k, f).real
            corr = corr - apply_poly(poly_star(omega(k, 0.0, f, g_o, r)), k, h).real
            work[idx] = (_unit(g_o + corr), r_o)
        pairs.append((make_chain(k, 0.0, f, r), make_chain(k, 0.0, h, r)))

    pairs.sort(key=lambda pair: -pair[0].rank)
    return pairs


def _solve_quadratic_correction(a11: NilpotentPoly, a22: NilpotentPoly) -> NilpotentPoly:
    """Solve A - 2 Psi - Psi^2 B = 0 recursively (A, B have zero leading)."""
    d = a11.rank_bound
    ca, cb = a11.array(), a22.array()
    psi = np.zeros(d, dtype=complex)
    psi[0] = ca[0] / 2.0
    for kk in range(1, d):
        p = NilpotentPoly(0.0, psi)
        sq = poly_product(poly_product(p, p), NilpotentPoly(0.0, cb)).array()
        psi[kk] = (ca[kk] - sq[kk]) / 2.0
    return NilpotentPoly(0.0, psi)


def orthonormalize_imaginary(
    k,
    lam: complex,
    chains: list[JordanChain],
    cfg: Config = DEFAULT,
):
    """Symplectic orthonormalization for an imaginary pair.

    Conjugate partners are implicit (the chains at conj(lam) are the
    exact conjugates).  Produces e_j with Omega(e_j, conj(e_j')) =
    delta_jj' sigma_j where sigma_j = +-1 for even rank (case 5) and
    +-i for odd rank (case 6).  Stuck chains (vanishing self-pairing)
    are recombined pairwise like in the zero case, using the real part
    of the cross pairing for even ranks and the imaginary part for odd
    ranks.

    Returns a list of (chain, sigma) in descending rank order.
    """
    k = np.asarray(k, dtype=float)
    work = [(c.generator.copy().astype(complex), c.rank) for c in chains]
    done: list[tuple[JordanChain, complex]] = []

    while work:
        best = None
        ranks = sorted({r for _, r in work}, reverse=True)
        for r in ranks:
            for i, (g, rg) in enumerate(work):
                if rg != r:
                    continue
                a = alpha(k, lam, g, g.conj(), r)
                useful = abs(a.real) if r % 2 == 0 else abs(a.imag)
                if useful > _alpha_threshold(cfg, g, g):
                    if best is None or useful > abs(best[0]):
                        key = a.real if r % 2 == 0 else a.imag
                        best = (key, a, i, r)
            if best is not None:
                break
        if best is None:
            _imaginary_superposition_fix(k, lam, work, cfg)
            continue
        key, a, i, r = best
        g, _ = work.pop(i)
        sigma = complex(np.sign(key)) if r % 2 == 0 else 1j * np.sign(key)
        w = omega(k, lam, g, g.conj(), r)
        phi = poly_sqrt(NilpotentPoly(lam, sigma * w.array()))
        e_vec = apply_poly(poly_inverse(phi), k, g)
        done.append((make_chain(k, lam, e_vec, r), sigma))
        for idx, (g_o, r_o) in enumerate(work):
            w_o = poly_star(omega(k, lam, e_vec, g_o.conj(), r))
            g_new = _unit(g_o - sigma * apply_poly(w_o, k, e_vec))
            work[idx] = (g_new, r_o)

    done.sort(key=lambda pair: -pair[0].rank)
    return done


def _imaginary_superposition_fix(k, lam, work, cfg: Config):
    """Recombine one equal-rank pair of stuck imaginary chains."""
    best = None
    ranks = sorted({r for _, r in work}, reverse=True)
    for r in ranks:
        idxs = [i for i, (_, rg) in enumerate(work) if rg == r]
        for ii, i in enumerate(idxs):
            for j in idxs[ii + 1:]:
                a = alpha(k, lam, work[i][0], work[j][0].conj(), r)
                useful = abs(a.real) if r % 2 == 0 else abs(a.imag)
                if useful > _alpha_threshold(cfg, work[i][0], work[j][0]):
                    if best is None or useful > best[0]:
                        best = (useful, i, j, r)
        if best is not None:
            break
    if best is None:
        raise NondegeneracyError(
            f"imaginary chains at {lam:.6g} have a fully degenerate Gram pairing"
        )
    _, i, j, _ = best
    gi, r = work[i]
    gj, _ = work[j]
    work[i] = (_unit(gi + gj), r)
    work[j] = (_unit(gi - gj), r)


def bogoliubov_orthonormalize(k, lam: complex, vectors, cfg: Config = DEFAULT):
    """Gram-Schmidt for the diagonalizable purely-imaginary case.

    Here every chain has rank one, the Gram form collapses to
    ``alpha(x, conj(y)) = x^T J conj(y)`` (purely imaginary on the
    diagonal), and the orthonormalization reduces to a scaling
    ``e = g / sqrt(-sigma alpha(g, conj(g)))`` plus deflation.  The
    superposition recombination handles vanishing self-pairings.

    Returns a list of (eigenvector, sigma) with sigma = +-i.
    """
    k = np.asarray(k, dtype=float)
    work = [_unit(np.asarray(v, dtype=complex)) for v in vectors]
    done: list[tuple[np.ndarray, complex]] = []

    while work:
        best = None
        for i, g in enumerate(work):
            a = _form_product(g, g.conj())
            if abs(a.imag) > _alpha_threshold(cfg, g, g):
                if best is None or abs(a.imag) > abs(best[0]):
                    best = (a.imag, a, i)
        if best is None:
            pair = None
            for i in range(len(work)):
                for j in range(i + 1, len(work)):
                    a = _form_product(work[i], work[j].conj())
                    if abs(a.imag) > _alpha_threshold(cfg, work[i], work[j]):
                        if pair is None or abs(a.imag) > pair[0]:
                            pair = (abs(a.imag), i, j)
            if pair is None:
                raise NondegeneracyError(
                    f"eigenvectors at {lam:.6g} have a fully degenerate pairing"
                )
            _, i, j = pair
            gi, gj = work[i], work[j]
            work[i] = _unit(gi + gj)
            work[j] = _unit(gi - gj)
            continue
        key, a, i = best
        g = work.pop(i)
        sigma = 1j * np.sign(key)
        e = g / np.sqrt((-sigma * a).real)
        done.append((e, sigma))
        for idx, g_o in enumerate(work):
            a_o = _form_product(e, g_o.conj())
            work[idx] = _unit(g_o - sigma * np.conj(a_o) * e)
    return done
