import numpy as np
import pytest

from conftest import (
    GOLDEN_E11,
    GOLDEN_E11T,
    GOLDEN_E21,
    GOLDEN_F01,
    GOLDEN_H01,
    GOLDEN_M,
    GOLDEN_N,
    GOLDEN_S1,
    GOLDEN_T2,
    seeded_matrix,
    two_mode_m,
)
from quadnf import (
    Verdict,
    WrongPathError,
    bogoliubov_transform,
    build_eom,
    normal_form,
    symplectic_form,
    symplectic_residual,
    terms_matrix,
)
from quadnf.normal_form import (
    TermKind,
    _block_for_unit,
    _Unit,
    build_case_columns,
    expected_kn,
)
from quadnf.spectrum import make_chain


def unit_spec(case, lam, rank, sigma=None):
    return _Unit(case=case, eigenvalue=lam, rank=rank, sigma=sigma, t_cols=[], s_cols=[])


class TestCaseColumns:
    def test_golden_real_pair(self):
        k = build_eom(GOLDEN_M)
        e = make_chain(k, 2.0, GOLDEN_E11, 2)
        et = make_chain(k, -2.0, GOLDEN_E11T, 2)
        unit = build_case_columns(1, k, (e, et))
        assert np.allclose(unit.t_cols[0], GOLDEN_E11, atol=1e-12)
        assert np.allclose(unit.t_cols[1], GOLDEN_T2, atol=1e-12)
        assert np.allclose(unit.s_cols[0], GOLDEN_S1, atol=1e-12)
        assert np.allclose(unit.s_cols[1], GOLDEN_E11T, atol=1e-12)

    def test_golden_zero_pair(self):
        k = build_eom(GOLDEN_M)
        f = make_chain(k, 0.0, GOLDEN_F01, 1)
        h = make_chain(k, 0.0, GOLDEN_H01, 1)
        unit = build_case_columns(4, k, (f, h))
        assert np.allclose(unit.t_cols[0], GOLDEN_F01)
        assert np.allclose(unit.s_cols[0], GOLDEN_H01)

    def test_golden_imaginary(self):
        # sigma = -i: the momentum column is +sqrt(2) Im(e), the sign that
        # makes t^T J s = +1 (and matches the assembled transformation).
        k = build_eom(GOLDEN_M)
        chain = make_chain(k, 3j, GOLDEN_E21, 1)
        unit = build_case_columns(6, k, (chain, -1j))
        t, s = unit.t_cols[0], unit.s_cols[0]
        assert np.allclose(t, np.sqrt(2) * np.real(GOLDEN_E21))
        assert np.allclose(s, np.sqrt(2) * np.imag(GOLDEN_E21))
        j = symplectic_form(4)
        assert abs(t @ j @ s - 1) < 1e-12

    def test_columns_pair_symplectically(self, rng):
        specs_list = [
            [(1, 1.4 + 0j, 3, None)],
            [(2, 0.8 + 1.3j, 2, None)],
            [(3, 0j, 4, -1 + 0j)],
            [(4, 0j, 3, None)],
            [(5, 2.1j, 4, 1 + 0j)],
            [(6, 1.9j, 3, 1j)],
        ]
        for specs in specs_list:
            m, _ = seeded_matrix(specs, rng)
            rep = normal_form(m)
            t = rep.transform.matrix
            n_modes = rep.n_modes
            j = symplectic_form(n_modes)
            assert np.max(np.abs(t @ j @ t.T - j)) < 1e-8

    def test_mode_count_conservation(self, rng):
        specs = [(1, 2.0 + 0j, 2, None), (3, 0j, 2, 1 + 0j), (6, 3.0j, 1, -1j)]
        m, _ = seeded_matrix(specs, rng)
        rep = normal_form(m)
        contrib = {1: lambda d: d, 2: lambda d: 2 * d, 3: lambda d: d // 2,
                   4: lambda d: d, 5: lambda d: d, 6: lambda d: d}
        total = sum(contrib[b.case](b.rank) for b in rep.blocks)
        assert total == rep.n_modes


class TestExpectedBlocks:
    def test_real_pair_rank_two(self):
        b = _block_for_unit(unit_spec(1, 2.0 + 0j, 2))
        assert np.array_equal(b.i_i, [[2, 0], [1, 2]])
        assert not b.i_r.any() and not b.i_l.any()

    def test_imaginary_rank_one(self):
        b = _block_for_unit(unit_spec(6, 3j, 1, -1j))
        assert np.array_equal(b.i_i, [[0]])
        assert np.array_equal(b.i_r, [[3]])
        assert np.array_equal(b.i_l, [[-3]])

    def test_zero_even_rank_two(self):
        b = _block_for_unit(unit_spec(3, 0j, 2, 1 + 0j))
        assert np.array_equal(b.i_i, [[0]])
        assert np.array_equal(b.i_r, [[0]])
        assert np.array_equal(b.i_l, [[-1]])

    def test_quadruplet_rank_one(self):
        b = _block_for_unit(unit_spec(2, 0.5 + 1.5j, 1))
        assert np.array_equal(b.i_i, [[0.5, 1.5], [-1.5, 0.5]])

    def test_block_eigenvalues_match_family(self):
        # assembled block [[I_I, I_R], [I_L, -I_I^T]] must carry the
        # eigenvalue family with the right multiplicities
        cases = [
            (unit_spec(1, 1.5 + 0j, 3), [1.5] * 3 + [-1.5] * 3),
            (unit_spec(3, 0j, 4, -1 + 0j), [0.0] * 4),
            (unit_spec(5, 2.0j, 2, 1 + 0j), [2j, 2j, -2j, -2j]),
            (unit_spec(6, 3.0j, 3, 1j), [3j] * 3 + [-3j] * 3),
            (unit_spec(2, 1.0 + 2.0j, 1), [1 + 2j, 1 - 2j, -1 + 2j, -1 - 2j]),
        ]
        for unit, expected in cases:
            b = _block_for_unit(unit)
            full = np.block([[b.i_i, b.i_r], [b.i_l, -b.i_i.T]])
            # defective eigenvalues shift like eps^(1/D) under eigvals, so
            # compare characteristic polynomials instead
            got = np.poly(full)
            want = np.poly(np.diag(np.array(expected, complex)))
            scale = 1 + np.max(np.abs(want))
            assert np.max(np.abs(got - want)) < 1e-8 * scale

    def test_expected_kn_is_hamiltonian_structured(self):
        units = [unit_spec(1, 2.0 + 0j, 2), unit_spec(4, 0j, 1), unit_spec(6, 3j, 1, -1j)]
        blocks = [_block_for_unit(u) for u in units]
        kn = expected_kn(blocks, 4)
        j = symplectic_form(4)
        assert np.max(np.abs(j @ kn + kn.T @ j)) < 1e-12


class TestEmitTerms:
    def terms_of(self, m):
        return normal_form(m).terms

    def test_golden_terms(self):
        rep = normal_form(GOLDEN_M)
        got = {(t.kind, round(t.coefficient, 8), t.modes) for t in rep.terms}
        assert got == {
            (TermKind.SINGLE_MODE_SQUEEZE, 2.0, (1,)),
            (TermKind.SINGLE_MODE_SQUEEZE, 2.0, (2,)),
            (TermKind.SQUEEZE_BEAM_SPLITTER, 1.0, (1, 2)),
            (TermKind.HARMONIC_OSCILLATOR, 1.5, (4,)),
        }
        assert rep.zero_frequency_modes == 1

    def test_gray_area_terms(self):
        rep = normal_form(two_mode_m(1.0, 2.0))
        kinds = sorted(t.kind.value for t in rep.terms)
        assert kinds == ["harmonic_oscillator", "single_mode_squeeze"]
        squeeze = next(t for t in rep.terms if t.kind is TermKind.SINGLE_MODE_SQUEEZE)
        assert abs(squeeze.coefficient - 1.0) < 1e-8  # lambda = +1
        osc = next(t for t in rep.terms if t.kind is TermKind.HARMONIC_OSCILLATOR)
        assert abs(osc.coefficient - np.sqrt(3) / 2) < 1e-8

    def test_degenerate_imaginary_terms(self):
        eta = -0.5
        lam = np.sqrt((2 * eta**2 - eta**4 - 1) / (4 * eta))
        rep = normal_form(two_mode_m(eta, lam))
        (block,) = rep.blocks
        assert block.case == 5 and block.rank == 2
        s = block.sigma.real
        nu = block.eigenvalue.imag
        got = {(t.kind, round(t.coefficient, 8), t.modes) for t in rep.terms}
        assert got == {
            (TermKind.FREE_PARTICLE_X, round(s / 2, 8), (1,)),
            (TermKind.FREE_PARTICLE_P, round(s / 2, 8), (2,)),
            (TermKind.BEAM_SPLITTER_XXPP, round(s * nu, 8), (1, 2)),
        }

    def test_quadruplet_terms(self):
        rep = normal_form(two_mode_m(-1.0, 0.5))
        (block,) = rep.blocks
        got = {(t.kind, t.modes) for t in rep.terms}
        assert got == {
            (TermKind.SINGLE_MODE_SQUEEZE, (1,)),
            (TermKind.SINGLE_MODE_SQUEEZE, (2,)),
            (TermKind.BEAM_SPLITTER_XP, (2, 1)),
        }
        xp = next(t for t in rep.terms if t.kind is TermKind.BEAM_SPLITTER_XP)
        assert abs(xp.coefficient - block.eigenvalue.imag) < 1e-10

    def test_zero_matrix_has_no_terms(self):
        rep = normal_form(np.zeros((6, 6)))
        assert rep.terms == ()
        assert rep.zero_frequency_modes == 3

    def test_terms_reconstruct_n_matrix(self, rng):
        specs_list = [
            [(1, 1.4 + 0j, 3, None)],
            [(2, 0.8 + 1.3j, 2, None)],
            [(3, 0j, 4, -1 + 0j)],
            [(3, 0j, 2, 1 + 0j), (4, 0j, 1, None)],
            [(4, 0j, 3, None)],
            [(5, 2.1j, 4, 1 + 0j)],
            [(5, 1.1j, 2, -1 + 0j), (6, 1.1j, 1, -1j)],
            [(6, 1.9j, 3, 1j)],
            [(1, 2.0 + 0j, 2, None), (3, 0j, 2, -1 + 0j), (6, 3.0j, 1, -1j)],
        ]
        j_cache = {}
        for specs in specs_list:
            m, _ = seeded_matrix(specs, rng)
            rep = normal_form(m)
            n_modes = rep.n_modes
            j = j_cache.setdefault(n_modes, symplectic_form(n_modes))
            kn = expected_kn(rep.blocks, n_modes)
            rebuilt = terms_matrix(rep.terms, n_modes)
            assert np.max(np.abs(rebuilt - (-j @ kn))) < 1e-10


class TestBogoliubov:
    def test_identity_hamiltonian(self):
        rep = bogoliubov_transform(np.eye(2))
        assert rep.verdict is Verdict.STABLE
        assert np.allclose(rep.n_matrix, np.eye(2), atol=1e-12)
        assert np.allclose(np.abs(rep.transform.matrix), np.eye(2), atol=1e-12)

    def test_two_mode_frequencies(self):
        rep = bogoliubov_transform(two_mode_m(1.0, 0.5))
        # roots of mu^2 - 2 mu + (1 - 1/4): frequencies sqrt(3/2), sqrt(1/2)
        want = np.array([np.sqrt(1.5), np.sqrt(0.5), np.sqrt(1.5), np.sqrt(0.5)])
        assert np.allclose(np.diag(rep.n_matrix), want, atol=1e-10)
        off = rep.n_matrix - np.diag(np.diag(rep.n_matrix))
        assert np.max(np.abs(off)) < 1e-10

    def test_wrong_path_rejected(self):
        with pytest.raises(WrongPathError):
            bogoliubov_transform(GOLDEN_M)
        with pytest.raises(WrongPathError):
            bogoliubov_transform(two_mode_m(1.0, 2.0))

    def test_matches_general_path(self, rng):
        for _ in range(5):
            a = rng.normal(size=(6, 6))
            m = a @ a.T + 0.3 * np.eye(6)
            fast = normal_form(m)
            slow = normal_form(m, fast_path=False)
            assert fast.verdict is slow.verdict is Verdict.STABLE
            for rep in (fast, slow):
                scale = 1 + np.max(np.abs(rep.transform.matrix)) ** 2
                assert rep.residuals["symplectic"] <= 1e-8 * scale
            assert np.allclose(
                np.diag(fast.n_matrix), np.diag(slow.n_matrix), atol=1e-8
            )

    def test_indefinite_oscillators(self):
        # two uncoupled oscillators of opposite energy sign share lambda = i
        m = np.diag([1.0, -1.0, 1.0, -1.0])
        rep = bogoliubov_transform(m)
        assert rep.verdict is Verdict.STABLE
        sigmas = sorted((b.sigma for b in rep.blocks), key=lambda z: z.imag)
        assert sigmas == [-1j, 1j]
        assert np.allclose(sorted(np.diag(rep.n_matrix)), [-1, -1, 1, 1], atol=1e-10)


class TestPipeline:
    def test_golden_full_report(self):
        rep = normal_form(GOLDEN_M)
        assert rep.verdict is Verdict.UNSTABLE
        assert rep.zero_frequency_modes == 1
        t = rep.transform.matrix
        assert symplectic_residual(t) <= 1e-10
        assert np.max(np.abs(rep.n_matrix - GOLDEN_N)) < 1e-8
        cases = [b.case for b in rep.blocks]
        assert cases == [1, 4, 6]
        assert any("exponential growth rate 2" in r for r in rep.reasons)

    def test_zero_matrix_marginal(self):
        rep = normal_form(np.zeros((8, 8)))
        assert rep.verdict is Verdict.MARGINAL
        assert rep.zero_frequency_modes == 4
        assert np.allclose(rep.n_matrix, 0)

    def test_single_oscillator_identity(self):
        rep = normal_form(np.eye(2))
        assert rep.verdict is Verdict.STABLE
        assert np.allclose(rep.n_matrix, np.eye(2), atol=1e-12)

    def test_verdicts_across_regions(self):
        assert normal_form(two_mode_m(1.0, 0.5)).verdict is Verdict.STABLE
        assert normal_form(two_mode_m(1.0, 2.0)).verdict is Verdict.UNSTABLE
        assert normal_form(two_mode_m(-1.0, 0.5)).verdict is Verdict.UNSTABLE
        assert normal_form(two_mode_m(1.0, 1.0)).verdict is Verdict.UNSTABLE
        assert normal_form(two_mode_m(0.0, 0.0)).verdict is Verdict.MARGINAL

    def test_growth_annotations(self):
        rep = normal_form(two_mode_m(1.0, 1.0))  # zero chain of rank 2
        zero_block = next(b for b in rep.blocks if b.case == 3)
        assert zero_block.poly_order == 1
        assert any("polynomial growth order 1" in r for r in rep.reasons)

    def test_block_match_residual_budget(self, rng):
        for _ in range(10):
            n = int(rng.integers(1, 5))
            a = rng.uniform(-3, 3, size=(2 * n, 2 * n))
            m = (a + a.T) / 2
            rep = normal_form(m)
            k = build_eom(m)
            budget = 1e-7 * (1 + np.max(np.abs(k))) * max(1.0, rep.residuals["condition"])
            assert rep.residuals["block_match"] <= budget

    def test_n_matrix_equals_minus_j_kn(self, rng):
        m, _ = seeded_matrix([(1, 1.0 + 0j, 2, None), (6, 2.0j, 1, -1j)], rng)
        rep = normal_form(m)
        j = symplectic_form(rep.n_modes)
        assert np.max(np.abs(rep.n_matrix - (-j @ rep.k_normal))) < 1e-8

    def test_diagonal_hamiltonian_gives_permuted_scaling(self):
        # independent oscillators H = sum (a_i x_i^2 + b_i p_i^2)/2: the
        # canonical transformation is a mode permutation combined with
        # single-mode scalings diag(s, 1/s), s = (b/a)^(1/4)
        m = np.diag([2.0, 8.0, 1.0, 2.0])
        rep = normal_form(m)
        assert rep.verdict is Verdict.STABLE
        t = rep.transform.matrix
        for col in t.T:
            assert np.sum(np.abs(col) > 1e-10) == 1
        assert symplectic_residual(t) < 1e-10
        # frequencies sqrt(a b) in descending order
        assert np.allclose(np.diag(rep.n_matrix), [4.0, np.sqrt(2), 4.0, np.sqrt(2)])
        off = rep.n_matrix - np.diag(np.diag(rep.n_matrix))
        assert np.max(np.abs(off)) < 1e-10

    def test_diagonalizable_case_term_restriction(self, rng):
        # with every chain of rank one only four term shapes can appear
        allowed = {
            TermKind.SINGLE_MODE_SQUEEZE,
            TermKind.BEAM_SPLITTER_XP,
            TermKind.HARMONIC_OSCILLATOR,
        }
        for _ in range(10):
            n = int(rng.integers(1, 5))
            a = rng.uniform(-3, 3, size=(2 * n, 2 * n))
            rep = normal_form((a + a.T) / 2)
            if any(b.rank != 1 for b in rep.blocks):
                continue
            assert all(b.case in (1, 2, 4, 6) for b in rep.blocks)
            assert {t.kind for t in rep.terms} <= allowed

    def test_transform_layout_matches_blocks(self):
        rep = normal_form(GOLDEN_M)
        assert [g.case for g in rep.transform.layout] == [b.case for b in rep.blocks]
        widths = [len(g.modes) for g in rep.transform.layout]
        assert widths == [b.size for b in rep.blocks]
        flat = [m for g in rep.transform.layout for m in g.modes]
        assert flat == list(range(1, rep.n_modes + 1))
