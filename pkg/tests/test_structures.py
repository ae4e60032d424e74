"""End-to-end recovery of planted Jordan structures.

Each case builds K_N for a prescribed set of blocks, hides it behind a
random symplectic conjugation, and checks that the pipeline recovers
exactly the planted (case, eigenvalue, rank, sigma) data with tight
residuals.  This exercises every orthonormalization branch, the
filtration, the tolerance ladder for defective eigenvalues, and the
column recipes in one sweep.
"""

import numpy as np
import pytest

from conftest import seeded_matrix
from quadnf import Verdict, build_eom, normal_form, symplectic_form, terms_matrix
from quadnf.normal_form import expected_kn

STRUCTURES = [
    ("real pair rank 3", [(1, 1.5 + 0j, 3, None)]),
    ("quadruplet rank 2", [(2, 0.7 + 1.1j, 2, None)]),
    ("zero even rank 4", [(3, 0j, 4, -1 + 0j)]),
    ("zero even rank 2", [(3, 0j, 2, 1 + 0j)]),
    ("zero odd pair rank 3", [(4, 0j, 3, None)]),
    ("imaginary even rank 4", [(5, 2.3j, 4, 1 + 0j)]),
    ("imaginary even rank 2", [(5, 1.1j, 2, -1 + 0j)]),
    ("imaginary odd rank 3, +i", [(6, 1.7j, 3, 1j)]),
    ("imaginary odd rank 3, -i", [(6, 1.7j, 3, -1j)]),
    ("real pair mixed ranks", [(1, 2.0 + 0j, 2, None), (1, 2.0 + 0j, 1, None)]),
    ("two real pairs", [(1, 3.0 + 0j, 1, None), (1, 1.0 + 0j, 2, None)]),
    ("mixed parity imaginary", [(5, 1.5j, 2, 1 + 0j), (6, 1.5j, 1, -1j)]),
    ("zero even plus odd", [(3, 0j, 2, 1 + 0j), (4, 0j, 1, None)]),
    ("opposite oscillators", [(6, 1.0j, 1, -1j), (6, 1.0j, 1, 1j)]),
    ("real + zero + imaginary", [(1, 2.0 + 0j, 2, None), (3, 0j, 2, -1 + 0j), (6, 3.0j, 1, -1j)]),
    ("two zero pairs", [(4, 0j, 1, None), (4, 0j, 1, None)]),
    ("quadruplet + imaginary", [(2, 0.5 + 0.8j, 1, None), (6, 2.0j, 1, -1j)]),
    ("degenerate quadruplet", [(2, 0.7 + 1.1j, 1, None), (2, 0.7 + 1.1j, 1, None)]),
    ("equal real chains", [(1, 1.0 + 0j, 2, None), (1, 1.0 + 0j, 2, None)]),
    ("opposite zero signs", [(3, 0j, 2, 1 + 0j), (3, 0j, 2, -1 + 0j)]),
    ("opposite imaginary signs", [(5, 1.2j, 2, 1 + 0j), (5, 1.2j, 2, -1 + 0j)]),
]


def normalize(spec):
    case, lam, rank, sigma = spec
    return (
        case,
        complex(np.round(complex(lam), 4)),
        rank,
        None if sigma is None else complex(np.round(complex(sigma), 4)),
    )


@pytest.mark.parametrize("label,specs", STRUCTURES, ids=[s[0] for s in STRUCTURES])
def test_planted_structure_recovered(label, specs, rng):
    m, _ = seeded_matrix(specs, rng)
    rep = normal_form(m)
    got = [
        normalize((b.case, b.eigenvalue, b.rank, b.sigma)) for b in rep.blocks
    ]
    want = sorted((normalize(s) for s in specs),
                  key=lambda s: (s[0], -abs(s[1]), -s[1].imag, -s[2],
                                 -(s[3] or 0j).real, -(s[3] or 0j).imag))
    assert got == want

    n_modes = rep.n_modes
    j = symplectic_form(n_modes)
    t = rep.transform.matrix
    assert np.max(np.abs(t @ j @ t.T - j)) <= 1e-8 * (1 + np.max(np.abs(t)) ** 2)
    kn = expected_kn(rep.blocks, n_modes)
    assert np.max(np.abs(rep.k_normal - kn)) <= 1e-6
    assert np.max(np.abs(terms_matrix(rep.terms, n_modes) - (-j @ kn))) < 1e-10

    k = build_eom(m)
    has_growth = any(
        b.case in (1, 2) or b.rank > 1 for b in rep.blocks
    )
    zero_modes = any(b.case == 4 and b.rank == 1 for b in rep.blocks)
    if has_growth:
        assert rep.verdict is Verdict.UNSTABLE
    elif zero_modes:
        assert rep.verdict is Verdict.MARGINAL
    else:
        assert rep.verdict is Verdict.STABLE
