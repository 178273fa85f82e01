import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from metatorsion.intlinalg import (
    IntMatrix,
    abelian_invariants,
    determinant,
    hermite_normal_form,
    l1_row_norms,
    rank,
    smith_normal_form,
    torsion_upper_bound_l1,
    torsion_via_minor_gcd,
)

from oracles import brute_force_quotient

M6 = IntMatrix.from_rows([[2, 0], [0, 3], [2, 3]])


def random_matrix(rng, max_rows=6, max_cols=8, bound=9):
    rows, cols = rng.randint(0, max_rows), rng.randint(1, max_cols)
    return IntMatrix.from_rows(
        [[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)], cols=cols
    )


matrices = st.integers(1, 5).flatmap(
    lambda cols: st.lists(
        st.lists(st.integers(-6, 6), min_size=cols, max_size=cols), min_size=0, max_size=5
    ).map(lambda rows: IntMatrix.from_rows(rows, cols=cols))
)


def test_shape_checks():
    with pytest.raises(ValueError):
        IntMatrix(2, 2, (1, 2, 3))
    with pytest.raises(ValueError):
        IntMatrix.from_rows([[1, 2], [3]])
    with pytest.raises(ValueError):
        IntMatrix.from_rows([])


def test_text_round_trip():
    text = "3 2\n2 0\n0 -3\n2 3\n"
    M = IntMatrix.from_text(text)
    assert M.to_rows() == [[2, 0], [0, -3], [2, 3]]
    assert M.to_text() == text
    assert IntMatrix.from_text("0 4").cols == 4
    with pytest.raises(ValueError, match="2x2"):
        IntMatrix.from_text("2 2\n1 2 3")
    with pytest.raises(ValueError):
        IntMatrix.from_text("1 1\nx")


@pytest.mark.parametrize(
    "M, factors",
    [
        (IntMatrix.diagonal([2, 3]), (1, 6)),
        (IntMatrix.zeros(3, 5), ()),
        (M6, (1, 6)),
        (IntMatrix.zeros(0, 4), ()),
        (IntMatrix.from_rows([[12, 6, 4, 8], [3, 9, 6, 12], [2, 16, 14, 28], [20, 10, 10, 20]]), (1, 10, 30)),
    ],
)
def test_smith_examples(M, factors):
    snf = smith_normal_form(M)
    assert snf.invariant_factors == factors
    assert snf.rank == len(factors)


def test_abelian_invariants_examples():
    free = abelian_invariants(IntMatrix.zeros(0, 4), 4)
    assert (free.free_rank, free.torsion_size) == (4, 1)
    inv = abelian_invariants(IntMatrix.from_rows([[2, 0], [0, 3]]), 2)
    assert (inv.torsion_size, inv.free_rank, inv.torsion_factors) == (6, 0, (6,))
    inv = abelian_invariants(IntMatrix.from_rows([[2, 0], [0, 2]]), 2)
    assert inv.torsion_size == 4 == brute_force_quotient([[2, 0], [0, 2]], 2)[0]
    with pytest.raises(ValueError, match="3 columns but ambient rank is 2"):
        abelian_invariants(IntMatrix.zeros(1, 3), 2)


def test_log2_torsion_matches_exact():
    inv = abelian_invariants(IntMatrix.diagonal([3] * 50 + [7]), 51)
    assert inv.torsion_size == 3**50 * 7
    assert math.isclose(inv.log2_torsion, 50 * math.log2(3) + math.log2(7), rel_tol=1e-9)


def test_brute_force_examples_match():
    # values frozen from the coset oracle in tests/oracles.py
    assert brute_force_quotient(M6.to_rows(), 2) == (6, 0)
    assert brute_force_quotient([[4, 6]], 2) == (2, 1)
    assert brute_force_quotient([[1, 1, 1]], 3) == (1, 2)


@pytest.mark.parametrize(
    "M, t",
    [(M6, 6), (IntMatrix.identity(3), 1), (IntMatrix.from_rows([[4, 6]]), 2), (IntMatrix.zeros(2, 2), 1)],
)
def test_minor_gcd_examples(M, t):
    assert torsion_via_minor_gcd(M) == t


def test_l1_examples():
    assert l1_row_norms(M6) == [2, 3, 5]
    assert l1_row_norms(IntMatrix.zeros(1, 3)) == [0]
    assert l1_row_norms(IntMatrix.from_rows([[-1, 4, -2]])) == [7]
    assert torsion_upper_bound_l1(M6) == 15
    assert torsion_upper_bound_l1(IntMatrix.identity(2)) == 1
    assert torsion_upper_bound_l1(IntMatrix.from_rows([[1, 1, 1]])) == 3


def test_minor_gcd_fallback(monkeypatch):
    import metatorsion.intlinalg as il
    monkeypatch.setattr(il, "MINOR_ENUMERATION_LIMIT", 0)
    assert il.torsion_via_minor_gcd(M6) == 6


def test_corpus_minor_gcd_equals_snf_and_l1_bound():
    rng = random.Random(20240501)
    for _ in range(1000):
        M = random_matrix(rng)
        snf = smith_normal_form(M)
        t = torsion_via_minor_gcd(M)
        assert math.prod(snf.invariant_factors) == t
        assert t <= torsion_upper_bound_l1(M)
        assert snf.rank == rank(M)
        assert all(b % a == 0 for a, b in zip(snf.invariant_factors, snf.invariant_factors[1:]))


def test_brute_force_oracle_agreement():
    rng = random.Random(7)
    checked = 0
    for _ in range(600):
        n = rng.randint(1, 4)
        rows = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(rng.randint(0, 5))]
        expected = brute_force_quotient(rows, n, limit=20_000)
        if expected is None:
            continue
        inv = abelian_invariants(IntMatrix.from_rows(rows, cols=n), n)
        assert (inv.torsion_size, inv.free_rank) == expected, rows
        checked += 1
    assert checked >= 300


@settings(max_examples=200, deadline=None)
@given(matrices, st.data())
def test_invariant_under_unimodular_row_ops(M, data):
    base = abelian_invariants(M, M.cols)
    rows = M.to_rows()
    if not rows:
        return
    perm = data.draw(st.permutations(range(len(rows))))
    rows = [rows[i] for i in perm]
    i = data.draw(st.integers(0, len(rows) - 1))
    rows[i] = [-x for x in rows[i]]
    if len(rows) > 1:
        a, b = data.draw(st.lists(st.integers(0, len(rows) - 1), min_size=2, max_size=2, unique=True))
        rows[a] = [x + y for x, y in zip(rows[a], rows[b])]
    assert abelian_invariants(IntMatrix.from_rows(rows, cols=M.cols), M.cols) == base


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_hnf_spans_same_lattice(M):
    H = hermite_normal_form(M)
    assert H.rows == rank(M)
    # same quotient, so same invariants
    assert abelian_invariants(H, M.cols) == abelian_invariants(M, M.cols)
    pivots = []
    for i in range(H.rows):
        row = H.row(i)
        c = next(j for j, x in enumerate(row) if x)
        assert row[c] > 0
        for k in range(i):
            assert 0 <= H[k, c] < row[c]
        pivots.append(c)
    assert pivots == sorted(pivots)


def test_determinant():
    assert determinant([]) == 1
    assert determinant([[0, 1], [1, 0]]) == -1
    assert determinant([[2, 7, 1], [3, 1, 4], [0, 5, 9]]) == 2 * (9 - 20) - 7 * 27 + 15
    assert determinant([[1, 2], [2, 4]]) == 0
