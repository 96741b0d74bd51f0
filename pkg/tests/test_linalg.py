"""Rank, kernel and solve against an independent Fraction-based elimination."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kmonogenic import linalg
from kmonogenic.exact import ONE, ZERO, ExactComplex


def oracle_rank(rows):
    # plain Gauss-Jordan on (Fraction, Fraction) complex pairs
    m = [[complex_pair(z) for z in row] for row in rows]
    rank, ncols = 0, len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][c] != (0, 0)), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c] != (0, 0):
                f = cdiv(m[r][c], m[rank][c])
                m[r] = [csub(x, cmul(f, y)) for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank


def complex_pair(z):
    return (Fraction(int(z.re.numerator), int(z.re.denominator)), Fraction(int(z.im.numerator), int(z.im.denominator)))


def cmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def csub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def cdiv(a, b):
    n = b[0] ** 2 + b[1] ** 2
    return cmul(a, (b[0] / n, -b[1] / n))


def random_matrix(rng, nrows, ncols, rank, bound=3):
    left = [[ExactComplex(rng.randint(-bound, bound), rng.randint(-bound, bound)) for _ in range(rank)] for _ in range(nrows)]
    right = [[ExactComplex(rng.randint(-bound, bound), rng.randint(-bound, bound)) for _ in range(ncols)] for _ in range(rank)]
    return [[sum((left[i][t] * right[t][j] for t in range(rank)), ZERO) for j in range(ncols)] for i in range(nrows)]


def matvec(rows, x):
    return [sum((a * b for a, b in zip(row, x)), ZERO) for row in rows]


@given(st.integers(0, 10_000), st.integers(1, 7), st.integers(1, 7), st.integers(0, 5))
def test_ranks_agree_with_oracle(seed, nrows, ncols, r):
    rng = random.Random(seed)
    rows = random_matrix(rng, nrows, ncols, min(r, nrows, ncols))
    expected = oracle_rank(rows)
    assert linalg.rank_exact(rows) == expected
    assert linalg.rank_mod_p(rows) <= expected
    assert linalg.rank(rows, "float") == expected


@given(st.integers(0, 10_000))
def test_kernel_basis_annihilates_and_spans(seed):
    rng = random.Random(seed)
    rows = random_matrix(rng, 4, 7, 3)
    basis, free = linalg.kernel_basis(rows)
    assert len(basis) == 7 - oracle_rank(rows)
    for vec, f in zip(basis, free):
        assert all(z == 0 for z in matvec(rows, vec))
        assert vec[f] == ONE
        assert all(vec[g] == ZERO for g in free if g != f)


def test_solve_consistent_and_inconsistent():
    rng = random.Random(5)
    rows = random_matrix(rng, 5, 4, 2)
    x0 = [ExactComplex(rng.randint(-2, 2), rng.randint(-2, 2)) for _ in range(4)]
    rhs = matvec(rows, x0)
    x = linalg.solve(rows, rhs)
    assert matvec(rows, x) == rhs
    bad = list(rhs)
    # generic perturbation leaves the rank-2 column space
    bad[0] = bad[0] + ExactComplex(1, 1)
    assert linalg.solve(rows, bad) is None


def test_rational_entries_are_scaled():
    rows = [[ExactComplex(Fraction(1, 3)), ExactComplex(Fraction(1, 2), 1)], [ExactComplex(Fraction(2, 3)), ExactComplex(1, 2)]]
    assert linalg.rank_exact(rows) == 1


def test_unknown_method():
    with pytest.raises(ValueError):
        linalg.rank([[ONE]], "magic")
