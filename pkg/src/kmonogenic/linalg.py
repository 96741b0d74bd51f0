"""Exact linear algebra over the Gaussian rationals Q(i).

The default route is fraction-free (Bareiss) elimination: every row is scaled
to Gaussian integers, after which all intermediate entries are minors of the
scaled matrix and the division by the previous pivot is exact in Z[i].

Two auxiliary routes exist for ranks only:

* ``rank_mod_p`` reduces a Gaussian-integer matrix modulo a prime p = 1 (mod 4)
  (sending i to a square root of -1).  A nonzero minor mod p lifts to a nonzero
  minor over Z[i], so the result is a rigorous *lower* bound on the exact rank.
* ``rank_float`` is a singular-value count, useful only for quick exploration.
"""

from __future__ import annotations

from math import gcd
from typing import Sequence

import numpy as np

from .exact import ExactComplex, ZERO, ONE

__all__ = [
    "to_gaussian_integer_rows",
    "bareiss_echelon",
    "rank",
    "rank_exact",
    "rank_mod_p",
    "rank_float",
    "nullspace",
    "kernel_basis",
    "solve",
    "SMALL_PRIMES_1MOD4",
]

GInt = tuple  # (re, im) pair of Python ints

SMALL_PRIMES_1MOD4 = (2147483629, 2147483549, 2147483497, 2147483489)


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def to_gaussian_integer_rows(rows: Sequence[Sequence[ExactComplex]]) -> list[list[GInt]]:
    """Scale each row by the lcm of its denominators; entries become (re, im) ints."""
    out = []
    for row in rows:
        den = 1
        for z in row:
            if z:
                den = _lcm(den, int(z.re.denominator))
                den = _lcm(den, int(z.im.denominator))
        out.append([(int(z.re * den), int(z.im * den)) for z in row])
    return out


def _gdiv_exact(a: GInt, b: GInt) -> GInt:
    c, d = b
    n = c * c + d * d
    re = a[0] * c + a[1] * d
    im = a[1] * c - a[0] * d
    q_re, r_re = divmod(re, n)
    q_im, r_im = divmod(im, n)
    if r_re or r_im:
        raise ArithmeticError("inexact Gaussian-integer division in Bareiss step")
    return (q_re, q_im)


def bareiss_echelon(mat: list[list[GInt]]) -> tuple[list[list[GInt]], list[int]]:
    """Fraction-free row echelon form over Z[i].

    Works on a copy.  Returns the echelon rows (only the first ``len(pivots)``
    rows are nonzero) and the pivot column of each of those rows.
    """
    m = [list(r) for r in mat]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    prev = (1, 0)
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        for i in range(r, nrows):
            if m[i][c] != (0, 0):
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            m[r], m[piv] = m[piv], m[r]
        pr = m[r]
        a, b = pr[c]
        pc, pd = prev
        pn = pc * pc + pd * pd
        for i in range(r + 1, nrows):
            row = m[i]
            e, f = row[c]
            for j in range(c + 1, ncols):
                x, y = row[j]
                u, v = pr[j]
                # (a+bi)(x+yi) - (e+fi)(u+vi)
                re = a * x - b * y - (e * u - f * v)
                im = a * y + b * x - (e * v + f * u)
                if pn == 1:
                    if prev == (1, 0):
                        row[j] = (re, im)
                    else:
                        row[j] = _gdiv_exact((re, im), prev)
                else:
                    nre = re * pc + im * pd
                    nim = im * pc - re * pd
                    qre, rre = divmod(nre, pn)
                    qim, rim = divmod(nim, pn)
                    if rre or rim:
                        raise ArithmeticError("inexact Gaussian-integer division in Bareiss step")
                    row[j] = (qre, qim)
            row[c] = (0, 0)
            for j in range(c):
                row[j] = (0, 0)
        pivots.append(c)
        prev = (a, b)
        r += 1
    return m, pivots


def rank_exact(rows: Sequence[Sequence[ExactComplex]]) -> int:
    if not rows or not rows[0]:
        return 0
    _, piv = bareiss_echelon(to_gaussian_integer_rows(rows))
    return len(piv)


def _sqrt_minus_one(p: int) -> int:
    for g in range(2, p):
        if pow(g, (p - 1) // 2, p) == p - 1:
            return pow(g, (p - 1) // 4, p)
    raise ValueError("no square root of -1")


def rank_mod_p(rows: Sequence[Sequence[ExactComplex]], p: int = SMALL_PRIMES_1MOD4[0]) -> int:
    """Rank of the reduction mod p; a lower bound for the exact rank.

    Raises ``ZeroDivisionError`` if p divides a denominator (pick another prime).
    """
    if p % 4 != 1:
        raise ValueError("p must be 1 mod 4 so that i reduces to an element of F_p")
    if not rows or not rows[0]:
        return 0
    s = _sqrt_minus_one(p)
    nr, nc = len(rows), len(rows[0])
    a = np.zeros((nr, nc), dtype=np.int64)
    for i, row in enumerate(rows):
        for j, z in enumerate(row):
            if not z:
                continue
            re_n, re_d = int(z.re.numerator), int(z.re.denominator)
            im_n, im_d = int(z.im.numerator), int(z.im.denominator)
            if re_d % p == 0 or im_d % p == 0:
                raise ZeroDivisionError(f"prime {p} divides a denominator")
            val = (re_n * pow(re_d, -1, p) + s * im_n * pow(im_d, -1, p)) % p
            a[i, j] = val
    return _rank_mod_p_array(a, p)


def _rank_mod_p_array(a: np.ndarray, p: int) -> int:
    a = a.copy()
    nr, nc = a.shape
    r = 0
    for c in range(nc):
        if r == nr:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r] = (a[r] * inv) % p
        below = a[r + 1:, c].copy()
        idx = np.nonzero(below)[0]
        if idx.size:
            rows_ = r + 1 + idx
            a[rows_] = (a[rows_] - (below[idx, None] * a[r][None, :]) % p) % p
        r += 1
    return r


def rank_float(rows: Sequence[Sequence[ExactComplex]], tol: float = 1e-9) -> int:
    """Numerical rank: singular values above ``tol`` times the largest one."""
    if not rows or not rows[0]:
        return 0
    a = np.array([[complex(z) for z in row] for row in rows], dtype=complex)
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def rank(rows, method: str = "exact") -> int:
    if method == "exact":
        return rank_exact(rows)
    if method == "modular":
        return rank_mod_p(rows)
    if method == "float":
        return rank_float(rows)
    raise ValueError(f"unknown rank method {method!r}")


def _to_exact(z: GInt) -> ExactComplex:
    return ExactComplex(z[0], z[1])


def _back_substitute(ech, pivots, ncols, rhs_col=None, free_values=None):
    """Solve the echelon system for the pivot variables (exactly, over Q(i))."""
    x = [ZERO] * ncols
    if free_values:
        for j, val in free_values.items():
            x[j] = val
    for r in range(len(pivots) - 1, -1, -1):
        c = pivots[r]
        row = ech[r]
        acc = _to_exact(row[rhs_col]) if rhs_col is not None else ZERO
        for j in range(c + 1, ncols):
            if row[j] != (0, 0) and x[j]:
                acc = acc - _to_exact(row[j]) * x[j]
        x[c] = acc / _to_exact(row[c])
    return x


def kernel_basis(rows: Sequence[Sequence[ExactComplex]], ncols: int | None = None):
    """Exact right-kernel basis together with the free column of each vector.

    Vector i has a 1 in column ``free[i]`` and 0 in every other free column,
    so kernel coordinates can be read off directly at the free columns.
    """
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows:
        basis = [[ONE if j == f else ZERO for j in range(ncols)] for f in range(ncols)]
        return basis, list(range(ncols))
    ech, pivots = bareiss_echelon(to_gaussian_integer_rows(rows))
    pset = set(pivots)
    free = [j for j in range(ncols) if j not in pset]
    basis = [_back_substitute(ech, pivots, ncols, free_values={f: ONE}) for f in free]
    return basis, free


def nullspace(rows: Sequence[Sequence[ExactComplex]], ncols: int | None = None) -> list[list[ExactComplex]]:
    return kernel_basis(rows, ncols)[0]


def solve(rows: Sequence[Sequence[ExactComplex]], rhs: Sequence[ExactComplex]) -> list[ExactComplex] | None:
    """One exact solution of ``rows @ x = rhs`` (free variables set to 0), or None."""
    nrows = len(rows)
    if nrows == 0:
        return []
    ncols = len(rows[0])
    aug = [list(rows[i]) + [rhs[i]] for i in range(nrows)]
    ech, pivots = bareiss_echelon(to_gaussian_integer_rows(aug))
    if pivots and pivots[-1] == ncols:
        return None
    return _back_substitute(ech, pivots, ncols, rhs_col=ncols)
