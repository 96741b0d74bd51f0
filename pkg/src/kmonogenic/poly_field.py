"""Exact polynomials on R^6 and the first-order operators of the complex.

The six real coordinates are x0..x5.  ``NABLA_UPPER[(A, B)]`` holds the
coefficient vector c with nabla^{AB} = sum_j c_j d/dx_j; the same coefficients
on x_j give the linear form z^{AB}.  Lowered operators use the epsilon tensor:
nabla_{AB} = 1/2 sum eps_{ABCD} nabla^{CD}.

Gaussian pairings are normalized by pi^-3, so for polynomial inputs every
pairing is an exact Gaussian rational.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations_with_replacement
from operator import add
from typing import Iterable, Mapping

from gmpy2 import mpq

from .exact import ExactComplex, ZERO, ONE, I, as_exact
from .tensor_core import INDICES, epsilon, delta

__all__ = [
    "NVARS",
    "Poly6",
    "monomials_upto",
    "monomials_of_degree",
    "NABLA_UPPER",
    "NABLA_LOWER",
    "NablaTable",
    "NABLA",
    "apply_first_order",
    "apply_nabla_upper",
    "apply_nabla_lower",
    "theta",
    "commutator_check",
    "commutator_expected",
    "laplacian",
    "heat_flow",
    "gaussian_moment",
    "gaussian_inner",
    "PHI",
    "Z_PAIRS",
    "Z_MATRIX",
    "X_FROM_Z",
    "NABLA_UPPER_Z",
    "to_z_coordinates",
    "from_z_coordinates",
]

NVARS = 6
_UNIT = tuple(tuple(1 if i == j else 0 for i in range(NVARS)) for j in range(NVARS))


def _add_exp(a, b):
    return tuple(x + y for x, y in zip(a, b))


class Poly6:
    """Sparse polynomial in x0..x5: exponent 6-tuple -> ExactComplex."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        clean = {}
        if terms:
            for exp, c in terms.items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != NVARS or min(exp) < 0:
                    raise ValueError(f"bad exponent vector {exp}")
                c = as_exact(c)
                if c:
                    clean[exp] = clean.get(exp, ZERO) + c
        self.terms = {e: c for e, c in clean.items() if c}

    @classmethod
    def _raw(cls, terms: dict) -> "Poly6":
        p = object.__new__(cls)
        p.terms = terms
        return p

    @classmethod
    def const(cls, c) -> "Poly6":
        c = as_exact(c)
        return cls._raw({(0,) * NVARS: c} if c else {})

    @classmethod
    def var(cls, j: int) -> "Poly6":
        return cls._raw({_UNIT[j]: ONE})

    @classmethod
    def monomial(cls, exp, c=ONE) -> "Poly6":
        return cls({tuple(exp): c})

    @classmethod
    def linear(cls, coeffs: Iterable) -> "Poly6":
        return cls({_UNIT[j]: c for j, c in enumerate(coeffs)})

    # ring structure ---------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Poly6):
            other = Poly6.const(other)
        out = dict(self.terms)
        _axpy(out, ONE, other.terms)
        return Poly6._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly6._raw({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Poly6):
            other = Poly6.const(other)
        out = dict(self.terms)
        _axpy(out, -ONE, other.terms)
        return Poly6._raw(out)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Poly6):
            out: dict = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = _add_exp(e1, e2)
                    out[e] = out.get(e, ZERO) + c1 * c2
            return Poly6._raw({e: c for e, c in out.items() if c})
        c = as_exact(other)
        if not c:
            return Poly6._raw({})
        return Poly6._raw({e: c * v for e, v in self.terms.items()})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = Poly6.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Poly6):
            return self.terms == other.terms
        return self == Poly6.const(other)

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"Poly6({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exp in sorted(self.terms):
            mono = "*".join(f"x{j}" + (f"^{e}" if e > 1 else "") for j, e in enumerate(exp) if e)
            parts.append(f"{self.terms[exp]}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    # calculus ---------------------------------------------------------
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def homogeneous(self, m: int) -> "Poly6":
        return Poly6._raw({e: c for e, c in self.terms.items() if sum(e) == m})

    def deriv(self, j: int) -> "Poly6":
        return Poly6._raw(_deriv(self.terms, j))

    def mul_var(self, j: int) -> "Poly6":
        return Poly6._raw(_mul_var(self.terms, j))

    def conj(self) -> "Poly6":
        return Poly6._raw({e: c.conj() for e, c in self.terms.items()})

    def substitute_linear(self, forms) -> "Poly6":
        """Replace x_j by ``forms[j]`` (a Poly6) in every monomial."""
        cache: dict = {}

        def power(j, e):
            if (j, e) not in cache:
                cache[(j, e)] = forms[j] ** e
            return cache[(j, e)]

        out = Poly6._raw({})
        for exp, c in self.terms.items():
            term = Poly6.const(c)
            for j, e in enumerate(exp):
                if e:
                    term = term * power(j, e)
            out = out + term
        return out


# in-place dictionary kernels shared with the section layer ---------------


def _axpy(acc: dict, c: ExactComplex, terms: Mapping) -> None:
    """acc += c * terms (dictionaries of exponent -> coefficient)."""
    cr, ci = c.re, c.im
    raw = ExactComplex._raw
    for e, v in terms.items():
        vr, vi = v.re, v.im
        if ci:
            pr, pi = cr * vr - ci * vi, cr * vi + ci * vr
        else:
            pr, pi = cr * vr, cr * vi
        w = acc.get(e)
        if w is not None:
            pr += w.re
            pi += w.im
        if pr or pi:
            acc[e] = raw(pr, pi)
        elif w is not None:
            del acc[e]


def _deriv(terms: Mapping, j: int) -> dict:
    out = {}
    for e, c in terms.items():
        n = e[j]
        if n:
            ne = e[:j] + (n - 1,) + e[j + 1:]
            out[ne] = c * n
    return out


def _mul_var(terms: Mapping, j: int) -> dict:
    return {e[:j] + (e[j] + 1,) + e[j + 1:]: c for e, c in terms.items()}


@lru_cache(maxsize=None)
def monomials_of_degree(m: int) -> tuple:
    out = []
    for combo in combinations_with_replacement(range(NVARS), m):
        exp = [0] * NVARS
        for j in combo:
            exp[j] += 1
        out.append(tuple(exp))
    return tuple(sorted(out, reverse=True))


@lru_cache(maxsize=None)
def monomials_upto(d: int) -> tuple:
    return tuple(e for m in range(d + 1) for e in monomials_of_degree(m))


# ---------------------------------------------------------------------------
# the nabla table


def _ec(re, im=0):
    return ExactComplex(re, im)


# upper-triangular entries of nabla^{AB}; index j means d/dx_j
_UPPER_TRIANGLE = {
    (1, 2): {0: _ec(0, 1), 5: _ec(1)},
    (1, 3): {3: _ec(1), 4: _ec(0, 1)},
    (1, 4): {1: _ec(1), 2: _ec(0, 1)},
    (2, 3): {1: _ec(1), 2: _ec(0, -1)},
    (2, 4): {3: _ec(-1), 4: _ec(0, 1)},
    (3, 4): {0: _ec(0, -1), 5: _ec(1)},
}


def _build_upper():
    table = {}
    for a in INDICES:
        for b in INDICES:
            vec = [ZERO] * NVARS
            if a < b:
                for j, c in _UPPER_TRIANGLE[(a, b)].items():
                    vec[j] = c
            elif a > b:
                for j, c in _UPPER_TRIANGLE[(b, a)].items():
                    vec[j] = -c
            table[(a, b)] = tuple(vec)
    return table


def _build_lower(upper):
    table = {}
    for a in INDICES:
        for b in INDICES:
            vec = [ZERO] * NVARS
            for c in INDICES:
                for d in INDICES:
                    e = epsilon(a, b, c, d)
                    if e:
                        for j in range(NVARS):
                            vec[j] = vec[j] + upper[(c, d)][j] * mpq(e, 2)
            table[(a, b)] = tuple(vec)
    return table


NABLA_UPPER = _build_upper()
NABLA_LOWER = _build_lower(NABLA_UPPER)


class NablaTable:
    """The operator tables nabla^{AB}, nabla_{AB} and the coordinate matrix z^{AB}."""

    upper = NABLA_UPPER
    lower = NABLA_LOWER
    zmat = {ab: Poly6.linear(vec) for ab, vec in NABLA_UPPER.items()}

    @classmethod
    def zbar(cls, a: int, b: int) -> Poly6:
        return cls.zmat[(a, b)].conj()


NABLA = NablaTable


def apply_first_order(coeffs, p: Poly6) -> Poly6:
    """sum_j coeffs[j] * d/dx_j p."""
    out: dict = {}
    for j, c in enumerate(coeffs):
        if c:
            _axpy(out, c, _deriv(p.terms, j))
    return Poly6._raw(out)


def apply_nabla_upper(a: int, b: int, p: Poly6) -> Poly6:
    return apply_first_order(NABLA_UPPER[(a, b)], p)


def apply_nabla_lower(a: int, b: int, p: Poly6) -> Poly6:
    return apply_first_order(NABLA_LOWER[(a, b)], p)


def theta(a: int, b: int, p: Poly6) -> Poly6:
    """Theta_{AB} p = -nabla_{AB} p + (nabla_{AB} phi) p, with phi = |x|^2.

    Since nabla_{AB} phi = 2 sum_j d_j x_j for the lowered coefficients d,
    this is sum_j d_j (2 x_j - d/dx_j) p.
    """
    out: dict = {}
    for j, d in enumerate(NABLA_LOWER[(a, b)]):
        if d:
            _axpy(out, d * 2, _mul_var(p.terms, j))
            _axpy(out, -d, _deriv(p.terms, j))
    return Poly6._raw(out)


def commutator_check(a: int, b: int, c: int, d: int, p: Poly6) -> Poly6:
    """(nabla^{AB} Theta_{CD} - Theta_{CD} nabla^{AB}) p."""
    return apply_nabla_upper(a, b, theta(c, d, p)) - theta(c, d, apply_nabla_upper(a, b, p))


def commutator_expected(a: int, b: int, c: int, d: int, p: Poly6) -> Poly6:
    return p * (4 * (delta(a, c) * delta(b, d) - delta(a, d) * delta(b, c)))


def laplacian(p: Poly6) -> Poly6:
    out: dict = {}
    for j in range(NVARS):
        _axpy(out, ONE, _deriv(_deriv(p.terms, j), j))
    return Poly6._raw(out)


def heat_flow(p: Poly6, t) -> Poly6:
    """exp(t * Laplacian) p, a finite sum on polynomials."""
    t = mpq(t)
    out = Poly6._raw(dict(p.terms))
    term = p
    n = 0
    while term:
        n += 1
        term = laplacian(term) * (t / n)
        out = out + term
    return out


PHI = sum((Poly6.var(j) * Poly6.var(j) for j in range(NVARS)), Poly6.const(0))


# ---------------------------------------------------------------------------
# Gaussian pairing


@lru_cache(maxsize=None)
def _moment_1d(e: int) -> mpq:
    """pi^-1/2 * int x^e exp(-x^2) dx."""
    if e % 2:
        return mpq(0)
    out = mpq(1)
    for i in range(1, e, 2):
        out *= i
    return out / (2 ** (e // 2))


@lru_cache(maxsize=None)
def gaussian_moment(exp: tuple) -> mpq:
    out = mpq(1)
    for e in exp:
        out *= _moment_1d(e)
        if not out:
            break
    return out


def _parity(exp):
    return tuple(e & 1 for e in exp)


def gaussian_inner_terms(f: Mapping, h: Mapping) -> ExactComplex:
    by_parity: dict = {}
    for e, c in h.items():
        by_parity.setdefault(_parity(e), []).append((e, c.re, c.im))
    acc_re, acc_im = mpq(0), mpq(0)
    for e1, c1 in f.items():
        ar, ai = c1.re, c1.im
        for e2, br, bi in by_parity.get(_parity(e1), ()):
            m = gaussian_moment(tuple(map(add, e1, e2)))
            # c1 * conj(c2)
            acc_re += (ar * br + ai * bi) * m
            acc_im += (ai * br - ar * bi) * m
    return ExactComplex._raw(acc_re, acc_im)


def gaussian_inner(f: Poly6, h: Poly6) -> ExactComplex:
    """pi^-3 * int f conj(h) exp(-|x|^2) dx over R^6."""
    return gaussian_inner_terms(f.terms, h.terms)


# ---------------------------------------------------------------------------
# complex coordinates z^{AB}
#
# Z_PAIRS fixes the order of the six coordinates w_i = z^{Z_PAIRS[i]}.  A
# polynomial "in z" is a Poly6 whose variable i means w_i.  Z_MATRIX / 2 is
# unitary, and nabla_{AB} = 2 d/dz^{AB}, so nabla^{AB} is a single
# z-derivative up to sign.

Z_PAIRS = ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
Z_MATRIX = tuple(NABLA_UPPER[ab] for ab in Z_PAIRS)


def _invert6(mat):
    n = len(mat)
    aug = [list(mat[i]) + [ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = next(r for r in range(c, n) if aug[r][c])
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = ONE / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return tuple(tuple(row[n:]) for row in aug)


X_FROM_Z = _invert6(Z_MATRIX)

# coefficient of d/dw_i in nabla^{AB}: nabla^{AB} applied to the linear form w_i
NABLA_UPPER_Z = {
    ab: tuple(sum((c * z for c, z in zip(coeffs, Z_MATRIX[i]) if c and z), ZERO) for i in range(NVARS))
    for ab, coeffs in NABLA_UPPER.items()
}


def to_z_coordinates(p: Poly6) -> Poly6:
    """Rewrite a polynomial in x as a polynomial in w_0..w_5."""
    return p.substitute_linear([Poly6.linear(row) for row in X_FROM_Z])


def from_z_coordinates(p: Poly6) -> Poly6:
    """Rewrite a polynomial in w_0..w_5 as a polynomial in x."""
    return p.substitute_linear([Poly6.linear(row) for row in Z_MATRIX])
