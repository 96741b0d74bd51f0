"""Symbols of the complex at a covector v and their exactness.

sigma_l(v) is the constant-coefficient stencil of D_l with nabla^{AB} replaced
by M^{AB}(v), i.e. d/dx_j -> v_j / i.  Matrices are written in the nullspace
bases of ``tensor_core``; since every basis vector has a 1 at its own free key
and 0 at the others, coordinates of a contraction-free fiber are read at the
free keys.

Ranks can be computed three ways:

* ``"exact"``: fraction-free elimination over Z[i].
* ``"certified"``: the rank modulo a large prime p = 1 (mod 4) is a lower
  bound; the exactly verified identities sigma_{l+1} sigma_l = 0 give upper
  bounds.  When the bounds meet the rank is exact; otherwise another prime is
  tried and, failing that, the exact route is taken.
* ``"float"``: singular values, for exploration only.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from gmpy2 import mpq

from .exact import ExactComplex, ZERO, ONE, I, Q, as_exact
from . import linalg
from .poly_field import NABLA_UPPER
from .tensor_core import (
    INDICES,
    CanonicalTensor,
    FiberBasis,
    IndexProfile,
    ProfileError,
    apply_first_order,
    canonical_keys,
    contract,
    inner,
    nullspace_basis,
    sort_upper,
)

__all__ = [
    "DegenerateCovector",
    "CompatibilityError",
    "CovectorM",
    "build_M",
    "SymbolMatrix",
    "sigma",
    "sigma_apply",
    "exactness_report",
    "ExactnessReport",
    "preimage_sigma0",
    "preimage_sigma1",
    "preimage_sigma2",
    "lift_xi",
    "lifted_symbol_tilde",
    "random_covector",
    "box_symbol_kernel_dim",
]


class DegenerateCovector(ValueError):
    """v = 0: the symbol is not defined."""


class CompatibilityError(ValueError):
    """Input to a preimage construction is not in the required kernel."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class CovectorM:
    v: tuple
    m: tuple
    minv: tuple

    @property
    def norm2(self) -> mpq:
        return sum((x * x for x in self.v), mpq(0))

    def product_with_conjugate_transpose(self) -> tuple:
        """M conj(M)^T as a 4x4 tuple."""
        return tuple(
            tuple(sum((self.m[a][c] * self.m[b][c].conj() for c in range(4)), ZERO) for b in range(4))
            for a in range(4)
        )

    def table(self) -> dict:
        """M^{AB} keyed by 1-based index pairs, in the form the stencils expect."""
        return _IndexTable(self.m)

    def inverse_table(self) -> dict:
        return _IndexTable(self.minv)


class _IndexTable:
    """1-based 4x4 view of a nested tuple: table[B][A]."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        self.rows = rows

    def __getitem__(self, b):
        return _Row(self.rows[b - 1])


class _Row:
    __slots__ = ("row",)

    def __init__(self, row):
        self.row = row

    def __getitem__(self, a):
        return self.row[a - 1]


def build_M(v: Sequence) -> CovectorM:
    """M^{AB}(v) = (1/i) * (nabla^{AB} with d/dx_j replaced by v_j)."""
    v = tuple(Q(x) for x in v)
    if len(v) != 6:
        raise ValueError("a covector on R^6 has six components")
    if not any(v):
        raise DegenerateCovector("the symbol needs v != 0")
    minus_i = ExactComplex(0, -1)
    m = tuple(
        tuple(
            sum((c * x for c, x in zip(NABLA_UPPER[(a, b)], v) if x and c), ZERO) * minus_i
            for b in INDICES
        )
        for a in INDICES
    )
    n2 = sum((x * x for x in v), mpq(0))
    minv = tuple(tuple(m[b][a].conj() / n2 for b in range(4)) for a in range(4))
    return CovectorM(v, m, minv)


def random_covector(rng: random.Random, bound: int = 5) -> tuple:
    """Integer lattice point in [-bound, bound]^6 other than 0."""
    while True:
        v = tuple(rng.randint(-bound, bound) for _ in range(6))
        if any(v):
            return v


def _as_M(v_or_M) -> CovectorM:
    return v_or_M if isinstance(v_or_M, CovectorM) else build_M(v_or_M)


# ---------------------------------------------------------------------------
# symbol matrices


def sigma_apply(v_or_M, t: CanonicalTensor) -> CanonicalTensor:
    """sum_{B1} M^{B1[A1} t^{A2..]}_{B1..} on a single fiber."""
    return apply_first_order(_as_M(v_or_M).table(), t)


@dataclass(frozen=True)
class SymbolMatrix:
    k: int
    level: int
    M: CovectorM
    basis_in: FiberBasis
    basis_out: FiberBasis
    rows: tuple = field(repr=False)

    @property
    def shape(self):
        return (self.basis_out.dim, self.basis_in.dim)

    def apply(self, coords) -> list:
        return [sum((r * c for r, c in zip(row, coords) if r and c), ZERO) for row in self.rows]


def sigma(k: int, l: int, v_or_M) -> SymbolMatrix:
    """Exact matrix of sigma_l(v) from scriptV_l to scriptV_{l+1}."""
    if not 0 <= l <= 2:
        raise ValueError(f"symbol level {l} outside 0..2")
    M = _as_M(v_or_M)
    b_in = nullspace_basis(IndexProfile(k, l))
    b_out = nullspace_basis(IndexProfile(k, l + 1))
    table = M.table()
    cols = []
    for vec in b_in.vectors:
        img = apply_first_order(table, vec)
        if l + 1 < 4 and contract(img):
            raise ArithmeticError("symbol image left the contraction-free subspace")
        cols.append(b_out.coordinates(img))
    rows = tuple(tuple(cols[j][i] for j in range(len(cols))) for i in range(b_out.dim))
    return SymbolMatrix(k, l, M, b_in, b_out, rows)


def composition_is_zero(k: int, l: int, v_or_M) -> bool:
    """sigma_{l+1} sigma_l = 0, checked on every basis vector of scriptV_l."""
    table = _as_M(v_or_M).table()
    for vec in nullspace_basis(IndexProfile(k, l)).vectors:
        if apply_first_order(table, apply_first_order(table, vec)):
            return False
    return True


# ---------------------------------------------------------------------------
# ranks and exactness


def _rank_certified(rows, upper_bound: int, ncols: int) -> tuple[int, str]:
    if not rows or not ncols:
        return 0, "empty"
    best = 0
    for p in linalg.SMALL_PRIMES_1MOD4:
        try:
            r = linalg.rank_mod_p(rows, p)
        except ZeroDivisionError:
            continue
        best = max(best, r)
        if best >= upper_bound:
            return best, f"mod {p} meets upper bound"
    return linalg.rank_exact(rows), "exact fallback"


@dataclass(frozen=True)
class ExactnessReport:
    k: int
    v: tuple
    dims: tuple
    ranks: tuple
    compositions_zero: tuple
    injective_0: bool
    exact_1: bool
    exact_2: bool
    surjective_2: bool
    euler_zero: bool
    method: str
    certificates: tuple = ()

    @property
    def all_true(self) -> bool:
        return all((self.injective_0, self.exact_1, self.exact_2, self.surjective_2,
                    self.euler_zero, *self.compositions_zero))


def exactness_report(k: int, v, method: str = "certified") -> ExactnessReport:
    """Rank check of 0 -> V0 -> V1 -> V2 -> V3 -> 0 at the covector v."""
    if k < 4:
        raise ValueError("the symbol complex is considered for k >= 4")
    M = _as_M(v)
    dims = tuple(nullspace_basis(IndexProfile(k, l)).dim for l in range(4))
    mats = [sigma(k, l, M) for l in range(3)]
    comps = (composition_is_zero(k, 0, M), composition_is_zero(k, 1, M))
    certs = []
    if method == "certified" and all(comps):
        r0, c0 = _rank_certified(mats[0].rows, dims[0], dims[0])
        r1, c1 = _rank_certified(mats[1].rows, dims[1] - r0, dims[1])
        r2, c2 = _rank_certified(mats[2].rows, min(dims[3], dims[2] - r1), dims[2])
        ranks = (r0, r1, r2)
        certs = [c0, c1, c2]
    elif method in ("certified", "exact"):
        ranks = tuple(linalg.rank_exact(mm.rows) for mm in mats)
        certs = ["exact"] * 3
        method = "exact"
    elif method == "float":
        ranks = tuple(linalg.rank_float(mm.rows) for mm in mats)
        certs = ["float"] * 3
    else:
        raise ValueError(f"unknown rank method {method!r}")
    r0, r1, r2 = ranks
    return ExactnessReport(
        k=k,
        v=tuple(M.v),
        dims=dims,
        ranks=ranks,
        compositions_zero=comps,
        injective_0=r0 == dims[0],
        exact_1=dims[1] - r1 == r0,
        exact_2=dims[2] - r2 == r1,
        surjective_2=r2 == dims[3],
        euler_zero=dims[0] - dims[1] + dims[2] - dims[3] == 0,
        method=method,
        certificates=tuple(certs),
    )


def box_symbol_kernel_dim(k: int, l: int, v_or_M) -> int:
    """dim ker of the symbol of box_l at v.

    With adjoints taken for the full-index inner product on scriptV, that
    kernel is ker sigma_l intersected with the orthogonal complement of
    im sigma_{l-1}.  In basis coordinates with Gram matrix G the complement
    is ker(S^H G), so the stacked matrix [sigma_l ; S^H G] is ranked exactly.
    """
    M = _as_M(v_or_M)
    b_l = nullspace_basis(IndexProfile(k, l))
    rows = []
    if l < 3:
        rows.extend(list(r) for r in sigma(k, l, M).rows)
    if l > 0:
        gram = [[inner(a, b) for a in b_l.vectors] for b in b_l.vectors]
        s_prev = sigma(k, l - 1, M).rows
        for j in range(len(s_prev[0])):
            col = [s_prev[i][j].conj() for i in range(len(s_prev))]
            rows.append([sum((col[i] * gram[i][c] for i in range(len(col)) if col[i]), ZERO)
                         for c in range(b_l.dim)])
    return b_l.dim - linalg.rank_exact(rows)


# ---------------------------------------------------------------------------
# constructive preimages


def _sym_with_inverse(minv, t: CanonicalTensor) -> CanonicalTensor:
    """out^{A..}_{B1..Bp} = sum_E Minv_{E(B1} t^{A.. E}_{B2..Bp)}.

    Maps profile (p - 1, q + 1) to (p, q); E occupies the last superscript slot.
    """
    p, q = t.profile.p + 1, t.profile.q - 1
    prof = IndexProfile.from_counts(p, q)
    norm = mpq(1, p)
    ent = t.entries
    out = {}
    for lo, up in canonical_keys(p, q):
        acc = ZERO
        for s in range(p):
            b = lo[s]
            rest = lo[:s] + lo[s + 1:]
            for e in INDICES:
                sign, srt = sort_upper(up + (e,))
                if not sign:
                    continue
                val = ent.get((rest, srt))
                if val is None:
                    continue
                term = minv[e - 1][b - 1] * val
                acc = acc + term if sign > 0 else acc - term
        if acc:
            out[(lo, up)] = acc * norm
    return CanonicalTensor._trusted(prof, out)


def _require_profile(t: CanonicalTensor, k: int, l: int):
    if t.profile != IndexProfile(k, l):
        raise ProfileError(f"expected a fiber at (k={k}, l={l}), got {t.profile}")


def preimage_sigma0(k: int, v_or_M, xi: CanonicalTensor) -> CanonicalTensor:
    """Xi in scriptV_0 with sigma_0 Xi = xi, for xi in ker sigma_1."""
    M = _as_M(v_or_M)
    _require_profile(xi, k, 1)
    res = sigma_apply(M, xi)
    if res:
        raise CompatibilityError("xi is not in the kernel of sigma_1", res)
    return _sym_with_inverse(M.minv, xi)


def preimage_sigma1(k: int, v_or_M, xi: CanonicalTensor) -> CanonicalTensor:
    """-2(k-1)/k * Xi with Xi^A_B = sum_E Minv_{E(B1} xi^{AE}_{B2..)}."""
    M = _as_M(v_or_M)
    _require_profile(xi, k, 2)
    res = sigma_apply(M, xi)
    if res:
        raise CompatibilityError("xi is not in the kernel of sigma_2", res)
    return _sym_with_inverse(M.minv, xi).scale(mpq(-2 * (k - 1), k))


def lift_xi(xi: CanonicalTensor) -> CanonicalTensor:
    """The lift to Sym^{k-2} (x) Alt^4 whose contraction is xi.

    For a subscript multiset B, pick a = min(B) as the superscript matched with
    a subscript: lift^{1234}_B = sign(a, rest) * xi^{rest}_{B - a}.
    """
    p = xi.profile.p
    prof = IndexProfile.from_counts(p + 1, 4)
    out = {}
    for lo, up in prof.keys():
        a = lo[0]
        rest = tuple(x for x in INDICES if x != a)
        sign = 1 if a % 2 == 1 else -1
        val = xi[(lo[1:], rest)]
        if val:
            out[(lo, up)] = val if sign > 0 else -val
    return CanonicalTensor._trusted(prof, out)


def lifted_symbol_tilde(v_or_M, xi_tilde: CanonicalTensor) -> CanonicalTensor:
    """sigma~ : Sym^{k-1} (x) Alt^3 -> Sym^{k-2} (x) Alt^4, same stencil as sigma."""
    if xi_tilde.profile.q != 3:
        raise ProfileError(f"sigma~ acts on three superscripts, got {xi_tilde.profile}")
    return sigma_apply(v_or_M, xi_tilde)


def preimage_sigma2(k: int, v_or_M, xi: CanonicalTensor) -> CanonicalTensor:
    """3(k-1)/(k+2) * C(Xi~), Xi~ built from the lift of xi.

    Expanding sigma_2 C(Xi~) gives (k+2)/(3(k-1)) * xi; the positive sign is
    confirmed by a brute-force full-index evaluation in the test suite.
    """
    M = _as_M(v_or_M)
    _require_profile(xi, k, 3)
    c = contract(xi)
    if c:
        raise CompatibilityError("xi has nonzero contraction", c)
    lifted = lift_xi(xi)
    big = _sym_with_inverse(M.minv, lifted)
    return contract(big).scale(mpq(3 * (k - 1), k + 2))


# ---------------------------------------------------------------------------
# kernel sampling


def kernel_basis(k: int, l: int, v_or_M) -> list[CanonicalTensor]:
    """Exact basis of ker sigma_l inside scriptV_l (sigma_3 = 0, so l = 3 gives scriptV_3)."""
    b_in = nullspace_basis(IndexProfile(k, l))
    if l == 3:
        return list(b_in.vectors)
    mat = sigma(k, l, v_or_M)
    ns = linalg.nullspace([list(r) for r in mat.rows], ncols=b_in.dim)
    return [b_in.combine(vec) for vec in ns]


def random_kernel_element(basis: list, rng: random.Random, bound: int = 3) -> CanonicalTensor:
    out = None
    for vec in basis:
        c = ExactComplex(rng.randint(-bound, bound), rng.randint(-bound, bound))
        term = vec.scale(c)
        out = term if out is None else out + term
    return out
