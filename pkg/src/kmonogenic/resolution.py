"""Polynomial solutions of D_l u = f.

The solver never forms the full assembled system.  It uses two facts:

1. T = exp(-Laplacian/4) commutes with every constant-coefficient operator and
   sends the monomials of a fixed degree to Gaussian-orthogonal polynomials;
   for homogeneous p, q of degree m, <T p, T q>_phi = <p, q>_Fischer / 2^m.
   Writing u = T u#, f = T f#, the problem D u# = f# splits by degree and
   the Gaussian norm of u becomes a diagonal weight on the coefficients of u#.
2. In the coordinates w_i = z^{AB} each nabla^{AB} is a single derivative
   +-2 d/dw_i, and z-monomials stay Fischer-orthogonal (weight alpha! 2^|alpha|).
   The matrix of D together with the contraction constraint then falls apart
   into small connected blocks.

In every block the minimal-norm solution is u = W^-1 B^H lam with
(B W^-1 B^H) lam = rhs, solved by exact elimination.  The result is mapped
back to x, pushed through T, and checked against f with the x-coordinate D.

``assemble`` builds the plain matrix of D_l on (scriptV_l basis) x (x-monomials
of degree <= D) for inspection and cross-checks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import comb, factorial, prod

from gmpy2 import mpq

from . import linalg
from .complex_ops import (
    SCRIPT_V,
    HypothesisError,
    Section,
    _compiled_D,
    contract_section,
    D,
)
from .exact import ExactComplex, ONE, ZERO
from .poly_field import (
    NVARS,
    Poly6,
    from_z_coordinates,
    heat_flow,
    monomials_of_degree,
    monomials_upto,
    to_z_coordinates,
)
from .symbol import CompatibilityError
from .tensor_core import IndexProfile, contraction_stencil, key_weight, nullspace_basis

__all__ = [
    "DegreeCappedSpace",
    "AssembledOperator",
    "SolveResult",
    "CompatibilityError",
    "TheoremContradiction",
    "assemble",
    "solve",
    "random_compatible",
    "random_kernel",
]


class TheoremContradiction(RuntimeError):
    """A compatible right-hand side admitted no polynomial solution."""


# ---------------------------------------------------------------------------
# the degree-capped space and the assembled matrix


@dataclass(frozen=True)
class DegreeCappedSpace:
    """scriptV_l-valued polynomials of degree <= D, basis (fiber vector) x (monomial)."""

    profile: IndexProfile
    degree_cap: int

    @property
    def fiber_basis(self):
        return nullspace_basis(self.profile)

    @property
    def monomials(self):
        return monomials_upto(self.degree_cap) if self.degree_cap >= 0 else ()

    @property
    def labels(self) -> tuple:
        return tuple((i, m) for m in self.monomials for i in range(self.fiber_basis.dim))

    @property
    def dimension(self) -> int:
        return self.fiber_basis.dim * comb(self.degree_cap + NVARS, NVARS) if self.degree_cap >= 0 else 0

    def coordinates(self, f: Section) -> list:
        basis = self.fiber_basis
        out = []
        for m in self.monomials:
            out.extend(basis.coordinates(f.fiber_at(m)))
        return out

    def section(self, coords, tag=SCRIPT_V) -> Section:
        basis = self.fiber_basis
        comps: dict = {}
        n = basis.dim
        for t, m in enumerate(self.monomials):
            fiber = basis.combine(coords[t * n:(t + 1) * n])
            for key, val in fiber.entries.items():
                comps.setdefault(key, {})[m] = val
        return Section._trusted(self.profile, {k: Poly6._raw(v) for k, v in comps.items()}, tag)


@dataclass(frozen=True)
class AssembledOperator:
    level: int
    k: int
    domain: DegreeCappedSpace
    codomain: DegreeCappedSpace
    entries: dict = field(repr=False)

    @property
    def shape(self):
        return (self.codomain.dimension, self.domain.dimension)

    def matvec(self, vec) -> list:
        out = [ZERO] * self.shape[0]
        for (r, c), val in self.entries.items():
            x = vec[c]
            if x:
                out[r] = out[r] + val * x
        return out

    def column(self, c) -> dict:
        return {r: v for (r, cc), v in self.entries.items() if cc == c}


def assemble(l: int, degree_cap: int, k: int) -> AssembledOperator:
    """Exact matrix of D_l from (scriptV_l, deg <= D) to (scriptV_{l+1}, deg <= D-1)."""
    if not 0 <= l <= 2:
        raise ValueError(f"assemble: level {l} outside 0..2")
    dom = DegreeCappedSpace(IndexProfile(k, l), degree_cap)
    cod = DegreeCappedSpace(IndexProfile(k, l + 1), degree_cap - 1)
    b_in, b_out = dom.fiber_basis, cod.fiber_basis
    p, q = dom.profile.p, dom.profile.q
    stencil = _compiled_D(p, q, "x")
    # S_j(b): the fiber part multiplying d/dx_j, read in scriptV_{l+1} coordinates
    parts = []
    for vec in b_in.vectors:
        per_j = []
        for j in range(NVARS):
            fiber = {}
            for out_key, per in stencil:
                acc = ZERO
                for coef, src in per[j]:
                    val = vec.entries.get(src)
                    if val is not None:
                        acc = acc + coef * val
                if acc:
                    fiber[out_key] = acc
            per_j.append([fiber.get(key, ZERO) for key in b_out.free_keys])
        parts.append(per_j)
    row_index = {m: t for t, m in enumerate(cod.monomials)}
    n_out = b_out.dim
    entries = {}
    for t, m in enumerate(dom.monomials):
        for i in range(b_in.dim):
            c = t * b_in.dim + i
            for j in range(NVARS):
                if not m[j]:
                    continue
                target = m[:j] + (m[j] - 1,) + m[j + 1:]
                base = row_index[target] * n_out
                for r, val in enumerate(parts[i][j]):
                    if val:
                        key = (base + r, c)
                        entries[key] = entries.get(key, ZERO) + val * m[j]
    return AssembledOperator(l, k, dom, cod, {kk: v for kk, v in entries.items() if v})


# ---------------------------------------------------------------------------
# block systems in z-coordinates


def _alpha_factorial(alpha) -> int:
    return prod(factorial(a) for a in alpha)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _reverse_D(p, q):
    rev: dict = {}
    for out_key, per_j in _compiled_D(p, q, "z"):
        for j, entries in enumerate(per_j):
            for coef, src in entries:
                rev.setdefault(src, []).append((out_key, j, coef))
    return rev


def _reverse_C(p, q):
    rev: dict = {}
    if p and q:
        for out_key, terms in contraction_stencil(p, q):
            for sign, src in terms:
                rev.setdefault(src, []).append((out_key, sign))
    return rev


def _z_system(l: int, k: int, m: int):
    """Columns (key, alpha) of degree m and the sparse rows of [D ; C] hitting them."""
    prof = IndexProfile(k, l)
    p, q = prof.p, prof.q
    rev_d = _reverse_D(p, q)
    rev_c = _reverse_C(p, q)
    cols = [(key, a) for a in monomials_of_degree(m) for key in prof.keys()]
    rows: dict = {}
    for c, (key, alpha) in enumerate(cols):
        for out_key, j, coef in rev_d.get(key, ()):
            if alpha[j]:
                beta = alpha[:j] + (alpha[j] - 1,) + alpha[j + 1:]
                row = rows.setdefault(("D", out_key, beta), {})
                row[c] = row.get(c, ZERO) + coef * alpha[j]
        for out_key, sign in rev_c.get(key, ()):
            row = rows.setdefault(("C", out_key, alpha), {})
            row[c] = row.get(c, ZERO) + sign
    rows = {lab: {c: v for c, v in r.items() if v} for lab, r in rows.items()}
    return cols, {lab: r for lab, r in rows.items() if r}


def _blocks(cols, rows):
    uf = _UnionFind(len(cols))
    for row in rows.values():
        it = iter(row)
        first = next(it)
        for c in it:
            uf.union(first, c)
    col_groups: dict = {}
    for c in range(len(cols)):
        col_groups.setdefault(uf.find(c), []).append(c)
    row_groups: dict = {}
    for lab, row in rows.items():
        row_groups.setdefault(uf.find(next(iter(row))), []).append(lab)
    return [(col_groups[r], row_groups.get(r, [])) for r in sorted(col_groups)]


def _to_hermite_z(f: Section) -> dict:
    """key -> z-polynomial of exp(Laplacian/4) f."""
    return {key: to_z_coordinates(heat_flow(poly, mpq(1, 4))) for key, poly in f.components.items()}


def _from_hermite_z(profile, comps: dict, tag) -> Section:
    out = {}
    for key, terms in comps.items():
        poly = heat_flow(from_z_coordinates(Poly6._raw(terms)), mpq(-1, 4))
        if poly:
            out[key] = poly
    return Section._trusted(profile, out, tag)


# ---------------------------------------------------------------------------
# solving


@dataclass(frozen=True)
class SolveResult:
    u: Section | None
    residual_zero: bool
    compatibility_checked: bool
    min_norm_selected: bool
    degree: int = -1
    norm2: mpq | None = None
    blocks_solved: int = 0
    largest_block: tuple = (0, 0)
    exploratory: bool = False


def _check_hypothesis(k, exploratory):
    if k < 6 and not exploratory:
        raise HypothesisError(f"the resolution theorem assumes k >= 6, got k = {k}")
    if k < 4:
        raise ValueError("the complex is defined for k >= 4")


def solve(l: int, f: Section, exploratory: bool = False) -> SolveResult:
    """Minimal Gaussian-norm u with D_l u = f and deg u <= deg f + 1."""
    if not 0 <= l <= 2:
        raise ValueError(f"solve: level {l} outside 0..2")
    k = f.profile.k
    _check_hypothesis(k, exploratory)
    if f.profile != IndexProfile(k, l + 1):
        raise ValueError(f"right-hand side must sit at level {l + 1}, got {f.profile}")
    if f.profile.p and f.profile.q and not contract_section(f).is_zero():
        raise CompatibilityError("right-hand side is not contraction-free")
    if l < 2:
        residual = D(l + 1, f)
        if not residual.is_zero():
            raise CompatibilityError("D_{l+1} f != 0", residual)
    prof = IndexProfile(k, l)
    if f.is_zero():
        return SolveResult(Section.zero(prof, SCRIPT_V), True, True, True, -1, mpq(0), 0, (0, 0), k < 6)
    fz = _to_hermite_z(f)
    rhs_all: dict = {}
    for key, poly in fz.items():
        for beta, c in poly.terms.items():
            rhs_all[("D", key, beta)] = c
    top = f.degree() + 1
    sol: dict = {}
    norm2 = mpq(0)
    used = set()
    n_blocks, largest = 0, (0, 0)
    for m in range(1, top + 1):
        cols, rows = _z_system(l, k, m)
        for col_ids, labels in _blocks(cols, rows):
            rhs = [rhs_all.get(lab, ZERO) for lab in labels]
            if not any(rhs):
                continue
            used.update(lab for lab, r in zip(labels, rhs) if r)
            u_blk = _min_norm_block(cols, rows, col_ids, labels, rhs)
            if u_blk is None:
                raise TheoremContradiction(f"no solution in a degree-{m} block of D_{l} (k={k})")
            n_blocks += 1
            largest = max(largest, (len(labels), len(col_ids)))
            for c, val in u_blk.items():
                key, alpha = cols[c]
                sol.setdefault(key, {})[alpha] = val
                norm2 += val.abs2() * key_weight(key) * _alpha_factorial(alpha)
    missing = [lab for lab, c in rhs_all.items() if c and lab not in used]
    if missing:
        raise TheoremContradiction(f"right-hand side term {missing[0]} is outside the image of D_{l}")
    u = _from_hermite_z(prof, sol, SCRIPT_V)
    ok = D(l, u) == f and (not prof.p or not prof.q or contract_section(u).is_zero())
    if not ok:
        raise ArithmeticError("solver produced a section that fails the exact check")
    return SolveResult(u, True, l < 2, True, u.degree(), norm2, n_blocks, largest, k < 6)


def _min_norm_block(cols, rows, col_ids, labels, rhs):
    """u = W^-1 B^H lam with (B W^-1 B^H) lam = rhs, or None if inconsistent."""
    local = {c: i for i, c in enumerate(col_ids)}
    inv_w = [mpq(1, key_weight(cols[c][0]) * _alpha_factorial(cols[c][1])) for c in col_ids]
    brows = [{local[c]: v for c, v in rows[lab].items()} for lab in labels]
    n = len(brows)
    gram = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        ri = brows[i]
        for j in range(i, n):
            rj = brows[j]
            acc = ZERO
            small, big = (ri, rj) if len(ri) <= len(rj) else (rj, ri)
            for c in small:
                if c in big:
                    acc = acc + ri[c] * rj[c].conj() * inv_w[c]
            gram[i][j] = acc
            gram[j][i] = acc.conj()
    lam = linalg.solve(gram, rhs)
    if lam is None:
        return None
    out: dict = {}
    for i, row in enumerate(brows):
        if not lam[i]:
            continue
        for c, v in row.items():
            out[c] = out.get(c, ZERO) + v.conj() * lam[i]
    return {col_ids[c]: val * inv_w[c] for c, val in out.items() if val}


# ---------------------------------------------------------------------------
# compatible right-hand sides


def random_kernel(l: int, k: int, degree: int, rng: random.Random, bound: int = 3) -> Section:
    """Random scriptV_l section of degree <= ``degree`` annihilated by D_l.

    Each degree block of [D_l ; C] is handled separately in the Hermite/z
    picture; its exact null vectors are mixed with random Gaussian-integer
    weights and mapped back.  At l = 3 only the contraction constraint applies.
    """
    prof = IndexProfile(k, l)
    comps: dict = {}
    for m in range(0, degree + 1):
        cols, rows = _z_system(l, k, m) if l < 3 else _z_system_contraction_only(k, l, m)
        for col_ids, labels in _blocks(cols, rows):
            if labels:
                local = {c: i for i, c in enumerate(col_ids)}
                mat = [[ZERO] * len(col_ids) for _ in labels]
                for r, lab in enumerate(labels):
                    for c, v in rows[lab].items():
                        mat[r][local[c]] = v
                basis = linalg.nullspace(mat, ncols=len(col_ids))
            else:
                basis = [[ONE if i == j else ZERO for j in range(len(col_ids))] for i in range(len(col_ids))]
            for vec in basis:
                coef = ExactComplex(rng.randint(-bound, bound), rng.randint(-bound, bound))
                if not coef:
                    continue
                for i, val in enumerate(vec):
                    if val:
                        key, alpha = cols[col_ids[i]]
                        t = comps.setdefault(key, {})
                        t[alpha] = t.get(alpha, ZERO) + coef * val
    clean = {key: {a: v for a, v in t.items() if v} for key, t in comps.items()}
    return _from_hermite_z(prof, clean, SCRIPT_V)


def random_compatible(l: int, k: int, degree: int, rng: random.Random, bound: int = 3) -> Section:
    """Random right-hand side for ``solve(l, .)``: D_{l+1} f = 0 and C f = 0."""
    return random_kernel(l + 1, k, degree, rng, bound)


def _z_system_contraction_only(k: int, l: int, m: int):
    """Columns of degree m at level l with only the contraction rows (top level)."""
    prof = IndexProfile(k, l)
    rev_c = _reverse_C(prof.p, prof.q)
    cols = [(key, a) for a in monomials_of_degree(m) for key in prof.keys()]
    rows: dict = {}
    for c, (key, alpha) in enumerate(cols):
        for out_key, sign in rev_c.get(key, ()):
            row = rows.setdefault(("C", out_key, alpha), {})
            row[c] = row.get(c, ZERO) + sign
    return cols, {lab: r for lab, r in rows.items() if r}
