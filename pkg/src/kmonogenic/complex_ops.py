"""Tensor-valued polynomial sections and the operators of the complex.

Every operator here is a fiber stencil (a fixed linear map between canonical
keys) followed by scalar operators on the polynomial components:

* D_l f    = sum_j d/dx_j  (S_j f)      with S_j built from nabla^{AB}
* D_l* f   = sum_j (2 x_j - d/dx_j) (T_j f)   with T_j built from nabla_{AB}

The second form is Theta_{AB} = sum_j d_j (2 x_j - d/dx_j) pushed through the
index sums, so each polynomial is differentiated once per (key, j) rather than
once per stencil entry.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

from gmpy2 import mpq

from .exact import ExactComplex, ZERO, ONE, as_exact
from .poly_field import (
    NABLA_LOWER,
    NABLA_UPPER,
    NABLA_UPPER_Z,
    NVARS,
    Poly6,
    _axpy,
    _deriv,
    _mul_var,
    gaussian_inner_terms,
    monomials_upto,
)
from .tensor_core import (
    CanonicalTensor,
    IndexProfile,
    ProfileError,
    adjoint_stencil,
    contraction_stencil,
    first_order_stencil,
    key_weight,
    nullspace_basis,
    project_P1,
    project_P2,
)

__all__ = [
    "Section",
    "ContractViolation",
    "HypothesisError",
    "D",
    "D_star_full",
    "theta_restricted",
    "box",
    "estimate_check",
    "EstimateReport",
    "estimate_constants",
    "section_inner",
    "section_norm2",
    "random_section",
    "contract_section",
]

V = "V"
SCRIPT_V = "scriptV"


class ContractViolation(ValueError):
    """A section tagged contraction-free has nonzero contraction, or the tag is missing."""


class HypothesisError(ValueError):
    """The request lies outside the theorem hypothesis (k >= 6) in strict mode."""


@dataclass(frozen=True)
class Section:
    """A V_l- or scriptV_l-valued polynomial field: canonical key -> Poly6."""

    profile: IndexProfile
    components: Mapping = field(default_factory=dict)
    tag: str = V

    def __post_init__(self):
        if self.tag not in (V, SCRIPT_V):
            raise ValueError(f"unknown subspace tag {self.tag!r}")
        keys = set(self.profile.keys())
        clean = {}
        for key, poly in self.components.items():
            if key not in keys:
                raise ProfileError(f"non-canonical key {key} for {self.profile}")
            if not isinstance(poly, Poly6):
                raise TypeError("section components must be Poly6")
            if poly:
                clean[key] = poly
        object.__setattr__(self, "components", clean)
        if self.tag == SCRIPT_V and self.profile.p and self.profile.q:
            c = contract_section(self)
            if not c.is_zero():
                raise ContractViolation("section tagged scriptV has nonzero contraction")

    @classmethod
    def _trusted(cls, profile, components, tag=V):
        s = object.__new__(cls)
        object.__setattr__(s, "profile", profile)
        object.__setattr__(s, "components", {k: p for k, p in components.items() if p})
        object.__setattr__(s, "tag", tag)
        return s

    @classmethod
    def zero(cls, profile, tag=V):
        return cls._trusted(profile, {}, tag)

    @property
    def k(self):
        return self.profile.k

    @property
    def level(self):
        return self.profile.l

    def __getitem__(self, key) -> Poly6:
        return self.components.get(key, Poly6._raw({}))

    def is_zero(self) -> bool:
        return not self.components

    def degree(self) -> int:
        return max((p.degree() for p in self.components.values()), default=-1)

    def with_tag(self, tag) -> "Section":
        return Section(self.profile, self.components, tag)

    def _combine(self, other, c):
        if other.profile != self.profile:
            raise ProfileError(f"profile mismatch: {self.profile} vs {other.profile}")
        out = {k: dict(p.terms) for k, p in self.components.items()}
        for key, poly in other.components.items():
            _axpy(out.setdefault(key, {}), c, poly.terms)
        tag = SCRIPT_V if self.tag == other.tag == SCRIPT_V else V
        return Section._trusted(self.profile, {k: Poly6._raw(t) for k, t in out.items()}, tag)

    def __add__(self, other):
        return self._combine(other, ONE)

    def __sub__(self, other):
        return self._combine(other, -ONE)

    def __neg__(self):
        return self.scale(-ONE)

    def scale(self, c) -> "Section":
        c = as_exact(c)
        return Section._trusted(self.profile, {k: p * c for k, p in self.components.items()}, self.tag)

    def __eq__(self, other):
        if not isinstance(other, Section):
            return NotImplemented
        return self.profile == other.profile and self.components == other.components

    __hash__ = None

    def fiber_at(self, exp) -> CanonicalTensor:
        """The fiber coefficient of a single monomial."""
        exp = tuple(exp)
        return CanonicalTensor._trusted(
            self.profile, {k: p.terms[exp] for k, p in self.components.items() if exp in p.terms}
        )

    def monomials(self) -> set:
        out = set()
        for p in self.components.values():
            out.update(p.terms)
        return out


def contract_section(f: Section) -> Section:
    p, q = f.profile.p, f.profile.q
    out = {}
    for key, terms in contraction_stencil(p, q):
        acc: dict = {}
        for sign, src in terms:
            poly = f.components.get(src)
            if poly is not None:
                _axpy(acc, ONE if sign > 0 else -ONE, poly.terms)
        if acc:
            out[key] = Poly6._raw(acc)
    return Section._trusted(IndexProfile.from_counts(p - 1, q - 1), out)


# ---------------------------------------------------------------------------
# compiled stencils


def _merge(entries):
    merged: dict = {}
    for coef, src in entries:
        merged[src] = merged.get(src, ZERO) + coef
    return tuple((c, s) for s, c in merged.items() if c)


@lru_cache(maxsize=None)
def _compiled_D(p: int, q: int, coords: str = "x") -> tuple:
    """out_key -> per-variable tuples of (coef, in_key) for D from (p, q).

    ``coords`` selects the variables: "x" for x0..x5, "z" for the complex
    coordinates of ``poly_field.Z_PAIRS``.
    """
    table = NABLA_UPPER if coords == "x" else NABLA_UPPER_Z
    rows = []
    for key, terms in first_order_stencil(p, q):
        per_j = [[] for _ in range(NVARS)]
        for coef, b1, a, src in terms:
            for j, c in enumerate(table[(b1, a)]):
                if c:
                    per_j[j].append((c * coef, src))
        rows.append((key, tuple(_merge(e) for e in per_j)))
    return tuple(rows)


@lru_cache(maxsize=None)
def _compiled_D_star(p: int, q: int) -> tuple:
    """out_key -> per-variable tuples of (coef, in_key) for D* onto (p, q)."""
    rows = []
    for key, terms in adjoint_stencil(p, q):
        per_j = [[] for _ in range(NVARS)]
        for coef, e, b, src in terms:
            for j, d in enumerate(NABLA_LOWER[(e, b)]):
                if d:
                    per_j[j].append((d * coef, src))
        rows.append((key, tuple(_merge(e) for e in per_j)))
    return tuple(rows)


@lru_cache(maxsize=None)
def _compiled_projection(k: int, l: int) -> tuple:
    """The fiber map P_l as out_key -> ((coef, in_key), ...)."""
    prof = IndexProfile(k, l)
    proj = project_P1 if l == 1 else project_P2
    cols: dict = {}
    for key in prof.keys():
        image = proj(CanonicalTensor.unit(prof, key))
        for out_key, val in image.entries.items():
            cols.setdefault(out_key, []).append((val, key))
    return tuple((k_, tuple(v)) for k_, v in cols.items())


def _linear_combination(entries, comps) -> dict:
    acc: dict = {}
    for coef, src in entries:
        poly = comps.get(src)
        if poly is not None:
            _axpy(acc, coef, poly.terms)
    return acc


def _check_level(l, lo, hi, what):
    if not lo <= l <= hi:
        raise ValueError(f"{what}: level {l} outside {lo}..{hi}")


def D(l: int, f: Section) -> Section:
    """(D_l f)^{A1..A_{l+1}}_{B2..} = sum_{B1} nabla^{B1[A1} f^{A2..]}_{B1 B2..}."""
    _check_level(l, 0, 3, "D")
    if f.profile.l != l:
        raise ProfileError(f"D({l}) applied to a section at level {f.profile.l}")
    p, q = f.profile.p, f.profile.q
    out_prof = IndexProfile.from_counts(p - 1, q + 1)
    if p == 0:
        return Section.zero(out_prof, f.tag)
    comps = f.components
    out = {}
    for key, per_j in _compiled_D(p, q):
        acc: dict = {}
        for j, entries in enumerate(per_j):
            if entries:
                lin = _linear_combination(entries, comps)
                if lin:
                    _axpy(acc, ONE, _deriv(lin, j))
        if acc:
            out[key] = Poly6._raw(acc)
    return Section._trusted(out_prof, out, f.tag)


def D_star_full(l: int, f: Section) -> Section:
    """(D_l* f)^{A..}_{B1..} = -sum_E Theta_{E(B1} f^{E A..}_{B2..)}, valued in V_l."""
    _check_level(l, 0, 2, "D_star_full")
    if f.profile.l != l + 1:
        raise ProfileError(f"D*({l}) expects level {l + 1}, got {f.profile.l}")
    p, q = f.profile.p + 1, f.profile.q - 1
    comps = f.components
    out = {}
    for key, per_j in _compiled_D_star(p, q):
        acc: dict = {}
        for j, entries in enumerate(per_j):
            if entries:
                lin = _linear_combination(entries, comps)
                if lin:
                    _axpy(acc, ExactComplex(2), _mul_var(lin, j))
                    _axpy(acc, -ONE, _deriv(lin, j))
        if acc:
            out[key] = Poly6._raw(acc)
    return Section._trusted(IndexProfile.from_counts(p, q), out, V)


def apply_projection(g: Section) -> Section:
    """Fiber-wise P_1 or P_2 according to the level of g."""
    l = g.profile.l
    if l not in (1, 2):
        raise ProfileError("projections exist at levels 1 and 2 only")
    out = {}
    for key, entries in _compiled_projection(g.profile.k, l):
        acc = _linear_combination(entries, g.components)
        if acc:
            out[key] = Poly6._raw(acc)
    return Section._trusted(g.profile, out, V)


def theta_restricted(l: int, f: Section) -> Section:
    """Theta_l f = D_l* f - P(D_l* f); contraction-free output."""
    _check_level(l, 0, 2, "theta_restricted")
    if f.tag != SCRIPT_V:
        raise ContractViolation("theta_restricted needs a scriptV-tagged section")
    g = D_star_full(l, f)
    if l > 0:
        g = g - apply_projection(g)
    return Section._trusted(g.profile, g.components, SCRIPT_V)


def box(l: int, f: Section) -> Section:
    """Hodge Laplacian D_{l-1} Theta_{l-1} + Theta_l D_l, with box_3 = D_2 Theta_2."""
    _check_level(l, 1, 3, "box")
    if f.tag != SCRIPT_V:
        raise ContractViolation("box needs a scriptV-tagged section")
    out = D(l - 1, theta_restricted(l - 1, f))
    if l < 3:
        out = out + theta_restricted(l, D(l, f))
    return Section._trusted(out.profile, out.components, SCRIPT_V)


# ---------------------------------------------------------------------------
# pairings


def section_inner(f: Section, h: Section) -> ExactComplex:
    """Gaussian-weighted pairing of two sections, summed over all full index tuples."""
    if f.profile != h.profile:
        raise ProfileError(f"profile mismatch: {f.profile} vs {h.profile}")
    re, im = mpq(0), mpq(0)
    for key, poly in f.components.items():
        other = h.components.get(key)
        if other is None:
            continue
        val = gaussian_inner_terms(poly.terms, other.terms)
        w = key_weight(key)
        re += val.re * w
        im += val.im * w
    return ExactComplex._raw(re, im)


def section_norm2(f: Section) -> mpq:
    return section_inner(f, f).re


# ---------------------------------------------------------------------------
# the L2 estimate


def estimate_constants(k: int, l: int) -> tuple:
    """Constants (a, b) of ||f||^2 <= a ||Theta_{l-1} f||^2 + b ||D_l f||^2."""
    if l == 1:
        return mpq(k, 4 * (k - 1)), mpq(1, 2)
    if l == 2:
        return mpq(k - 1, 4 * (k - 2)), mpq(3, 8)
    if l == 3:
        return mpq(k - 2, 4 * (k - 3)), None
    raise ValueError(f"estimate is stated for levels 1..3, got {l}")


@dataclass(frozen=True)
class EstimateReport:
    k: int
    level: int
    lhs: mpq
    rhs: mpq
    adjoint_term: mpq
    d_term: mpq | None
    holds: bool
    exploratory: bool = False


def estimate_check(l: int, k: int, f: Section, strict: bool = True) -> EstimateReport:
    """Exact comparison of ||f||^2 with the weighted sum of ||Theta f||^2 and ||D f||^2."""
    if k < 6 and strict:
        raise HypothesisError(f"the estimate assumes k >= 6, got k = {k}; use exploratory mode")
    if f.profile != IndexProfile(k, l):
        raise ProfileError(f"section profile {f.profile} does not match k={k}, l={l}")
    if f.tag != SCRIPT_V:
        raise ContractViolation("estimate_check needs a scriptV-tagged section")
    a, b = estimate_constants(k, l)
    lhs = section_norm2(f)
    adj = section_norm2(theta_restricted(l - 1, f))
    rhs = a * adj
    d_term = None
    if b is not None:
        d_term = section_norm2(D(l, f))
        rhs += b * d_term
    return EstimateReport(k, l, lhs, rhs, adj, d_term, lhs <= rhs, exploratory=k < 6)


# ---------------------------------------------------------------------------
# random sections


def _random_coeff(rng: random.Random, bound: int) -> ExactComplex:
    return ExactComplex(rng.randint(-bound, bound), rng.randint(-bound, bound))


def random_section(
    k: int,
    l: int,
    degree: int,
    rng: random.Random,
    tag: str = SCRIPT_V,
    bound: int = 3,
    homogeneous: bool = False,
) -> Section:
    """Seeded random section with small Gaussian-integer coefficients.

    For the contraction-free tag: level 0 is unconstrained, levels 1 and 2 are
    pushed through (I - P_l), and levels 3 and 4 are random combinations of the
    exact nullspace basis.
    """
    prof = IndexProfile(k, l)
    monos = monomials_upto(degree)
    if homogeneous:
        monos = tuple(e for e in monos if sum(e) == degree)
    if tag == SCRIPT_V and l >= 3 and prof.p:
        basis = nullspace_basis(prof)
        comps: dict = {}
        for exp in monos:
            coords = [_random_coeff(rng, bound) for _ in range(basis.dim)]
            fiber = basis.combine(coords)
            for key, val in fiber.entries.items():
                comps.setdefault(key, {})[exp] = val
        return Section._trusted(prof, {key: Poly6._raw(t) for key, t in comps.items()}, SCRIPT_V)
    comps = {}
    for key in prof.keys():
        terms = {}
        for exp in monos:
            c = _random_coeff(rng, bound)
            if c:
                terms[exp] = c
        comps[key] = Poly6._raw(terms)
    f = Section._trusted(prof, comps, V)
    if tag == V or l == 0 or not prof.p:
        return Section._trusted(prof, f.components, tag)
    g = f - apply_projection(f)
    return Section._trusted(prof, g.components, SCRIPT_V)
