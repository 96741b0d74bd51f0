"""Fiber algebra on V_l = Sym^{k-l}(C^4) (x) Alt^l(C^4).

A fiber element is stored on canonical keys ``(lower, upper)``: ``lower`` is a
nondecreasing tuple of p = k - l subscripts and ``upper`` a strictly increasing
tuple of q = l superscripts, all indices in 1..4.  Any other index arrangement
is recovered by symmetry in the subscripts and by the alternating sign in the
superscripts.

Full-index tensors (used by the symmetrizers and as test oracles) are numpy
object arrays of shape ``(4,) * r``; a canonical tensor expands to one with the
q superscript axes first, then the p subscript axes.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial
from typing import Iterable, Mapping

import numpy as np
from gmpy2 import mpq

from .exact import ExactComplex, ZERO, ONE, as_exact
from . import linalg

__all__ = [
    "INDICES",
    "IndexProfile",
    "CanonicalTensor",
    "FiberBasis",
    "ProfileError",
    "canonical_keys",
    "key_weight",
    "sort_upper",
    "symmetrize",
    "antisymmetrize",
    "contract",
    "project_P1",
    "project_P2",
    "inner",
    "nullspace_basis",
    "delta",
    "epsilon",
    "delta_tensor",
    "first_order_stencil",
    "adjoint_stencil",
    "apply_first_order",
]

INDICES = (1, 2, 3, 4)


class ProfileError(ValueError):
    """Raised when an operation receives a tensor of the wrong index profile."""


@dataclass(frozen=True)
class IndexProfile:
    """k indices in total: p = k - l symmetric subscripts, q = l antisymmetric superscripts."""

    k: int
    l: int

    def __post_init__(self):
        if self.k < 0 or not 0 <= self.l <= min(4, self.k):
            raise ProfileError(f"invalid profile k={self.k}, l={self.l}")

    @classmethod
    def from_counts(cls, p: int, q: int) -> "IndexProfile":
        return cls(p + q, q)

    @property
    def p(self) -> int:
        return self.k - self.l

    @property
    def q(self) -> int:
        return self.l

    sym_count = p
    alt_count = q

    @property
    def dim(self) -> int:
        return len(canonical_keys(self.p, self.q))

    def keys(self):
        return canonical_keys(self.p, self.q)

    def __str__(self):
        return f"(k={self.k}, l={self.l})"


@lru_cache(maxsize=None)
def canonical_keys(p: int, q: int) -> tuple:
    uppers = list(itertools.combinations(INDICES, q))
    lowers = list(itertools.combinations_with_replacement(INDICES, p))
    return tuple((lo, up) for up in uppers for lo in lowers)


@lru_cache(maxsize=None)
def _key_index(p: int, q: int) -> dict:
    return {key: i for i, key in enumerate(canonical_keys(p, q))}


def key_weight(key) -> int:
    """Number of full index tuples represented by a canonical key."""
    lower, upper = key
    w = factorial(len(lower))
    for c in Counter(lower).values():
        w //= factorial(c)
    return w * factorial(len(upper))


def sort_upper(seq) -> tuple[int, tuple]:
    """Sign and increasing order of a superscript sequence; sign 0 on a repeat."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0, ()
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(seq)):
        j = i
        while j > 0 and seq[j - 1] > seq[j]:
            seq[j - 1], seq[j] = seq[j], seq[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(seq)


def delta(a: int, b: int) -> int:
    return 1 if a == b else 0


def epsilon(a: int, b: int, c: int, d: int) -> int:
    sign, srt = sort_upper((a, b, c, d))
    return sign if srt == INDICES else 0


# ---------------------------------------------------------------------------
# canonical tensors


@dataclass(frozen=True)
class CanonicalTensor:
    profile: IndexProfile
    entries: Mapping = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        valid = _key_index(self.profile.p, self.profile.q)
        for key, val in self.entries.items():
            if key not in valid:
                raise ProfileError(f"non-canonical key {key} for profile {self.profile}")
            val = as_exact(val)
            if val:
                clean[key] = val
        object.__setattr__(self, "entries", clean)

    @classmethod
    def zero(cls, profile: IndexProfile) -> "CanonicalTensor":
        return cls(profile, {})

    @classmethod
    def unit(cls, profile: IndexProfile, key) -> "CanonicalTensor":
        return cls(profile, {key: ONE})

    @classmethod
    def random(cls, profile: IndexProfile, rng, bound: int = 3) -> "CanonicalTensor":
        """Gaussian-integer entries drawn uniformly from [-bound, bound] + i[-bound, bound]."""
        return cls._trusted(
            profile,
            {
                key: ExactComplex(rng.randint(-bound, bound), rng.randint(-bound, bound))
                for key in profile.keys()
            },
        )

    @classmethod
    def _trusted(cls, profile, entries):
        t = object.__new__(cls)
        object.__setattr__(t, "profile", profile)
        object.__setattr__(t, "entries", {k: v for k, v in entries.items() if v})
        return t

    def __getitem__(self, key):
        return self.entries.get(key, ZERO)

    def component(self, lower: Iterable[int], upper: Iterable[int]) -> ExactComplex:
        """Value at an arbitrary index arrangement."""
        sign, up = sort_upper(upper)
        if not sign:
            return ZERO
        val = self.entries.get((tuple(sorted(lower)), up), ZERO)
        return val if sign > 0 else -val

    def __add__(self, other):
        self._check(other)
        out = dict(self.entries)
        for key, val in other.entries.items():
            out[key] = out.get(key, ZERO) + val
        return CanonicalTensor._trusted(self.profile, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return CanonicalTensor._trusted(self.profile, {k: -v for k, v in self.entries.items()})

    def scale(self, c) -> "CanonicalTensor":
        c = as_exact(c)
        return CanonicalTensor._trusted(self.profile, {k: c * v for k, v in self.entries.items()})

    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, CanonicalTensor):
            return NotImplemented
        return self.profile == other.profile and self.entries == other.entries

    def __hash__(self):
        return hash((self.profile, frozenset(self.entries.items())))

    def __bool__(self):
        return bool(self.entries)

    def conj(self) -> "CanonicalTensor":
        return CanonicalTensor._trusted(self.profile, {k: v.conj() for k, v in self.entries.items()})

    def _check(self, other):
        if other.profile != self.profile:
            raise ProfileError(f"profile mismatch: {self.profile} vs {other.profile}")

    def to_vector(self) -> list[ExactComplex]:
        return [self[key] for key in self.profile.keys()]

    @classmethod
    def from_vector(cls, profile, vec) -> "CanonicalTensor":
        return cls._trusted(profile, dict(zip(profile.keys(), vec)))

    def to_full(self) -> np.ndarray:
        """Full-index array; superscript axes first, then subscript axes."""
        p, q = self.profile.p, self.profile.q
        arr = np.empty((4,) * (p + q), dtype=object)
        for idx in itertools.product(range(4), repeat=p + q):
            up = [i + 1 for i in idx[:q]]
            lo = [i + 1 for i in idx[q:]]
            arr[idx] = self.component(lo, up)
        return arr

    @classmethod
    def from_full(cls, profile: IndexProfile, arr: np.ndarray) -> "CanonicalTensor":
        """Read the canonical entries of a full-index array (no symmetry check)."""
        q = profile.q
        entries = {}
        for lo, up in profile.keys():
            idx = tuple(a - 1 for a in up) + tuple(b - 1 for b in lo)
            entries[(lo, up)] = as_exact(arr[idx])
        return cls._trusted(profile, entries)


def delta_tensor() -> CanonicalTensor:
    """delta^A_B as a fiber element at k = 2, l = 1."""
    return CanonicalTensor(IndexProfile(2, 1), {((a,), (a,)): ONE for a in INDICES})


# ---------------------------------------------------------------------------
# full-index symmetrizers


def _perm_sign(perm) -> int:
    return sort_upper(perm)[0]


def symmetrize(t: np.ndarray) -> np.ndarray:
    """Average over all permutations of the axes."""
    r = t.ndim
    if r <= 1:
        return t.copy()
    perms = list(itertools.permutations(range(r)))
    acc = sum(np.transpose(t, perm) for perm in perms)
    return _divide(acc, len(perms))


def antisymmetrize(t: np.ndarray) -> np.ndarray:
    """Signed average over all permutations of the axes."""
    r = t.ndim
    if r <= 1:
        return t.copy()
    perms = list(itertools.permutations(range(r)))
    acc = sum(_perm_sign(perm) * np.transpose(t, perm) for perm in perms)
    return _divide(acc, len(perms))


def _divide(arr: np.ndarray, n: int) -> np.ndarray:
    out = np.empty(arr.shape, dtype=object)
    d = mpq(n)
    for idx, val in np.ndenumerate(arr):
        out[idx] = as_exact(val) / d
    return out


# ---------------------------------------------------------------------------
# contraction and projections


@lru_cache(maxsize=None)
def contraction_stencil(p: int, q: int) -> tuple:
    """For each output key at (p-1, q-1): the signed input keys summed over C."""
    if p < 1 or q < 1:
        raise ProfileError(f"contraction needs p >= 1 and q >= 1, got ({p}, {q})")
    rows = []
    for lo, up in canonical_keys(p - 1, q - 1):
        terms = []
        for c in INDICES:
            sign, srt = sort_upper((c,) + up)
            if sign:
                terms.append((sign, (tuple(sorted(lo + (c,))), srt)))
        rows.append(((lo, up), tuple(terms)))
    return tuple(rows)


def contract(t: CanonicalTensor) -> CanonicalTensor:
    """C(f)^{A..}_{B..} = sum_C f^{C A..}_{B.. C}."""
    p, q = t.profile.p, t.profile.q
    stencil = contraction_stencil(p, q)
    out = {}
    ent = t.entries
    for key, terms in stencil:
        acc = ZERO
        for sign, src in terms:
            val = ent.get(src)
            if val is not None:
                acc = acc + val if sign > 0 else acc - val
        if acc:
            out[key] = acc
    return CanonicalTensor._trusted(IndexProfile.from_counts(p - 1, q - 1), out)


def _drop_one(lower: tuple, a: int) -> tuple:
    i = lower.index(a)
    return lower[:i] + lower[i + 1:]


def project_P1(f: CanonicalTensor) -> CanonicalTensor:
    """P1(f)^A_B = (k-1)/(k+2) delta^A_(B1 C(f)_{B2..}), written in closed form."""
    prof = f.profile
    if prof.q != 1:
        raise ProfileError(f"P1 acts on one superscript, got {prof}")
    k = prof.k
    if prof.p == 0:
        return CanonicalTensor.zero(prof)
    g = contract(f)
    scale = mpq(1, k + 2)
    out = {}
    for lo, up in prof.keys():
        (a,) = up
        m = lo.count(a)
        if m:
            val = g[(_drop_one(lo, a), ())]
            if val:
                out[(lo, up)] = val * (scale * m)
    return CanonicalTensor._trusted(prof, out)


def project_P2(f: CanonicalTensor) -> CanonicalTensor:
    """P2(f)^{A1A2}_B = 2(k-2)/k delta^{[A1}_(B1 C(f)^{A2]}_{B2..})."""
    prof = f.profile
    if prof.q != 2:
        raise ProfileError(f"P2 acts on two superscripts, got {prof}")
    k = prof.k
    if prof.p == 0:
        return CanonicalTensor.zero(prof)
    g = contract(f)
    scale = mpq(1, k)
    out = {}
    for lo, up in prof.keys():
        a1, a2 = up
        acc = ZERO
        m1 = lo.count(a1)
        if m1:
            acc = acc + g[(_drop_one(lo, a1), (a2,))] * m1
        m2 = lo.count(a2)
        if m2:
            acc = acc - g[(_drop_one(lo, a2), (a1,))] * m2
        if acc:
            out[(lo, up)] = acc * scale
    return CanonicalTensor._trusted(prof, out)


def inner(s: CanonicalTensor, t: CanonicalTensor) -> ExactComplex:
    """Hermitian pairing summed over every full index tuple."""
    if s.profile != t.profile:
        raise ProfileError(f"profile mismatch: {s.profile} vs {t.profile}")
    acc = ZERO
    for key, val in s.entries.items():
        other = t.entries.get(key)
        if other is not None:
            acc = acc + (val * other.conj()) * key_weight(key)
    return acc


# ---------------------------------------------------------------------------
# kernel of the contraction


def _torus_weight(key) -> tuple:
    lo, up = key
    return tuple(up.count(a) - lo.count(a) for a in INDICES)


@dataclass(frozen=True)
class FiberBasis:
    """Ordered basis of V_l or of its contraction-free part.

    ``free_keys[i]`` is the canonical key at which ``vectors[i]`` has entry 1
    and every other basis vector has entry 0, so the coordinates of any element
    of the span are its entries at the free keys.
    """

    profile: IndexProfile
    vectors: tuple
    free_keys: tuple

    def __len__(self):
        return len(self.vectors)

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def coordinates(self, t: CanonicalTensor) -> list[ExactComplex]:
        return [t[key] for key in self.free_keys]

    def combine(self, coords) -> CanonicalTensor:
        out: dict = {}
        for c, vec in zip(coords, self.vectors):
            c = as_exact(c)
            if not c:
                continue
            for key, val in vec.entries.items():
                out[key] = out.get(key, ZERO) + c * val
        return CanonicalTensor._trusted(self.profile, out)


@lru_cache(maxsize=None)
def _nullspace_basis_cached(k: int, l: int) -> FiberBasis:
    prof = IndexProfile(k, l)
    keys = prof.keys()
    if prof.q == 0 or prof.p == 0:
        # no contraction is possible: the whole fiber is contraction-free
        vecs = tuple(CanonicalTensor.unit(prof, key) for key in keys)
        return FiberBasis(prof, vecs, tuple(keys))
    stencil = contraction_stencil(prof.p, prof.q)
    blocks: dict = {}
    for key in keys:
        blocks.setdefault(_torus_weight(key), []).append(key)
    out_rows: dict = {}
    for out_key, terms in stencil:
        out_rows.setdefault(_torus_weight(out_key), []).append(terms)
    vecs, free = [], []
    for wt in sorted(blocks):
        cols = blocks[wt]
        col_of = {key: j for j, key in enumerate(cols)}
        rows = []
        for terms in out_rows.get(wt, []):
            row = [ZERO] * len(cols)
            for sign, src in terms:
                row[col_of[src]] = row[col_of[src]] + sign
            rows.append(row)
        ns, fcols = linalg.kernel_basis(rows, ncols=len(cols))
        for vec, fc in zip(ns, fcols):
            vecs.append(CanonicalTensor._trusted(prof, dict(zip(cols, vec))))
            free.append(cols[fc])
    order = sorted(range(len(vecs)), key=lambda i: _key_index(prof.p, prof.q)[free[i]])
    return FiberBasis(prof, tuple(vecs[i] for i in order), tuple(free[i] for i in order))


def nullspace_basis(profile: IndexProfile) -> FiberBasis:
    """Exact basis of ker C restricted to V_l, built block by block in torus weight."""
    return _nullspace_basis_cached(profile.k, profile.l)


# ---------------------------------------------------------------------------
# index stencils shared by the differential operators and their symbols


@lru_cache(maxsize=None)
def first_order_stencil(p: int, q: int) -> tuple:
    """Index pattern of X^{B1[A1} f^{A2..A_{q+1}]}_{B1 B2..Bp} summed over B1.

    Maps profile (p, q) to (p - 1, q + 1).  For each output key the entries are
    ``(coef, B1, A_s, in_key)`` meaning coef * X^{B1 A_s} applied to f[in_key];
    the 1/(q+1) of the antisymmetrization and the alternating signs are folded
    into coef.
    """
    if p < 1 or q > 3:
        raise ProfileError(f"no first-order stencil from ({p}, {q})")
    rows = []
    norm = mpq(1, q + 1)
    for lo, up in canonical_keys(p - 1, q + 1):
        terms = []
        for s, a in enumerate(up):
            rest = up[:s] + up[s + 1:]
            coef = norm if s % 2 == 0 else -norm
            for b1 in INDICES:
                if b1 == a:
                    continue
                terms.append((coef, b1, a, (tuple(sorted(lo + (b1,))), rest)))
        rows.append(((lo, up), tuple(terms)))
    return tuple(rows)


@lru_cache(maxsize=None)
def adjoint_stencil(p: int, q: int) -> tuple:
    """Index pattern of -Y_{E(B1} f^{E A..}_{B2..Bp)} summed over E.

    Maps profile (p - 1, q + 1) to (p, q).  Entries are ``(coef, E, B_s, in_key)``
    meaning coef * Y_{E B_s} applied to f[in_key].
    """
    if p < 1 or q > 3:
        raise ProfileError(f"no adjoint stencil onto ({p}, {q})")
    rows = []
    norm = mpq(-1, p)
    for lo, up in canonical_keys(p, q):
        terms = []
        for s in range(p):
            b = lo[s]
            rest = lo[:s] + lo[s + 1:]
            for e in INDICES:
                if e == b:
                    continue
                sign, srt = sort_upper((e,) + up)
                if sign:
                    terms.append((norm * sign, e, b, (rest, srt)))
        rows.append(((lo, up), tuple(terms)))
    return tuple(rows)


def apply_first_order(table, t: CanonicalTensor) -> CanonicalTensor:
    """sum_{B1} X^{B1[A1} t^{A2..]}_{B1..} for a 4x4 table X of scalars."""
    p, q = t.profile.p, t.profile.q
    out = {}
    ent = t.entries
    for key, terms in first_order_stencil(p, q):
        acc = ZERO
        for coef, b1, a, src in terms:
            val = ent.get(src)
            if val is not None:
                x = table[b1][a]
                if x:
                    acc = acc + x * val * coef
        if acc:
            out[key] = acc
    return CanonicalTensor._trusted(IndexProfile.from_counts(p - 1, q + 1), out)
