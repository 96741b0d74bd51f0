"""Verification suites returning machine-readable reports.

Every randomized check draws from ``random.Random`` seeded by a string built
from the user seed and the check coordinates, so a report depends only on its
arguments and not on which other checks ran before it.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field
from itertools import product
from math import comb

from gmpy2 import mpq

from .complex_ops import (
    D,
    SCRIPT_V,
    box,
    contract_section,
    estimate_check,
    random_section,
    section_inner,
    theta_restricted,
)
from .poly_field import (
    NVARS,
    Poly6,
    commutator_check,
    commutator_expected,
    monomials_upto,
)
from .symbol import (
    build_M,
    exactness_report,
    kernel_basis,
    lift_xi,
    lifted_symbol_tilde,
    preimage_sigma0,
    preimage_sigma1,
    preimage_sigma2,
    random_covector,
    random_kernel_element,
    sigma_apply,
)
from .tensor_core import (
    INDICES,
    CanonicalTensor,
    IndexProfile,
    contract,
    delta,
    epsilon,
    inner,
    nullspace_basis,
    project_P1,
    project_P2,
)

__all__ = [
    "Check",
    "Report",
    "UsageError",
    "seeded",
    "suite_algebra",
    "suite_complex",
    "suite_adjoint",
    "suite_commutator",
    "suite_estimate",
    "suite_exactness",
    "suite_preimage",
    "dims_table",
]


class UsageError(ValueError):
    """Arguments outside the domain of a command."""


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    witness: str = ""


@dataclass
class Report:
    command: str
    seed: int | None
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, witness: str = "") -> bool:
        self.checks.append(Check(name, bool(passed), witness))
        return passed

    def first_failure(self) -> Check | None:
        return next((c for c in self.checks if not c.passed), None)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "seed": self.seed,
            "checks": [asdict(c) for c in self.checks],
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        lines = [f"# {self.command}" + (f" (seed {self.seed})" if self.seed is not None else "")]
        for c in self.checks:
            tail = f"  [{c.witness}]" if c.witness else ""
            lines.append(f"{'PASS' if c.passed else 'FAIL'}  {c.name}{tail}")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'} ({len(self.checks)} checks)")
        return "\n".join(lines) + "\n"


def seeded(seed, *coords) -> random.Random:
    return random.Random(":".join(str(x) for x in (seed, *coords)))


def _q(x) -> str:
    x = mpq(x)
    return f"{x.numerator}/{x.denominator}"


def _require_k(k: int, lo: int = 4):
    if k < lo:
        raise UsageError(f"the complex requires k >= {lo}, got k = {k}")


# ---------------------------------------------------------------------------


def dims_table(k: int) -> list[dict]:
    """dim V_l and dim scriptV_l for l = 0..4 (rows with l > k are omitted)."""
    if k < 1:
        raise UsageError(f"k must be positive, got {k}")
    rows = []
    for l in range(0, min(4, k) + 1):
        prof = IndexProfile(k, l)
        rows.append({"l": l, "V": comb(k - l + 3, 3) * comb(4, l), "scriptV": nullspace_basis(prof).dim})
    return rows


def suite_algebra(k: int, trials: int, seed: int) -> Report:
    _require_k(k, 2)
    rep = Report(f"verify algebra --k {k} --trials {trials}", seed)
    dims = dims_table(k)
    for row in dims:
        rep.add(f"dim V_{row['l']} = key count", row["V"] == IndexProfile(k, row["l"]).dim, str(row["V"]))
    if k >= 5:
        rep.add("dim scriptV_4 = 0", dims[4]["scriptV"] == 0, str(dims[4]["scriptV"]))
    elif k == 4:
        # Sym^0 (x) Alt^4 has no subscript to contract, so ker C is all of V_4
        rep.add("dim scriptV_4 = 1 (nothing to contract at k = 4)", dims[4]["scriptV"] == 1, str(dims[4]["scriptV"]))
    if k >= 4:
        alt = sum((-1) ** r["l"] * r["scriptV"] for r in dims[:4])
        rep.add("alternating sum of dim scriptV_l over l = 0..3 is 0", alt == 0, str(alt))
    ok = all(
        sum(epsilon(a, b, c, d_) * epsilon(c, d_, e, f) for c in INDICES for d_ in INDICES)
        == 2 * (delta(a, e) * delta(b, f) - delta(a, f) * delta(b, e))
        for a, b, e, f in product(INDICES, repeat=4)
    )
    rep.add("epsilon contraction identity (256 tuples)", ok)
    for l, proj, ratio in ((1, project_P1, mpq(k - 1, k + 2)), (2, project_P2, mpq(2 * (k - 2), k))):
        prof = IndexProfile(k, l)
        basis = nullspace_basis(prof).vectors
        rng = seeded(seed, "algebra", k, l)
        bad = {"idempotent": 0, "contraction kept": 0, "orthogonal": 0, "norm identity": 0}
        for _ in range(trials):
            f = CanonicalTensor.random(prof, rng)
            pf = proj(f)
            bad["idempotent"] += proj(pf) != pf
            bad["contraction kept"] += contract(pf) != contract(f)
            bad["orthogonal"] += any(inner(pf, h) for h in basis)
            cf = contract(f)
            bad["norm identity"] += inner(pf, pf) != inner(cf, cf) * ratio
        for what, n in bad.items():
            rep.add(f"P_{l} {what} ({trials} fibers)", n == 0, f"{n} failures")
    if k >= 4:
        prof = IndexProfile(k, 2)
        rng = seeded(seed, "algebra", k, "CC")
        n = sum(bool(contract(contract(CanonicalTensor.random(prof, rng))).entries) for _ in range(trials))
        rep.add(f"C o C = 0 ({trials} fibers)", n == 0, f"{n} failures")
    return rep


def suite_complex(k: int, degree: int, trials: int, seed: int) -> Report:
    _require_k(k)
    rep = Report(f"verify complex --k {k} --degree {degree} --trials {trials}", seed)
    for l in range(3):
        rng = seeded(seed, "complex", k, l)
        bad_dd = bad_c = 0
        for _ in range(trials):
            f = random_section(k, l, degree, rng)
            g = D(l, f)
            bad_dd += not D(l + 1, g).is_zero()
            bad_c += not contract_section(g).is_zero()
        rep.add(f"D_{l + 1} D_{l} = 0", bad_dd == 0, f"{bad_dd}/{trials} nonzero")
        rep.add(f"C D_{l} = 0 on scriptV_{l}", bad_c == 0, f"{bad_c}/{trials} nonzero")
    return rep


def suite_adjoint(k: int, degree: int, trials: int, seed: int) -> Report:
    _require_k(k)
    rep = Report(f"verify adjoint --k {k} --degree {degree} --trials {trials}", seed)
    for l in range(3):
        rng = seeded(seed, "adjoint", k, l)
        bad, last = 0, ""
        for _ in range(trials):
            u = random_section(k, l, degree, rng)
            f = random_section(k, l + 1, degree, rng)
            lhs, rhs = section_inner(D(l, u), f), section_inner(u, theta_restricted(l, f))
            bad += lhs != rhs
            last = str(lhs)
        rep.add(f"<D_{l} u, f> = <u, Theta_{l} f>", bad == 0, f"{bad}/{trials} mismatches; last pairing {last}")
    rng = seeded(seed, "adjoint", k, "box")
    u = random_section(k, 1, min(degree, 2), rng)
    w = random_section(k, 1, min(degree, 2), rng)
    a, b = section_inner(box(1, u), w), section_inner(u, box(1, w))
    rep.add("<box_1 u, w> = <u, box_1 w>", a == b, str(a))
    return rep


def suite_commutator(degree: int = 3) -> Report:
    rep = Report(f"verify commutator --degree {degree}", None)
    monos = monomials_upto(degree)
    bad = None
    for a, b, c, d_ in product(INDICES, repeat=4):
        for e in monos:
            p = Poly6.monomial(e)
            if commutator_check(a, b, c, d_, p) != commutator_expected(a, b, c, d_, p):
                bad = (a, b, c, d_, e)
                break
        if bad:
            break
    rep.add(
        f"[nabla^AB, Theta_CD] = 4(d^A_C d^B_D - d^A_D d^B_C) on {len(monos)} monomials x 256 tuples",
        bad is None,
        f"first failure {bad}" if bad else "",
    )
    return rep


def suite_estimate(k: int, levels, degree: int, trials: int, seed: int, exploratory: bool = False) -> Report:
    _require_k(k)
    if k < 6 and not exploratory:
        raise UsageError(f"the L2 estimate assumes k >= 6 (got k = {k}); pass --exploratory to sample anyway")
    rep = Report(f"verify estimate --k {k} --l {','.join(map(str, levels))} --degree {degree} --trials {trials}", seed)
    for l in levels:
        if l not in (1, 2, 3):
            raise UsageError(f"estimate levels are 1, 2, 3; got {l}")
        rng = seeded(seed, "estimate", k, l)
        worst, bad = mpq(0), 0
        for _ in range(trials):
            f = random_section(k, l, degree, rng)
            r = estimate_check(l, k, f, strict=not exploratory)
            bad += not r.holds
            if r.rhs:
                worst = max(worst, r.lhs / r.rhs)
        tag = " (exploratory, outside k >= 6)" if k < 6 else ""
        rep.add(f"||f||^2 <= estimate rhs at l={l}{tag}", bad == 0, f"{bad}/{trials} violations; max lhs/rhs {_q(worst)}")
    return rep


def _covectors(v, samples, seed):
    if v is not None:
        if not any(v):
            raise UsageError("covector v must be nonzero")
        return [tuple(mpq(x) for x in v)]
    rng = seeded(seed, "covectors")
    return [random_covector(rng) for _ in range(samples)]


def _vstr(v) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


def m_identity_holds(m) -> bool:
    n2 = m.norm2
    prod_ = m.product_with_conjugate_transpose()
    return all(prod_[a][b] == (n2 if a == b else 0) for a in range(4) for b in range(4))


def suite_exactness(k: int, v=None, samples: int = 25, seed: int = 0, method: str = "certified") -> Report:
    _require_k(k)
    rep = Report(f"symbol exactness --k {k} --samples {samples if v is None else 1}", seed)
    for vec in _covectors(v, samples, seed):
        m = build_M(vec)
        rep.add(f"M conj(M)^T = |v|^2 I at v={_vstr(vec)}", m_identity_holds(m))
        r = exactness_report(k, vec, method)
        witness = f"dims={list(r.dims)} ranks={list(r.ranks)}"
        rep.add(f"symbol sequence exact at v={_vstr(vec)}", r.all_true, witness)
    return rep


def suite_preimage(k: int, level: int, v=None, samples: int = 1, trials: int = 10, seed: int = 0) -> Report:
    _require_k(k)
    if level not in (0, 1, 2):
        raise UsageError(f"preimage level must be 0, 1 or 2, got {level}")
    rep = Report(f"symbol preimage --k {k} --level {level} --trials {trials}", seed)
    pre = (preimage_sigma0, preimage_sigma1, preimage_sigma2)[level]
    for vec in _covectors(v, samples, seed):
        m = build_M(vec)
        basis = kernel_basis(k, level + 1, m)
        rng = seeded(seed, "preimage", k, level, _vstr(vec))
        bad = bad_c = 0
        for _ in range(trials):
            xi = random_kernel_element(basis, rng)
            out = pre(k, m, xi)
            bad += sigma_apply(m, out) != xi
            if level:
                bad_c += bool(contract(out).entries)
        rep.add(f"sigma_{level}(preimage) = xi at v={_vstr(vec)}", bad == 0, f"{bad}/{trials} nonzero residuals")
        if level:
            rep.add(f"C(preimage) = 0 at v={_vstr(vec)}", bad_c == 0, f"{bad_c}/{trials} nonzero")
        if level == 2:
            rng = seeded(seed, "diagram", k, _vstr(vec))
            prof = IndexProfile.from_counts(k - 1, 3)
            bad_d = bad_l = 0
            for _ in range(trials):
                t = CanonicalTensor.random(prof, rng)
                left = sigma_apply(m, contract(t)).scale(-3)
                right = contract(lifted_symbol_tilde(m, t)).scale(4)
                bad_d += left != right
                xi = random_kernel_element(basis, rng)
                bad_l += contract(lift_xi(xi)) != xi
            rep.add(f"-3 sigma_2 C = 4 C sigma~ at v={_vstr(vec)}", bad_d == 0, f"{bad_d}/{trials} mismatches")
            rep.add(f"C(lift xi) = xi at v={_vstr(vec)}", bad_l == 0, f"{bad_l}/{trials} mismatches")
    return rep
