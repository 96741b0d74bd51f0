import random
from math import comb

import pytest

from kmonogenic import linalg
from kmonogenic.complex_ops import HypothesisError, Section, D, contract_section, random_section, section_inner, section_norm2
from kmonogenic.exact import ZERO
from kmonogenic.resolution import (
    DegreeCappedSpace,
    assemble,
    random_compatible,
    random_kernel,
    solve,
)
from kmonogenic.symbol import CompatibilityError
from kmonogenic.tensor_core import IndexProfile, nullspace_basis


def dense(op):
    rows = [[ZERO] * op.shape[1] for _ in range(op.shape[0])]
    for (r, c), v in op.entries.items():
        rows[r][c] = v
    return rows


# ---------------------------------------------------------------------------
# assembled matrices


def test_assembled_shape_k6():
    op = assemble(0, 1, 6)
    assert op.shape == (nullspace_basis(IndexProfile(6, 1)).dim * 1, 84 * 7)
    assert op.domain.dimension == 84 * comb(7, 6)


@pytest.mark.parametrize("l", [0, 1, 2])
def test_assembled_matvec_matches_D(l):
    k, cap = 4, 2
    op = assemble(l, cap, k)
    rng = random.Random(l)
    for _ in range(3):
        g = random_section(k, l, cap, rng)
        coords = op.domain.coordinates(g)
        assert op.domain.section(coords) == g
        assert op.matvec(coords) == op.codomain.coordinates(D(l, g))
    constants = [c for c, (i, m) in enumerate(op.domain.labels) if sum(m) == 0]
    assert constants and all(not op.column(c) for c in constants)


# ---------------------------------------------------------------------------
# solving


def test_zero_rhs():
    res = solve(1, Section.zero(IndexProfile(6, 2), "scriptV"))
    assert res.u.is_zero() and res.residual_zero and res.norm2 == 0


@pytest.mark.parametrize("l", [0, 1, 2])
def test_round_trip_k6(l):
    g = random_section(6, l, 1, random.Random(40 + l))
    f = D(l, g)
    res = solve(l, f)
    assert D(l, res.u) == f
    assert l == 0 or contract_section(res.u).is_zero()
    assert res.degree <= f.degree() + 1
    assert res.norm2 == section_norm2(res.u) <= section_norm2(g)
    assert res.compatibility_checked == (l < 2) and res.min_norm_selected


@pytest.mark.parametrize("l", [0, 1, 2])
def test_minimal_norm_against_assembled_nullspace(l):
    # every kernel vector of the assembled D_l within the cap is Gaussian-orthogonal to u
    k, cap = 4, 1
    g = random_section(k, l, cap, random.Random(7 + l))
    res = solve(l, D(l, g), exploratory=True)
    op = assemble(l, cap, k)
    kernel = linalg.nullspace(dense(op), op.shape[1])
    assert kernel
    for vec in kernel:
        h = op.domain.section(vec)
        assert section_inner(res.u, h) == 0


def test_solution_orthogonal_to_kernel_samples():
    k, l = 6, 1
    rng = random.Random(3)
    res = solve(l, D(l, random_section(k, l, 2, rng)))
    h = random_kernel(l, k, 2, rng)
    assert D(l, h).is_zero() and not h.is_zero()
    assert section_inner(res.u, h) == 0


@pytest.mark.parametrize("l", [0, 1, 2])
def test_kernel_sampled_rhs(l):
    k = 6
    rng = random.Random(11 * (l + 1))
    f = random_compatible(l, k, 1, rng)
    assert not f.is_zero() and f.tag == "scriptV"
    if l < 2:
        assert D(l + 1, f).is_zero()
        op = assemble(l + 1, 1, k)
        assert all(x == 0 for x in op.matvec(op.domain.coordinates(f)))
    res = solve(l, f)
    assert D(l, res.u) == f and res.degree <= f.degree() + 1


def test_incompatible_rhs_reports_residual():
    f = random_section(6, 1, 1, random.Random(5))
    with pytest.raises(CompatibilityError) as err:
        solve(0, f)
    assert err.value.residual is not None and not err.value.residual.is_zero()


def test_hypothesis_guard():
    f = D(0, random_section(5, 0, 1, random.Random(1)))
    with pytest.raises(HypothesisError):
        solve(0, f)
    res = solve(0, f, exploratory=True)
    assert res.exploratory and D(0, res.u) == f


def test_profile_checks():
    with pytest.raises(ValueError):
        solve(0, Section.zero(IndexProfile(6, 2), "scriptV"))
    with pytest.raises(ValueError):
        solve(3, Section.zero(IndexProfile(6, 4), "scriptV"))


def test_capped_space():
    sp = DegreeCappedSpace(IndexProfile(6, 3), 2)
    assert sp.dimension == 35 * comb(8, 6) == len(sp.labels)
