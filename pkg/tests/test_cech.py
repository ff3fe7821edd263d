"""Covers, Cech cochains, gerbe cocycles and the coboundary search."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from algebroid_forge.cech import (
    CechCochain,
    Cover,
    CoverMismatch,
    GerbeCocycle,
    NotCoboundary,
    TransitionError,
    Witness,
    affine_cover,
    cdo_cocycle,
    cech_diff,
    check_witness,
    coboundary_test,
    cext_cocycle,
    cup_cocycle_p1xp1,
    p1_cover,
    p1xp1_cover,
    pontryagin,
    vext_cocycle,
    vext_cocycle_sum,
)
from algebroid_forge.exact.forms import DiffForm
from algebroid_forge.exact.ring import ChartRing
from algebroid_forge.exact.text import parse_form
from algebroid_forge.fixtures import fixture_path
from algebroid_forge.io import load_cover

from strategies import polys


@pytest.fixture(scope="module")
def sl2_cover():
    return load_cover(fixture_path("cover_sl2_affine"))


@pytest.fixture(scope="module")
def sl2_runs(sl2_cover):
    cover, cext, cdo = sl2_cover
    return cext_cocycle(cext), cdo_cocycle(cdo), vext_cocycle(cext, cdo)


# --- covers -----------------------------------------------------------------

@pytest.mark.parametrize("cover", [p1_cover(), p1xp1_cover(), affine_cover(ChartRing("A", ("x", "y")), 3)])
def test_reference_covers_are_consistent(cover):
    assert cover.validate() == []


def test_missing_transition_is_rejected():
    A = ChartRing("A", ("x",))
    with pytest.raises(TransitionError):
        Cover((A, A, A), {(0, 1): ((), ("x",)), (1, 2): ((), ("x",))})


def test_inconsistent_transitions_are_reported():
    A = ChartRing("A", ("x", "y"))
    trans = {(0, 1): ((), ("y", "x")), (1, 2): ((), ("y", "x")), (0, 2): ((), ("y", "x"))}
    problems = Cover((A, A, A), trans).validate()
    assert problems == ["transitions disagree on triple (0, 1, 2)"]
    trans[(0, 2)] = ((), ("x", "y"))
    assert Cover((A, A, A), trans).validate() == []


def test_p1xp1_overlaps_invert_the_right_variables():
    cov = p1xp1_cover()
    assert cov.overlap((0, 3)).inverted == frozenset({"x", "u"})


# --- cochains -----------------------------------------------------------------

@settings(max_examples=15)
@given(st.lists(polys(ChartRing("C", ("s", "t")), 2), min_size=4, max_size=4))
def test_cech_differential_squares_to_zero(coeffs):
    """Random functions on the four charts of P1 x P1 (exponents copied chart by chart)."""
    cov = p1xp1_cover()
    comps = {}
    for i, f in enumerate(coeffs):
        ring = cov.charts[i]
        poly = ring.zero()
        for exp, c in f.terms.items():
            poly = poly + ring.monomial(exp, c)
        comps[(i,)] = DiffForm.function(poly)
    c0 = CechCochain(cov, 0, 0, comps)
    c1 = cech_diff(c0)
    assert cech_diff(c1).is_zero()
    c1d = cech_diff(CechCochain(cov, 0, 1, {k: v.d() for k, v in comps.items()}))
    assert c1d == c1.d()


def test_pontryagin_density():
    ring = ChartRing("A4", ("x", "y", "z", "w"))
    c = parse_form(ring, "dx^dy + dz^dw", 2)
    assert pontryagin([c], [[1]]) == parse_form(ring, "dx^dy^dz^dw", 4)
    with pytest.raises(ValueError):
        pontryagin([], [])


# --- the synthetic sl2 cover --------------------------------------------------

def test_cext_cocycle_and_theta_triples(sl2_cover, sl2_runs):
    cover, cext, _ = sl2_cover
    run, _, _ = sl2_runs
    assert run.passed
    assert run.cocycle.is_cocycle()
    checked = {tc.triple for tc in run.triples}
    # (i, j, i) composites are exp(0) by construction and are skipped
    assert checked == {t for t in cover.triples(ordered=True) if t[0] != t[2]}
    for tc in run.triples:
        assert tc.beta == cext.expected_beta(tc.triple)


def test_cext_alpha_matches_closed_formula(sl2_cover, sl2_runs):
    cover, cext, _ = sl2_cover
    run, _, _ = sl2_runs
    for i, j in cover.pairs():
        assert run.cocycle.alpha.get((i, j)) == cext.closed_form_alpha(i, j)


def test_unhalved_pairing_breaks_closure(sl2_cover, sl2_runs):
    """Without the 1/2 in <a ^ b>, d beta no longer equals d_C alpha."""
    cover, cext, _ = sl2_cover
    run, _, _ = sl2_runs
    beta = {t: cext.expected_beta(t, literal=True) for t in run.cocycle.beta.components}
    assert any(b for b in beta.values())
    g = GerbeCocycle(cover, run.cocycle.alpha, CechCochain(cover, 2, 2, beta))
    assert any("d_C alpha != d beta" in f for f in g.failures())


def test_cdo_cocycle_by_hand(sl2_cover, sl2_runs):
    """alpha_ij = gamma_i - gamma_j + d b_ij and beta_ijk = b_ij + b_jk - b_ik."""
    cover, _, cdo = sl2_cover
    _, run, _ = sl2_runs
    ring = cover.charts[0]
    zero2 = DiffForm.zero(ring, 2)
    for i, j in cover.pairs():
        b = cdo.b.get((i, j), zero2)
        assert run.cocycle.alpha.get((i, j)) == cdo.gamma[i] - cdo.gamma[j] + b.d()
    b = {p: cdo.b.get(p, zero2) for p in cover.pairs()}
    assert run.cocycle.beta.get((0, 1, 2)) == b[(0, 1)] + b[(1, 2)] - b[(0, 2)]


def test_vext_is_sum(sl2_runs):
    cext, cdo, vext = sl2_runs
    assert vext.cocycle.is_cocycle()
    assert vext.cocycle == vext_cocycle_sum(cext.cocycle, cdo.cocycle)
    assert vext.cocycle == cext.cocycle + cdo.cocycle


def test_affine_cocycles_are_coboundaries(sl2_runs):
    for run in sl2_runs:
        res = coboundary_test(run.cocycle, (-3, 3))
        assert isinstance(res, Witness)
        assert check_witness(run.cocycle.restrict_increasing(), res)


# --- P^1 and reference classes --------------------------------------------------

def test_p1_cocycle_vanishes_and_theta_shifts_kernel():
    cover, cext, cdo = load_cover(fixture_path("cover_p1"))
    assert cdo is None
    run = cext_cocycle(cext)
    assert run.passed
    assert run.cocycle.alpha.is_zero() and run.cocycle.beta.is_zero()
    theta = cext.theta(0, 1)
    o = theta.target
    x = o.ring.gen("x")
    assert theta.kernel_images[0] == o.g(0) + o.form(DiffForm.dvar(o.ring, 0) * (x.inverse() * 2))


def test_zero_cover_gives_zero_cocycle():
    cover, cext, cdo = load_cover(fixture_path("cover_zero"))
    run = vext_cocycle(cext, cdo)
    assert run.cocycle == GerbeCocycle.zero(cover, ordered=True)
    w = coboundary_test(run.cocycle)
    assert isinstance(w, Witness)
    assert all(not g for g in w.gamma.values())


def test_cup_class_is_inconclusive():
    g = cup_cocycle_p1xp1()
    assert g.is_cocycle()
    assert not g.beta.is_zero()
    res = coboundary_test(g, (-3, 3))
    assert isinstance(res, NotCoboundary)
    assert res.inconclusive
    assert res.window == (-3, 3)


def test_cocycles_on_different_covers_do_not_add():
    a = GerbeCocycle.zero(p1_cover())
    b = GerbeCocycle.zero(p1_cover())
    with pytest.raises(CoverMismatch):
        a + b
