"""The projective line: gluings, global sections and the sl2 level."""

from fractions import Fraction

import pytest

from algebroid_forge import p1
from algebroid_forge.baer import AlgebroidMorphism, check_morphism
from algebroid_forge.exact.forms import DiffForm
from algebroid_forge.wick import check_affine_sl2, wakimoto_states

KS = [Fraction(0), Fraction(2), Fraction(4), Fraction(7, 3)]


def test_cover_maps_are_mutually_inverse():
    cov = p1.P1Cover()
    assert cov.involutive()
    x = cov.O0.gen("x")
    assert cov.psi.pull_poly(cov.O1.gen("y")) == x.inverse()


def test_cdo_transition_dx_coefficient_by_hand():
    """(a o x)_(1) y = a x_(1)y - pi(x)pi(y)a gives <x^2 o t, x^2 o t> = -8x^2.

    The image -x^2 o t + c dx of d/dy must pair to zero with itself, and the
    cross term contributes -2c x^2, so c = -4.
    """
    g = p1.cdo_gluing()
    o0 = g.overlap0
    x = o0.ring.gen("x")
    xx_tau = o0.minus_one(x * x, o0.tau(0))
    assert o0.one_pairing(xx_tau, xx_tau) == x * x * -8
    dx = DiffForm.dvar(o0.ring, 0)
    for c, ok in ((-4, True), (-2, False), (0, False)):
        img = o0.minus_one(-(x * x), o0.tau(0)) + o0.form(dx * c)
        m = AlgebroidMorphism(g.overlap1, o0, (img,), ())
        assert check_morphism(m).passed is ok


@pytest.mark.parametrize("build", [p1.cdo_gluing, p1.tcdo_gluing])
def test_standard_gluings_are_morphisms(build):
    assert build().check().passed


@pytest.mark.parametrize("k", KS)
def test_deformed_gluing_is_a_morphism(k):
    g = p1.deformed_gluing(k)
    assert g.check().passed
    x = g.overlap0.ring.gen("x")
    dx = DiffForm.dvar(g.overlap0.ring, 0)
    o0 = g.overlap0
    assert g.morphism.kernel_images[0] == o0.g(0) + o0.form(dx * (x.inverse() * k))
    expected = o0.minus_one(-(x * x), o0.tau(0)) + o0.minus_one(x, o0.g(0)) + o0.form(dx * (k / 2 - 4))
    assert g.morphism.frame_images[0] == expected


def test_wrong_dx_sign_gluing_fails():
    assert not p1.deformed_gluing(2, dx_sign=-1).check().passed


@pytest.mark.parametrize("k", KS)
def test_overlap_identities(k):
    assert p1.overlap_identities(k) == {"e": True, "h": True, "f": True}


@pytest.mark.parametrize("k", KS)
def test_level(k):
    r = p1.sl2_level(k)
    assert r.kappa == k / 2 - 2
    assert r.wick_kappa == r.kappa


@pytest.mark.parametrize("k", KS)
def test_level_matches_free_fields(k):
    assert p1.sl2_level(k, cross_check=False).kappa == check_affine_sl2(wakimoto_states(k)).kappa


def test_flipped_sign_raises_relation_failure():
    with pytest.raises(p1.RelationFailure) as err:
        p1.sl2_level(2, dx_sign=-1)
    assert err.value.relation


@pytest.mark.parametrize("k, dim", [(2, 3), (4, 3), (Fraction(7, 3), 3), (0, 4)])
def test_global_sections(k, dim):
    gs = p1.global_sections(k)
    assert gs.dimension == dim
    el = p1.sl2_elements(gs.gluing)
    assert all(gs.contains(v) for v in el.values())


def test_kernel_generator_is_global_only_at_k_zero():
    for k, expected in ((0, True), (2, False)):
        gs = p1.global_sections(k)
        assert gs.contains(gs.gluing.chart0.g(0)) is expected


def test_global_anchors_are_sl2_vector_fields():
    gs = p1.global_sections(2)
    degrees = sorted(max(e for (e,) in a.coefficients[0].terms) for a in gs.anchors() if not a.is_zero())
    assert degrees == [0, 1, 2]


def test_small_window_is_detected():
    with pytest.raises(p1.AnsatzTooSmall):
        p1.global_sections(2, window=(-1, 1), recheck=(-4, 4))
