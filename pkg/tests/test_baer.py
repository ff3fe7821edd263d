"""Twists, boxplus/boxminus, morphisms and the exp(beta) witnesses."""

import random

import pytest
from hypothesis import given, settings

from algebroid_forge import fixtures as F
from algebroid_forge.algebroid import COURANT, VERTEX, KindError, make_cdo, make_split_courant
from algebroid_forge.baer import (
    AlgebroidMorphism,
    FrameMismatch,
    PairModel,
    boxminus,
    boxminus_morphism,
    boxplus,
    boxplus_morphism,
    cdo_isomorphism,
    check_morphism,
    exp_beta,
    identity_morphism,
    roundtrip_eta,
    roundtrip_eta_prime,
    roundtrip_psi,
    twist,
    twist_defect,
)
from algebroid_forge.exact.forms import DiffForm, NotClosed
from algebroid_forge.exact.ring import ChartRing
from algebroid_forge.exact.text import parse_form

from strategies import POLY4, closed3, forms

X = F.XYZ


def _cdo(text):
    return make_cdo(X, alpha=parse_form(X, text, 3) if text else None)


# --- twists and the CDO classification --------------------------------------

def test_twist_moves_between_cdos():
    a1 = parse_form(X, "x*y dx^dy^dz", 3)
    a2 = parse_form(X, "z^2 dx^dy^dz", 3)
    assert twist(make_cdo(X, alpha=a1), a2 - a1) == make_cdo(X, alpha=a2)


def test_twist_rejects_non_closed():
    with pytest.raises(NotClosed):
        twist(F.cdo_A4(), parse_form(F.XYZW, "w dx^dy^dz", 3))


def test_exp_witness_is_verified_isomorphism():
    D1, D2 = _cdo("x*y dx^dy^dz"), _cdo("z^2 dx^dy^dz")
    w = cdo_isomorphism(D1, D2)
    assert w.status == "witness"
    assert w.beta.d() == D2.alpha - D1.alpha
    assert w.morphism.target == D2
    assert check_morphism(w.morphism).passed


def test_non_exact_difference_is_inconclusive():
    L = ChartRing("L", ("x", "y", "z"), frozenset("xyz"))
    w = cdo_isomorphism(make_cdo(L), make_cdo(L, alpha=parse_form(L, "x^-1*y^-1*z^-1 dx^dy^dz", 3)))
    assert w.status == "inconclusive"
    assert w.morphism is None
    assert not w.residue.is_zero()


@settings(max_examples=10)
@given(forms(POLY4, 2, 2))
def test_exp_beta_twists_by_d_beta(beta):
    D = make_cdo(POLY4)
    m = exp_beta(D, beta)
    assert m.target.alpha == beta.d()
    assert twist_defect(m).is_zero()
    # the same frame images read inside the untwisted D miss (0) by exactly d(beta):
    # (tau_a + i_a beta) (0) (tau_b + i_b beta) = -i_a i_b d(beta) for commuting frames
    candidate = AlgebroidMorphism(D, D, tuple(D.tau(i) + D.form(beta.interior(D.frame[i])) for i in range(D.n)), ())
    assert twist_defect(candidate) == beta.d()


def test_exp_beta_morphism_checks():
    D = F.cdo_twisted()
    beta = parse_form(X, "x*z dx^dy + y dy^dz", 2)
    m = exp_beta(D, beta)
    assert check_morphism(m).passed
    back = m.inverse()
    assert back.compose(m) == identity_morphism(D)


# --- boxplus / boxminus -----------------------------------------------------

def test_kinds_of_results():
    Q, D = F.sl2_courant(), F.cdo_A4()
    assert boxplus(Q, D).kind == VERTEX
    assert boxminus(boxplus(Q, D), D).kind == COURANT


def test_boxminus_of_cdo_with_itself_is_split_exact():
    D = F.cdo_twisted()
    assert boxminus(D, D) == make_split_courant(X)


def test_inputs_must_match():
    with pytest.raises(KindError):
        boxplus(F.tcdo_chart(), F.cdo_standard())
    with pytest.raises(FrameMismatch):
        boxplus(F.sl2_courant(), F.cdo_standard())


@pytest.mark.parametrize("first, sign", [("sl2_courant", 1), ("sl2_vertex", -1)])
def test_boxplus_matches_pair_model(first, sign):
    """The closed-form result agrees with the componentwise model on the fibre product."""
    A = getattr(F, first)()
    model = PairModel(A, F.cdo_A4(), sign)
    rng = random.Random(0)
    res = model.result
    bases = [A.basis_elements()[i] for i in range(A.n + A.m)]
    pairs = [model.random_pair(rng, b) for b in bases]
    x = A.ring.gen("x")
    for p in pairs:
        assert model.push(model.minus_one(x, p)) == res.minus_one(x, model.push(p))
        for p2 in pairs:
            assert model.push(model.zero(p, p2)) == res.zero_product(model.push(p), model.push(p2))
            assert model.one(p, p2) == res.one_pairing(model.push(p), model.push(p2))


# --- round trips ------------------------------------------------------------

ROUND_TRIP_A = [("sl2_vertex", "cdo_A4"), ("tcdo_chart", "cdo_standard"), ("cdo_twisted", "cdo_standard"),
                ("deformed_tcdo_chart", "cdo_twisted")]
ROUND_TRIP_Q = [("sl2_courant", "cdo_A4")]


@pytest.mark.parametrize("a, d", ROUND_TRIP_A)
def test_vertex_round_trip(a, d):
    A, D = getattr(F, a)(), getattr(F, d)()
    eta = roundtrip_eta(A, D)
    psi = roundtrip_psi(A, D)
    assert check_morphism(eta).passed
    assert check_morphism(psi).passed
    assert psi.compose(eta) == identity_morphism(A)
    assert eta.compose(psi) == identity_morphism(eta.target)


@pytest.mark.parametrize("q, d", ROUND_TRIP_Q)
def test_courant_round_trip(q, d):
    Q, D = getattr(F, q)(), getattr(F, d)()
    eta = roundtrip_eta_prime(Q, D)
    assert check_morphism(eta).passed
    assert eta.target == Q


SL2_Q, CDO_A4 = F.sl2_courant(), F.cdo_A4()


@settings(max_examples=5)
@given(closed3(F.XYZW))
def test_twist_compatibility(alpha):
    Q, D = SL2_Q, CDO_A4
    lhs = twist(boxplus(Q, D), alpha)
    assert lhs == boxplus(Q, twist(D, alpha))
    assert lhs == boxplus(twist(Q, alpha), D)


def test_morphisms_combine_through_boxplus():
    Q, D = F.sl2_courant(), F.cdo_A4()
    beta = parse_form(F.XYZW, "x dy^dw", 2)
    f = identity_morphism(Q)
    g = exp_beta(D, beta)
    h = boxplus_morphism(f, g)
    assert h.target == boxplus(Q, g.target)
    assert check_morphism(h, basis_only=True).passed
    k = boxminus_morphism(identity_morphism(boxplus(Q, D)), identity_morphism(D))
    assert k.source == boxminus(boxplus(Q, D), D)


def test_twist_defect_of_identity_is_zero():
    assert twist_defect(identity_morphism(F.cdo_twisted())) == DiffForm.zero(X, 3)
