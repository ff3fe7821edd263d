"""The beta-gamma plus Heisenberg free-field engine."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from algebroid_forge.wick import (
    FreeFieldState,
    ResultNotInHeisenberg,
    StateParseError,
    WeightOverflow,
    borcherds_sides,
    check_affine_sl2,
    format_state,
    nth_product,
    parse_state,
    sugawara_expected,
    sugawara_image,
    sugawara_raw,
    translation,
    untwisted_states,
    wakimoto_states,
    weight_one_basis,
)

K = Fraction(3)
WEIGHT0 = ["|0>", "b(0)|0>", "b(0)^2|0>"]
WEIGHT1 = ["a(-1)|0>", "b(-1)|0>", "l(-1)|0>", "a(-1)b(0)|0>", "b(0)l(-1)|0>", "a(-1)b(0)^2|0>"]


def S(text, k=K):
    return parse_state(text, k)


def combos(texts):
    return st.lists(st.tuples(st.sampled_from(texts), st.integers(-3, 3)), min_size=1, max_size=3).map(
        lambda items: sum((S(t) * c for t, c in items), FreeFieldState.zero(K)))


weight1 = combos(WEIGHT1)
low = combos(WEIGHT0 + WEIGHT1[:5])


# --- hand oracles -----------------------------------------------------------

def test_basic_contractions():
    assert nth_product(S("a(-1)|0>"), S("b(0)|0>"), 0) == S("|0>")
    assert nth_product(S("b(0)|0>"), S("a(-1)|0>"), 0) == S("|0>") * -1
    assert nth_product(S("l(-1)|0>"), S("l(-1)|0>"), 1) == S("|0>") * K
    assert nth_product(S("l(-1)|0>"), S("l(-1)|0>"), 0).is_zero()


def test_beta_gamma_current_level():
    J = S("a(-1)b(0)|0>")
    assert nth_product(J, J, 1) == S("|0>") * -1
    assert nth_product(J, J, 0).is_zero()


def test_normal_order_correction_matches_algebroid():
    """(d/dx) o x^2 and x^2 o (d/dx) differ by 2 dx; on the Fock side by 2 b(-1)."""
    a, b2 = S("a(-1)|0>"), S("b(0)^2|0>")
    assert nth_product(a, b2, -1) - nth_product(b2, a, -1) == S("b(-1)|0>") * 2
    assert nth_product(a, b2, -1) == S("a(-1)b(0)^2|0>")
    assert nth_product(b2, a, -1) == S("a(-1)b(0)^2|0> - 2*b(-1)|0>")


def test_translation_of_generators():
    assert translation(S("b(0)|0>")) == S("b(-1)|0>")
    assert translation(S("a(-1)|0>")) == S("a(-2)|0>")
    assert translation(S("|0>")).is_zero()


# --- properties ---------------------------------------------------------------

@given(weight1, weight1)
def test_skew_symmetry_weight_one(u, v):
    assert nth_product(u, v, 1) == nth_product(v, u, 1)
    assert nth_product(u, v, 0) + nth_product(v, u, 0) == translation(nth_product(u, v, 1))


@given(low, low, st.integers(0, 1))
def test_translation_covariance(u, v, n):
    du = translation(u)
    if du.is_zero() or du.weight + v.weight - n - 1 > 2:
        return
    assert nth_product(du, v, n) == nth_product(u, v, n - 1) * (-n)


@given(low)
def test_vacuum_axioms(u):
    vac = FreeFieldState.vacuum(K)
    assert nth_product(vac, u, -1) == u
    assert nth_product(u, vac, -1) == u
    assert nth_product(u, vac, 0).is_zero()


@given(st.lists(st.tuples(st.sampled_from(WEIGHT0 + WEIGHT1 + ["l(-2)|0>", "l(-1)^2|0>"]),
                          st.fractions(-3, 3, max_denominator=4)), max_size=4))
def test_state_text_round_trip(items):
    s = sum((S(t) * c for t, c in items), FreeFieldState.zero(K))
    assert parse_state(format_state(s), K) == s


def test_parse_errors():
    with pytest.raises(StateParseError) as err:
        parse_state("a(-1)q(0)|0>")
    assert err.value.column == 6
    with pytest.raises(StateParseError):
        parse_state("a(-1)")


def test_weight_window():
    with pytest.raises(WeightOverflow):
        nth_product(S("a(-1)|0>"), S("a(-1)|0>"), -3)
    with pytest.raises(WeightOverflow):
        nth_product(S("a(-1)^3|0>"), S("|0>"), 0)
    with pytest.raises(WeightOverflow):
        translation(S("l(-2)|0>"))


# --- sl2 ----------------------------------------------------------------------

@pytest.mark.parametrize("k, kappa", [(0, -2), (2, -1), (4, 0), (8, 2), (Fraction(7, 3), Fraction(-5, 6))])
def test_wakimoto_level(k, kappa):
    r = check_affine_sl2(wakimoto_states(k))
    assert r.passed, r.mismatches
    assert r.kappa == kappa


def test_untwisted_is_critical():
    r = check_affine_sl2(untwisted_states())
    assert r.passed
    assert r.kappa == -2


def test_dropping_the_dx_term_breaks_relations():
    states = dict(wakimoto_states(4))
    states["f"] = states["f"] - S("b(-1)|0>", 4) * 2
    r = check_affine_sl2(states)
    assert not r.passed
    assert any("f" in m for m in r.mismatches)


def test_sugawara_at_k_zero():
    T = sugawara_image(wakimoto_states(0))
    assert T == sugawara_expected()
    assert T == S("l(-1)^2|0>", 0) * Fraction(1, 2) - S("l(-2)|0>", 0)


def test_sugawara_untwisted_vanishes():
    assert sugawara_image(untwisted_states()).is_zero()


def test_sugawara_leaving_heisenberg_is_reported():
    states = dict(wakimoto_states(0))
    states["h"] = S("-2*a(-1)b(0)|0>", 0)
    assert sugawara_raw(states).uses_beta_gamma()
    with pytest.raises(ResultNotInHeisenberg) as err:
        sugawara_image(states)
    assert err.value.state.uses_beta_gamma()


# --- Borcherds ----------------------------------------------------------------

@given(st.sampled_from(range(8)), st.sampled_from(range(8)), st.sampled_from(range(8)),
       st.integers(-1, 1), st.integers(-1, 1), st.integers(-1, 1))
def test_borcherds_identity_samples(i, j, k, m, n, p):
    basis = weight_one_basis(K)
    lhs, rhs = borcherds_sides(basis[i], basis[j], basis[k], m, n, p)
    assert lhs == rhs
