"""Laurent polynomials, differential forms, chart maps and the exact solvers."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from algebroid_forge.exact.ansatz import solve_d_in_window
from algebroid_forge.exact.forms import (
    DiffForm,
    NotClosed,
    NotExact,
    VectorField,
    exterior_d,
    find_primitive,
    poincare_split,
)
from algebroid_forge.exact.linsolve import LinearSystem, rank
from algebroid_forge.exact.maps import ChartMap
from algebroid_forge.exact.ring import ChartMismatch, ChartRing, IllegalExponent
from algebroid_forge.exact.text import ParseError, format_form, format_poly, parse_form, parse_poly

from strategies import LAUR3, POLY3, forms, polys


def fields(ring=LAUR3):
    return st.lists(polys(ring, 2), min_size=ring.ngens, max_size=ring.ngens).map(lambda cs: VectorField(ring, cs))


# --- ring -------------------------------------------------------------------

@given(polys(), polys(), polys())
def test_ring_axioms(f, g, h):
    assert f + g == g + f
    assert f * g == g * f
    assert (f + g) + h == f + (g + h)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f - f == LAUR3.zero()
    assert f * LAUR3.one() == f


@given(polys(), polys())
def test_derivative_is_a_derivation(f, g):
    for v in ("x", "y", "z"):
        assert (f * g).diff(v) == f.diff(v) * g + f * g.diff(v)


def test_inverse_only_for_monomial_units():
    x = LAUR3.gen("x")
    assert (x * 3).inverse() * (x * 3) == LAUR3.one()
    assert not (x + 1).is_unit()
    with pytest.raises(IllegalExponent):
        POLY3.monomial((-1, 0, 0))


def test_coefficients_are_exact_rationals():
    f = parse_poly(POLY3, "1/3*x + 2/3*x")
    assert f == POLY3.gen("x")
    assert f.coefficient((1, 0, 0)) == Fraction(1)
    assert isinstance(f.coefficient((1, 0, 0)), Fraction)


def test_mixing_rings_is_rejected():
    with pytest.raises(ChartMismatch):
        POLY3.gen("x") + LAUR3.gen("x")


# --- forms ------------------------------------------------------------------

@given(forms(degree=0), forms(degree=1), forms(degree=2))
def test_d_squared_is_zero(f, a, b):
    assert f.d().d().is_zero()
    assert a.d().d().is_zero()
    assert b.d().d().is_zero()


@given(forms(degree=1), forms(degree=1), forms(degree=1))
def test_wedge_associative(a, b, c):
    assert a.wedge(b).wedge(c) == a.wedge(b.wedge(c))


@given(forms(degree=1), forms(degree=2))
def test_wedge_graded_commutative(a, b):
    assert a.wedge(b) == b.wedge(a)
    assert a.wedge(a).is_zero()


@given(forms(degree=1), forms(degree=1))
def test_d_is_graded_derivation(a, b):
    assert a.wedge(b).d() == a.d().wedge(b) - a.wedge(b.d())


@given(forms(degree=1), forms(degree=1), fields())
def test_interior_is_antiderivation(a, b, xi):
    assert a.wedge(b).interior(xi) == a.interior(xi).wedge(b) - a.wedge(b.interior(xi))


@given(forms(degree=2), fields())
def test_cartan_formula(w, xi):
    assert w.lie_derivative(xi) == w.interior(xi).d() + w.d().interior(xi)


def test_interior_determinant_convention():
    dx, dy = DiffForm.dvar(POLY3, "x"), DiffForm.dvar(POLY3, "y")
    ddx = VectorField.coordinate(POLY3, "x")
    assert dx.wedge(dy).interior(ddx) == dy


@given(forms(degree=2))
def test_exact_forms_have_primitives(b):
    omega = b.d()
    if omega.is_zero():
        return
    assert find_primitive(omega).d() == omega


def test_dlog_residue_obstructs_primitive():
    w = parse_form(LAUR3, "x^-1 dx", 1)
    prim, residue = poincare_split(w)
    assert residue == w
    with pytest.raises(NotExact):
        find_primitive(w)
    with pytest.raises(NotClosed):
        poincare_split(parse_form(LAUR3, "y dx", 1))


@given(forms(degree=2))
def test_window_search_agrees_with_poincare(b):
    omega = b.d()
    if omega.is_zero():
        return
    beta = solve_d_in_window(omega, (-6, 6))
    assert beta is not None and beta.d() == omega


def test_window_search_fails_on_residue():
    assert solve_d_in_window(parse_form(LAUR3, "x^-1*z^-1 dx^dz", 2), (-6, 6)) is None


# --- maps -------------------------------------------------------------------

def test_pullback_commutes_with_d():
    U = ChartRing("U", ("x",), frozenset({"x"}))
    V = ChartRing("V", ("y",), frozenset({"y"}))
    phi = ChartMap(V, U, (U.gen("x").inverse(),))
    assert phi.pull_form(exterior_d(V.gen("y") ** 2)) == exterior_d(phi.pull_poly(V.gen("y") ** 2))
    assert phi.compose(ChartMap(U, V, (V.gen("y").inverse(),))).images == (U.gen("x"),)
    dy = VectorField.coordinate(V, "y")
    pushed = phi.push_field(dy)
    assert pushed.coefficients == (-(U.gen("x") ** 2),)


@given(polys(), fields())
def test_pushforward_intertwines(f, xi):
    phi = ChartMap(LAUR3, LAUR3, (LAUR3.gen("x") * 2, LAUR3.gen("y") + LAUR3.gen("x"), LAUR3.gen("z") ** -1))
    assert phi.push_field(xi).apply(phi.pull_poly(f)) == phi.pull_poly(xi.apply(f))


# --- text -------------------------------------------------------------------

@given(polys())
def test_poly_text_round_trip(f):
    assert parse_poly(LAUR3, format_poly(f)) == f


@given(forms(degree=2))
def test_form_text_round_trip(w):
    assert parse_form(LAUR3, format_form(w), 2) == w


@pytest.mark.parametrize("text, column", [("x +* y", 4), ("x dq", 3), ("x^", 3)])
def test_parse_errors_carry_column(text, column):
    with pytest.raises(ParseError) as err:
        parse_form(POLY3, text)
    assert err.value.line == 1
    assert err.value.column == column


# --- linear algebra ---------------------------------------------------------

def test_linear_system_solution_and_kernel():
    sys_ = LinearSystem()
    sys_.add_equation({"a": 1, "b": 1}, 3)
    sys_.add_equation({"a": 1, "b": -1}, 1)
    assert sys_.solve() == {"a": 2, "b": 1}
    sys_.add_equation({"a": 2, "b": 2}, 5)
    assert sys_.solve() is None
    hom = LinearSystem()
    hom.add_equation({"a": 1, "b": 1, "c": 1})
    assert len(hom.nullspace()) == 2
    assert rank([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]]) == 1
