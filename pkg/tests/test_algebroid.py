"""Chart-level structures and the axiom suites."""

import pytest

from algebroid_forge import fixtures as F
from algebroid_forge.algebroid import (
    COURANT,
    LIE,
    VERTEX,
    AlgebroidStructure,
    KernelAlgebra,
    KindError,
    make_cdo,
    make_split_courant,
)
from algebroid_forge.axioms import COURANT_AXIOMS, VERTEX_AXIOMS, build_samples, check_axioms
from algebroid_forge.exact.forms import DiffForm, VectorField
from algebroid_forge.exact.maps import ChartMap
from algebroid_forge.exact.ring import ChartRing
from algebroid_forge.exact.text import parse_form


def test_nine_vertex_and_six_courant_identities():
    assert len(VERTEX_AXIOMS) == 9
    assert len(COURANT_AXIOMS) == 6


@pytest.mark.parametrize("name", sorted(F.passing_charts()))
def test_fixture_chart_passes_its_suite(name):
    s = F.passing_charts()[name]
    report = check_axioms(s)
    assert report.passed, report.failed_axioms()
    core = VERTEX_AXIOMS if s.kind == VERTEX else COURANT_AXIOMS
    counts = report.counts()
    assert all(counts[a][0] > 0 for a in core)


def test_corrupted_pairing_is_caught():
    report = check_axioms(F.corrupted_pairing())
    assert "pairing-invariance" in report.failed_axioms()
    assert dict((n, ok) for n, ok, _ in F.corrupted_pairing().precondition_report())["kernel-invariance"] is False


def test_wrong_H_is_caught():
    s = F.wrong_H()
    assert not check_axioms(s).passed
    assert not s.alpha_defect().is_zero()


# --- hand-computed products (standard CDO on A^3) ---------------------------

def test_cdo_products_on_coordinate_fields():
    c = F.cdo_standard()
    x, y = c.ring.gen("x"), c.ring.gen("y")
    u = c.minus_one(x, c.tau(1))  # x d/dy
    v = c.minus_one(y, c.tau(0))  # y d/dx
    assert c.one_pairing(u, v) == -c.ring.one()
    assert c.zero_product(u, v) == c.minus_one(x, c.tau(0)) - c.minus_one(y, c.tau(1))
    assert c.one_pairing(c.tau(0), c.tau(1)).is_zero()


def test_right_minus_one_correction():
    c = F.cdo_standard()
    x = c.ring.gen("x")
    dx = DiffForm.dvar(c.ring, "x")
    assert c.right_minus_one(c.tau(0), x**2) == c.minus_one(x**2, c.tau(0)) + c.form(dx * 2)


def test_twist_shifts_zero_product_by_double_contraction():
    s = F.cdo_twisted()
    x, y = s.ring.gen("x"), s.ring.gen("y")
    dz = DiffForm.dvar(s.ring, "z")
    # i_{d/dx} i_{d/dy} (xy dx^dy^dz) = -xy dz
    assert s.zero_product(s.tau(0), s.tau(1)) == s.form(dz * (-(x * y)))


def test_anchor_and_partial():
    c = F.cdo_standard()
    x = c.ring.gen("x")
    assert c.anchor(c.minus_one(x, c.tau(2))).coefficients == (0, 0, x)
    assert c.anchor(c.partial(x**2)).is_zero()
    assert c.partial(x**2) == c.form(DiffForm.dvar(c.ring, "x") * (x * 2))


def test_sl2_courant_pairing_and_bracket():
    q = F.sl2_courant()
    assert q.one_pairing(q.g(0), q.g(2)) == q.ring.one()
    assert q.zero_product(q.g(0), q.g(2)).ker == (0, q.ring.one(), 0)


# --- kernels ----------------------------------------------------------------

def test_sl2_kernel_is_a_lie_algebra_with_invariant_form():
    k = KernelAlgebra.sl2(1)
    assert k.jacobi_defect() == []
    assert k.invariance_defect() == []
    assert k.bracket_vec([1, 0, 0], [0, 0, 1]) == [0, 1, 0]


def test_strict_kernel_rejects_bad_pairing():
    base = KernelAlgebra.sl2(1)
    with pytest.raises(ValueError):
        KernelAlgebra(base.basis, base.structure_constants, [[0, 0, 1], [0, 1, 0], [1, 0, 0]])


# --- construction preconditions --------------------------------------------

def test_cdo_requires_closed_alpha():
    with pytest.raises(ValueError):
        make_cdo(F.XYZW, alpha=parse_form(F.XYZW, "w dx^dy^dz", 3))


def test_lie_kind_has_its_own_suite():
    s = make_split_courant(F.XYZ).replace(kind=LIE)
    report = check_axioms(s)
    assert report.passed
    assert "jacobi" in report.axioms


def test_split_courant_is_courant():
    assert make_split_courant(F.XYZ).kind == COURANT


def test_samples_are_seeded():
    a = build_samples(F.cdo_twisted(), seed=7)
    b = build_samples(F.cdo_twisted(), seed=7)
    c = build_samples(F.cdo_twisted(), seed=8)
    assert a.elements == b.elements
    assert a.elements != c.elements


def test_structure_equality_ignores_name():
    assert F.cdo_standard().replace(name="other") == F.cdo_standard()
    assert F.cdo_standard() != F.cdo_twisted()


# --- transport along chart maps ---------------------------------------------

def test_transport_along_inversion_preserves_axioms():
    U = ChartRing("U", ("x",), frozenset({"x"}))
    V = ChartRing("V", ("y",), frozenset({"y"}))
    phi = ChartMap(U, V, (V.gen("y").inverse(),))
    s = make_cdo(U)
    t = s.transport(phi)
    assert t.ring == V
    assert check_axioms(t).passed
    assert t.frame[0].coefficients == (-(V.gen("y") ** 2),)


def test_non_coordinate_frame():
    ring = ChartRing("B", ("x", "y"))
    x = ring.gen("x")
    frame = (VectorField(ring, [1, x]), VectorField(ring, [0, 1]))
    s = make_cdo(ring, frame=frame)
    assert isinstance(s, AlgebroidStructure)
    assert check_axioms(s).passed
    with pytest.raises(ValueError):
        make_cdo(ring, frame=(VectorField(ring, [1, 0]), VectorField(ring, [x, 0])))


def test_kind_mismatch_errors():
    with pytest.raises((KindError, ValueError)):
        make_split_courant(F.XYZ).replace(kind="bogus")
