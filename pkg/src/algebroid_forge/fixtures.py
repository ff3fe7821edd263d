"""Reference charts and covers shipped as JSON fixtures.

Each builder returns an in-memory object; ``scripts/make_fixtures.py`` writes
them to ``fixtures/`` and the tests check that the files re-parse to the
same objects.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from .algebroid import (
    COURANT,
    VERTEX,
    AlgebroidStructure,
    KernelAlgebra,
    curvature_of,
    make_cdo,
    make_QNH,
    make_tcdo_chart,
)
from .exact.forms import DiffForm, find_primitive
from .exact.ring import ChartRing
from .exact.text import parse_form

XYZ = ChartRing("A3", ("x", "y", "z"))
XYZW = ChartRing("A4", ("x", "y", "z", "w"))
SL2_CONNECTION = ("x dy + z dw", "y dz", "w dx + dy")


def cdo_standard() -> AlgebroidStructure:
    return make_cdo(XYZ, name="standard CDO")


def cdo_twisted() -> AlgebroidStructure:
    return make_cdo(XYZ, alpha=parse_form(XYZ, "x*y dx^dy^dz", 3), name="alpha-twisted CDO")


def tcdo_chart() -> AlgebroidStructure:
    """Twisted CDO chart with two closed lambda 2-forms and zero pairing."""
    lam = [parse_form(XYZ, "dx^dy", 2), parse_form(XYZ, "z dx^dz + y dy^dz", 2)]
    return make_tcdo_chart(XYZ, lam, alpha=parse_form(XYZ, "dx^dy^dz", 3), names=("l1", "l2"), name="TCDO chart")


def deformed_tcdo_chart() -> AlgebroidStructure:
    lam = [parse_form(XYZ, "dx^dy + x*z dx^dz", 2)]
    return make_tcdo_chart(XYZ, lam, pairing=[[Fraction(3)]], names=("l",), name="deformed TCDO chart")


def p1_deformed_charts(k=2) -> tuple[AlgebroidStructure, AlgebroidStructure]:
    from .p1 import deformed_gluing

    g = deformed_gluing(k)
    return g.chart0, g.chart1


def _sl2_connection(ring: ChartRing) -> tuple[DiffForm, ...]:
    return tuple(parse_form(ring, t, 1) for t in SL2_CONNECTION)


def sl2_courant(kind: str = COURANT) -> AlgebroidStructure:
    """Q_{nabla,H} on four variables with an sl2 kernel and H chosen to match the Pontryagin form."""
    kern = KernelAlgebra.sl2(1)
    conn = _sl2_connection(XYZW)
    curv = curvature_of(XYZW, kern, conn)
    probe = AlgebroidStructure(XYZW, _frame(XYZW), kern, curv, DiffForm.zero(XYZW, 3), COURANT, conn)
    H = -find_primitive(probe.pontryagin())
    return make_QNH(XYZW, None, kern, curv, H, conn, name="sl2 Q(nabla,H)" if kind == COURANT else "sl2 vertex extension",
                    kind=kind)


def sl2_vertex() -> AlgebroidStructure:
    return sl2_courant(VERTEX)


def corrupted_pairing() -> AlgebroidStructure:
    """sl2 kernel with a non-invariant pairing (<e|f> = 1 but <h|h> = 1)."""
    base = KernelAlgebra.sl2(1)
    K = [[0, 0, 1], [0, 1, 0], [1, 0, 0]]
    kern = KernelAlgebra(base.basis, base.structure_constants, K, strict=False)
    conn = tuple(DiffForm.zero(XYZ, 1) for _ in range(3))
    curv = tuple(DiffForm.zero(XYZ, 2) for _ in range(3))
    return AlgebroidStructure(XYZ, _frame(XYZ), kern, curv, DiffForm.zero(XYZ, 3), COURANT, conn,
                              name="corrupted pairing")


def wrong_H() -> AlgebroidStructure:
    """The sl2 Courant chart with H replaced by 0, so dH no longer matches the Pontryagin form."""
    q = sl2_courant()
    return q.replace(alpha=DiffForm.zero(XYZW, 3), name="wrong H")


def _frame(ring: ChartRing):
    from .algebroid import coordinate_frame

    return coordinate_frame(ring)


def passing_charts() -> dict[str, AlgebroidStructure]:
    """Every chart that must pass its axiom suite."""
    p0, p1 = p1_deformed_charts(2)
    return {
        "cdo_standard": cdo_standard(),
        "cdo_twisted": cdo_twisted(),
        "tcdo_chart": tcdo_chart(),
        "deformed_tcdo_chart": deformed_tcdo_chart(),
        "p1_deformed_U0": p0,
        "p1_deformed_U1": p1,
        "sl2_courant": sl2_courant(),
        "sl2_vertex": sl2_vertex(),
    }


def cdo_A4() -> AlgebroidStructure:
    """A twisted CDO on the four-variable ring, the partner for arithmetic with the sl2 charts."""
    return make_cdo(XYZW, alpha=parse_form(XYZW, "x*y dx^dy^dz + z dy^dz^dw", 3), name="A4 twisted CDO")


def auxiliary_charts() -> dict[str, AlgebroidStructure]:
    """Charts used as arithmetic partners; not part of the timed reference set."""
    return {"cdo_A4": cdo_A4()}


def failing_charts() -> dict[str, AlgebroidStructure]:
    return {"corrupted_pairing": corrupted_pairing(), "wrong_H": wrong_H()}


# ---------------------------------------------------------------------------
# covers (as JSON-ready dictionaries)
# ---------------------------------------------------------------------------

def _ring(r: ChartRing) -> dict:
    return {"id": r.chart_id, "variables": list(r.variables), "inverted": list(r.inverted)}


def sl2_affine_cover_dict() -> dict:
    """Three copies of A^3 with different sl2 connections plus CDO data."""
    ring = {"id": "A3", "variables": ["x", "y", "z"], "inverted": []}
    same = ["x", "y", "z"]
    return {
        "format": "algebroid-forge/cover",
        "name": "synthetic sl2 cover",
        "charts": [ring, ring, ring],
        "transitions": [
            {"pair": [0, 1], "inverted": [], "images": same},
            {"pair": [0, 2], "inverted": [], "images": same},
            {"pair": [1, 2], "inverted": [], "images": same},
        ],
        "cext": {
            "kernel": {"preset": "sl2", "scale": "1"},
            "connections": [["0", "0", "0"], ["x dy", "z dx", "y dz"], ["y dz + dx", "0", "x dx"]],
            "H": ["0", "x*z dx^dy^dz", "0"],
        },
        "cdo": {
            "gamma": ["x dx^dy^dz", "0", "y^2 dx^dy^dz"],
            "b": [
                {"pair": [0, 1], "form": "x dy^dz"},
                {"pair": [1, 0], "form": "z dx^dy"},
                {"pair": [1, 2], "form": "y^2 dx^dz"},
            ],
        },
    }


def p1_cover_dict(k=2) -> dict:
    """P^1 with the deformed twisted data: kernel l with <l|l> = k glued by dx/x."""
    k = Fraction(k)
    return {
        "format": "algebroid-forge/cover",
        "name": f"P1 deformed k={k}",
        "charts": [{"id": "U0", "variables": ["x"], "inverted": []}, {"id": "U1", "variables": ["y"], "inverted": []}],
        "transitions": [{"pair": [0, 1], "inverted": ["x"], "images": ["x^-1"]}],
        "cext": {
            "kernel": {"preset": "abelian", "basis": ["l"], "pairing": [[str(k)]]},
            "overlap_A": [{"pair": [0, 1], "forms": ["-x^-1 dx"]}],
        },
    }


def zero_cover_dict() -> dict:
    ring = {"id": "A2", "variables": ["x", "y"], "inverted": []}
    return {
        "format": "algebroid-forge/cover",
        "name": "zero data",
        "charts": [ring, ring],
        "transitions": [{"pair": [0, 1], "inverted": [], "images": ["x", "y"]}],
        "cext": {"kernel": {"preset": "abelian", "basis": [], "pairing": []}},
        "cdo": {},
    }


def covers() -> dict[str, dict]:
    return {"cover_sl2_affine": sl2_affine_cover_dict(), "cover_p1": p1_cover_dict(2), "cover_zero": zero_cover_dict()}


def fixture_path(name: str) -> Path:
    """Path of a shipped fixture file, e.g. ``fixture_path("cdo_standard")``."""
    p = Path(__file__).resolve().parent / "data" / f"{name}.json"
    if not p.exists():
        raise FileNotFoundError(p)
    return p
