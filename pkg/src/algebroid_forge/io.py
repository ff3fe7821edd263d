"""Text rendering and JSON chart/cover files.

A chart file looks like::

    {
      "format": "algebroid-forge/chart",
      "name": "sl2 Q",
      "kind": "courant",
      "ring": {"id": "A", "variables": ["x", "y", "z"], "inverted": []},
      "frame": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]],
      "kernel": {"preset": "sl2", "scale": "1"},
      "connection": ["x dy", "y dz", "0"],
      "alpha": "0"
    }

``frame`` defaults to the coordinate frame and ``curvature`` (a list of
2-forms) defaults to the curvature of ``connection``.  Kernels are either a
preset (``sl2`` or ``abelian``) or explicit ``basis``, ``brackets`` (entries
``[left, right, {result: coeff}]``) and ``pairing``.  All forms and
polynomials use the grammar of :mod:`algebroid_forge.exact.text`.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .algebroid import (
    KINDS,
    AlgebroidStructure,
    KernelAlgebra,
    coordinate_frame,
    curvature_of,
)
from .exact.forms import DiffForm, VectorField
from .exact.ring import ChartRing
from .exact.text import ParseError, format_form, format_poly, parse_form, parse_poly

CHART_FORMAT = "algebroid-forge/chart"
COVER_FORMAT = "algebroid-forge/cover"


class InputError(ValueError):
    """A chart or cover file could not be read; the message names the location."""


def format_element(e) -> str:
    """Render sum f_i o tau_i + sum h_r o g_r + omega, e.g. ``(-x^2) tau1 + (x) l1 - 2 dx``."""
    s = e.structure
    parts = []
    for i, f in enumerate(e.vf):
        if f:
            parts.append(f"({f}) tau{i + 1}")
    for r, h in enumerate(e.ker):
        if h:
            parts.append(f"({h}) {s.kernel.basis[r]}")
    if e.form:
        parts.append(str(e.form))
    if not parts:
        return "0"
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


def dumps(data: dict) -> str:
    """Deterministic JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def _frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _loads(text: str, source: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{source}: top level must be an object")
    return data


def _need(d: dict, key: str, where: str):
    if key not in d:
        raise InputError(f"{where}: missing field {key!r}")
    return d[key]


def _form(ring: ChartRing, text: Any, degree: int, where: str) -> DiffForm:
    if not isinstance(text, str):
        raise InputError(f"{where}: expected a string, got {type(text).__name__}")
    try:
        return parse_form(ring, text, degree)
    except ParseError as exc:
        raise InputError(f"{where}: {exc}") from exc
    except ValueError as exc:
        raise InputError(f"{where}: {exc}") from exc


def _poly(ring: ChartRing, text: Any, where: str):
    if not isinstance(text, str):
        raise InputError(f"{where}: expected a string, got {type(text).__name__}")
    try:
        return parse_poly(ring, text)
    except (ParseError, ValueError) as exc:
        raise InputError(f"{where}: {exc}") from exc


def _rational(v: Any, where: str) -> Fraction:
    try:
        return Fraction(str(v))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{where}: {v!r} is not a rational number") from exc


# ---------------------------------------------------------------------------
# rings and kernels
# ---------------------------------------------------------------------------

def ring_to_dict(ring: ChartRing) -> dict:
    return {"id": ring.chart_id, "variables": list(ring.variables), "inverted": list(ring.inverted)}


def ring_from_dict(d: Any, where: str = "ring") -> ChartRing:
    if not isinstance(d, dict):
        raise InputError(f"{where}: expected an object")
    try:
        return ChartRing(str(_need(d, "id", where)), tuple(_need(d, "variables", where)), tuple(d.get("inverted", ())))
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: {exc}") from exc


def kernel_to_dict(k: KernelAlgebra) -> dict:
    brackets = []
    for r in range(k.dim):
        for s in range(r + 1, k.dim):
            res = {k.basis[t]: _frac_str(k.c(r, s, t)) for t in range(k.dim) if k.c(r, s, t)}
            if res:
                brackets.append([k.basis[r], k.basis[s], res])
    out = {
        "basis": list(k.basis),
        "brackets": brackets,
        "pairing": [[_frac_str(c) for c in row] for row in k.pairing],
    }
    if not k.strict:
        out["strict"] = False
    return out


def kernel_from_dict(d: Any, where: str = "kernel") -> KernelAlgebra:
    if d is None:
        return KernelAlgebra.empty()
    if not isinstance(d, dict):
        raise InputError(f"{where}: expected an object")
    try:
        preset = d.get("preset")
        if preset == "sl2":
            return KernelAlgebra.sl2(_rational(d.get("scale", 1), f"{where}.scale"),
                                     tuple(d.get("basis", ("e", "h", "f"))))
        if preset == "abelian":
            basis = tuple(_need(d, "basis", where))
            pairing = d.get("pairing")
            K = None if pairing is None else [[_rational(c, f"{where}.pairing") for c in row] for row in pairing]
            return KernelAlgebra.abelian(basis, K)
        if preset is not None:
            raise InputError(f"{where}: unknown preset {preset!r}")
        basis = tuple(_need(d, "basis", where))
        m = len(basis)
        sc = [[[Fraction(0)] * m for _ in range(m)] for _ in range(m)]
        for n, entry in enumerate(d.get("brackets", [])):
            left, right, res = entry
            r, s = basis.index(left), basis.index(right)
            for name, c in res.items():
                v = _rational(c, f"{where}.brackets[{n}]")
                t = basis.index(name)
                sc[r][s][t] += v
                sc[s][r][t] -= v
        K = [[_rational(c, f"{where}.pairing") for c in row] for row in _need(d, "pairing", where)]
        return KernelAlgebra(basis, sc, K, strict=bool(d.get("strict", True)))
    except InputError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise InputError(f"{where}: {exc}") from exc


# ---------------------------------------------------------------------------
# charts
# ---------------------------------------------------------------------------

def chart_to_dict(s: AlgebroidStructure) -> dict:
    return {
        "format": CHART_FORMAT,
        "name": s.name,
        "kind": s.kind,
        "ring": ring_to_dict(s.ring),
        "frame": [[format_poly(c) for c in t.coefficients] for t in s.frame],
        "kernel": kernel_to_dict(s.kernel),
        "connection": [format_form(a) for a in s.connection],
        "curvature": [format_form(c) for c in s.curvature],
        "alpha": format_form(s.alpha),
    }


def chart_from_dict(d: dict, where: str = "chart") -> AlgebroidStructure:
    fmt = d.get("format", CHART_FORMAT)
    if fmt != CHART_FORMAT:
        raise InputError(f"{where}: format {fmt!r} is not {CHART_FORMAT!r}")
    ring = ring_from_dict(_need(d, "ring", where), f"{where}.ring")
    kind = d.get("kind", "vertex")
    if kind not in KINDS:
        raise InputError(f"{where}.kind: {kind!r} is not one of {sorted(KINDS)}")
    if "frame" in d:
        rows = d["frame"]
        if not isinstance(rows, list):
            raise InputError(f"{where}.frame: expected a list")
        frame = tuple(
            VectorField(ring, [_poly(ring, c, f"{where}.frame[{i}][{j}]") for j, c in enumerate(row)])
            for i, row in enumerate(rows)
        )
    else:
        frame = coordinate_frame(ring)
    kernel = kernel_from_dict(d.get("kernel"), f"{where}.kernel")
    m = kernel.dim
    conn = d.get("connection")
    connection = (
        tuple(_form(ring, a, 1, f"{where}.connection[{r}]") for r, a in enumerate(conn))
        if conn is not None else tuple(DiffForm.zero(ring, 1) for _ in range(m))
    )
    if len(connection) != m:
        raise InputError(f"{where}.connection: need {m} entries")
    if "curvature" in d:
        curvature = tuple(_form(ring, c, 2, f"{where}.curvature[{r}]") for r, c in enumerate(d["curvature"]))
    else:
        curvature = curvature_of(ring, kernel, connection)
    alpha = _form(ring, d.get("alpha", "0"), 3, f"{where}.alpha")
    try:
        return AlgebroidStructure(ring, frame, kernel, curvature, alpha, kind, connection, str(d.get("name", "")))
    except ValueError as exc:
        raise InputError(f"{where}: {exc}") from exc


def load_chart(path: str | Path) -> AlgebroidStructure:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"{p}: {exc.strerror}") from exc
    return chart_from_dict(_loads(text, str(p)), str(p))


def loads_chart(text: str) -> AlgebroidStructure:
    return chart_from_dict(_loads(text, "<string>"))


def dumps_chart(s: AlgebroidStructure) -> str:
    return dumps(chart_to_dict(s))


def dump_chart(s: AlgebroidStructure, path: str | Path) -> None:
    Path(path).write_text(dumps_chart(s))


# ---------------------------------------------------------------------------
# covers
# ---------------------------------------------------------------------------

def cover_from_dict(d: dict, where: str = "cover"):
    """Return (cover, CExtTrivialization or None, CDOTrivialization or None)."""
    from .cech import CDOTrivialization, CExtTrivialization, Cover, TransitionError

    fmt = d.get("format", COVER_FORMAT)
    if fmt != COVER_FORMAT:
        raise InputError(f"{where}: format {fmt!r} is not {COVER_FORMAT!r}")
    charts = tuple(ring_from_dict(c, f"{where}.charts[{i}]") for i, c in enumerate(_need(d, "charts", where)))
    trans = {}
    for n, t in enumerate(d.get("transitions", [])):
        w = f"{where}.transitions[{n}]"
        i, j = _need(t, "pair", w)
        trans[(int(i), int(j))] = (tuple(t.get("inverted", ())), tuple(_need(t, "images", w)))
    try:
        cover = Cover(charts, trans, str(d.get("name", "")))
        problems = cover.validate()
    except (TransitionError, ValueError, ParseError) as exc:
        raise InputError(f"{where}.transitions: {exc}") from exc
    if problems:
        raise InputError(f"{where}.transitions: {problems[0]}")
    cext = None
    if "cext" in d:
        c = d["cext"]
        w = f"{where}.cext"
        kernel = kernel_from_dict(_need(c, "kernel", w), f"{w}.kernel")
        conns = []
        for i, ring in enumerate(charts):
            row = c.get("connections", [None] * len(charts))[i]
            if row is None:
                conns.append(tuple(DiffForm.zero(ring, 1) for _ in range(kernel.dim)))
            else:
                conns.append(tuple(_form(ring, a, 1, f"{w}.connections[{i}][{r}]") for r, a in enumerate(row)))
        Hs = c.get("H", ["0"] * len(charts))
        H = tuple(_form(ring, h, 3, f"{w}.H[{i}]") for i, (ring, h) in enumerate(zip(charts, Hs)))
        overlap_A = {}
        for n, ent in enumerate(c.get("overlap_A", [])):
            i, j = ent["pair"]
            ring = cover.overlap((i, j))
            overlap_A[(int(i), int(j))] = tuple(
                _form(ring, a, 1, f"{w}.overlap_A[{n}]") for a in ent["forms"]
            )
        cext = CExtTrivialization(cover, kernel, tuple(conns), H, overlap_A=overlap_A or None)
    cdo = None
    if "cdo" in d:
        c = d["cdo"]
        w = f"{where}.cdo"
        gam = c.get("gamma", ["0"] * len(charts))
        gamma = tuple(_form(ring, g, 3, f"{w}.gamma[{i}]") for i, (ring, g) in enumerate(zip(charts, gam)))
        b = {}
        for n, ent in enumerate(c.get("b", [])):
            i, j = ent["pair"]
            b[(int(i), int(j))] = _form(cover.overlap((i, j)), ent["form"], 2, f"{w}.b[{n}]")
        cdo = CDOTrivialization(cover, gamma, b)
    return cover, cext, cdo


def load_cover(path: str | Path):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"{p}: {exc.strerror}") from exc
    return cover_from_dict(_loads(text, str(p)), str(p))


def cocycle_to_dict(g) -> dict:
    """alpha and beta components keyed by index strings such as ``"0,1"``."""
    key = lambda t: ",".join(map(str, t))  # noqa: E731
    return {
        "alpha": {key(k): format_form(v) for k, v in sorted(g.alpha.components.items())},
        "beta": {key(k): format_form(v) for k, v in sorted(g.beta.components.items())},
    }


__all__ = [
    "CHART_FORMAT",
    "COVER_FORMAT",
    "InputError",
    "chart_from_dict",
    "chart_to_dict",
    "cocycle_to_dict",
    "cover_from_dict",
    "dump_chart",
    "dumps",
    "dumps_chart",
    "format_element",
    "kernel_from_dict",
    "kernel_to_dict",
    "load_chart",
    "load_cover",
    "loads_chart",
    "ring_from_dict",
    "ring_to_dict",
]
