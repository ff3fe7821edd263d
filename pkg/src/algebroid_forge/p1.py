"""The projective line: two charts, gluing morphisms, global sections and the sl2 level.

Charts are U0 = Spec Q[x] and U1 = Spec Q[y] with x = 1/y on the overlap.
Every gluing is written in the orientation U1 -> U0: the U1 structure is
restricted to Q[y, 1/y], carried to Q[x, 1/x] along y -> 1/x (its frame
vector field becomes -x^2 d/dx) and then mapped into the restricted U0
structure by an :class:`AlgebroidMorphism`.

The deformed gluing with <l|l> = k sends

    d/dy -> -x^2 o d/dx + x o l + (k/2 - 4) dx,     l -> l + k dx/x,

where ``o`` is the (-1) product with the function on the left.  At k = 0 it
reduces to the twisted gluing, and dropping l gives the plain CDO gluing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .algebroid import (
    AlgebroidElement,
    AlgebroidStructure,
    make_cdo,
    make_tcdo_chart,
)
from .axioms import AxiomReport
from .baer import AlgebroidMorphism, check_morphism
from .exact.forms import DiffForm, VectorField
from .exact.linsolve import LinearSystem
from .exact.maps import ChartMap
from .exact.ring import ChartRing
from . import wick

DEFAULT_WINDOW = (-4, 4)
RECHECK_WINDOW = (-6, 6)


class AnsatzTooSmall(RuntimeError):
    """The solution space changed when the degree window was enlarged."""


class RelationFailure(AssertionError):
    """An sl2 relation failed; ``witness`` holds the offending symbolic value."""

    def __init__(self, relation: str, witness):
        self.relation = relation
        self.witness = witness
        super().__init__(f"{relation}: {witness}")


def _frac(k) -> Fraction:
    return k if isinstance(k, Fraction) else Fraction(k)


@dataclass(frozen=True)
class P1Cover:
    """The two-chart cover of P^1 and the rings it needs."""

    U0: ChartRing = field(default_factory=lambda: ChartRing("U0", ("x",)))
    U1: ChartRing = field(default_factory=lambda: ChartRing("U1", ("y",)))
    O0: ChartRing = field(default_factory=lambda: ChartRing("U01x", ("x",), ("x",)))
    O1: ChartRing = field(default_factory=lambda: ChartRing("U01y", ("y",), ("y",)))

    @cached_property
    def psi(self) -> ChartMap:
        """Q[y, 1/y] -> Q[x, 1/x], y -> 1/x."""
        return ChartMap(self.O1, self.O0, (self.O0.gen("x").inverse(),))

    @cached_property
    def psi_inverse(self) -> ChartMap:
        return ChartMap(self.O0, self.O1, (self.O1.gen("y").inverse(),))

    def restrict0(self) -> ChartMap:
        return ChartMap.inclusion(self.U0, self.O0)

    def restrict1(self) -> ChartMap:
        return ChartMap.inclusion(self.U1, self.O1)

    def involutive(self) -> bool:
        x, y = self.O0.gen("x"), self.O1.gen("y")
        return self.psi_inverse.compose(self.psi).images == (y,) and self.psi.compose(self.psi_inverse).images == (x,)


@dataclass
class P1Gluing:
    """Chart structures over U0 and U1 and the gluing morphism on the overlap."""

    cover: P1Cover
    chart0: AlgebroidStructure
    chart1: AlgebroidStructure
    overlap0: AlgebroidStructure  # chart0 restricted to Q[x, 1/x]
    overlap1: AlgebroidStructure  # chart1 restricted and carried to Q[x, 1/x]
    morphism: AlgebroidMorphism
    k: Fraction | None

    def restrict0(self, e: AlgebroidElement) -> AlgebroidElement:
        return self.chart0.transport_element(e, self.cover.restrict0(), self.overlap0)

    def carry1(self, e: AlgebroidElement) -> AlgebroidElement:
        """A U1 element written in the source of the gluing morphism."""
        mid = self.chart1.transport(self.cover.restrict1())
        e_mid = self.chart1.transport_element(e, self.cover.restrict1(), mid)
        return mid.transport_element(e_mid, self.cover.psi, self.overlap1)

    def glue(self, e: AlgebroidElement) -> AlgebroidElement:
        """Image in U0|overlap of a U1 element."""
        return self.morphism.apply(self.carry1(e))

    def check(self, seed: int = 0) -> AxiomReport:
        return check_morphism(self.morphism, seed=seed)


def _build(k: Fraction | None, with_kernel: bool, dx_coeff: Fraction, name: str) -> P1Gluing:
    cov = P1Cover()
    if with_kernel:
        kk = k if k is not None else Fraction(0)
        c0 = make_tcdo_chart(cov.U0, [DiffForm.zero(cov.U0, 2)], pairing=[[kk]], names=("l",), name="U0")
        c1 = make_tcdo_chart(cov.U1, [DiffForm.zero(cov.U1, 2)], pairing=[[kk]], names=("l",), name="U1")
    else:
        c0 = make_cdo(cov.U0, name="U0")
        c1 = make_cdo(cov.U1, name="U1")
    o0 = c0.transport(cov.restrict0(), name="U0|U01")
    o1 = c1.transport(cov.restrict1()).transport(cov.psi, name="U1|U01")
    x = cov.O0.gen("x")
    dx = DiffForm.dvar(cov.O0, 0)
    img_tau = o0.minus_one(-(x * x), o0.tau(0)) + o0.form(dx * dx_coeff)
    kernel_images: tuple[AlgebroidElement, ...] = ()
    if with_kernel:
        img_tau = img_tau + o0.minus_one(x, o0.g(0))
        kk = k if k is not None else Fraction(0)
        kernel_images = (o0.g(0) + o0.form(dx * (kk * x.inverse())),)
    m = AlgebroidMorphism(o1, o0, (img_tau,), kernel_images, name=name)
    return P1Gluing(cov, c0, c1, o0, o1, m, k)


def cdo_gluing() -> P1Gluing:
    """Plain chiral differential operators: d/dy -> -x^2 o d/dx - 4 dx."""
    return _build(None, False, Fraction(-4), "cdo")


def tcdo_gluing() -> P1Gluing:
    """Twisted CDO with <l|l> = 0: d/dy -> -x^2 o d/dx + x o l - 4 dx, l -> l."""
    return _build(Fraction(0), True, Fraction(-4), "tcdo")


def deformed_gluing(k, dx_sign: int = 1) -> P1Gluing:
    """Deformed twisted CDO with <l|l> = k.

    ``dx_sign = -1`` flips the sign of the k/2 dx term, the alternative reading
    kept available for testing.
    """
    k = _frac(k)
    return _build(k, True, Fraction(-4) + dx_sign * k / 2, f"deformed(k={k})")


# ---------------------------------------------------------------------------
# sl2 elements, global sections and the level
# ---------------------------------------------------------------------------

def sl2_elements(g: P1Gluing, dx_sign: int = 1) -> dict[str, AlgebroidElement]:
    """e, h, f on U0: d/dx, -2 (d/dx)_(-1) x + l, -(d/dx)_(-1) x^2 - 2 dx + x l + k/2 dx."""
    s = g.chart0
    x = s.ring.gen("x")
    dx = DiffForm.dvar(s.ring, 0)
    tau = s.tau(0)
    k = g.k if g.k is not None else Fraction(0)
    e = tau
    h = s.right_minus_one(tau, x) * -2
    f = -s.right_minus_one(tau, x * x) - s.form(dx * 2)
    if s.m:
        h = h + s.g(0)
        f = f + s.minus_one(x, s.g(0)) + s.form(dx * (dx_sign * k / 2))
    return {"e": e, "h": h, "f": f}


@dataclass
class GlobalSections:
    """Basis of weight-one global sections, as (U0 part, U1 part) pairs."""

    k: Fraction
    window: tuple[int, int]
    basis: list[tuple[AlgebroidElement, AlgebroidElement]]
    gluing: P1Gluing

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def contains(self, e0: AlgebroidElement) -> bool:
        """Whether a U0 element is in the span of the U0 parts."""
        span = [b[0] for b in self.basis]
        return _in_span(e0, span)

    def anchors(self) -> list[VectorField]:
        return [b[0].structure.anchor(b[0]) for b in self.basis]


def _element_coords(e: AlgebroidElement) -> dict:
    out = {}
    for i, c in enumerate(e.vf):
        for exp, v in c.terms.items():
            out[("vf", i, exp)] = v
    for r, c in enumerate(e.ker):
        for exp, v in c.terms.items():
            out[("ker", r, exp)] = v
    for idx, c in e.form.items():
        for exp, v in c.terms.items():
            out[("form", idx, exp)] = v
    return out


def _in_span(target: AlgebroidElement, span: list[AlgebroidElement]) -> bool:
    sys = LinearSystem()
    keys = set(_element_coords(target))
    cols = [_element_coords(b) for b in span]
    for c in cols:
        keys |= set(c)
    for key in sorted(keys, key=repr):
        sys.add_equation({j: c.get(key, 0) for j, c in enumerate(cols)}, _element_coords(target).get(key, 0))
    return sys.solve() is not None


def _ansatz(s: AlgebroidStructure, var: str, window: tuple[int, int]) -> list[AlgebroidElement]:
    """Weight-one elements f tau, f g_r, f dvar with f a monomial inside the window."""
    ring = s.ring
    lo = window[0] if ring.is_inverted(0) else 0
    out = []
    dv = DiffForm.dvar(ring, 0)
    for e in range(lo, window[1] + 1):
        mono = ring.monomial((e,))
        out.append(s.minus_one(mono, s.tau(0)))
        for r in range(s.m):
            out.append(s.minus_one(mono, s.g(r)))
        out.append(s.form(dv * mono))
    return out


def _solve_sections(g: P1Gluing, window: tuple[int, int]) -> list[tuple[AlgebroidElement, AlgebroidElement]]:
    a0 = _ansatz(g.chart0, "x", window)
    a1 = _ansatz(g.chart1, "y", window)
    cols = [_element_coords(g.restrict0(b)) for b in a0]
    cols += [_element_coords(-g.glue(b)) for b in a1]
    keys = set()
    for c in cols:
        keys |= set(c)
    sys = LinearSystem()
    for j in range(len(cols)):
        sys.unknown(j)
    for key in sorted(keys, key=repr):
        sys.add_equation({j: c.get(key, 0) for j, c in enumerate(cols)}, 0)
    basis = []
    for vec in sys.nullspace():
        e0 = g.chart0.zero()
        e1 = g.chart1.zero()
        for j, c in vec.items():
            if c:
                if j < len(a0):
                    e0 = e0 + a0[j] * c
                else:
                    e1 = e1 + a1[j - len(a0)] * c
        basis.append((e0, e1))
    return basis


def global_sections(k, window: tuple[int, int] = DEFAULT_WINDOW,
                    recheck: tuple[int, int] | None = RECHECK_WINDOW) -> GlobalSections:
    """Weight-one global sections of the deformed algebroid with <l|l> = k.

    Solves restrict(s0) = glue(s1) over a Laurent window and re-solves on the
    wider ``recheck`` window; a change in dimension raises AnsatzTooSmall.
    """
    k = _frac(k)
    g = deformed_gluing(k)
    basis = _solve_sections(g, window)
    if recheck is not None:
        wider = _solve_sections(g, recheck)
        if len(wider) != len(basis):
            raise AnsatzTooSmall(
                f"dimension {len(basis)} on window {window} but {len(wider)} on {recheck}"
            )
    return GlobalSections(k, window, basis, g)


@dataclass
class LevelReport:
    k: Fraction
    kappa: Fraction
    brackets: dict[str, str]
    pairings: dict[str, str]
    wick_kappa: Fraction | None


def sl2_level(k, dx_sign: int = 1, cross_check: bool = True) -> LevelReport:
    """Build e, h, f in the deformed chart, verify the sl2 relations, return the level."""
    k = _frac(k)
    g = deformed_gluing(k, dx_sign)
    s = g.chart0
    el = sl2_elements(g, dx_sign)
    one = lambda a, b: s.one_pairing(el[a], el[b])  # noqa: E731
    zero = lambda a, b: s.zero_product(el[a], el[b])  # noqa: E731
    p = one("e", "f")
    if not p.is_constant():
        raise RelationFailure("e (1) f is not a constant", p)
    kappa = p.constant_value()
    brackets = {}
    for a, b, expect in [
        ("e", "f", el["h"]),
        ("h", "e", el["e"] * 2),
        ("h", "f", el["f"] * -2),
        ("e", "e", s.zero()),
        ("f", "f", s.zero()),
        ("h", "h", s.zero()),
    ]:
        got = zero(a, b)
        if got != expect:
            raise RelationFailure(f"{a} (0) {b} = {expect}", got - expect)
        brackets[f"{a}(0){b}"] = str(got)
    pairings = {}
    for a, b, factor in [("e", "f", 1), ("f", "e", 1), ("h", "h", 2), ("e", "e", 0), ("f", "f", 0),
                         ("h", "e", 0), ("h", "f", 0)]:
        got = one(a, b)
        if got != s.ring.const(kappa * factor):
            raise RelationFailure(f"{a} (1) {b} = {kappa * factor}", got)
        pairings[f"{a}(1){b}"] = str(got)
    wick_kappa = None
    if cross_check:
        rep = wick.check_affine_sl2(wick.wakimoto_states(k))
        if not rep.passed:
            raise RelationFailure("free-field relations", rep.mismatches)
        wick_kappa = rep.kappa
        if wick_kappa != kappa:
            raise RelationFailure("free-field level differs", (kappa, wick_kappa))
    return LevelReport(k, kappa, brackets, pairings, wick_kappa)


def overlap_identities(k) -> dict[str, bool]:
    """The three overlap equalities expressing that e, h, f are global."""
    g = deformed_gluing(_frac(k))
    el = sl2_elements(g)
    s1 = g.chart1
    y = s1.ring.gen("y")
    dy = DiffForm.dvar(s1.ring, 0)
    kk = g.k
    t1 = s1.tau(0)
    partners = {
        "e": -s1.right_minus_one(t1, y * y) - s1.form(dy * 2) + s1.minus_one(y, s1.g(0)) + s1.form(dy * (kk / 2)),
        "h": s1.right_minus_one(t1, y) * 2 - s1.g(0),
        "f": t1,
    }
    return {n: g.glue(partners[n]) == g.restrict0(el[n]) for n in ("e", "h", "f")}


__all__ = [
    "AnsatzTooSmall",
    "GlobalSections",
    "LevelReport",
    "P1Cover",
    "P1Gluing",
    "RelationFailure",
    "cdo_gluing",
    "deformed_gluing",
    "global_sections",
    "overlap_identities",
    "sl2_elements",
    "sl2_level",
    "tcdo_gluing",
]
