"""Finite covers, Cech cochains of forms and the gerbe cocycle of a trivialization.

A trivialization is a family of chart structures x_i with maps
eta_ij : x_i -> x_j [+] alpha_ij on overlaps.  The 3-forms alpha_ij are read
off from candidate maps with :func:`twist_defect`, and the 2-forms beta_ijk
from the composite eta_jk eta_ij eta_ik^{-1} = exp(beta_ijk) on triple
overlaps.  The pair (alpha, beta) then satisfies

    d alpha_ij = 0,   alpha_ij + alpha_jk - alpha_ik = d beta_ijk,   d_C beta = 0.

Overlap rings use the coordinates of the smallest chart index involved, with
the inversions listed by the transition data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Mapping, Sequence

from .algebroid import (
    AlgebroidElement,
    AlgebroidStructure,
    KernelAlgebra,
    coordinate_frame,
    curvature_of,
    make_cdo,
    make_QNH,
)
from .axioms import AxiomReport
from .baer import (
    AlgebroidMorphism,
    FrameMismatch,
    boxplus,
    boxplus_morphism,
    check_morphism,
    exp_beta,
    twist,
    twist_defect,
)
from .exact.forms import DiffForm, all_indices
from .exact.linsolve import LinearSystem
from .exact.maps import ChartMap
from .exact.ring import ChartRing
from .exact.text import parse_poly

Index = tuple[int, ...]


class TransitionError(ValueError):
    """Transition data of a cover is inconsistent."""


class CoverMismatch(ValueError):
    """Cochains or cocycles on different covers were combined."""


# ---------------------------------------------------------------------------
# covers
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class Cover:
    """Charts plus, for each pair i < j, the variables of chart i inverted on
    U_ij and the images of chart j's variables in chart i's coordinates."""

    charts: tuple[ChartRing, ...]
    transitions: Mapping[tuple[int, int], tuple[tuple[str, ...], tuple[str, ...]]]
    name: str = ""
    _rings: dict = field(default_factory=dict, repr=False)
    _maps: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self.charts = tuple(self.charts)
        n = len(self.charts)
        for i, j in combinations(range(n), 2):
            if (i, j) not in self.transitions:
                raise TransitionError(f"missing transition data for pair ({i}, {j})")
            inv, images = self.transitions[(i, j)]
            if len(images) != self.charts[j].ngens:
                raise TransitionError(f"pair ({i}, {j}) needs {self.charts[j].ngens} images")
            for v in inv:
                self.charts[i].index(v)

    @property
    def n(self) -> int:
        return len(self.charts)

    def pairs(self, ordered: bool = False) -> list[Index]:
        if ordered:
            return [(i, j) for i, j in product(range(self.n), repeat=2) if i != j]
        return list(combinations(range(self.n), 2))

    def triples(self, ordered: bool = False) -> list[Index]:
        if ordered:
            return [t for t in product(range(self.n), repeat=3) if len(set(t)) > 1]
        return list(combinations(range(self.n), 3))

    def overlap(self, idx: Sequence[int]) -> ChartRing:
        """The coordinate ring of the intersection of the charts in ``idx``."""
        key = tuple(sorted(set(idx)))
        if key in self._rings:
            return self._rings[key]
        base = key[0]
        chart = self.charts[base]
        inv = set(chart.inverted)
        for j in key[1:]:
            inv |= set(self.transitions[(base, j)][0])
        if inv == set(chart.inverted):
            ring = chart
        else:
            ordered_inv = tuple(v for v in chart.variables if v in inv)
            tag = "".join(str(i) for i in key)
            ring = ChartRing(f"{chart.chart_id}|{tag}", chart.variables, ordered_inv)
        self._rings[key] = ring
        return ring

    def _images_of(self, i: int, key: Index) -> tuple:
        """Images of chart i's variables in the ring of overlap ``key``."""
        ring = self.overlap(key)
        base = key[0]
        if i == base:
            return ring.gens()
        pair_ring = self.overlap((base, i))
        images = tuple(parse_poly(pair_ring, t) for t in self.transitions[(base, i)][1])
        if pair_ring == ring:
            return images
        inc = ChartMap.inclusion(pair_ring, ring)
        return tuple(inc.pull_poly(p) for p in images)

    def restriction(self, sub: Sequence[int], full: Sequence[int]) -> ChartMap:
        """The ring map from overlap(sub) to overlap(full), sub a subset of full."""
        s_key = tuple(sorted(set(sub)))
        f_key = tuple(sorted(set(full)))
        if not set(s_key) <= set(f_key):
            raise ValueError(f"{s_key} is not contained in {f_key}")
        k = (s_key, f_key)
        if k in self._maps:
            return self._maps[k]
        src, tgt = self.overlap(s_key), self.overlap(f_key)
        if src == tgt and s_key[0] == f_key[0]:
            m = ChartMap.identity(src)
        else:
            try:
                m = ChartMap(src, tgt, self._images_of(s_key[0], f_key))
            except ValueError as exc:
                raise TransitionError(f"cannot restrict {s_key} to {f_key}: {exc}") from exc
        self._maps[k] = m
        return m

    def restrict(self, i: int, idx: Sequence[int]) -> ChartMap:
        return self.restriction((i,), idx)

    def validate(self) -> list[str]:
        """Problems with the transition data (empty when consistent)."""
        problems = []
        for i, j in self.pairs():
            try:
                m = self.restrict(j, (i, j))
            except TransitionError as exc:
                problems.append(str(exc))
                continue
            if self.charts[j].ngens == self.charts[i].ngens:
                from .exact.maps import determinant

                if not determinant(m.jacobian()).is_unit():
                    problems.append(f"transition ({i}, {j}) is not invertible on the overlap")
        for i, j, k in self.triples():
            try:
                direct = self.restriction((k,), (i, j, k))
                via = self.restriction((j, k), (i, j, k)).compose(self.restriction((k,), (j, k)))
            except TransitionError as exc:
                problems.append(str(exc))
                continue
            if direct.images != via.images:
                problems.append(f"transitions disagree on triple ({i}, {j}, {k})")
        return problems


def affine_cover(ring: ChartRing, n: int = 3, name: str = "affine") -> Cover:
    """n copies of one chart; every overlap is the chart itself."""
    trans = {(i, j): ((), ring.variables) for i, j in combinations(range(n), 2)}
    return Cover(tuple(ring for _ in range(n)), trans, name)


def p1_cover() -> Cover:
    U0 = ChartRing("U0", ("x",))
    U1 = ChartRing("U1", ("y",))
    return Cover((U0, U1), {(0, 1): (("x",), ("x^-1",))}, "P1")


def p1xp1_cover() -> Cover:
    """Four charts (x|y) x (u|v) with y = 1/x, v = 1/u."""
    charts = (
        ChartRing("U00", ("x", "u")),
        ChartRing("U01", ("x", "v")),
        ChartRing("U10", ("y", "u")),
        ChartRing("U11", ("y", "v")),
    )
    trans = {
        (0, 1): (("u",), ("x", "u^-1")),
        (0, 2): (("x",), ("x^-1", "u")),
        (0, 3): (("x", "u"), ("x^-1", "u^-1")),
        (1, 2): (("x", "v"), ("x^-1", "v^-1")),
        (1, 3): (("x",), ("x^-1", "v")),
        (2, 3): (("u",), ("y", "u^-1")),
    }
    return Cover(charts, trans, "P1xP1")


# ---------------------------------------------------------------------------
# cochains
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class CechCochain:
    """Forms of one degree indexed by tuples of chart indices (Cech degree = len - 1)."""

    cover: Cover
    degree: int
    form_degree: int
    components: dict[Index, DiffForm]

    def get(self, idx: Index) -> DiffForm:
        if idx in self.components:
            return self.components[idx]
        return DiffForm.zero(self.cover.overlap(idx), self.form_degree)

    def __add__(self, other: "CechCochain") -> "CechCochain":
        if other.cover is not self.cover:
            raise CoverMismatch("cochains live on different covers")
        if (other.degree, other.form_degree) != (self.degree, self.form_degree):
            raise ValueError("cochain degrees differ")
        keys = set(self.components) | set(other.components)
        return CechCochain(self.cover, self.degree, self.form_degree,
                           {k: self.get(k) + other.get(k) for k in keys})

    def __neg__(self) -> "CechCochain":
        return CechCochain(self.cover, self.degree, self.form_degree, {k: -v for k, v in self.components.items()})

    def __sub__(self, other: "CechCochain") -> "CechCochain":
        return self + (-other)

    def d(self) -> "CechCochain":
        """De Rham differential componentwise."""
        return CechCochain(self.cover, self.degree, self.form_degree + 1,
                           {k: v.d() for k, v in self.components.items()})

    def nonzero(self) -> dict[Index, DiffForm]:
        return {k: v for k, v in self.components.items() if v}

    def is_zero(self) -> bool:
        return not self.nonzero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, CechCochain):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None  # type: ignore[assignment]


def cech_diff(c: CechCochain, tuples: Sequence[Index] | None = None) -> CechCochain:
    """(d_C c)_{i0..ip+1} = sum_k (-1)^k c_{i0..^ik..ip+1}, restricted to the overlap.

    By default the tuples are all increasing (p+2)-tuples; pass ``tuples`` to
    evaluate on ordered tuples as well.  A missing face is an error.
    """
    cover = c.cover
    if tuples is None:
        tuples = list(combinations(range(cover.n), c.degree + 2))
    out = {}
    for t in tuples:
        ring = cover.overlap(t)
        acc = DiffForm.zero(ring, c.form_degree)
        for k in range(len(t)):
            face = t[:k] + t[k + 1:]
            if face not in c.components:
                raise CoverMismatch(f"cochain has no component on {face}")
            piece = cover.restriction(face, t).pull_form(c.components[face])
            acc = acc + piece if k % 2 == 0 else acc - piece
        out[t] = acc
    return CechCochain(cover, c.degree + 1, c.form_degree, out)


def pontryagin(curvature: Sequence[DiffForm], K: Sequence[Sequence]) -> DiffForm:
    """1/2 sum_rs K_rs c_r ^ c_s."""
    if not curvature:
        raise ValueError("need at least one curvature form")
    ring = curvature[0].ring
    out = DiffForm.zero(ring, 4)
    for r, cr in enumerate(curvature):
        for s, cs in enumerate(curvature):
            k = Fraction(K[r][s])
            if k and cr and cs:
                out = out + cr.wedge(cs) * (k / 2)
    return out


# ---------------------------------------------------------------------------
# gerbe cocycles
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class GerbeCocycle:
    """alpha on pairs (closed 3-forms), beta on triples (2-forms)."""

    cover: Cover
    alpha: CechCochain
    beta: CechCochain

    def __post_init__(self) -> None:
        if self.alpha.cover is not self.cover or self.beta.cover is not self.cover:
            raise CoverMismatch("components live on a different cover")

    @classmethod
    def zero(cls, cover: Cover, ordered: bool = False) -> "GerbeCocycle":
        a = {p: DiffForm.zero(cover.overlap(p), 3) for p in cover.pairs(ordered)}
        b = {t: DiffForm.zero(cover.overlap(t), 2) for t in cover.triples(ordered)}
        return cls(cover, CechCochain(cover, 1, 3, a), CechCochain(cover, 2, 2, b))

    def failures(self) -> list[str]:
        """Violations of the three cocycle relations, over every tuple with data."""
        out = []
        for k, a in self.alpha.components.items():
            if a and not a.is_closed():
                out.append(f"d alpha{k} != 0")
        tri = [t for t in self.beta.components if all(f in self.alpha.components for f in _faces(t))]
        if tri:
            dca = cech_diff(self.alpha, tri)
            for t in tri:
                if dca.get(t) != self.beta.get(t).d():
                    out.append(f"d_C alpha != d beta on {t}")
        quads = [q for q in product(range(self.cover.n), repeat=4)
                 if all(f in self.beta.components for f in _faces(q))]
        if quads:
            dcb = cech_diff(self.beta, quads)
            for q in quads:
                if dcb.get(q):
                    out.append(f"d_C beta != 0 on {q}")
        return out

    def is_cocycle(self) -> bool:
        return not self.failures()

    def __add__(self, other: "GerbeCocycle") -> "GerbeCocycle":
        return vext_cocycle_sum(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GerbeCocycle):
            return NotImplemented
        return self.alpha == other.alpha and self.beta == other.beta

    __hash__ = None  # type: ignore[assignment]

    def restrict_increasing(self) -> "GerbeCocycle":
        """Keep only increasing index tuples (a quasi-isomorphic subcomplex)."""
        a = {k: v for k, v in self.alpha.components.items() if list(k) == sorted(set(k))}
        b = {k: v for k, v in self.beta.components.items() if list(k) == sorted(set(k))}
        return GerbeCocycle(self.cover, CechCochain(self.cover, 1, 3, a), CechCochain(self.cover, 2, 2, b))


def _faces(t: Index) -> list[Index]:
    return [t[:k] + t[k + 1:] for k in range(len(t))]


def vext_cocycle_sum(q: GerbeCocycle, cdo: GerbeCocycle) -> GerbeCocycle:
    """Componentwise sum of two cocycles on the same cover; the result is re-verified."""
    if q.cover is not cdo.cover:
        raise CoverMismatch("cocycles live on different covers")
    out = GerbeCocycle(q.cover, q.alpha + cdo.alpha, q.beta + cdo.beta)
    fails = out.failures()
    if fails:
        raise ValueError(f"sum is not a cocycle: {fails[:3]}")
    return out


# ---------------------------------------------------------------------------
# trivializations -> cocycles
# ---------------------------------------------------------------------------

def transport_morphism(m: AlgebroidMorphism, phi: ChartMap) -> AlgebroidMorphism:
    """Restrict a morphism along a ring map (identity maps return ``m``)."""
    if phi.source == phi.target and phi.images == phi.source.gens():
        return m
    s = m.source.transport(phi)
    t = m.target.transport(phi)
    return AlgebroidMorphism(
        s, t,
        tuple(m.target.transport_element(e, phi, t) for e in m.frame_images),
        tuple(m.target.transport_element(e, phi, t) for e in m.kernel_images),
        phi.pull_form(m.twist_form) if m.twist_form is not None else None,
        name=m.name,
    )


def translate(m: AlgebroidMorphism, gamma: DiffForm) -> AlgebroidMorphism:
    """m [+] id_gamma : source [+] gamma -> target [+] gamma."""
    if not gamma:
        return m
    s = twist(m.source, gamma)
    t = twist(m.target, gamma)
    recast = lambda e: AlgebroidElement(t, e.vf, e.ker, e.form)  # noqa: E731
    return AlgebroidMorphism(s, t, tuple(map(recast, m.frame_images)), tuple(map(recast, m.kernel_images)),
                             name=m.name)


def retarget(m: AlgebroidMorphism, alpha: DiffForm) -> AlgebroidMorphism:
    """The same images, read as a map into target [+] alpha."""
    if not alpha:
        return m
    t = twist(m.target, alpha)
    recast = lambda e: AlgebroidElement(t, e.vf, e.ker, e.form)  # noqa: E731
    return AlgebroidMorphism(m.source, t, tuple(map(recast, m.frame_images)),
                             tuple(map(recast, m.kernel_images)), alpha, name=m.name)


def exp_form_of(m: AlgebroidMorphism) -> DiffForm | None:
    """beta if m has the shape of exp(beta) (identity on anchor and kernel), else None."""
    s = m.source
    w = []
    for a, img in enumerate(m.frame_images):
        if img.vf != s.tau(a).vf or any(img.ker):
            return None
        w.append(img.form)
    for r, img in enumerate(m.kernel_images):
        if img != AlgebroidElement(m.target, s.g(r).vf, s.g(r).ker, s.g(r).form):
            return None
    theta = s.coframe
    beta = DiffForm.zero(s.ring, 2)
    for a in range(s.n):
        if w[a]:
            beta = beta + theta[a].wedge(w[a])
    beta = beta * Fraction(1, 2)
    for a in range(s.n):
        got = beta.interior(s.frame[a]) if beta else DiffForm.zero(s.ring, 1)
        if got != w[a]:
            return None
    return beta


@dataclass
class TripleCheck:
    triple: Index
    beta: DiffForm
    expected: DiffForm | None
    matches: bool
    target_ok: bool


@dataclass
class CocycleRun:
    """A cocycle with the morphisms it was read from and the checks performed."""

    cocycle: GerbeCocycle
    morphisms: dict[Index, AlgebroidMorphism]
    morphism_reports: dict[Index, AxiomReport] = field(default_factory=dict)
    triples: list[TripleCheck] = field(default_factory=list)
    log: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (
            self.cocycle.is_cocycle()
            and all(r.passed for r in self.morphism_reports.values())
            and all(t.matches and t.target_ok for t in self.triples)
        )


Builder = Callable[[int, int], AlgebroidMorphism]


def cocycle_from_maps(cover: Cover, build: Builder, ordered: bool = True, verify: bool = True,
                      expected_beta: Callable[[Index], DiffForm] | None = None,
                      basis_only: bool = True) -> CocycleRun:
    """Turn candidate maps x_i -> x_j on U_ij into (alpha, beta).

    ``build(i, j)`` returns a map between the restricted chart structures
    whose only failure is a 3-form twist.  beta_ijk comes from the triple
    composite, which must have the shape of exp(beta).
    """
    pairs = cover.pairs(ordered)
    alpha: dict[Index, DiffForm] = {}
    maps: dict[Index, AlgebroidMorphism] = {}
    reports = {}
    log = []
    for i, j in pairs:
        raw = build(i, j)
        a = twist_defect(raw)
        m = retarget(raw, a)
        alpha[(i, j)] = a
        maps[(i, j)] = m
        if verify:
            reports[(i, j)] = check_morphism(m, basis_only=basis_only)
    triples = cover.triples(ordered)
    if not triples:
        log.append("no triple overlaps: composition check skipped")
    beta: dict[Index, DiffForm] = {}
    checks = []
    for t in triples:
        i, j, k = t
        if i == k:
            # eta_ki eta_ij on U_ij: compare with the identity of x_i
            continue
        phi = lambda p: cover.restriction(p, t)  # noqa: E731
        m_ij = transport_morphism(maps[(i, j)], phi((i, j))) if i != j else None
        m_jk = transport_morphism(maps[(j, k)], phi((j, k))) if j != k else None
        m_ik = transport_morphism(maps[(i, k)], phi((i, k)))
        a_ij = phi((i, j)).pull_form(alpha[(i, j)]) if i != j else None
        a_ik = phi((i, k)).pull_form(alpha[(i, k)])
        inv = translate(m_ik.inverse(), -a_ik)
        comp = inv
        shift = -a_ik
        if m_ij is not None:
            comp = translate(m_ij, shift).compose(comp)
            shift = shift + a_ij
        if m_jk is not None:
            comp = translate(m_jk, shift).compose(comp)
        b = exp_form_of(comp)
        if b is None:
            raise ValueError(f"composite on {t} is not of the form exp(beta)")
        beta[t] = b
        target_ok = twist(comp.source, b.d()) == comp.target if b else comp.source == comp.target
        exp = expected_beta(t) if expected_beta is not None else None
        checks.append(TripleCheck(t, b, exp, exp is None or exp == b, target_ok))
    coc = GerbeCocycle(cover, CechCochain(cover, 1, 3, alpha), CechCochain(cover, 2, 2, beta))
    return CocycleRun(coc, maps, reports, checks, log)


# ---------------------------------------------------------------------------
# Courant extensions
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class CExtTrivialization:
    """Connections and 3-forms H_i on each chart of a cover, for one kernel.

    ``overlap_A`` adds, for pairs i < j, 1-forms on U_ij to A_ij = nabla_i -
    nabla_j; this covers kernels glued by a cocycle (as on P^1, where the
    kernel generator moves by a multiple of dx/x).
    ``connections[i][r]`` is the r-th component of the connection form of
    nabla_i; the curvature is computed from it.  Each H_i must satisfy
    dH_i = -1/2 <c_i ^ c_i> (the sign used throughout the package).
    """

    cover: Cover
    kernel: KernelAlgebra
    connections: tuple[tuple[DiffForm, ...], ...]
    H: tuple[DiffForm, ...]
    frames: tuple[tuple, ...] | None = None
    overlap_A: Mapping[Index, tuple[DiffForm, ...]] | None = None

    def __post_init__(self) -> None:
        n = self.cover.n
        if len(self.connections) != n or len(self.H) != n:
            raise ValueError("need connections and H for every chart")
        self._structs: dict[int, AlgebroidStructure] = {}

    def curvature(self, i: int) -> tuple[DiffForm, ...]:
        return curvature_of(self.cover.charts[i], self.kernel, self.connections[i])

    def structure(self, i: int) -> AlgebroidStructure:
        """Q_{nabla_i, H_i} on chart i."""
        if i not in self._structs:
            ring = self.cover.charts[i]
            frame = self.frames[i] if self.frames is not None else coordinate_frame(ring)
            self._structs[i] = make_QNH(ring, frame, self.kernel, self.curvature(i), self.H[i],
                                        self.connections[i], name=f"Q{i}")
        return self._structs[i]

    def on(self, i: int, idx: Index) -> AlgebroidStructure:
        phi = self.cover.restrict(i, idx)
        s = self.structure(i)
        return s if phi.source == phi.target else s.transport(phi)

    def A(self, i: int, j: int, idx: Index | None = None) -> tuple[DiffForm, ...]:
        """A_ij = nabla_i - nabla_j restricted to overlap ``idx`` (default U_ij)."""
        idx = idx or (i, j)
        pi, pj = self.cover.restrict(i, idx), self.cover.restrict(j, idx)
        out = tuple(pi.pull_form(a) - pj.pull_form(b) for a, b in zip(self.connections[i], self.connections[j]))
        key = (min(i, j), max(i, j))
        if self.overlap_A and key in self.overlap_A and i != j:
            phi = self.cover.restriction(key, idx)
            sign = 1 if i < j else -1
            out = tuple(a + phi.pull_form(b) * sign for a, b in zip(out, self.overlap_A[key]))
        return out

    def invariant_failures(self) -> list[str]:
        out = []
        for i in range(self.cover.n):
            s = self.structure(i)
            if s.alpha_defect():
                out.append(f"chart {i}: dH != -1/2 <c ^ c>")
        for t in self.cover.triples():
            i, j, k = t
            lhs = tuple(x + y for x, y in zip(self.A(i, j, t), self.A(j, k, t)))
            if lhs != self.A(i, k, t):
                out.append(f"A_ij + A_jk != A_ik on {t}")
        return out

    def pairing_form(self, u: Sequence[DiffForm], v: Sequence[DiffForm]) -> DiffForm:
        """<u ^ v> = sum K_rs u_r ^ v_s."""
        K = self.kernel.pairing
        out = None
        for r, ur in enumerate(u):
            for s, vs in enumerate(v):
                if K[r][s] and ur and vs:
                    w = ur.wedge(vs) * K[r][s]
                    out = w if out is None else out + w
        if out is None:
            ring = u[0].ring if u else self.cover.charts[0]
            deg = (u[0].degree if u else 1) + (v[0].degree if v else 1)
            return DiffForm.zero(ring, deg)
        return out

    def theta(self, i: int, j: int) -> AlgebroidMorphism:
        """xi -> xi + A(xi) - 1/2 <A(xi), A>,  g -> g - <g, A>,  omega -> omega."""
        idx = (i, j)
        src, tgt = self.on(i, idx), self.on(j, idx)
        A = self.A(i, j)
        K = self.kernel.pairing
        m = self.kernel.dim
        frame_images = []
        for xi in src.frame:
            img = tgt.lift(xi)
            iA = [a.interior(xi).as_function() if a else tgt.ring.zero() for a in A]
            if m:
                img = img + tgt.element(ker=iA)
            half = DiffForm.zero(tgt.ring, 1)
            for r in range(m):
                for s in range(m):
                    if K[r][s] and iA[r] and A[s]:
                        half = half + A[s] * (iA[r] * K[r][s])
            frame_images.append(img - tgt.form(half * Fraction(1, 2)))
        kernel_images = []
        for r in range(m):
            w = DiffForm.zero(tgt.ring, 1)
            for s in range(m):
                if K[r][s] and A[s]:
                    w = w + A[s] * K[r][s]
            kernel_images.append(tgt.g(r) - tgt.form(w))
        return AlgebroidMorphism(src, tgt, tuple(frame_images), tuple(kernel_images), name=f"theta{i}{j}")

    def expected_beta(self, t: Index, literal: bool = False) -> DiffForm:
        """-<A_ij ^ A_jk> on the triple overlap.

        The pairing of 1-forms is normalized as <a ^ b>(xi, eta) =
        1/2 (a(xi) b(eta) - a(eta) b(xi)), i.e. one half of sum K_rs a_r ^ b_s
        in the wedge convention used by :class:`DiffForm`.  ``literal=True``
        drops the 1/2; that reading is incompatible with d beta = d_C alpha.
        """
        i, j, k = t
        w = -self.pairing_form(self.A(i, j, t), self.A(j, k, t))
        return w if literal else w * Fraction(1, 2)

    def closed_form_alpha(self, i: int, j: int) -> DiffForm:
        """<c_i ^ A> - 1/2 <[nabla_i, A], A> + 1/6 <[A, A], A> + H_i - H_j, read literally.

        [nabla_i, A] is taken as the covariant derivative dA + [a_i, A] and
        [A, A]^t = sum c^t_uv A_u ^ A_v.  Used for comparison only.
        """
        idx = (i, j)
        pi, pj = self.cover.restrict(i, idx), self.cover.restrict(j, idx)
        A = self.A(i, j)
        ai = [pi.pull_form(a) for a in self.connections[i]]
        ci = [pi.pull_form(c) for c in self.curvature(i)]
        kern = self.kernel
        m = kern.dim
        ring = self.cover.overlap(idx)
        cov = []
        AA = []
        for t in range(m):
            x = A[t].d() if A[t] else DiffForm.zero(ring, 2)
            y = DiffForm.zero(ring, 2)
            for u in range(m):
                for v in range(m):
                    c = kern.c(u, v, t)
                    if c:
                        if ai[u] and A[v]:
                            x = x + ai[u].wedge(A[v]) * c
                        if A[u] and A[v]:
                            y = y + A[u].wedge(A[v]) * c
            cov.append(x)
            AA.append(y)
        out = self.pairing_form(ci, A) - self.pairing_form(cov, A) * Fraction(1, 2)
        out = out + self.pairing_form(AA, A) * Fraction(1, 6)
        return out + pi.pull_form(self.H[i]) - pj.pull_form(self.H[j])


def cext_cocycle(t: CExtTrivialization, ordered: bool = True, verify: bool = True) -> CocycleRun:
    """(alpha_ij, beta_ijk) of the Courant-extension trivialization, with all checks."""
    fails = t.invariant_failures()
    if fails:
        raise ValueError(f"trivialization invariants fail: {fails[:3]}")
    return cocycle_from_maps(t.cover, t.theta, ordered, verify, expected_beta=t.expected_beta)


# ---------------------------------------------------------------------------
# CDO and vertex extensions on single-frame covers
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class CDOTrivialization:
    """CDO charts D(gamma_i) glued by exp(b_ij) on a cover whose overlaps share a frame."""

    cover: Cover
    gamma: tuple[DiffForm, ...]
    b: Mapping[Index, DiffForm]

    def structure(self, i: int) -> AlgebroidStructure:
        return make_cdo(self.cover.charts[i], alpha=self.gamma[i], name=f"D{i}")

    def on(self, i: int, idx: Index) -> AlgebroidStructure:
        phi = self.cover.restrict(i, idx)
        s = self.structure(i)
        return s if phi.source == phi.target else s.transport(phi)

    def eta(self, i: int, j: int) -> AlgebroidMorphism:
        """exp(b_ij) read as a map D_i -> D_j (up to the twist found afterwards)."""
        idx = (i, j)
        src, tgt = self.on(i, idx), self.on(j, idx)
        if src.frame != tgt.frame:
            raise FrameMismatch("CDO gluing here needs a common frame on overlaps")
        b = self.b.get(idx, DiffForm.zero(src.ring, 2))
        e = exp_beta(src, b)
        recast = lambda x: AlgebroidElement(tgt, x.vf, x.ker, x.form)  # noqa: E731
        return AlgebroidMorphism(src, tgt, tuple(map(recast, e.frame_images)), (), name=f"eta{i}{j}")


def cdo_cocycle(t: CDOTrivialization, ordered: bool = True, verify: bool = True) -> CocycleRun:
    return cocycle_from_maps(t.cover, t.eta, ordered, verify)


def vext_cocycle(q: CExtTrivialization, d: CDOTrivialization, ordered: bool = True,
                 verify: bool = True) -> CocycleRun:
    """Cocycle of the vertex trivialization Q_i [+] D_i with maps theta_ij [+] eta_ij."""

    def build(i: int, j: int) -> AlgebroidMorphism:
        th = q.theta(i, j)
        et = d.eta(i, j)
        return boxplus_morphism(th, et)

    return cocycle_from_maps(q.cover, build, ordered, verify)


def vext_structure(q: CExtTrivialization, d: CDOTrivialization, i: int) -> AlgebroidStructure:
    return boxplus(q.structure(i), d.structure(i))


# ---------------------------------------------------------------------------
# coboundary search
# ---------------------------------------------------------------------------

@dataclass
class Witness:
    """(gamma_i, b_ij) with alpha_ij = gamma_j - gamma_i + d b_ij and beta = d_C b."""

    gamma: dict[int, DiffForm]
    b: dict[Index, DiffForm]
    window: tuple[int, int]


@dataclass
class NotCoboundary:
    """No primitive inside the window; absence there is not a proof."""

    window: tuple[int, int]
    reason: str
    inconclusive: bool = True


def _form_basis(ring: ChartRing, degree: int, window: tuple[int, int]) -> list[DiffForm]:
    lo, hi = window
    ranges = [range(lo if ring.is_inverted(i) else 0, hi + 1) for i in range(ring.ngens)]
    out = []
    for idx in all_indices(ring.ngens, degree):
        for exp in product(*ranges):
            out.append(DiffForm.from_words(ring, degree, [(idx, ring.monomial(exp))]))
    return out


def _coords(w: DiffForm, tag) -> dict:
    return {(tag, idx, exp): c for idx, f in w.items() for exp, c in f.terms.items()}


def coboundary_test(g: GerbeCocycle, window: tuple[int, int] = (-6, 6)) -> Witness | NotCoboundary:
    """Search (gamma_i, b_ij) within a Laurent window on increasing tuples."""
    cover = g.cover
    gi = g.restrict_increasing()
    pairs = cover.pairs()
    triples = cover.triples()
    unknowns: list[tuple[str, object, DiffForm]] = []
    for i in range(cover.n):
        ring = cover.charts[i]
        if ring.ngens >= 3:
            for w in _form_basis(ring, 3, window):
                if w.is_closed():
                    unknowns.append(("gamma", i, w))
    for p in pairs:
        ring = cover.overlap(p)
        if ring.ngens >= 2:
            for w in _form_basis(ring, 2, window):
                unknowns.append(("b", p, w))
    # column contributions
    cols = []
    for kind, key, w in unknowns:
        contrib: dict = {}
        if kind == "gamma":
            i = key
            for p in pairs:
                if i in p:
                    sign = 1 if p[1] == i else -1
                    img = cover.restrict(i, p).pull_form(w) * sign
                    for k, c in _coords(img, ("alpha", p)).items():
                        contrib[k] = contrib.get(k, 0) + c
        else:
            p = key
            for k, c in _coords(w.d(), ("alpha", p)).items():
                contrib[k] = contrib.get(k, 0) + c
            for t in triples:
                faces = _faces(t)
                if p in faces:
                    sign = 1 if faces.index(p) % 2 == 0 else -1
                    img = cover.restriction(p, t).pull_form(w) * sign
                    for k, c in _coords(img, ("beta", t)).items():
                        contrib[k] = contrib.get(k, 0) + c
        cols.append(contrib)
    rhs: dict = {}
    for p in pairs:
        rhs.update(_coords(gi.alpha.get(p), ("alpha", p)))
    for t in triples:
        rhs.update(_coords(gi.beta.get(t), ("beta", t)))
    keys = set(rhs)
    for c in cols:
        keys |= set(c)
    sys = LinearSystem()
    for j in range(len(cols)):
        sys.unknown(j)
    rows: dict = {k: {} for k in keys}
    for j, c in enumerate(cols):
        for k, v in c.items():
            if v:
                rows[k][j] = v
    for k in sorted(keys, key=repr):
        if not rows[k] and rhs.get(k, 0):
            return NotCoboundary(window, f"component {k} cannot be matched by any ansatz term")
        sys.add_equation(rows[k], rhs.get(k, 0))
    sol = sys.solve()
    if sol is None:
        return NotCoboundary(window, "linear system inconsistent within the window")
    gamma: dict[int, DiffForm] = {i: DiffForm.zero(cover.charts[i], 3) for i in range(cover.n)}
    bs: dict[Index, DiffForm] = {p: DiffForm.zero(cover.overlap(p), 2) for p in pairs}
    for j, (kind, key, w) in enumerate(unknowns):
        c = sol.get(j, 0)
        if c:
            if kind == "gamma":
                gamma[key] = gamma[key] + w * c
            else:
                bs[key] = bs[key] + w * c
    return Witness(gamma, bs, window)


def check_witness(g: GerbeCocycle, w: Witness) -> bool:
    """Verify alpha = gamma_j - gamma_i + d b and beta = d_C b on increasing tuples."""
    cover = g.cover
    for p in cover.pairs():
        i, j = p
        lhs = cover.restrict(j, p).pull_form(w.gamma[j]) - cover.restrict(i, p).pull_form(w.gamma[i]) + w.b[p].d()
        if lhs != g.alpha.get(p):
            return False
    bc = CechCochain(cover, 1, 2, dict(w.b))
    if cover.triples():
        db = cech_diff(bc)
        for t in cover.triples():
            if db.get(t) != g.beta.get(t):
                return False
    return True


# ---------------------------------------------------------------------------
# reference data
# ---------------------------------------------------------------------------

def cup_cocycle_p1xp1() -> GerbeCocycle:
    """beta_ijk = a_ij ^ b_jk with a, b the dlog cocycles of the two factors.

    A nonzero class in H^2(Omega^2); the coboundary search cannot succeed.
    """
    cover = p1xp1_cover()
    factor = [(c // 2, c % 2) for c in range(4)]  # chart -> (x-side, u-side)

    def dlog(t: Index, axis: int, i: int, j: int) -> DiffForm:
        """phi_j - phi_i with phi = (side) dx/x, written in the coordinates of U_t."""
        ring = cover.overlap(t)
        a, b = factor[i][axis], factor[j][axis]
        if a == b:
            return DiffForm.zero(ring, 1)
        w = DiffForm.dvar(ring, axis) * ring.gen(axis).inverse()
        sign = 1 if (a, b) == (0, 1) else -1
        # the ring uses x (side 0) or y = 1/x (side 1), and dx/x = -dy/y
        return w * (sign if factor[min(t)][axis] == 0 else -sign)

    alpha = {p: DiffForm.zero(cover.overlap(p), 3) for p in cover.pairs()}
    beta = {}
    for t in cover.triples():
        i, j, k = t
        beta[t] = dlog(t, 0, i, j).wedge(dlog(t, 1, j, k))
    return GerbeCocycle(cover, CechCochain(cover, 1, 3, alpha), CechCochain(cover, 2, 2, beta))


__all__ = [
    "CDOTrivialization",
    "CExtTrivialization",
    "CechCochain",
    "CocycleRun",
    "Cover",
    "CoverMismatch",
    "GerbeCocycle",
    "NotCoboundary",
    "TransitionError",
    "TripleCheck",
    "Witness",
    "affine_cover",
    "cdo_cocycle",
    "cech_diff",
    "check_witness",
    "coboundary_test",
    "cocycle_from_maps",
    "cext_cocycle",
    "cup_cocycle_p1xp1",
    "p1_cover",
    "p1xp1_cover",
    "pontryagin",
    "vext_cocycle",
    "vext_cocycle_sum",
]
