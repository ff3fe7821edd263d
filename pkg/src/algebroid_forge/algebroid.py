"""Transitive Lie, Courant and vertex algebroids on a single chart.

A structure is stored relative to a fixed splitting: an abelian frame
tau_1..tau_n of vector fields, a kernel Lie algebra g_1..g_m with a constant
invariant pairing K, and forms describing how the splitting fails to be a
homomorphism.  Elements are triples (frame coefficients, kernel coefficients,
1-form) meaning sum f_i o tau_i + sum h_r o g_r + omega.

Basis products (c_r(xi, eta) := i_eta i_xi c_r, a_r the connection forms)::

    tau_i (0) tau_j = sum_r c_r(tau_i, tau_j) g_r + i_{tau_i} i_{tau_j} alpha
    tau_i (0) g_s   = sum a_r(tau_i) c^t_rs g_t - sum_r K_rs i_{tau_i} c_r
    g_r (0) g_s     = sum c^t_rs g_t + sum a_u c^t_ur K_ts
    g_r (1) g_s     = K_rs,  tau (1) tau = tau (1) g = 0

Products of general elements are expanded with the closed rules derived from
the axioms (see ``_vertex_atom_zero``); tests cross-check them against an
independent rewriting oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Sequence

from .exact.forms import DiffForm, NotClosed, VectorField, exterior_d
from .exact.maps import ChartMap, adjugate, determinant
from .exact.ring import ChartMismatch, ChartRing, LaurentPoly

LIE = "lie"
COURANT = "courant"
VERTEX = "vertex"
KINDS = (LIE, COURANT, VERTEX)


class PontryaginNotMatched(ValueError):
    """The 3-form slot does not satisfy the required identity dH = -1/2 <c ^ c>."""


class FrameError(ValueError):
    """The frame is not abelian or not invertible over the chart ring."""


class KindError(ValueError):
    """An operation was requested on a structure of the wrong kind."""


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class KernelAlgebra:
    """A finite-dimensional Lie algebra g_0 with a symmetric pairing.

    ``structure_constants[r][s][t]`` is c^t_rs with [g_r, g_s] = sum_t c^t_rs g_t.
    With ``strict=False`` invariance of the pairing is not enforced, which is
    only useful for demonstrating the resulting axiom failure.
    """

    basis: tuple[str, ...]
    structure_constants: tuple[tuple[tuple[Fraction, ...], ...], ...]
    pairing: tuple[tuple[Fraction, ...], ...]
    strict: bool = True

    def __post_init__(self) -> None:
        m = len(self.basis)
        sc = tuple(tuple(tuple(_frac(c) for c in row) for row in plane) for plane in self.structure_constants)
        K = tuple(tuple(_frac(c) for c in row) for row in self.pairing)
        object.__setattr__(self, "basis", tuple(self.basis))
        object.__setattr__(self, "structure_constants", sc)
        object.__setattr__(self, "pairing", K)
        if len(set(self.basis)) != m:
            raise ValueError("duplicate kernel basis names")
        if len(sc) != m or any(len(p) != m or any(len(r) != m for r in p) for p in sc):
            raise ValueError("structure constants must be an m x m x m tensor")
        if len(K) != m or any(len(r) != m for r in K):
            raise ValueError("pairing must be an m x m matrix")
        for r in range(m):
            for s in range(m):
                if K[r][s] != K[s][r]:
                    raise ValueError("pairing is not symmetric")
                for t in range(m):
                    if sc[r][s][t] != -sc[s][r][t]:
                        raise ValueError("structure constants are not antisymmetric")
        if self.jacobi_defect():
            raise ValueError("structure constants violate the Jacobi identity")
        if self.strict and self.invariance_defect():
            raise ValueError("pairing is not invariant under the bracket")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def c(self, r: int, s: int, t: int) -> Fraction:
        return self.structure_constants[r][s][t]

    def bracket_vec(self, u: Sequence, v: Sequence) -> list:
        """Bracket of coefficient vectors (entries may be polys or forms' scalars)."""
        m = self.dim
        out = [0] * m
        for r in range(m):
            if not u[r]:
                continue
            for s in range(m):
                if not v[s]:
                    continue
                for t in range(m):
                    c = self.structure_constants[r][s][t]
                    if c:
                        out[t] = out[t] + u[r] * v[s] * c
        return out

    def jacobi_defect(self) -> list[tuple[int, int, int]]:
        m = self.dim
        bad = []
        for a in range(m):
            for b in range(m):
                for e in range(m):
                    for t in range(m):
                        tot = Fraction(0)
                        for u in range(m):
                            tot += self.c(b, e, u) * self.c(a, u, t)
                            tot += self.c(e, a, u) * self.c(b, u, t)
                            tot += self.c(a, b, u) * self.c(e, u, t)
                        if tot:
                            bad.append((a, b, e))
                            break
        return bad

    def invariance_defect(self) -> list[tuple[int, int, int]]:
        """Triples (r, s, u) where <[g_r,g_s],g_u> + <g_s,[g_r,g_u]> != 0."""
        m = self.dim
        bad = []
        for r in range(m):
            for s in range(m):
                for u in range(m):
                    tot = sum(self.c(r, s, t) * self.pairing[t][u] + self.c(r, u, t) * self.pairing[s][t] for t in range(m))
                    if tot:
                        bad.append((r, s, u))
        return bad

    @classmethod
    def empty(cls) -> "KernelAlgebra":
        return cls((), (), ())

    @classmethod
    def abelian(cls, basis: Sequence[str], pairing: Sequence[Sequence] | None = None) -> "KernelAlgebra":
        m = len(basis)
        K = pairing if pairing is not None else [[0] * m for _ in range(m)]
        zero = tuple(tuple(tuple(Fraction(0) for _ in range(m)) for _ in range(m)) for _ in range(m))
        return cls(tuple(basis), zero, tuple(tuple(_frac(c) for c in row) for row in K))

    @classmethod
    def sl2(cls, scale=1, names: Sequence[str] = ("e", "h", "f")) -> "KernelAlgebra":
        """sl2 in the basis (e, h, f) with <e|f> = 1, <h|h> = 2, times ``scale``."""
        sc = [[[Fraction(0)] * 3 for _ in range(3)] for _ in range(3)]
        E, H, F = 0, 1, 2

        def put(r, s, t, v):
            sc[r][s][t] = Fraction(v)
            sc[s][r][t] = -Fraction(v)

        put(E, F, H, 1)
        put(H, E, E, 2)
        put(H, F, F, -2)
        k = _frac(scale)
        K = [[0, 0, k], [0, 2 * k, 0], [k, 0, 0]]
        return cls(tuple(names), tuple(tuple(tuple(r) for r in p) for p in sc), tuple(tuple(_frac(c) for c in r) for r in K))


def frame_matrix(frame: Sequence[VectorField]) -> list[list[LaurentPoly]]:
    return [list(t.coefficients) for t in frame]


@dataclass(frozen=True, eq=False)
class AlgebroidStructure:
    """Structure data of a transitive algebroid on one chart.

    The raw constructor checks shapes, the abelian frame and invertibility;
    closedness and the Pontryagin relation are checked by the factories and by
    :meth:`precondition_report`.
    """

    ring: ChartRing
    frame: tuple[VectorField, ...]
    kernel: KernelAlgebra
    curvature: tuple[DiffForm, ...]
    alpha: DiffForm
    kind: str = VERTEX
    connection: tuple[DiffForm, ...] = ()
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        ring = self.ring
        object.__setattr__(self, "frame", tuple(self.frame))
        object.__setattr__(self, "curvature", tuple(self.curvature))
        conn = tuple(self.connection) or tuple(DiffForm.zero(ring, 1) for _ in self.kernel.basis)
        object.__setattr__(self, "connection", conn)
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if len(self.frame) != ring.ngens:
            raise FrameError(f"frame needs {ring.ngens} vector fields, got {len(self.frame)}")
        for t in self.frame:
            if t.ring != ring:
                raise ChartMismatch("frame vector field on a different chart")
        for i, a in enumerate(self.frame):
            for b in self.frame[i + 1:]:
                if a.bracket(b):
                    raise FrameError("frame is not abelian")
        if not determinant(frame_matrix(self.frame)).is_unit():
            raise FrameError("frame is not invertible over the chart ring")
        m = self.kernel.dim
        if len(self.curvature) != m or len(self.connection) != m:
            raise ValueError("need one curvature 2-form and one connection 1-form per kernel generator")
        for c in self.curvature:
            if c.ring != ring or (c and c.degree != 2):
                raise ValueError("curvature entries must be 2-forms on the chart")
        for a in self.connection:
            if a.ring != ring or (a and a.degree != 1):
                raise ValueError("connection entries must be 1-forms on the chart")
        if self.alpha.ring != ring or (self.alpha and self.alpha.degree != 3):
            raise ValueError("alpha must be a 3-form on the chart")
        if not self.alpha:
            object.__setattr__(self, "alpha", DiffForm.zero(ring, 3))
        object.__setattr__(self, "curvature", tuple(c if c else DiffForm.zero(ring, 2) for c in self.curvature))
        object.__setattr__(self, "connection", tuple(a if a else DiffForm.zero(ring, 1) for a in self.connection))

    # identity ------------------------------------------------------------------
    def _key(self):
        return (self.ring, self.frame, self.kernel, self.curvature, self.alpha, self.kind, self.connection)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebroidStructure):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash((self.ring, self.frame, self.kind, self.kernel))

    def replace(self, **changes) -> "AlgebroidStructure":
        data = dict(
            ring=self.ring, frame=self.frame, kernel=self.kernel, curvature=self.curvature,
            alpha=self.alpha, kind=self.kind, connection=self.connection, name=self.name,
        )
        data.update(changes)
        return AlgebroidStructure(**data)

    @property
    def n(self) -> int:
        return self.ring.ngens

    @property
    def m(self) -> int:
        return self.kernel.dim

    # derived data ----------------------------------------------------------------
    @cached_property
    def coframe(self) -> tuple[DiffForm, ...]:
        """1-forms theta^i with i_{tau_j} theta^i = delta_ij."""
        F = frame_matrix(self.frame)
        inv_det = determinant(F).inverse()
        adj = adjugate(F)
        n = self.n
        return tuple(
            DiffForm(self.ring, 1, {(k,): adj[k][i] * inv_det for k in range(n)}) for i in range(n)
        )

    def frame_coefficients(self, xi: VectorField) -> tuple[LaurentPoly, ...]:
        return tuple(th.interior(xi).as_function() for th in self.coframe)

    def pontryagin(self) -> DiffForm:
        """1/2 sum K_rs c_r ^ c_s."""
        out = DiffForm.zero(self.ring, 4)
        K = self.kernel.pairing
        for r in range(self.m):
            for s in range(self.m):
                if K[r][s]:
                    out = out + self.curvature[r].wedge(self.curvature[s]) * (K[r][s] / 2)
        return out

    def alpha_defect(self) -> DiffForm:
        """d(alpha) + 1/2 <c ^ c>; zero exactly when the 3-form slot is admissible."""
        return self.alpha.d() + self.pontryagin()

    def precondition_report(self) -> list[tuple[str, bool, str]]:
        """Structural checks the axiom suites rely on."""
        out = []
        defect = self.alpha_defect()
        out.append(("alpha-slot", defect.is_zero(), "d(alpha) + 1/2<c^c> = " + str(defect)))
        inv = self.kernel.invariance_defect()
        out.append(("kernel-invariance", not inv, f"non-invariant triples {inv}" if inv else "ok"))
        return out

    # element constructors ---------------------------------------------------------
    def zero(self) -> "AlgebroidElement":
        z = self.ring.zero()
        return AlgebroidElement(self, (z,) * self.n, (z,) * self.m, DiffForm.zero(self.ring, 1))

    def tau(self, i: int, coeff=None) -> "AlgebroidElement":
        z = self.ring.zero()
        c = self.ring.one() if coeff is None else _as_poly(self.ring, coeff)
        vf = tuple(c if j == i else z for j in range(self.n))
        return AlgebroidElement(self, vf, (z,) * self.m, DiffForm.zero(self.ring, 1))

    def g(self, r: int, coeff=None) -> "AlgebroidElement":
        z = self.ring.zero()
        c = self.ring.one() if coeff is None else _as_poly(self.ring, coeff)
        ker = tuple(c if j == r else z for j in range(self.m))
        return AlgebroidElement(self, (z,) * self.n, ker, DiffForm.zero(self.ring, 1))

    def form(self, w: DiffForm) -> "AlgebroidElement":
        if w and w.degree != 1:
            raise ValueError("only 1-forms live in the algebroid")
        if self.kind == LIE and w:
            raise KindError("a Lie algebroid has no form part")
        z = self.ring.zero()
        return AlgebroidElement(self, (z,) * self.n, (z,) * self.m, w if w else DiffForm.zero(self.ring, 1))

    def element(self, vf=None, ker=None, form=None) -> "AlgebroidElement":
        z = self.ring.zero()
        vf = tuple(_as_poly(self.ring, c) for c in vf) if vf is not None else (z,) * self.n
        ker = tuple(_as_poly(self.ring, c) for c in ker) if ker is not None else (z,) * self.m
        return AlgebroidElement(self, vf, ker, form if form else DiffForm.zero(self.ring, 1))

    def lift(self, xi: VectorField) -> "AlgebroidElement":
        """The splitting: a vector field written in the frame."""
        return self.element(vf=self.frame_coefficients(xi))

    def basis_elements(self) -> list["AlgebroidElement"]:
        out = [self.tau(i) for i in range(self.n)] + [self.g(r) for r in range(self.m)]
        if self.kind != LIE:
            out += [self.form(DiffForm.dvar(self.ring, k)) for k in range(self.n)]
        return out

    # operations --------------------------------------------------------------------
    def partial(self, f: LaurentPoly) -> "AlgebroidElement":
        return self.form(exterior_d(_as_poly(self.ring, f)))

    def anchor(self, e: "AlgebroidElement") -> VectorField:
        self._own(e)
        out = VectorField.zero(self.ring)
        for f, t in zip(e.vf, self.frame):
            if f:
                out = out + t * f
        return out

    def minus_one(self, f, e: "AlgebroidElement") -> "AlgebroidElement":
        """f o e; for vertex algebroids this carries the non-associativity correction."""
        self._own(e)
        f = _as_poly(self.ring, f)
        plain = AlgebroidElement(
            self, tuple(f * c for c in e.vf), tuple(f * c for c in e.ker), e.form * f
        )
        if self.kind != VERTEX or f.is_constant():
            return plain
        df = exterior_d(f)
        corr = DiffForm.zero(self.ring, 1)
        for fi, t in zip(e.vf, self.frame):
            if not fi:
                continue
            tf = t.apply(f)
            if tf:
                corr = corr + exterior_d(fi) * tf
            tfi = t.apply(fi)
            if tfi:
                corr = corr + df * tfi
        return plain + self.form(corr)

    def right_minus_one(self, e: "AlgebroidElement", f) -> "AlgebroidElement":
        """e o f = f o e + d(pi(e) f) (vertex skew-symmetry at weight one)."""
        f = _as_poly(self.ring, f)
        return self.minus_one(f, e) + self.partial(self.anchor(e).apply(f))

    def one_pairing(self, a: "AlgebroidElement", b: "AlgebroidElement") -> LaurentPoly:
        """a (1) b for vertex algebroids, the pairing <a, b> for Courant ones."""
        self._own(a)
        self._own(b)
        if self.kind == LIE:
            raise KindError("Lie algebroids carry no pairing")
        ring = self.ring
        out = ring.zero()
        K = self.kernel.pairing
        for r, hr in enumerate(a.ker):
            if not hr:
                continue
            for s, hs in enumerate(b.ker):
                if hs and K[r][s]:
                    out = out + hr * hs * K[r][s]
        pa, pb = self.anchor(a), self.anchor(b)
        if b.form:
            out = out + b.form.interior(pa).as_function()
        if a.form:
            out = out + a.form.interior(pb).as_function()
        if self.kind == VERTEX:
            # -pi(x)(pi(h o y)(f)) - f pi(y)(pi(x)(h)) over frame atoms f o x, h o y
            for i, f in enumerate(a.vf):
                if not f:
                    continue
                ti = self.frame[i]
                for j, h in enumerate(b.vf):
                    if not h:
                        continue
                    tj = self.frame[j]
                    out = out - ti.apply(h * tj.apply(f)) - f * tj.apply(ti.apply(h))
        return out

    pair = one_pairing

    def zero_product(self, a: "AlgebroidElement", b: "AlgebroidElement") -> "AlgebroidElement":
        """a (0) b; the Leibniz/Lie bracket for Courant/Lie kinds."""
        self._own(a)
        self._own(b)
        out = self.zero()
        atoms_a = list(self._atoms(a))
        atoms_b = list(self._atoms(b))
        for f, x in atoms_a:
            for h, y in atoms_b:
                out = out + self._atom_zero(f, x, h, y)
        if b.form:
            out = out + self.form(b.form.lie_derivative(self.anchor(a)))
        if a.form:
            out = out - self.form(a.form.d().interior(self.anchor(b)))
        return out

    bracket = zero_product

    # internals ------------------------------------------------------------------------
    def _own(self, e: "AlgebroidElement") -> None:
        if e.structure is not self and e.structure != self:
            raise ChartMismatch("element belongs to a different structure")

    def _atoms(self, e: "AlgebroidElement") -> Iterator[tuple[LaurentPoly, tuple[str, int]]]:
        for i, f in enumerate(e.vf):
            if f:
                yield f, ("t", i)
        for r, h in enumerate(e.ker):
            if h:
                yield h, ("g", r)

    def _atom_elem(self, x: tuple[str, int], coeff=None) -> "AlgebroidElement":
        return self.tau(x[1], coeff) if x[0] == "t" else self.g(x[1], coeff)

    def _atom_field(self, x: tuple[str, int]) -> VectorField:
        return self.frame[x[1]] if x[0] == "t" else VectorField.zero(self.ring)

    def _basis_one(self, x, y) -> Fraction:
        if x[0] == "g" and y[0] == "g":
            return self.kernel.pairing[x[1]][y[1]]
        return Fraction(0)

    @cached_property
    def _basis_zero_table(self) -> dict:
        table = {}
        atoms = [("t", i) for i in range(self.n)] + [("g", r) for r in range(self.m)]
        for x in atoms:
            for y in atoms:
                table[(x, y)] = self._basis_zero(x, y)
        return table

    def _basis_zero(self, x, y) -> "AlgebroidElement":
        ring, m, K, kern = self.ring, self.m, self.kernel.pairing, self.kernel
        z = ring.zero()
        ker = [z] * m
        form = DiffForm.zero(ring, 1)
        with_forms = self.kind != LIE
        if x[0] == "t" and y[0] == "t":
            ti, tj = self.frame[x[1]], self.frame[y[1]]
            for r in range(m):
                ker[r] = self.curvature[r].interior(ti).interior(tj).as_function()
            if with_forms and self.alpha:
                form = self.alpha.interior(tj).interior(ti)
        elif x[0] == "t" and y[0] == "g":
            ti, s = self.frame[x[1]], y[1]
            for r in range(m):
                ar = self.connection[r].interior(ti).as_function() if self.connection[r] else z
                if ar:
                    for t in range(m):
                        if kern.c(r, s, t):
                            ker[t] = ker[t] + ar * kern.c(r, s, t)
                if with_forms and K[r][s] and self.curvature[r]:
                    form = form - self.curvature[r].interior(ti) * K[r][s]
        elif x[0] == "g" and y[0] == "t":
            neg = self._basis_zero(y, x)
            return -neg
        else:
            r, s = x[1], y[1]
            for t in range(m):
                if kern.c(r, s, t):
                    ker[t] = ring.const(kern.c(r, s, t))
            if with_forms:
                for u in range(m):
                    if not self.connection[u]:
                        continue
                    coef = sum(kern.c(u, r, t) * K[t][s] for t in range(m))
                    if coef:
                        form = form + self.connection[u] * coef
        return AlgebroidElement(self, (z,) * self.n, tuple(ker), form)

    def _atom_zero(self, f, x, h, y) -> "AlgebroidElement":
        """(f o x) (0) (h o y) for frame/kernel atoms x, y."""
        px, py = self._atom_field(x), self._atom_field(y)
        bxy = self._basis_zero_table[(x, y)]
        if self.kind == VERTEX:
            # x (0) (h o y) = pi(x)(h) o y + h o (x (0) y)
            inner0 = self._atom_elem(y, px.apply(h)) + self.minus_one(h, bxy)
            # x (1) (h o y) = h (x (1) y) - pi(y)(pi(x)(h))
            inner1 = h * self._basis_one(x, y) - py.apply(px.apply(h))
            pyf = py.apply(f) * h  # pi(h o y)(f)
            res = self.minus_one(f, inner0) - self._atom_elem(x, pyf)
            if inner1:
                res = res + self.form(exterior_d(f) * inner1)
            correction = px.apply(pyf)
            if correction:
                res = res - self.partial(correction)
            return res
        if self.kind == COURANT:
            res = self._atom_elem(y, f * px.apply(h)) + bxy * (f * h)
            pairing = self._basis_one(x, y)
            if pairing:
                res = res + self.form(exterior_d(f) * (h * pairing))
            return res - self._atom_elem(x, h * py.apply(f))
        # Lie algebroid
        return self._atom_elem(y, f * px.apply(h)) - self._atom_elem(x, h * py.apply(f)) + bxy * (f * h)

    # transport ------------------------------------------------------------------------
    def transport(self, phi: ChartMap, name: str | None = None) -> "AlgebroidStructure":
        """The same structure written on phi.target (restriction to an overlap)."""
        if phi.source != self.ring:
            raise ChartMismatch("map does not start at this chart")
        return AlgebroidStructure(
            ring=phi.target,
            frame=tuple(phi.push_field(t) for t in self.frame),
            kernel=self.kernel,
            curvature=tuple(phi.pull_form(c) for c in self.curvature),
            alpha=phi.pull_form(self.alpha),
            kind=self.kind,
            connection=tuple(phi.pull_form(a) for a in self.connection),
            name=name if name is not None else self.name,
        )

    def transport_element(self, e: "AlgebroidElement", phi: ChartMap, target: "AlgebroidStructure") -> "AlgebroidElement":
        """Move an element along phi into ``target`` (which must be ``self.transport(phi)``)."""
        return AlgebroidElement(
            target,
            tuple(phi.pull_poly(c) for c in e.vf),
            tuple(phi.pull_poly(c) for c in e.ker),
            phi.pull_form(e.form),
        )

    def describe(self) -> str:
        return f"{self.kind} algebroid on {self.ring} (kernel {list(self.kernel.basis)})"


def _as_poly(ring: ChartRing, v) -> LaurentPoly:
    if isinstance(v, LaurentPoly):
        if v.ring != ring:
            raise ChartMismatch(f"{v.ring.chart_id} vs {ring.chart_id}")
        return v
    return ring.const(v)


class AlgebroidElement:
    """Normal-form element sum f_i o tau_i + sum h_r o g_r + omega."""

    __slots__ = ("structure", "vf", "ker", "form")

    def __init__(self, structure: AlgebroidStructure, vf, ker, form: DiffForm):
        self.structure = structure
        self.vf = tuple(vf)
        self.ker = tuple(ker)
        self.form = form

    def _check(self, other: "AlgebroidElement") -> None:
        if other.structure is not self.structure and other.structure.ring != self.structure.ring:
            raise ChartMismatch("elements of different charts")

    def __add__(self, other: "AlgebroidElement") -> "AlgebroidElement":
        self._check(other)
        return AlgebroidElement(
            self.structure,
            tuple(a + b for a, b in zip(self.vf, other.vf)),
            tuple(a + b for a, b in zip(self.ker, other.ker)),
            self.form + other.form,
        )

    def __neg__(self) -> "AlgebroidElement":
        return AlgebroidElement(self.structure, tuple(-a for a in self.vf), tuple(-a for a in self.ker), -self.form)

    def __sub__(self, other: "AlgebroidElement") -> "AlgebroidElement":
        return self + (-other)

    def __mul__(self, c) -> "AlgebroidElement":
        """Scaling by a constant, or plain coefficientwise product by a function."""
        ring = self.structure.ring
        c = _as_poly(ring, c)
        return AlgebroidElement(self.structure, tuple(c * a for a in self.vf), tuple(c * a for a in self.ker), self.form * c)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.vf) and not any(self.ker) and not self.form

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebroidElement):
            return NotImplemented
        return (
            self.structure.ring == other.structure.ring
            and self.vf == other.vf
            and self.ker == other.ker
            and self.form == other.form
        )

    def __hash__(self) -> int:
        return hash((self.vf, self.ker))

    def __repr__(self) -> str:
        return f"AlgebroidElement({self})"

    def __str__(self) -> str:
        from .io import format_element

        return format_element(self)


# ---------------------------------------------------------------------------
# factories
# ---------------------------------------------------------------------------

def coordinate_frame(ring: ChartRing) -> tuple[VectorField, ...]:
    return tuple(VectorField.coordinate(ring, i) for i in range(ring.ngens))


def make_cdo(ring: ChartRing, frame: Sequence[VectorField] | None = None, alpha: DiffForm | None = None,
             name: str = "") -> AlgebroidStructure:
    """Vertex algebroid with empty kernel and tau_i (0) tau_j = i_{tau_i} i_{tau_j} alpha."""
    alpha = alpha if alpha is not None else DiffForm.zero(ring, 3)
    if alpha and not alpha.is_closed():
        raise NotClosed(alpha)
    return AlgebroidStructure(
        ring=ring,
        frame=tuple(frame) if frame is not None else coordinate_frame(ring),
        kernel=KernelAlgebra.empty(),
        curvature=(),
        alpha=alpha,
        kind=VERTEX,
        name=name,
    )


def make_split_courant(ring: ChartRing, frame: Sequence[VectorField] | None = None, H: DiffForm | None = None,
                       name: str = "") -> AlgebroidStructure:
    """The exact Courant algebroid T + Omega^1 (optionally H-twisted)."""
    H = H if H is not None else DiffForm.zero(ring, 3)
    if H and not H.is_closed():
        raise NotClosed(H)
    return AlgebroidStructure(ring, tuple(frame) if frame is not None else coordinate_frame(ring),
                              KernelAlgebra.empty(), (), H, COURANT, (), name)


def make_QNH(ring: ChartRing, frame: Sequence[VectorField] | None, kernel: KernelAlgebra,
             curvature: Sequence[DiffForm], H: DiffForm | None = None,
             connection: Sequence[DiffForm] = (), name: str = "", kind: str = COURANT) -> AlgebroidStructure:
    """Courant extension built from a connection with given curvature and a 3-form H.

    Requires dH = -1/2 sum K_rs c_r ^ c_s (see the decisions ledger for the sign).
    """
    H = H if H is not None else DiffForm.zero(ring, 3)
    s = AlgebroidStructure(ring, tuple(frame) if frame is not None else coordinate_frame(ring), kernel,
                           tuple(curvature), H, kind, tuple(connection), name)
    defect = s.alpha_defect()
    if defect:
        raise PontryaginNotMatched(f"dH + 1/2<c^c> = {defect}")
    return s


def curvature_of(ring: ChartRing, kernel: KernelAlgebra, connection: Sequence[DiffForm]) -> tuple[DiffForm, ...]:
    """c_t = d a_t + 1/2 sum c^t_uv a_u ^ a_v, the curvature compatible with the basis products."""
    out = []
    for t in range(kernel.dim):
        c = connection[t].d()
        for u in range(kernel.dim):
            for v in range(kernel.dim):
                k = kernel.c(u, v, t)
                if k:
                    c = c + connection[u].wedge(connection[v]) * (k / 2)
        out.append(c)
    return tuple(out)


def make_ttw_chart(ring: ChartRing, lambda2: Sequence[DiffForm], frame: Sequence[VectorField] | None = None,
                   names: Sequence[str] | None = None) -> AlgebroidStructure:
    """The twisted tangent Lie algebroid with abelian kernel spanned by lambda*_r.

    The curvature slot stores c_r = -lambda2_r so that
    [tau_i, tau_j] = sum_r i_{tau_i} i_{tau_j} lambda2_r lambda*_r.
    """
    names = tuple(names) if names is not None else tuple(f"l{r + 1}" for r in range(len(lambda2)))
    for lam in lambda2:
        if lam and not lam.is_closed():
            raise NotClosed(lam)
    kernel = KernelAlgebra.abelian(names)
    curv = tuple(-lam if lam else DiffForm.zero(ring, 2) for lam in lambda2)
    return AlgebroidStructure(ring, tuple(frame) if frame is not None else coordinate_frame(ring), kernel, curv,
                              DiffForm.zero(ring, 3), LIE)


def make_tcdo_chart(ring: ChartRing, lambda2: Sequence[DiffForm], alpha: DiffForm | None = None,
                    frame: Sequence[VectorField] | None = None, pairing: Sequence[Sequence] | None = None,
                    names: Sequence[str] | None = None, name: str = "") -> AlgebroidStructure:
    """Vertex chart of a (deformed) twisted CDO; ``pairing`` defaults to K = 0."""
    lie = make_ttw_chart(ring, lambda2, frame, names)
    m = len(lambda2)
    kernel = KernelAlgebra.abelian(lie.kernel.basis, pairing if pairing is not None else [[0] * m for _ in range(m)])
    alpha = alpha if alpha is not None else DiffForm.zero(ring, 3)
    s = AlgebroidStructure(ring, lie.frame, kernel, lie.curvature, alpha, VERTEX, (), name)
    defect = s.alpha_defect()
    if defect:
        if not alpha.is_closed() and not s.pontryagin():
            raise NotClosed(alpha)
        raise PontryaginNotMatched(f"d(alpha) + 1/2<c^c> = {defect}")
    return s
