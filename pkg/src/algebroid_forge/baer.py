"""Baer arithmetic of algebroids: twists, exp(beta), boxplus, boxminus, morphisms.

With a splitting fixed, the pullback-pushout constructions collapse to slot
arithmetic on the structure data.  :class:`PairModel` keeps the element-level
definition (pairs over the tangent sheaf, pushed out along the sum or
difference of the two copies of Omega^1) so that tests can confirm the
collapse.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .algebroid import (
    COURANT,
    LIE,
    VERTEX,
    AlgebroidElement,
    AlgebroidStructure,
    KindError,
)
from .axioms import AxiomReport, SampleSet, build_samples, random_form1
from .exact.ansatz import solve_d_in_window
from .exact.forms import DiffForm, NotClosed, poincare_split
from .exact.ring import ChartMismatch, ChartRing, LaurentPoly


class FrameMismatch(ValueError):
    """Structures combined by boxplus/boxminus must share ring and frame."""


MORPHISM_CHECKS = ("omega-identity", "anchor", "partial", "minus-one", "zero-product", "one-product")


# ---------------------------------------------------------------------------
# structure-level operations
# ---------------------------------------------------------------------------

def twist(s: AlgebroidStructure, alpha: DiffForm) -> AlgebroidStructure:
    """s with x (0) y shifted by i_{pi x} i_{pi y} alpha, for closed alpha."""
    if alpha and alpha.degree != 3:
        raise ValueError("twist needs a 3-form")
    if alpha and not alpha.is_closed():
        raise NotClosed(alpha)
    if s.kind == LIE:
        raise KindError("Lie algebroids carry no 3-form slot")
    return s.replace(alpha=s.alpha + alpha if alpha else s.alpha)


def _same_frame(a: AlgebroidStructure, b: AlgebroidStructure) -> None:
    if a.ring != b.ring:
        raise FrameMismatch(f"rings differ: {a.ring} vs {b.ring}")
    if a.frame != b.frame:
        raise FrameMismatch("frames differ")


def _require_cdo(D: AlgebroidStructure) -> None:
    if D.kind != VERTEX or D.m != 0:
        raise KindError("second argument must be a CDO chart (vertex, empty kernel)")


def boxplus(Q: AlgebroidStructure, D: AlgebroidStructure) -> AlgebroidStructure:
    """Courant extension plus CDO: kernel and curvature from Q, 3-form slots add."""
    if Q.kind != COURANT:
        raise KindError("first argument must be a Courant structure")
    _require_cdo(D)
    _same_frame(Q, D)
    return Q.replace(kind=VERTEX, alpha=Q.alpha + D.alpha, name=f"({Q.name}) [+] ({D.name})")


def boxminus(A: AlgebroidStructure, D: AlgebroidStructure) -> AlgebroidStructure:
    """Vertex extension minus CDO: the Courant structure with 3-form slot A.alpha - D.alpha."""
    if A.kind != VERTEX:
        raise KindError("first argument must be a vertex structure")
    _require_cdo(D)
    _same_frame(A, D)
    return A.replace(kind=COURANT, alpha=A.alpha - D.alpha, name=f"({A.name}) [-] ({D.name})")


# ---------------------------------------------------------------------------
# morphisms
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AlgebroidMorphism:
    """A map fixed by the images of frame and kernel generators; identity on Omega^1.

    ``apply`` extends by f o tau_i -> f o image_i using the target's (-1)
    product, which is what O-linearity of a vertex morphism means.
    """

    source: AlgebroidStructure
    target: AlgebroidStructure
    frame_images: tuple[AlgebroidElement, ...]
    kernel_images: tuple[AlgebroidElement, ...]
    twist_form: DiffForm | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if self.source.ring != self.target.ring:
            raise ChartMismatch("morphisms act between structures on the same ring")
        if len(self.frame_images) != self.source.n or len(self.kernel_images) != self.source.m:
            raise ValueError("need one image per frame and kernel generator")
        object.__setattr__(self, "frame_images", tuple(self.frame_images))
        object.__setattr__(self, "kernel_images", tuple(self.kernel_images))

    def apply(self, e: AlgebroidElement) -> AlgebroidElement:
        t = self.target
        out = t.form(e.form) if e.form else t.zero()
        for f, img in zip(e.vf, self.frame_images):
            if f:
                out = out + t.minus_one(f, img)
        for h, img in zip(e.ker, self.kernel_images):
            if h:
                out = out + t.minus_one(h, img)
        return out

    __call__ = apply

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebroidMorphism):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.frame_images == other.frame_images
            and self.kernel_images == other.kernel_images
        )

    def __hash__(self) -> int:
        return hash((self.source, self.target))

    def compose(self, first: "AlgebroidMorphism") -> "AlgebroidMorphism":
        """self after first."""
        if first.target != self.source:
            raise ValueError("morphisms are not composable")
        tw = None
        if first.twist_form is not None and self.twist_form is not None:
            tw = first.twist_form + self.twist_form
        return AlgebroidMorphism(
            first.source,
            self.target,
            tuple(self.apply(self.source_cast(x)) for x in first.frame_images),
            tuple(self.apply(self.source_cast(x)) for x in first.kernel_images),
            tw,
        )

    def source_cast(self, e: AlgebroidElement) -> AlgebroidElement:
        """Reinterpret an element of an equal structure as an element of ``source``."""
        return AlgebroidElement(self.source, e.vf, e.ker, e.form)

    def inverse(self) -> "AlgebroidMorphism":
        """Inverse along the filtration Omega^1 < kernel < frame."""
        s, t = self.source, self.target
        # kernel level: images are sum_s N_rs g_s + forms
        N = [[img.ker[q] for q in range(s.m)] for img in self.kernel_images]
        Ninv = _invert_matrix(N, s.ring) if s.m else []
        kernel_inv = []
        for q in range(t.m):
            guess = s.zero()
            for r in range(s.m):
                if Ninv[q][r]:
                    guess = guess + s.minus_one(Ninv[q][r], s.g(r))
            err = self.apply(guess) - t.g(q)
            if any(err.vf) or any(err.ker):
                raise ValueError("kernel images are not triangular over Omega^1")
            kernel_inv.append(guess - s.form(err.form))

        def inv_low(e: AlgebroidElement) -> AlgebroidElement:
            out = s.form(e.form) if e.form else s.zero()
            for h, img in zip(e.ker, kernel_inv):
                if h:
                    out = out + s.minus_one(h, img)
            return out

        M = [[img.vf[k] for k in range(t.n)] for img in self.frame_images]
        Minv = _invert_matrix(M, s.ring)
        frame_inv = []
        for j in range(t.n):
            guess = s.zero()
            for i in range(s.n):
                if Minv[j][i]:
                    guess = guess + s.minus_one(Minv[j][i], s.tau(i))
            err = self.apply(guess) - t.tau(j)
            if any(err.vf):
                raise ValueError("frame images do not induce an invertible anchor map")
            frame_inv.append(guess - inv_low(err))
        tw = -self.twist_form if self.twist_form is not None else None
        return AlgebroidMorphism(t, s, tuple(frame_inv), tuple(kernel_inv), tw, name=f"inverse({self.name})")


def _invert_matrix(M: Sequence[Sequence[LaurentPoly]], ring: ChartRing) -> list[list[LaurentPoly]]:
    from .exact.maps import adjugate, determinant

    det = determinant(M)
    if not det.is_unit():
        raise ValueError(f"matrix determinant {det} is not a unit")
    inv = det.inverse()
    return [[c * inv for c in row] for row in adjugate(M)]


def identity_morphism(s: AlgebroidStructure, target: AlgebroidStructure | None = None) -> AlgebroidMorphism:
    t = target if target is not None else s
    return AlgebroidMorphism(
        s,
        t,
        tuple(t.tau(i) for i in range(s.n)),
        tuple(t.g(r) for r in range(s.m)),
        None,
        name="id",
    )


def exp_beta(s: AlgebroidStructure, beta: DiffForm) -> AlgebroidMorphism:
    """x -> x + i_{pi x} beta, a morphism s -> twist(s, d beta)."""
    if beta and beta.degree != 2:
        raise ValueError("exp needs a 2-form")
    target = twist(s, beta.d()) if beta else s
    frame_images = tuple(
        target.tau(i) + (target.form(beta.interior(s.frame[i])) if beta else target.zero())
        for i in range(s.n)
    )
    kernel_images = tuple(target.g(r) for r in range(s.m))
    return AlgebroidMorphism(s, target, frame_images, kernel_images,
                             beta.d() if beta else DiffForm.zero(s.ring, 3), name="exp(beta)")


def boxplus_morphism(f: AlgebroidMorphism, g: AlgebroidMorphism) -> AlgebroidMorphism:
    """f [+] g : Q [+] D -> Q' [+] D', computed through representative pairs."""
    src = boxplus(f.source, g.source)
    tgt = boxplus(f.target, g.target)
    frame = []
    for i in range(src.n):
        a, b = f.frame_images[i], g.frame_images[i]
        if a.vf != b.vf:
            raise ValueError("component morphisms disagree on the anchor")
        frame.append(tgt.element(a.vf, a.ker, a.form + b.form))
    kernel = tuple(tgt.element(x.vf, x.ker, x.form) for x in f.kernel_images)
    return AlgebroidMorphism(src, tgt, tuple(frame), kernel, name=f"{f.name} [+] {g.name}")


def boxminus_morphism(f: AlgebroidMorphism, g: AlgebroidMorphism) -> AlgebroidMorphism:
    """f [-] g : A [-] D -> A' [-] D'."""
    src = boxminus(f.source, g.source)
    tgt = boxminus(f.target, g.target)
    frame = []
    for i in range(src.n):
        a, b = f.frame_images[i], g.frame_images[i]
        if a.vf != b.vf:
            raise ValueError("component morphisms disagree on the anchor")
        frame.append(tgt.element(a.vf, a.ker, a.form - b.form))
    kernel = tuple(tgt.element(x.vf, x.ker, x.form) for x in f.kernel_images)
    return AlgebroidMorphism(src, tgt, tuple(frame), kernel, name=f"{f.name} [-] {g.name}")


def roundtrip_eta(A: AlgebroidStructure, D: AlgebroidStructure) -> AlgebroidMorphism:
    """eta: A -> (A [-] D) [+] D, v -> ((v, x), x); identity in the split picture."""
    target = boxplus(boxminus(A, D), D)
    return identity_morphism(A, target)


def roundtrip_eta_prime(Q: AlgebroidStructure, D: AlgebroidStructure) -> AlgebroidMorphism:
    """eta': Q -> (Q [+] D) [-] D, q -> ((q, x), x)."""
    target = boxminus(boxplus(Q, D), D)
    return identity_morphism(Q, target)


def roundtrip_psi(A: AlgebroidStructure, D: AlgebroidStructure) -> AlgebroidMorphism:
    """Psi: ((v, x), y) -> v + (y - x), the inverse of eta."""
    source = boxplus(boxminus(A, D), D)
    return identity_morphism(source, A)


def check_morphism(m: AlgebroidMorphism, samples: SampleSet | None = None, seed: int = 0,
                   basis_only: bool = False) -> AxiomReport:
    """Identity on Omega^1, compatibility with anchor, d and all products on samples."""
    s, t = m.source, m.target
    if s.kind != t.kind:
        raise KindError("source and target kinds differ")
    sm = samples or build_samples(s, seed, basis_triples=False)
    rep = AxiomReport(f"morphism {m.name}".strip(), axioms=MORPHISM_CHECKS if s.kind != LIE else ("anchor", "zero-product"))
    L = sm.label
    phi = m.apply
    elements = sm.elements if not basis_only else s.basis_elements()
    pairs = sm.pairs if not basis_only else [(a, b) for a in elements for b in elements]
    if s.kind != LIE:
        for k in range(s.n):
            w = DiffForm.dvar(s.ring, k) * s.ring.gen(k)
            rep.record("omega-identity", f"omega={w}", phi(s.form(w)), t.form(w))
        for f in sm.functions[: 2 + s.n]:
            rep.record("partial", f"f={f}", phi(s.partial(f)), t.partial(f))
    for idx, e in enumerate(elements):
        f = sm.functions[idx % len(sm.functions)]
        rep.record("anchor", L(e), t.anchor(phi(e)), s.anchor(e))
        if s.kind == VERTEX:
            rep.record("minus-one", f"f={f}, e={L(e)}", phi(s.minus_one(f, e)), t.minus_one(f, phi(e)))
    for a, b in pairs:
        tag = f"a={L(a)}, b={L(b)}"
        rep.record("zero-product", tag, phi(s.zero_product(a, b)), t.zero_product(phi(a), phi(b)))
        if s.kind != LIE:
            rep.record("one-product", tag, t.one_pairing(phi(a), phi(b)), s.one_pairing(a, b))
    return rep


def twist_defect(m: AlgebroidMorphism) -> DiffForm:
    """The 3-form delta with phi(tau_a (0) tau_b) - phi(tau_a) (0) phi(tau_b) = i_a i_b delta.

    Zero exactly when the frame part of ``m`` respects (0); useful for reading off
    which twist would make a candidate map a morphism.
    """
    s, t = m.source, m.target
    n = s.n
    theta = s.coframe
    delta = DiffForm.zero(s.ring, 3)
    for a in range(n):
        for b in range(a + 1, n):
            diff = m.apply(s.zero_product(s.tau(a), s.tau(b))) - t.zero_product(m.frame_images[a], m.frame_images[b])
            if any(diff.vf) or any(diff.ker):
                raise ValueError("defect is not a pure form; the map fails beyond a twist")
            for c in range(b + 1, n):
                coef = diff.form.interior(s.frame[c]).as_function() if diff.form else s.ring.zero()
                if coef:
                    # i_{tau_a} i_{tau_b} delta evaluated on tau_c is delta(tau_c, tau_b, tau_a)
                    delta = delta + theta[c].wedge(theta[b]).wedge(theta[a]) * coef
    return delta


# ---------------------------------------------------------------------------
# CDO classification helpers
# ---------------------------------------------------------------------------

@dataclass
class ExpWitness:
    """Outcome of searching for beta with d beta = alpha2 - alpha1."""

    status: str  # "witness" or "inconclusive"
    beta: DiffForm | None
    morphism: AlgebroidMorphism | None
    residue: DiffForm | None = None
    window: tuple[int, int] | None = None


def cdo_isomorphism(D1: AlgebroidStructure, D2: AlgebroidStructure,
                    window: tuple[int, int] = (-6, 6)) -> ExpWitness:
    """Find exp(beta): D1 -> D2 between CDO charts with the same frame."""
    _require_cdo(D1)
    _require_cdo(D2)
    _same_frame(D1, D2)
    diff = D2.alpha - D1.alpha
    beta = solve_d_in_window(diff, window) if diff else DiffForm.zero(D1.ring, 2)
    residue = None
    if diff:
        _, residue = poincare_split(diff)
    if beta is None:
        return ExpWitness("inconclusive", None, None, residue, window)
    m = exp_beta(D1, beta)
    return ExpWitness("witness", beta, m, residue, window)


# ---------------------------------------------------------------------------
# element-level oracle for boxplus / boxminus
# ---------------------------------------------------------------------------

class PairModel:
    """Pairs (q, x) over the tangent sheaf with the componentwise operations.

    ``sign`` is +1 for boxplus (pushout along the sum of the two Omega^1
    copies) and -1 for boxminus (pushout along the difference).
    """

    def __init__(self, first: AlgebroidStructure, D: AlgebroidStructure, sign: int):
        _require_cdo(D)
        _same_frame(first, D)
        self.first, self.D, self.sign = first, D, sign
        self.result = boxplus(first, D) if sign > 0 else boxminus(first, D)

    def pair(self, q: AlgebroidElement, x: AlgebroidElement) -> tuple[AlgebroidElement, AlgebroidElement]:
        if q.vf != x.vf:
            raise ValueError("pair components must have the same anchor")
        return (q, x)

    def minus_one(self, a, p):
        q, x = p
        return (self.first.minus_one(a, q), self.D.minus_one(a, x))

    def zero(self, p, p2):
        return (self.first.zero_product(p[0], p2[0]), self.D.zero_product(p[1], p2[1]))

    def one(self, p, p2):
        return self.first.one_pairing(p[0], p2[0]) + self.D.one_pairing(p[1], p2[1]) * self.sign

    def partial(self, f):
        return (self.first.partial(f), self.D.zero())

    def push(self, p) -> AlgebroidElement:
        q, x = p
        return self.result.element(q.vf, q.ker, q.form + x.form * self.sign)

    def random_pair(self, rng: random.Random, base: AlgebroidElement):
        x = self.D.element(base.vf, (), random_form1(self.D.ring, rng))
        return (self.first.element(base.vf, base.ker, base.form), x)
