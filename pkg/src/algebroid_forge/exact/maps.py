"""Ring homomorphisms between charts: substitution, pullback and pushforward."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .forms import DiffForm, VectorField, exterior_d
from .ring import ChartMismatch, ChartRing, LaurentPoly


def determinant(m: Sequence[Sequence[LaurentPoly]]) -> LaurentPoly:
    """Cofactor expansion; charts are small so this is adequate."""
    n = len(m)
    if n == 0:
        raise ValueError("empty matrix")
    if n == 1:
        return m[0][0]
    total = m[0][0].ring.zero()
    for j in range(n):
        if not m[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * determinant(minor)
        total = total + (term if j % 2 == 0 else -term)
    return total


def adjugate(m: Sequence[Sequence[LaurentPoly]]) -> list[list[LaurentPoly]]:
    n = len(m)
    ring = m[0][0].ring
    if n == 1:
        return [[ring.one()]]
    adj = [[ring.zero()] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(m) if k != i]
            c = determinant(minor)
            adj[j][i] = c if (i + j) % 2 == 0 else -c
    return adj


@dataclass(frozen=True)
class ChartMap:
    """The ring map source -> target sending source variable i to images[i].

    Inverted source variables must go to units of the target so that the map
    extends to the localization.
    """

    source: ChartRing
    target: ChartRing
    images: tuple[LaurentPoly, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "images", tuple(self.images))
        if len(self.images) != self.source.ngens:
            raise ValueError("one image per source variable is required")
        for v, img in zip(self.source.variables, self.images):
            if img.ring != self.target:
                raise ChartMismatch(f"image of {v} not in {self.target.chart_id}")
            if v in self.source.inverted and not img.is_unit():
                raise ValueError(f"inverted variable {v} must map to a unit, got {img}")

    @classmethod
    def identity(cls, ring: ChartRing) -> "ChartMap":
        return cls(ring, ring, ring.gens())

    @classmethod
    def inclusion(cls, source: ChartRing, target: ChartRing) -> "ChartMap":
        """Same variable names, target possibly more localized."""
        return cls(source, target, tuple(target.gen(v) for v in source.variables))

    def __call__(self, obj):
        if isinstance(obj, LaurentPoly):
            return self.pull_poly(obj)
        if isinstance(obj, DiffForm):
            return self.pull_form(obj)
        if isinstance(obj, VectorField):
            return self.push_field(obj)
        raise TypeError(f"cannot transport {type(obj).__name__}")

    def pull_poly(self, f: LaurentPoly) -> LaurentPoly:
        if f.ring != self.source:
            raise ChartMismatch(f"{f.ring.chart_id} is not {self.source.chart_id}")
        out = self.target.zero()
        powers: dict[tuple[int, int], LaurentPoly] = {}
        for exp, c in f._terms.items():
            term = self.target.const(c)
            for i, e in enumerate(exp):
                if e:
                    key = (i, e)
                    if key not in powers:
                        powers[key] = self.images[i] ** e
                    term = term * powers[key]
            out = out + term
        return out

    def pull_form(self, w: DiffForm) -> DiffForm:
        if w.ring != self.source:
            raise ChartMismatch(f"{w.ring.chart_id} is not {self.source.chart_id}")
        dimg = [exterior_d(img) for img in self.images]
        out = DiffForm.zero(self.target, w.degree)
        for idx, f in w.items():
            term = DiffForm.function(self.pull_poly(f))
            for i in idx:
                term = term.wedge(dimg[i])
            out = out + term
        return out

    def jacobian(self) -> list[list[LaurentPoly]]:
        """J[i][k] = d(image_i)/d(target_k)."""
        return [[img.diff(k) for k in range(self.target.ngens)] for img in self.images]

    def push_field(self, xi: VectorField) -> VectorField:
        """The target derivation D with D(phi(f)) = phi(xi(f)); needs a unit Jacobian."""
        if xi.ring != self.source:
            raise ChartMismatch(f"{xi.ring.chart_id} is not {self.source.chart_id}")
        if self.source.ngens != self.target.ngens:
            raise ValueError("pushforward needs equal dimensions")
        jac = self.jacobian()
        det = determinant(jac)
        if not det.is_unit():
            raise ValueError(f"Jacobian determinant {det} is not a unit")
        inv_det = det.inverse()
        adj = adjugate(jac)
        rhs = [self.pull_poly(c) for c in xi.coefficients]
        n = self.target.ngens
        comps = []
        for k in range(n):
            s = self.target.zero()
            for i in range(n):
                if adj[k][i] and rhs[i]:
                    s = s + adj[k][i] * rhs[i]
            comps.append(s * inv_det)
        return VectorField(self.target, comps)

    def compose(self, other: "ChartMap") -> "ChartMap":
        """self after other: source(other) -> target(self)."""
        if other.target != self.source:
            raise ChartMismatch("maps are not composable")
        return ChartMap(other.source, self.target, tuple(self.pull_poly(img) for img in other.images))
