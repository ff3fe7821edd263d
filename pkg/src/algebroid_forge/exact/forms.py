"""Vector fields and differential forms on a chart, plus the Poincare primitive solver."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from numbers import Rational
from typing import Iterable, Mapping, Sequence

from .ring import ChartMismatch, ChartRing, LaurentPoly

Index = tuple[int, ...]


class NotClosed(ValueError):
    """A form that was required to be closed has nonzero differential."""

    def __init__(self, form: "DiffForm", message: str | None = None):
        self.form = form
        super().__init__(message or f"form is not closed: d({form}) = {form.d()}")


class NotExact(ValueError):
    """A closed form with no Laurent primitive; ``residue`` is the obstruction."""

    def __init__(self, residue: "DiffForm"):
        self.residue = residue
        super().__init__(f"closed form is not exact; obstruction {residue}")


def _poly(ring: ChartRing, v) -> LaurentPoly:
    if isinstance(v, LaurentPoly):
        if v.ring is not ring and v.ring != ring:
            raise ChartMismatch(f"{v.ring.chart_id} vs {ring.chart_id}")
        return v
    return ring.const(v)


class VectorField:
    """A derivation sum_i f_i d/dx_i of the chart ring."""

    __slots__ = ("ring", "coefficients")

    def __init__(self, ring: ChartRing, coefficients: Sequence):
        coeffs = tuple(_poly(ring, c) for c in coefficients)
        if len(coeffs) != ring.ngens:
            raise ValueError(f"expected {ring.ngens} components, got {len(coeffs)}")
        self.ring = ring
        self.coefficients = coeffs

    @classmethod
    def zero(cls, ring: ChartRing) -> "VectorField":
        return cls(ring, [ring.zero()] * ring.ngens)

    @classmethod
    def coordinate(cls, ring: ChartRing, var: str | int) -> "VectorField":
        i = var if isinstance(var, int) else ring.index(var)
        return cls(ring, [ring.one() if j == i else ring.zero() for j in range(ring.ngens)])

    def apply(self, f: LaurentPoly) -> LaurentPoly:
        f = _poly(self.ring, f)
        out = self.ring.zero()
        for i, c in enumerate(self.coefficients):
            if c:
                out = out + c * f.diff(i)
        return out

    __call__ = apply

    def bracket(self, other: "VectorField") -> "VectorField":
        self._check(other)
        return VectorField(
            self.ring,
            [self.apply(b) - other.apply(a) for a, b in zip(self.coefficients, other.coefficients)],
        )

    def _check(self, other: "VectorField") -> None:
        if self.ring is not other.ring and self.ring != other.ring:
            raise ChartMismatch(f"{self.ring.chart_id} vs {other.ring.chart_id}")

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __add__(self, other: "VectorField") -> "VectorField":
        self._check(other)
        return VectorField(self.ring, [a + b for a, b in zip(self.coefficients, other.coefficients)])

    def __sub__(self, other: "VectorField") -> "VectorField":
        self._check(other)
        return VectorField(self.ring, [a - b for a, b in zip(self.coefficients, other.coefficients)])

    def __neg__(self) -> "VectorField":
        return VectorField(self.ring, [-a for a in self.coefficients])

    def __mul__(self, f) -> "VectorField":
        f = _poly(self.ring, f)
        return VectorField(self.ring, [f * a for a in self.coefficients])

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.ring == other.ring and self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash((self.ring, self.coefficients))

    def __repr__(self) -> str:
        parts = []
        for v, c in zip(self.ring.variables, self.coefficients):
            if c:
                parts.append(f"({c})*d/d{v}")
        return "VectorField(" + (" + ".join(parts) or "0") + ")"


def _merge_sign(a: Index, b: Index) -> tuple[int, Index]:
    """Sign and sorted index of dx_a ^ dx_b, or (0, ()) when they overlap."""
    if set(a) & set(b):
        return 0, ()
    seq = list(a) + list(b)
    inversions = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return (-1 if inversions % 2 else 1), tuple(sorted(seq))


def sort_index(seq: Iterable[int]) -> tuple[int, Index]:
    """Sign and sorted index of an arbitrary wedge word; sign 0 on repeats."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0, ()
    inversions = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return (-1 if inversions % 2 else 1), tuple(sorted(seq))


class DiffForm:
    """A differential k-form sum_I f_I dx_I with I strictly increasing."""

    __slots__ = ("ring", "degree", "_terms")

    def __init__(self, ring: ChartRing, degree: int, terms: Mapping[Index, LaurentPoly] | None = None):
        if not 0 <= degree:
            raise ValueError(f"negative degree {degree}")
        clean: dict[Index, LaurentPoly] = {}
        for idx, f in (terms or {}).items():
            idx = tuple(idx)
            if len(idx) != degree or any(a >= b for a, b in zip(idx, idx[1:])):
                raise ValueError(f"index {idx} is not a sorted {degree}-tuple")
            if idx and not (0 <= idx[0] and idx[-1] < ring.ngens):
                raise ValueError(f"index {idx} out of range for {ring.variables}")
            f = _poly(ring, f)
            if f:
                clean[idx] = f
        self.ring = ring
        self.degree = degree
        self._terms = clean

    @classmethod
    def _raw(cls, ring: ChartRing, degree: int, terms: dict) -> "DiffForm":
        """Trusted constructor; drops zero coefficients only."""
        obj = object.__new__(cls)
        obj.ring = ring
        obj.degree = degree
        obj._terms = {i: f for i, f in terms.items() if f}
        return obj

    # constructors ---------------------------------------------------------------
    @classmethod
    def zero(cls, ring: ChartRing, degree: int) -> "DiffForm":
        return cls(ring, degree, {})

    @classmethod
    def function(cls, f: LaurentPoly) -> "DiffForm":
        return cls(f.ring, 0, {(): f})

    @classmethod
    def dvar(cls, ring: ChartRing, var: str | int) -> "DiffForm":
        i = var if isinstance(var, int) else ring.index(var)
        return cls(ring, 1, {(i,): ring.one()})

    @classmethod
    def from_words(cls, ring: ChartRing, degree: int, words: Iterable[tuple[Sequence[int], LaurentPoly]]) -> "DiffForm":
        """Build from unsorted (index word, coefficient) pairs, applying wedge signs."""
        acc: dict[Index, LaurentPoly] = {}
        for word, f in words:
            sign, idx = sort_index(word)
            if sign:
                acc[idx] = acc.get(idx, ring.zero()) + f * sign
        return cls(ring, degree, acc)

    # protocol -------------------------------------------------------------------
    @property
    def terms(self) -> dict[Index, LaurentPoly]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def coefficient(self, idx: Sequence[int]) -> LaurentPoly:
        return self._terms.get(tuple(idx), self.ring.zero())

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def as_function(self) -> LaurentPoly:
        if self.degree != 0:
            raise ValueError("not a 0-form")
        return self.coefficient(())

    def _check(self, other: "DiffForm") -> None:
        if self.ring is not other.ring and self.ring != other.ring:
            raise ChartMismatch(f"{self.ring.chart_id} vs {other.ring.chart_id}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffForm):
            return NotImplemented
        if self.ring is not other.ring and self.ring != other.ring:
            return False
        if not self._terms and not other._terms:
            return True
        return self.degree == other.degree and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.ring, self.degree, frozenset(self._terms.items())))

    def __add__(self, other: "DiffForm") -> "DiffForm":
        self._check(other)
        if not other._terms:
            return self
        if not self._terms:
            return other
        if self.degree != other.degree:
            raise ValueError(f"adding forms of degree {self.degree} and {other.degree}")
        out = dict(self._terms)
        for idx, f in other._terms.items():
            out[idx] = out.get(idx, self.ring.zero()) + f
        return DiffForm._raw(self.ring, self.degree, out)

    def __neg__(self) -> "DiffForm":
        return DiffForm._raw(self.ring, self.degree, {i: -f for i, f in self._terms.items()})

    def __sub__(self, other: "DiffForm") -> "DiffForm":
        return self + (-other)

    def __mul__(self, f) -> "DiffForm":
        if isinstance(f, DiffForm):
            return self.wedge(f)
        if not self._terms:
            return self
        f = _poly(self.ring, f)
        return DiffForm._raw(self.ring, self.degree, {i: f * g for i, g in self._terms.items()})

    __rmul__ = __mul__

    def __xor__(self, other: "DiffForm") -> "DiffForm":
        return self.wedge(other)

    # calculus -------------------------------------------------------------------
    def d(self) -> "DiffForm":
        """Exterior derivative."""
        acc: dict[Index, LaurentPoly] = {}
        for idx, f in self._terms.items():
            for j in range(self.ring.ngens):
                if j in idx:
                    continue
                df = f.diff(j)
                if not df:
                    continue
                sign, new = _merge_sign((j,), idx)
                acc[new] = acc.get(new, self.ring.zero()) + df * sign
        return DiffForm._raw(self.ring, self.degree + 1, acc)

    def wedge(self, other: "DiffForm") -> "DiffForm":
        self._check(other)
        acc: dict[Index, LaurentPoly] = {}
        for i1, f1 in self._terms.items():
            for i2, f2 in other._terms.items():
                sign, new = _merge_sign(i1, i2)
                if sign:
                    acc[new] = acc.get(new, self.ring.zero()) + f1 * f2 * sign
        return DiffForm._raw(self.ring, self.degree + other.degree, acc)

    def interior(self, xi: VectorField) -> "DiffForm":
        """Contraction i_xi; removes dx at position m with sign (-1)^m."""
        if xi.ring != self.ring:
            raise ChartMismatch(f"{xi.ring.chart_id} vs {self.ring.chart_id}")
        if self.degree == 0:
            raise ValueError("interior product of a 0-form")
        acc: dict[Index, LaurentPoly] = {}
        for idx, f in self._terms.items():
            for m, i in enumerate(idx):
                c = xi.coefficients[i]
                if not c:
                    continue
                new = idx[:m] + idx[m + 1:]
                term = f * c
                acc[new] = acc.get(new, self.ring.zero()) + (term if m % 2 == 0 else -term)
        return DiffForm._raw(self.ring, self.degree - 1, acc)

    def lie_derivative(self, xi: VectorField) -> "DiffForm":
        """Cartan formula L = d i + i d."""
        if self.degree == 0:
            return DiffForm.function(xi.apply(self.as_function()))
        return self.interior(xi).d() + self.d().interior(xi)

    def pair(self, xis: Sequence[VectorField]) -> LaurentPoly:
        """Full evaluation i_{xi_k}...i_{xi_1} omega (xi_1 contracted first)."""
        if len(xis) != self.degree:
            raise ValueError("wrong number of vector fields")
        w = self
        for xi in xis:
            w = w.interior(xi)
        return w.as_function()

    def is_closed(self) -> bool:
        return self.d().is_zero()

    def depends_on(self) -> set[int]:
        """Indices of variables appearing in coefficients or differentials."""
        used: set[int] = set()
        for idx, f in self._terms.items():
            used.update(idx)
            for e in f._terms:
                used.update(i for i, v in enumerate(e) if v)
        return used

    def __repr__(self) -> str:
        from .text import format_form

        return f"DiffForm({format_form(self)!r}, degree={self.degree})"

    def __str__(self) -> str:
        from .text import format_form

        return format_form(self)


def exterior_d(f: LaurentPoly) -> DiffForm:
    return DiffForm.function(f).d()


def all_indices(n: int, k: int) -> list[Index]:
    return list(combinations(range(n), k))


# ---------------------------------------------------------------------------
# Poincare lemma on Laurent rings
# ---------------------------------------------------------------------------

def _integrate_in(f: LaurentPoly, j: int) -> tuple[LaurentPoly, LaurentPoly]:
    """Split f = d/dx_j(F) + x_j^{-1} r with r free of x_j; returns (F, r)."""
    ring = f.ring
    prim: dict = {}
    logs: dict = {}
    for e, c in f._terms.items():
        if e[j] == -1:
            ne = list(e)
            ne[j] = 0
            logs[tuple(ne)] = c
        else:
            ne = list(e)
            ne[j] += 1
            prim[tuple(ne)] = c / (e[j] + 1)
    return LaurentPoly._raw(ring, prim), LaurentPoly._raw(ring, logs)


def _dlog(ring: ChartRing, j: int) -> DiffForm:
    return DiffForm(ring, 1, {(j,): ring.gen(j).inverse()})


def _split(omega: DiffForm, top: int) -> tuple[DiffForm | None, DiffForm]:
    """Write a closed omega involving only variables < top as dP + residue."""
    ring = omega.ring
    k = omega.degree
    if omega.is_zero():
        return (DiffForm.zero(ring, k - 1) if k else None), omega
    if k == 0:
        return None, omega
    if top == 0:
        raise AssertionError("nonzero positive-degree form with no variables")
    j = top - 1
    xj = VectorField.coordinate(ring, j)
    a_part = omega.interior(xj)
    b_part = DiffForm(ring, k, {i: f for i, f in omega.terms.items() if j not in i})
    p_terms: dict[Index, LaurentPoly] = {}
    r_terms: dict[Index, LaurentPoly] = {}
    for idx, f in a_part.terms.items():
        F, r = _integrate_in(f, j)
        if F:
            p_terms[idx] = F
        if r:
            r_terms[idx] = r
    P = DiffForm(ring, k - 1, p_terms)
    R = DiffForm(ring, k - 1, r_terms)
    # omega - dP = (dx_j/x_j)^R + b_rest, and closedness forces both R and
    # b_rest to be closed and free of x_j
    dP = P.d()
    b_rest = b_part - DiffForm(ring, k, {i: f for i, f in dP.terms.items() if j not in i})
    rho, res_r = _split(R, j)
    beta, res_b = _split(b_rest, j)
    primitive = P
    residue = res_b
    if R:
        dl = _dlog(ring, j)
        if rho is not None:
            primitive = primitive - dl.wedge(rho)
        residue = dl.wedge(res_r) + residue
    if beta is not None:
        primitive = primitive + beta
    return primitive, residue


def poincare_split(omega: DiffForm) -> tuple[DiffForm, DiffForm]:
    """Decompose a closed form of positive degree as d(primitive) + residue.

    The residue is a constant-coefficient combination of wedges of dx_i/x_i
    and vanishes exactly when omega is exact on the Laurent chart.
    """
    if omega.degree == 0:
        raise ValueError("primitive of a 0-form is undefined")
    if not omega.is_closed():
        raise NotClosed(omega)
    primitive, residue = _split(omega, omega.ring.ngens)
    assert primitive is not None
    return primitive, residue


def find_primitive(omega: DiffForm) -> DiffForm:
    """Return beta with d(beta) = omega; raise NotExact with the residue otherwise."""
    primitive, residue = poincare_split(omega)
    if residue:
        raise NotExact(residue)
    return primitive


def scalar(v) -> Fraction:
    if isinstance(v, LaurentPoly):
        return v.constant_value()
    if isinstance(v, (int, Rational)):
        return Fraction(v)
    raise TypeError(f"not a scalar: {v!r}")
