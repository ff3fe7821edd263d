"""Chart coordinate rings and exact Laurent polynomials over the rationals."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from operator import add
from typing import Iterable, Iterator, Mapping

from gmpy2 import mpq

Exponent = tuple[int, ...]


class ChartMismatch(ValueError):
    """Operands live on different coordinate charts."""


class IllegalExponent(ValueError):
    """A negative exponent on a variable that is not inverted in the ring."""


@dataclass(frozen=True)
class ChartRing:
    """The ring Q[x_1..x_n] localized at the monomials in ``inverted``.

    Variable names must be distinct and must not start with ``d`` (the text
    grammar reserves ``dx`` for differentials).
    """

    chart_id: str
    variables: tuple[str, ...]
    inverted: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "inverted", frozenset(self.inverted))
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"duplicate variable names in {self.variables}")
        for v in self.variables:
            if not v or not (v[0].isalpha() or v[0] == "_") or not v.replace("_", "").isalnum():
                raise ValueError(f"bad variable name {v!r}")
            if v.startswith("d"):
                raise ValueError(f"variable {v!r} clashes with the differential prefix 'd'")
        if not self.inverted <= set(self.variables):
            raise ValueError(f"inverted {sorted(self.inverted)} not among variables {self.variables}")

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, ChartRing):
            return NotImplemented
        return (self.chart_id, self.variables, self.inverted) == (other.chart_id, other.variables, other.inverted)

    @property
    def ngens(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        return self.variables.index(name)

    def is_inverted(self, i: int) -> bool:
        return self.variables[i] in self.inverted

    def check_exponent(self, exp: Exponent) -> None:
        if len(exp) != self.ngens:
            raise IllegalExponent(f"exponent {exp} has wrong length for {self.variables}")
        for i, e in enumerate(exp):
            if e < 0 and not self.is_inverted(i):
                raise IllegalExponent(
                    f"negative power of {self.variables[i]} in ring {self.chart_id}"
                )

    def localize(self, extra: Iterable[str], chart_id: str | None = None) -> "ChartRing":
        """Same coordinates with more variables inverted."""
        return ChartRing(chart_id or self.chart_id, self.variables, self.inverted | set(extra))

    # element constructors -------------------------------------------------
    def zero(self) -> "LaurentPoly":
        return LaurentPoly(self, {})

    def one(self) -> "LaurentPoly":
        return self.const(1)

    def const(self, c) -> "LaurentPoly":
        c = mpq(c)
        return LaurentPoly._raw(self, {(0,) * self.ngens: c} if c else {})

    def gen(self, name: str | int) -> "LaurentPoly":
        i = name if isinstance(name, int) else self.index(name)
        exp = [0] * self.ngens
        exp[i] = 1
        return LaurentPoly(self, {tuple(exp): mpq(1)})

    def gens(self) -> tuple["LaurentPoly", ...]:
        return tuple(self.gen(i) for i in range(self.ngens))

    def monomial(self, exp: Exponent, coeff=1) -> "LaurentPoly":
        exp = tuple(exp)
        self.check_exponent(exp)
        c = mpq(coeff)
        return LaurentPoly._raw(self, {exp: c} if c else {})

    def __str__(self) -> str:
        inv = ",".join(v for v in self.variables if v in self.inverted)
        return f"{self.chart_id}: Q[{','.join(self.variables)}]" + (f"[1/{inv}]" if inv else "")


def to_fraction(c) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(int(c.numerator), int(c.denominator))


def _grlex_key(exp: Exponent) -> tuple:
    return (sum(exp), exp)


class LaurentPoly:
    """Immutable Laurent polynomial with rational coefficients.

    ``terms`` maps exponent vectors to nonzero Fractions.  Arithmetic with
    plain ints and Fractions coerces them to constants.  Coefficients are held
    internally as gmpy2 rationals for speed.
    """

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: ChartRing, terms: Mapping[Exponent, Fraction], *, check: bool = True):
        clean = {}
        for exp, c in terms.items():
            if c:
                if check:
                    ring.check_exponent(exp)
                clean[exp] = mpq(c)
        self.ring = ring
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ring: ChartRing, terms: dict) -> "LaurentPoly":
        """Trusted constructor: terms already nonzero Fractions with legal exponents."""
        obj = object.__new__(cls)
        obj.ring = ring
        obj._terms = terms
        obj._hash = None
        return obj

    # basic protocol ----------------------------------------------------------
    @property
    def terms(self) -> Mapping[Exponent, Fraction]:
        return {e: to_fraction(c) for e, c in self._terms.items()}

    def items(self) -> Iterator[tuple[Exponent, Fraction]]:
        return iter(sorted(self.terms.items(), key=lambda t: _grlex_key(t[0])))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or set(self._terms) == {(0,) * self.ring.ngens}

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return to_fraction(self._terms.get((0,) * self.ring.ngens, 0))

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            if other.ring is not self.ring and other.ring != self.ring:
                raise ChartMismatch(f"{self.ring.chart_id} vs {other.ring.chart_id}")
            return other
        if isinstance(other, (int, Rational)):
            return self.ring.const(other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Rational)):
            return self == self.ring.const(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return (self.ring is other.ring or self.ring == other.ring) and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._terms.items())))
        return self._hash

    # arithmetic ----------------------------------------------------------------
    def __add__(self, other):
        if type(other) is not LaurentPoly or other.ring is not self.ring:
            other = self._coerce(other)
            if other is NotImplemented:
                return other
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return LaurentPoly._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw(self.ring, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other._terms:
            return self
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) - c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return LaurentPoly._raw(self.ring, out)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if type(other) is LaurentPoly:
            if other.ring is not self.ring and other.ring != self.ring:
                raise ChartMismatch(f"{self.ring.chart_id} vs {other.ring.chart_id}")
            return self._mul_poly(other)
        if isinstance(other, (int, Rational)):
            if other == 1:
                return self
            c = mpq(other)
            if not c:
                return LaurentPoly._raw(self.ring, {})
            return LaurentPoly._raw(self.ring, {e: v * c for e, v in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._mul_poly(other)

    def _mul_poly(self, other: "LaurentPoly") -> "LaurentPoly":
        a, b = self._terms, other._terms
        if not a or not b:
            return LaurentPoly._raw(self.ring, {})
        if len(b) == 1:
            ((e2, c2),) = b.items()
            return LaurentPoly._raw(self.ring, {tuple(map(add, e1, e2)): c1 * c2 for e1, c1 in a.items()})
        if len(a) == 1:
            ((e1, c1),) = a.items()
            return LaurentPoly._raw(self.ring, {tuple(map(add, e1, e2)): c1 * c2 for e2, c2 in b.items()})
        out: dict = {}
        get = out.get
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(map(add, e1, e2))
                out[e] = get(e, 0) + c1 * c2
        return LaurentPoly._raw(self.ring, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            return self * (1 / mpq(other))
        return self * self._coerce(other).inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def is_unit(self) -> bool:
        if len(self._terms) != 1:
            return False
        (exp,) = self._terms
        return all(e == 0 or self.ring.is_inverted(i) for i, e in enumerate(exp))

    def inverse(self) -> "LaurentPoly":
        if not self.is_unit():
            raise ZeroDivisionError(f"{self} is not a unit of {self.ring}")
        ((exp, c),) = self._terms.items()
        return LaurentPoly(self.ring, {tuple(-e for e in exp): 1 / mpq(c)})

    # calculus -------------------------------------------------------------------
    def diff(self, var: str | int) -> "LaurentPoly":
        i = var if isinstance(var, int) else self.ring.index(var)
        out = {}
        for e, c in self._terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return LaurentPoly._raw(self.ring, out)

    def degree_in(self, i: int) -> tuple[int, int]:
        """(min, max) exponent of variable i; (0, 0) for zero."""
        if not self._terms:
            return (0, 0)
        vals = [e[i] for e in self._terms]
        return (min(vals), max(vals))

    def total_degree(self) -> int:
        return max((sum(e) for e in self._terms), default=0)

    def coefficient(self, exp: Exponent) -> Fraction:
        return to_fraction(self._terms.get(tuple(exp), 0))

    def __repr__(self) -> str:
        from .text import format_poly

        return f"LaurentPoly({format_poly(self)!r} on {self.ring.chart_id})"

    def __str__(self) -> str:
        from .text import format_poly

        return format_poly(self)
