"""Free-field vertex algebra: one beta-gamma pair tensor a rank-one Heisenberg.

The Fock module is the polynomial ring in the creation modes a_{-m} (m >= 1),
b_{-m} (m >= 0) and l_{-m} (m >= 1) applied to |0>.  Annihilators act as
derivations: a_m (m >= 0) as d/db_{-m}, b_n (n >= 1) as -d/da_{-n} and
l_m (m >= 1) as K m d/dl_{-m}, where K = <l|l>.

Field modes follow a(z) = sum a_n z^{-n-1}, b(z) = sum b_n z^{-n} and
l(z) = sum l_n z^{-n-1}, so a_(n) = a_n, b_(n) = b_{n+1} and l_(n) = l_n.
n-th products are computed from the normally ordered product recursion

    (X_(-1) w)_(n) = sum_j X_(-1-j) w_(n+j) + sum_j w_(n-1-j) X_(j)

which terminates because every term has bounded conformal weight.

Text grammar: ``2*a(-1)b(0)^2|0> - 1/2*l(-2)|0>``; a monomial lists the
creation modes (in any order) followed by ``|0>``.
"""

from __future__ import annotations

import re
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

WEIGHT_CAP = 2
FIELDS = ("a", "b", "l")

Mode = tuple[str, int]  # (field, m) meaning the creation operator field_{-m}
Monomial = tuple[Mode, ...]  # sorted, with repetition


class WeightOverflow(ValueError):
    """A state or product outside the supported conformal weight window."""


class ResultNotInHeisenberg(ValueError):
    """The Sugawara computation produced a state with beta-gamma dependence."""

    def __init__(self, state: "FreeFieldState"):
        self.state = state
        super().__init__(f"result has beta-gamma dependence: {state}")


class StateParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        self.column = pos + 1
        super().__init__(f"{message} at column {pos + 1}: {text!r}")


def _is_creation(fld: str, m: int) -> bool:
    """m is the negated mode index."""
    return m >= 1 if fld in ("a", "l") else m >= 0


def mode_weight(mode: Mode) -> int:
    return mode[1]


def _gbinom(m: int, p: int) -> Fraction:
    """Generalized binomial coefficient for any integer m and p >= 0."""
    if p < 0:
        return Fraction(0)
    num = 1
    for i in range(p):
        num *= m - i
    den = 1
    for i in range(2, p + 1):
        den *= i
    return Fraction(num, den)


@dataclass(frozen=True)
class HeisenbergData:
    """Pairing <l|l> = K of the rank-one Heisenberg field."""

    K: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "K", Fraction(self.K))


@dataclass(frozen=True, eq=False)
class FreeFieldState:
    """Rational combination of Fock monomials; ``K`` fixes the Heisenberg pairing."""

    terms: Mapping[Monomial, Fraction]
    K: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        clean = {}
        for mono, c in self.terms.items():
            c = Fraction(c)
            if c:
                for fld, m in mono:
                    if fld not in FIELDS or not _is_creation(fld, m):
                        raise ValueError(f"{fld}(-{m}) is not a creation mode")
                key = tuple(sorted(mono))
                clean[key] = clean.get(key, Fraction(0)) + c
        object.__setattr__(self, "terms", {k: v for k, v in clean.items() if v})
        object.__setattr__(self, "K", Fraction(self.K))

    # constructors ---------------------------------------------------------------
    @classmethod
    def vacuum(cls, K=0) -> "FreeFieldState":
        return cls({(): Fraction(1)}, K)

    @classmethod
    def zero(cls, K=0) -> "FreeFieldState":
        return cls({}, K)

    @classmethod
    def monomial(cls, modes: Iterable[Mode], coeff=1, K=0) -> "FreeFieldState":
        return cls({tuple(sorted(modes)): Fraction(coeff)}, K)

    @classmethod
    def parse(cls, text: str, K=0) -> "FreeFieldState":
        return parse_state(text, K)

    # protocol ---------------------------------------------------------------------
    def _check(self, other: "FreeFieldState") -> None:
        if self.K != other.K:
            raise ValueError("states use different Heisenberg pairings")

    def __add__(self, other: "FreeFieldState") -> "FreeFieldState":
        self._check(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return FreeFieldState(out, self.K)

    def __neg__(self) -> "FreeFieldState":
        return FreeFieldState({k: -v for k, v in self.terms.items()}, self.K)

    def __sub__(self, other: "FreeFieldState") -> "FreeFieldState":
        return self + (-other)

    def __mul__(self, c) -> "FreeFieldState":
        c = Fraction(c)
        return FreeFieldState({k: v * c for k, v in self.terms.items()}, self.K)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, FreeFieldState):
            return NotImplemented
        return self.terms == other.terms and (self.K == other.K or not self.terms)

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def weight(self) -> int:
        """Largest conformal weight among the terms (0 for the zero state)."""
        return max((sum(m for _, m in mono) for mono in self.terms), default=0)

    def weights(self) -> set[int]:
        return {sum(m for _, m in mono) for mono in self.terms}

    def scalar(self) -> Fraction | None:
        """The coefficient c if the state is c|0>, else None."""
        if not self.terms:
            return Fraction(0)
        if set(self.terms) == {()}:
            return self.terms[()]
        return None

    def uses_beta_gamma(self) -> bool:
        return any(fld in ("a", "b") for mono in self.terms for fld, _ in mono)

    def with_K(self, K) -> "FreeFieldState":
        return FreeFieldState(self.terms, K)

    def __str__(self) -> str:
        return format_state(self)

    def __repr__(self) -> str:
        return f"FreeFieldState({format_state(self)!r}, K={self.K})"


# ---------------------------------------------------------------------------
# text
# ---------------------------------------------------------------------------

def _fmt_frac(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _fmt_mono(mono: Monomial) -> str:
    if not mono:
        return "|0>"
    counts: dict[Mode, int] = {}
    for md in mono:
        counts[md] = counts.get(md, 0) + 1
    parts = []
    for (fld, m) in sorted(counts, key=lambda md: (FIELDS.index(md[0]), md[1])):
        k = counts[(fld, m)]
        parts.append(f"{fld}({-m})" + (f"^{k}" if k > 1 else ""))
    return "".join(parts) + "|0>"


def _mono_key(mono: Monomial):
    return (-sum(m for _, m in mono), [(FIELDS.index(f), m) for f, m in mono])


def format_state(s: FreeFieldState) -> str:
    if not s.terms:
        return "0"
    out = ""
    for i, mono in enumerate(sorted(s.terms, key=_mono_key)):
        c = s.terms[mono]
        body = _fmt_mono(mono)
        mag = abs(c)
        piece = body if mag == 1 else f"{_fmt_frac(mag)}*{body}"
        if i == 0:
            out = ("-" if c < 0 else "") + piece
        else:
            out += (" - " if c < 0 else " + ") + piece
    return out


_STATE_TOKEN = re.compile(
    r"\s*(?:(?P<mode>[abl])\(\s*(?P<idx>[-+]?\d+)\s*\)(?:\^(?P<pow>\d+))?|(?P<vac>\|0>)|(?P<num>\d+(?:/\d+)?)|(?P<op>[-+*]))"
)


def parse_state(text: str, K=0) -> FreeFieldState:
    """Parse the state grammar documented in the module docstring."""
    if text.strip() == "0":
        return FreeFieldState.zero(K)
    pos = 0
    terms: dict[Monomial, Fraction] = {}
    sign = Fraction(1)
    coeff = Fraction(1)
    modes: list[Mode] = []
    expect_term = True
    have_any = False
    while pos < len(text):
        if not text[pos:].strip():
            break
        m = _STATE_TOKEN.match(text, pos)
        if not m:
            raise StateParseError("unexpected character", text, pos)
        pos = m.end()
        if m.group("op"):
            op = m.group("op")
            if op == "*":
                continue
            if not expect_term:
                raise StateParseError("missing |0> before sign", text, m.start())
            if have_any and modes:
                raise StateParseError("misplaced sign", text, m.start())
            sign = -sign if op == "-" else sign
            continue
        if m.group("num"):
            coeff *= Fraction(m.group("num"))
            continue
        if m.group("mode"):
            fld, idx = m.group("mode"), int(m.group("idx"))
            k = int(m.group("pow") or 1)
            if not _is_creation(fld, -idx):
                raise StateParseError(f"{fld}({idx}) is not a creation mode", text, m.start())
            modes.extend([(fld, -idx)] * k)
            continue
        # vacuum closes a term
        key = tuple(sorted(modes))
        terms[key] = terms.get(key, Fraction(0)) + sign * coeff
        sign, coeff, modes = Fraction(1), Fraction(1), []
        have_any = True
        expect_term = True
    if modes or coeff != 1 or not have_any:
        raise StateParseError("state must end with |0>", text, len(text))
    return FreeFieldState(terms, K)


# ---------------------------------------------------------------------------
# the engine
# ---------------------------------------------------------------------------

def _mono_remove(mono: Monomial, mode: Mode) -> tuple[int, Monomial]:
    """Multiplicity of ``mode`` and the monomial with one copy removed."""
    k = mono.count(mode)
    if not k:
        return 0, mono
    lst = list(mono)
    lst.remove(mode)
    return k, tuple(lst)


def _apply_mode(fld: str, k: int, s: dict, K: Fraction) -> dict:
    """Apply the Fock operator fld_k (actual mode index k) to a term dict."""
    out: dict[Monomial, Fraction] = {}
    if _is_creation(fld, -k):
        for mono, c in s.items():
            key = tuple(sorted(mono + ((fld, -k),)))
            out[key] = out.get(key, Fraction(0)) + c
        return out
    if fld == "a":
        target, factor = ("b", k), Fraction(1)  # a_k acts as d/db_{-k}
    elif fld == "b":
        target, factor = ("a", k), Fraction(-1)  # b_k acts as -d/da_{-k}
    else:
        if k == 0:
            return {}
        target, factor = ("l", k), K * k
    if not factor:
        return {}
    for mono, c in s.items():
        mult, rest = _mono_remove(mono, target)
        if mult:
            out[rest] = out.get(rest, Fraction(0)) + c * mult * factor
    return {m: c for m, c in out.items() if c}


def _field_mode(fld: str, n: int) -> int:
    """Fock mode index of the field mode fld_(n)."""
    return n + 1 if fld == "b" else n


def _descendant_mode(mode: Mode) -> tuple[str, int]:
    """Creation mode fld_{-m} is the state of d^(p) fld with p = m - m0."""
    fld, m = mode
    base = 0 if fld == "b" else 1
    return fld, m - base


def _apply_gen_nth(mode: Mode, n: int, s: dict, K: Fraction) -> dict:
    """Apply (d^(p) X)_(n) where X is the generator field of ``mode``."""
    fld, p = _descendant_mode(mode)
    c = _gbinom(n, p) * (-1) ** p
    if not c:
        return {}
    res = _apply_mode(fld, _field_mode(fld, n - p), s, K)
    return {m: v * c for m, v in res.items()}


def _weight_of(s: dict) -> int:
    return max((sum(m for _, m in mono) for mono in s), default=0)


def _min_weight(s: dict) -> int:
    return min((sum(m for _, m in mono) for mono in s), default=0)


def _add_into(acc: dict, s: dict, c=Fraction(1)) -> None:
    for mono, v in s.items():
        acc[mono] = acc.get(mono, Fraction(0)) + v * c


def _nth_mono(u: Monomial, n: int, v: dict, K: Fraction) -> dict:
    """u_(n) v for a single monomial state u."""
    if not v:
        return {}
    return dict(_nth_mono_cached(u, n, tuple(sorted(v.items())), K))


@lru_cache(maxsize=200_000)
def _nth_mono_cached(u: Monomial, n: int, v_items: tuple, K: Fraction) -> tuple:
    v = dict(v_items)
    return tuple(_nth_mono_impl(u, n, v, K).items())


def _nth_mono_impl(u: Monomial, n: int, v: dict, K: Fraction) -> dict:
    if not u:
        return dict(v) if n == -1 else {}
    X, w = u[0], u[1:]
    wt_X = X[1]
    wt_w = sum(m for _, m in w)
    wt_v = _weight_of(v)
    acc: dict[Monomial, Fraction] = {}
    # sum_j X_(-1-j) w_(n+j) v: w_(N) v vanishes once N >= wt_w + wt_v
    j = 0
    while n + j <= wt_w + wt_v - 1 or j == 0:
        inner = _nth_mono(w, n + j, v, K)
        if inner:
            _add_into(acc, _apply_gen_nth(X, -1 - j, inner, K))
        j += 1
        if n + j > wt_w + wt_v - 1:
            break
    # sum_j w_(n-1-j) X_(j) v: X_(j) v vanishes once j >= wt_X + wt_v
    for j in range(0, wt_X + wt_v + 1):
        inner = _apply_gen_nth(X, j, v, K)
        if inner:
            _add_into(acc, _nth_mono(w, n - 1 - j, inner, K))
    return {m: c for m, c in acc.items() if c}


def _nth(u: FreeFieldState, v: FreeFieldState, n: int) -> FreeFieldState:
    """Uncapped n-th product used internally (e.g. by the Borcherds suite)."""
    u._check(v)
    acc: dict[Monomial, Fraction] = {}
    for mono, c in u.terms.items():
        _add_into(acc, _nth_mono(mono, n, v.terms, u.K), c)
    return FreeFieldState(acc, u.K)


def _translate(u: FreeFieldState) -> FreeFieldState:
    acc: dict[Monomial, Fraction] = {}
    for mono, c in u.terms.items():
        for i, (fld, m) in enumerate(mono):
            factor = m + 1 if fld == "b" else m
            new = mono[:i] + ((fld, m + 1),) + mono[i + 1:]
            key = tuple(sorted(new))
            acc[key] = acc.get(key, Fraction(0)) + c * factor
    return FreeFieldState(acc, u.K)


def nth_product(u: FreeFieldState, v: FreeFieldState, n: int) -> FreeFieldState:
    """u_(n) v, restricted to states and results of conformal weight <= 2."""
    if n < -2:
        raise WeightOverflow(f"mode n = {n} is below the supported range n >= -2")
    for s in (u, v):
        if s.weight > WEIGHT_CAP:
            raise WeightOverflow(f"input weight {s.weight} exceeds {WEIGHT_CAP}")
    if u.terms and v.terms and u.weight + v.weight - n - 1 > WEIGHT_CAP:
        raise WeightOverflow(f"result weight {u.weight + v.weight - n - 1} exceeds {WEIGHT_CAP}")
    return _nth(u, v, n)


def translation(u: FreeFieldState) -> FreeFieldState:
    """The translation operator; raises weight by one."""
    if u.weight > WEIGHT_CAP - 1:
        raise WeightOverflow(f"translation of a weight {u.weight} state leaves the window")
    return _translate(u)


# ---------------------------------------------------------------------------
# sl2 and Sugawara
# ---------------------------------------------------------------------------

SL2_BRACKET = {
    ("e", "f"): {"h": 1},
    ("f", "e"): {"h": -1},
    ("h", "e"): {"e": 2},
    ("e", "h"): {"e": -2},
    ("h", "f"): {"f": -2},
    ("f", "h"): {"f": 2},
}
SL2_FORM = {("e", "f"): 1, ("f", "e"): 1, ("h", "h"): 2}


@dataclass
class Sl2Report:
    """Outcome of checking the affine sl2 relations; ``kappa`` is the level read off e_(1)f."""

    kappa: Fraction | None
    mismatches: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches and self.kappa is not None


def wakimoto_states(K) -> dict[str, FreeFieldState]:
    """Free-field images of e, h, f for the deformed twisted chart with <l|l> = K."""
    K = Fraction(K)
    return {
        "e": parse_state("a(-1)|0>", K),
        "h": parse_state("-2*a(-1)b(0)|0> + l(-1)|0>", K),
        "f": parse_state("-a(-1)b(0)^2|0> + b(0)l(-1)|0>", K) + parse_state("b(-1)|0>", K) * (K / 2 - 2),
    }


def untwisted_states() -> dict[str, FreeFieldState]:
    """The images without Heisenberg terms (plain CDO on the big cell)."""
    return {
        "e": parse_state("a(-1)|0>"),
        "h": parse_state("-2*a(-1)b(0)|0>"),
        "f": parse_state("-a(-1)b(0)^2|0> - 2*b(-1)|0>"),
    }


def check_affine_sl2(states: Mapping[str, FreeFieldState], K=None) -> Sl2Report:
    """Check x_(0)y = [x,y] and x_(1)y = kappa <x|y> |0> for x, y in {e, h, f}."""
    if K is not None:
        states = {k: v.with_K(K) for k, v in states.items()}
    names = ("e", "h", "f")
    for nm in names:
        if states[nm].weights() - {1}:
            raise ValueError(f"state {nm} must have weight exactly 1")
    mism = []
    kappa = nth_product(states["e"], states["f"], 1).scalar()
    if kappa is None:
        mism.append(f"e_(1)f = {nth_product(states['e'], states['f'], 1)} is not a multiple of |0>")
    Kv = states["e"].K
    for x in names:
        for y in names:
            zero = nth_product(states[x], states[y], 0)
            expect = FreeFieldState.zero(Kv)
            for z, c in SL2_BRACKET.get((x, y), {}).items():
                expect = expect + states[z] * c
            if zero != expect:
                mism.append(f"{x}_(0){y} = {zero}, expected {expect}")
            one = nth_product(states[x], states[y], 1)
            if kappa is not None:
                target = FreeFieldState.vacuum(Kv) * (kappa * SL2_FORM.get((x, y), 0))
                if one != target:
                    mism.append(f"{x}_(1){y} = {one}, expected {target}")
    return Sl2Report(kappa, mism)


def sugawara_raw(states: Mapping[str, FreeFieldState]) -> FreeFieldState:
    e, f, h = states["e"], states["f"], states["h"]
    return nth_product(e, f, -1) + nth_product(f, e, -1) + nth_product(h, h, -1) * Fraction(1, 2)


def sugawara_image(states: Mapping[str, FreeFieldState] | None = None) -> FreeFieldState:
    """e_(-1)f + f_(-1)e + 1/2 h_(-1)h; must land in the Heisenberg subalgebra."""
    states = states if states is not None else wakimoto_states(0)
    T = sugawara_raw(states)
    if T.uses_beta_gamma():
        raise ResultNotInHeisenberg(T)
    return T


def weight_one_basis(K=0) -> list[FreeFieldState]:
    """Fixed basis of low-weight states used by the Borcherds spot suite."""
    texts = ["|0>", "b(0)|0>", "b(0)^2|0>", "a(-1)|0>", "b(-1)|0>", "l(-1)|0>", "a(-1)b(0)|0>", "b(0)l(-1)|0>"]
    return [parse_state(t, K) for t in texts]


def borcherds_sides(u, v, w, m: int, n: int, k: int) -> tuple[FreeFieldState, FreeFieldState]:
    """Both sides of the Borcherds identity for modes (m, n, k)."""
    K = u.K
    bound = u.weight + v.weight + w.weight + abs(m) + abs(n) + abs(k) + 3
    lhs = FreeFieldState.zero(K)
    for j in range(bound):
        c = _gbinom(m, j)
        if c:
            lhs = lhs + _nth(_nth(u, v, n + j), w, m + k - j) * c
    rhs = FreeFieldState.zero(K)
    for j in range(bound):
        c = _gbinom(n, j) * (-1) ** j
        if not c:
            continue
        rhs = rhs + _nth(u, _nth(v, w, k + j), m + n - j) * c
        rhs = rhs - _nth(v, _nth(u, w, m + j), n + k - j) * (c * (-1) ** n)
    return lhs, rhs


def sugawara_expected() -> FreeFieldState:
    return parse_state("1/2*l(-1)^2|0> - l(-2)|0>")


def binom(m: int, p: int) -> Fraction:
    return _gbinom(m, p)


__all__ = [
    "FreeFieldState",
    "HeisenbergData",
    "ResultNotInHeisenberg",
    "Sl2Report",
    "WeightOverflow",
    "binom",
    "borcherds_sides",
    "check_affine_sl2",
    "format_state",
    "nth_product",
    "parse_state",
    "sugawara_image",
    "translation",
    "untwisted_states",
    "wakimoto_states",
    "weight_one_basis",
]
