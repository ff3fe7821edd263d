"""Deterministic text grammar for polynomials and forms.

A form is a signed sum of terms.  Each term is an optional ``*``-joined
monomial (rational coefficient such as ``3/2`` and factors ``x^k``, with
negative ``k`` allowed on inverted variables) followed by an optional wedge
word such as ``dx^dy``::

    3/2*x^2*y^-1 dx^dy - x dz + 4

Terms print in basis order, then by descending graded-lex monomial order.
A coefficient of 1 is omitted and the zero form prints as ``0``.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .forms import DiffForm, sort_index
from .ring import ChartRing, LaurentPoly, _grlex_key


class ParseError(ValueError):
    """Malformed polynomial or form text; carries a 1-based line and column."""

    def __init__(self, message: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        self.line, self.column = line, col
        super().__init__(f"{message} at line {line}, column {col}: {text!r}")


def _fmt_frac(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _monomial_body(ring: ChartRing, exp) -> str:
    parts = []
    for v, e in zip(ring.variables, exp):
        if e == 1:
            parts.append(v)
        elif e:
            parts.append(f"{v}^{e}")
    return "*".join(parts)


def _term_strings(ring: ChartRing, poly: LaurentPoly, basis: str) -> list[tuple[bool, str]]:
    out = []
    for exp, c in sorted(poly.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True):
        body = _monomial_body(ring, exp)
        mag = abs(c)
        if body:
            s = body if mag == 1 else f"{_fmt_frac(mag)}*{body}"
        else:
            s = "" if (mag == 1 and basis) else _fmt_frac(mag)
        if basis:
            s = f"{s} {basis}" if s else basis
        out.append((c < 0, s))
    return out


def _join(pieces: list[tuple[bool, str]]) -> str:
    if not pieces:
        return "0"
    neg, s = pieces[0]
    text = ("-" if neg else "") + s
    for neg, s in pieces[1:]:
        text += (" - " if neg else " + ") + s
    return text


def format_poly(p: LaurentPoly) -> str:
    return _join(_term_strings(p.ring, p, ""))


def format_form(w: DiffForm) -> str:
    pieces = []
    for idx, f in w.items():
        basis = "^".join("d" + w.ring.variables[i] for i in idx)
        pieces.extend(_term_strings(w.ring, f, basis))
    return _join(pieces)


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^]))")


def _tokenize(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError("unexpected character", text, pos)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, ring: ChartRing, text: str):
        self.ring = ring
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def err(self, msg: str, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.text, tok[2])

    def is_diff(self, tok) -> bool:
        return tok[0] == "id" and tok[1].startswith("d") and tok[1][1:] in self.ring.variables

    def signed_int(self) -> int:
        sign = 1
        if self.peek()[0] == "op" and self.peek()[1] in "+-":
            sign = -1 if self.take()[1] == "-" else 1
        tok = self.take()
        if tok[0] != "num" or "/" in tok[1]:
            self.err("expected integer exponent", tok)
        return sign * int(tok[1])

    def term(self):
        """Returns (coefficient, exponent vector, wedge word)."""
        n = self.ring.ngens
        coeff = Fraction(1)
        exp = [0] * n
        word: list[int] = []
        seen_factor = False
        while True:
            tok = self.peek()
            if tok[0] == "num":
                self.take()
                coeff *= Fraction(tok[1])
            elif tok[0] == "id" and self.is_diff(tok):
                break
            elif tok[0] == "id":
                if tok[1] not in self.ring.variables:
                    self.err(f"unknown variable {tok[1]!r}", tok)
                self.take()
                power = 1
                if self.peek() == ("op", "^", self.peek()[2]):
                    self.take()
                    power = self.signed_int()
                exp[self.ring.index(tok[1])] += power
            else:
                if not seen_factor:
                    self.err("expected a term", tok)
                break
            seen_factor = True
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "*":
                self.take()
                continue
            if nxt[0] in ("num", "id") and not self.is_diff(nxt):
                self.err("missing '*' between factors", nxt)
            break
        if self.is_diff(self.peek()):
            while True:
                tok = self.take()
                if not self.is_diff(tok):
                    self.err("expected a differential such as dx", tok)
                word.append(self.ring.index(tok[1][1:]))
                nxt = self.peek()
                if nxt[0] == "op" and nxt[1] == "^":
                    self.take()
                    continue
                break
        if not seen_factor and not word:
            self.err("expected a term")
        return coeff, tuple(exp), word

    def expression(self):
        terms = []
        sign = 1
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            sign = -1 if tok[1] == "-" else 1
        while True:
            c, e, w = self.term()
            terms.append((sign * c, e, w, self.toks[self.i - 1][2]))
            tok = self.peek()
            if tok[0] == "end":
                break
            if tok[0] == "op" and tok[1] in "+-":
                self.take()
                sign = -1 if tok[1] == "-" else 1
                continue
            self.err("expected '+' or '-'", tok)
        return terms


def parse_form(ring: ChartRing, text: str, degree: int | None = None) -> DiffForm:
    """Parse a form; ``degree`` is required only to type the literal ``0``."""
    if text.strip() == "0":
        if degree is None:
            raise ParseError("degree of the zero form is ambiguous", text, 0)
        return DiffForm.zero(ring, degree)
    p = _Parser(ring, text)
    terms = p.expression()
    degs = {len(w) for _, _, w, _ in terms}
    if len(degs) != 1:
        raise ParseError("terms of mixed degree", text, 0)
    (deg,) = degs
    if degree is not None and deg != degree:
        raise ParseError(f"expected a {degree}-form, found degree {deg}", text, 0)
    words = []
    for c, e, w, pos in terms:
        try:
            mono = ring.monomial(e, c)
        except ValueError as exc:
            raise ParseError(str(exc), text, pos) from None
        if len(set(w)) != len(w):
            continue
        words.append((w, mono))
    return DiffForm.from_words(ring, deg, words)


def parse_poly(ring: ChartRing, text: str) -> LaurentPoly:
    return parse_form(ring, text, 0).as_function()


__all__ = ["ParseError", "format_form", "format_poly", "parse_form", "parse_poly", "sort_index"]
