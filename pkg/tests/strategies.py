"""Hypothesis strategies for polynomials and forms on small charts."""

from fractions import Fraction

from hypothesis import strategies as st

from algebroid_forge.exact.forms import DiffForm, all_indices
from algebroid_forge.exact.ring import ChartRing

POLY3 = ChartRing("P3", ("x", "y", "z"))
LAUR3 = ChartRing("L3", ("x", "y", "z"), frozenset({"x", "z"}))
POLY4 = ChartRing("P4", ("x", "y", "z", "w"))

coefficients = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def exponents(ring: ChartRing, top: int = 2):
    return st.tuples(*[
        st.integers(-top if ring.is_inverted(i) else 0, top) for i in range(ring.ngens)
    ])


@st.composite
def polys(draw, ring: ChartRing = LAUR3, max_terms: int = 3):
    terms = draw(st.lists(st.tuples(exponents(ring), coefficients), max_size=max_terms))
    out = ring.zero()
    for e, c in terms:
        out = out + ring.monomial(e, c)
    return out


@st.composite
def forms(draw, ring: ChartRing = LAUR3, degree: int = 1, max_terms: int = 2):
    idx = all_indices(ring.ngens, degree)
    words = []
    for _ in range(draw(st.integers(0, max_terms))):
        words.append((draw(st.sampled_from(idx)), draw(polys(ring, 2))))
    return DiffForm.from_words(ring, degree, words)


def closed3(ring: ChartRing = POLY4):
    """Exact (hence closed) 3-forms, built as d of a random 2-form."""
    return forms(ring, 2, 2).map(lambda b: b.d())


__all__ = ["POLY3", "LAUR3", "POLY4", "Fraction", "closed3", "coefficients", "exponents", "forms", "polys"]
