"""Bounded Laurent-window searches for primitives.

The de Rham differential preserves the multidegree in which x^e dx_I has
degree e + sum_{i in I} 1_i, so the search for beta with d(beta) = target
splits into one tiny linear system per multidegree present in the target.
"""

from __future__ import annotations

from itertools import combinations

from .forms import DiffForm, sort_index
from .linsolve import LinearSystem
from .ring import ChartRing, LaurentPoly


def in_window(ring: ChartRing, exp, window: tuple[int, int]) -> bool:
    lo, hi = window
    for i, e in enumerate(exp):
        low = lo if ring.is_inverted(i) else 0
        if not low <= e <= hi:
            return False
    return True


def solve_d_in_window(target: DiffForm, window: tuple[int, int] = (-6, 6)) -> DiffForm | None:
    """beta with d(beta) = target and every exponent inside ``window``, or None.

    Non-inverted variables only take exponents in [0, window[1]].
    """
    ring = target.ring
    n = ring.ngens
    k = target.degree - 1
    if k < 0:
        raise ValueError("target must have positive degree")
    blocks: dict[tuple[int, ...], dict] = {}
    for J, f in target.terms.items():
        for e, c in f.terms.items():
            w = list(e)
            for j in J:
                w[j] += 1
            blocks.setdefault(tuple(w), {})[J] = c
    result: dict = {}
    for w, rhs in blocks.items():
        system = LinearSystem()
        eqs: dict = {}
        for I in combinations(range(n), k):
            e = list(w)
            for i in I:
                e[i] -= 1
            if not in_window(ring, e, window):
                continue
            for j in range(n):
                if j in I or e[j] == 0:
                    continue
                sign, J = sort_index((j,) + I)
                row = eqs.setdefault(J, {})
                row[I] = row.get(I, 0) + sign * e[j]
        for J in set(eqs) | set(rhs):
            system.add_equation(eqs.get(J, {}), rhs.get(J, 0))
        sol = system.solve()
        if sol is None:
            return None
        for I, c in sol.items():
            if c:
                e = list(w)
                for i in I:
                    e[i] -= 1
                result.setdefault(I, {})[tuple(e)] = c
    return DiffForm(ring, k, {I: LaurentPoly(ring, terms) for I, terms in result.items()})
