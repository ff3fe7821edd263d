"""Exact rational linear systems, delegated to sympy's DomainMatrix over QQ."""

from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Mapping, Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix


def _to_fraction(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


class LinearSystem:
    """Rows are sparse maps unknown -> coefficient, with a rational right-hand side."""

    def __init__(self) -> None:
        self.unknowns: list[Hashable] = []
        self._index: dict[Hashable, int] = {}
        self.rows: list[dict[int, Fraction]] = []
        self.rhs: list[Fraction] = []

    def unknown(self, key: Hashable) -> int:
        if key not in self._index:
            self._index[key] = len(self.unknowns)
            self.unknowns.append(key)
        return self._index[key]

    def add_equation(self, coeffs: Mapping[Hashable, Fraction], rhs=0) -> None:
        row: dict[int, Fraction] = {}
        for k, c in coeffs.items():
            if c:
                j = self.unknown(k)
                row[j] = row.get(j, Fraction(0)) + Fraction(c)
        row = {j: c for j, c in row.items() if c}
        if not row and not rhs:
            return
        self.rows.append(row)
        self.rhs.append(Fraction(rhs))

    def _matrix(self, augmented: bool) -> DomainMatrix:
        ncols = len(self.unknowns) + (1 if augmented else 0)
        dense = []
        for row, b in zip(self.rows, self.rhs):
            r = [QQ(0)] * ncols
            for j, c in row.items():
                r[j] = QQ(c.numerator, c.denominator)
            if augmented:
                r[-1] = QQ(b.numerator, b.denominator)
            dense.append(r)
        return DomainMatrix(dense, (len(dense), ncols), QQ)

    def solve(self) -> dict[Hashable, Fraction] | None:
        """One particular solution (free unknowns set to 0), or None if inconsistent."""
        n = len(self.unknowns)
        if not self.rows:
            return {k: Fraction(0) for k in self.unknowns}
        rref, pivots = self._matrix(True).rref()
        if n in pivots:
            return None
        dense = rref.to_list()
        sol = [Fraction(0)] * n
        for r, p in enumerate(pivots):
            sol[p] = _to_fraction(dense[r][n])
        return {k: sol[i] for i, k in enumerate(self.unknowns)}

    def nullspace(self) -> list[dict[Hashable, Fraction]]:
        """Basis of the homogeneous solution space, in reduced form."""
        n = len(self.unknowns)
        if n == 0:
            return []
        if not self.rows:
            return [{k: Fraction(int(i == j)) for j, k in enumerate(self.unknowns)} for i in range(n)]
        ns = self._matrix(False).nullspace().to_list()
        return [{k: _to_fraction(v) for k, v in zip(self.unknowns, vec)} for vec in ns]


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    if not rows:
        return 0
    dm = DomainMatrix([[QQ(c.numerator, c.denominator) for c in r] for r in rows], (len(rows), len(rows[0])), QQ)
    return dm.rank()
