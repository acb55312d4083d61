"""Exact Gaussian elimination on sparse vectors over Q."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, Hashable, List, Tuple


class Echelon:
    """Incremental exact elimination over sparse vectors keyed by monomials."""

    def __init__(self, key: Callable = None):
        self.key = key if key is not None else (lambda k: k)
        self.rows: List[Tuple[Hashable, Dict[Hashable, Fraction], Dict[Hashable, Fraction]]] = []

    def _reduce(self, vec, comb):
        vec = dict(vec)
        comb = dict(comb)
        for pivot, row, rcomb in self.rows:
            c = vec.get(pivot)
            if not c:
                continue
            for m, v in row.items():
                s = vec.get(m, 0) - c * v
                if s:
                    vec[m] = s
                else:
                    vec.pop(m, None)
            for k, v in rcomb.items():
                s = comb.get(k, 0) - c * v
                if s:
                    comb[k] = s
                else:
                    comb.pop(k, None)
        return vec, comb

    def add(self, vec, index):
        """Insert a vector; returns a vanishing combination if it is dependent."""
        vec, comb = self._reduce(vec, {index: Fraction(1)})
        if not vec:
            return comb
        pivot = max(vec, key=self.key)
        c = vec[pivot]
        vec = {m: v / c for m, v in vec.items()}
        comb = {k: v / c for k, v in comb.items()}
        # keep earlier rows reduced with respect to the new pivot
        new_rows = []
        for p, row, rcomb in self.rows:
            f = row.get(pivot)
            if f:
                row = {m: row.get(m, 0) - f * vec.get(m, 0) for m in set(row) | set(vec)}
                row = {m: v for m, v in row.items() if v}
                rcomb = {k: rcomb.get(k, 0) - f * comb.get(k, 0) for k in set(rcomb) | set(comb)}
                rcomb = {k: v for k, v in rcomb.items() if v}
            new_rows.append((p, row, rcomb))
        new_rows.append((pivot, vec, comb))
        self.rows = new_rows
        return None

    def solve(self, vec):
        """Coefficients expressing ``vec`` in the inserted vectors, plus the residual."""
        residual, comb = self._reduce(vec, {})
        return {k: -v for k, v in comb.items()}, residual
