"""Truncated power series in the flat coordinates t^1..t^d.

Coefficients may be Fractions, Polys or PolyVectors; anything supporting
``+``, unary ``-`` and truthiness for the zero test.  Terms of total
t-degree above ``order`` are dropped.
"""

from __future__ import annotations

import itertools
import math
import operator
from fractions import Fraction
from typing import Callable, Dict, Iterator, Tuple

Exps = Tuple[int, ...]


def exponent_vectors(dim: int, order: int) -> Iterator[Exps]:
    """All exponent vectors of total degree <= order, by degree then lexicographically."""
    for d in range(order + 1):
        for combo in itertools.combinations_with_replacement(range(dim), d):
            e = [0] * dim
            for k in combo:
                e[k] += 1
            yield tuple(e)


def to_multiset(e: Exps) -> Tuple[int, ...]:
    return tuple(k for k, n in enumerate(e) for _ in range(n))


def factorial_weight(e: Exps) -> int:
    """prod_k e_k!, the multiplicity correction between t^alpha/m! sums and monomials."""
    return math.prod(math.factorial(n) for n in e)


class TruncatedSeries:
    __slots__ = ("dim", "order", "coeffs")

    def __init__(self, dim: int, order: int, coeffs: Dict[Exps, object] = None):
        self.dim = dim
        self.order = order
        self.coeffs = {e: c for e, c in (coeffs or {}).items() if c and sum(e) <= order}

    def __getitem__(self, e: Exps):
        return self.coeffs.get(tuple(e))

    def items(self):
        return self.coeffs.items()

    def _compatible(self, other: "TruncatedSeries"):
        if self.dim != other.dim:
            raise ValueError("series in different coordinate counts")
        return min(self.order, other.order)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        order = self._compatible(other)
        out = {e: c for e, c in self.coeffs.items() if sum(e) <= order}
        for e, c in other.coeffs.items():
            if sum(e) > order:
                continue
            s = out[e] + c if e in out else c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return TruncatedSeries(self.dim, order, out)

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(self.dim, self.order, {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + (-other)

    def mul(self, other: "TruncatedSeries", op: Callable = operator.mul) -> "TruncatedSeries":
        """Cauchy product with coefficient product ``op(a, b)``."""
        order = self._compatible(other)
        out: Dict[Exps, object] = {}
        for e1, c1 in self.coeffs.items():
            d1 = sum(e1)
            if d1 > order:
                continue
            for e2, c2 in other.coeffs.items():
                if d1 + sum(e2) > order:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                term = op(c1, c2)
                if not term:
                    continue
                if e in out:
                    s = out[e] + term
                    if s:
                        out[e] = s
                    else:
                        del out[e]
                else:
                    out[e] = term
        return TruncatedSeries(self.dim, order, out)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self.mul(other)

    def map(self, fn: Callable) -> "TruncatedSeries":
        return TruncatedSeries(self.dim, self.order, {e: fn(c) for e, c in self.coeffs.items()})

    def derivative(self, k: int) -> "TruncatedSeries":
        """d/dt^k; the result is known to one order less."""
        out = {}
        for e, c in self.coeffs.items():
            if e[k]:
                f = list(e)
                f[k] -= 1
                out[tuple(f)] = _scale(c, e[k])
        return TruncatedSeries(self.dim, self.order - 1, out)

    def is_zero(self) -> bool:
        return not self.coeffs

    def nonzero_orders(self):
        return sorted({sum(e) for e in self.coeffs})

    def truncate(self, order: int) -> "TruncatedSeries":
        return TruncatedSeries(self.dim, min(order, self.order), self.coeffs)


def _scale(c, k):
    if isinstance(c, (int, Fraction)):
        return c * k
    return c.scale(k)
