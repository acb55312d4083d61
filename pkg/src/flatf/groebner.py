"""Buchberger's algorithm with cofactor tracking and normal-form division.

Every basis element carries its expression over the *original* generators,
so any reduction can be rewritten as ``p = remainder + sum q_i * gen_i``.
That is what lets the quotient module turn an ideal-membership witness into
an element ``sum q_i eta_i`` of degree -1.
"""

from __future__ import annotations

import heapq
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .poly import (DEFAULT_ORDER, Monomial, MonomialOrder, Poly, format_fraction, mono_div,
                   mono_divides, mono_lcm)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GBasisWithCofactors:
    generators: Tuple[Poly, ...]
    gb: Tuple[Poly, ...]
    cofactors: Tuple[Tuple[Poly, ...], ...]
    order: MonomialOrder = DEFAULT_ORDER
    leading: Tuple[Monomial, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not self.leading:
            object.__setattr__(self, "leading",
                               tuple(g.leading_monomial(self.order) for g in self.gb))

    @property
    def nvars(self) -> int:
        return self.generators[0].nvars

    def check_cofactors(self) -> bool:
        """True when every cofactor row reproduces its basis element."""
        for g, row in zip(self.gb, self.cofactors):
            total = Poly.zero(self.nvars)
            for c, f in zip(row, self.generators):
                total = total + c * f
            if total != g:
                return False
        return True

    def is_zero_dimensional(self) -> bool:
        """Every variable has a pure power among the leading monomials."""
        n = self.nvars
        return all(any(m[i] > 0 and sum(m) == m[i] for m in self.leading) for i in range(n))

    def pure_power_bounds(self) -> Optional[List[int]]:
        if not self.is_zero_dimensional():
            return None
        return [min(m[i] for m in self.leading if m[i] > 0 and sum(m) == m[i])
                for i in range(self.nvars)]


@dataclass(frozen=True)
class ReductionOutcome:
    remainder: Poly
    cofactors: Tuple[Poly, ...]


# ----------------------------------------------------------------- division

def _neg_key(order: MonomialOrder, m: Monomial):
    return tuple(-k for k in order.key(m))


def _divide(terms: Dict[Monomial, Fraction], basis: Sequence[Poly], leading: Sequence[Monomial],
            order: MonomialOrder):
    """Full division of ``terms`` by ``basis``.

    Always cancels the largest remaining reducible term, using the first
    basis element whose leading monomial divides it.  Returns the remainder
    terms and per-element quotient term maps.
    """
    work = dict(terms)
    heap = [(_neg_key(order, m), m) for m in work]
    heapq.heapify(heap)
    remainder: Dict[Monomial, Fraction] = {}
    quotients: List[Dict[Monomial, Fraction]] = [{} for _ in basis]
    lcs = [g.terms[lm] for g, lm in zip(basis, leading)]
    while heap:
        _, m = heapq.heappop(heap)
        c = work.pop(m, None)
        if c is None:
            continue
        while heap and heap[0][1] == m:
            heapq.heappop(heap)
        for k, lm in enumerate(leading):
            if mono_divides(lm, m):
                factor = mono_div(m, lm)
                coef = c / lcs[k]
                q = quotients[k]
                q[factor] = q.get(factor, 0) + coef
                for gm, gc in basis[k].terms.items():
                    if gm == lm:
                        continue
                    t = tuple(a + b for a, b in zip(gm, factor))
                    v = work.get(t, 0) - coef * gc
                    if v:
                        if t not in work:
                            heapq.heappush(heap, (_neg_key(order, t), t))
                        work[t] = v
                    else:
                        work.pop(t, None)
                break
        else:
            remainder[m] = c
    return remainder, quotients


def _combine_cofactors(quotients, rows, nvars, ngens) -> Tuple[Poly, ...]:
    out = [Poly.zero(nvars) for _ in range(ngens)]
    for q, row in zip(quotients, rows):
        if not q:
            continue
        qp = Poly({m: c for m, c in q.items() if c}, nvars, _trusted=True)
        if not qp:
            continue
        for j, c in enumerate(row):
            if c:
                out[j] = out[j] + qp * c
    return tuple(out)


def reduce_full(p: Poly, basis: GBasisWithCofactors) -> ReductionOutcome:
    """Normal form of ``p`` together with cofactors over the original generators."""
    if p.nvars != basis.nvars:
        raise ValueError("variable count mismatch")
    rem, quots = _divide(p.terms, basis.gb, basis.leading, basis.order)
    cof = _combine_cofactors(quots, basis.cofactors, p.nvars, len(basis.generators))
    return ReductionOutcome(Poly(rem, p.nvars, _trusted=True), cof)


def normal_form(p: Poly, basis: GBasisWithCofactors) -> Poly:
    rem, _ = _divide(p.terms, basis.gb, basis.leading, basis.order)
    return Poly(rem, p.nvars, _trusted=True)


# --------------------------------------------------------------- Buchberger

class _Element:
    __slots__ = ("poly", "lm", "cof")

    def __init__(self, poly: Poly, cof: List[Poly], order: MonomialOrder):
        lc = poly.leading_coeff(order)
        inv = 1 / lc
        self.poly = poly.scale(inv)
        self.cof = [c.scale(inv) for c in cof]
        self.lm = self.poly.leading_monomial(order)


def _reduce_element(poly: Poly, cof: List[Poly], elems: List[_Element], order: MonomialOrder):
    rem, quots = _divide(poly.terms, [e.poly for e in elems], [e.lm for e in elems], order)
    r = Poly(rem, poly.nvars, _trusted=True)
    sub = _combine_cofactors(quots, [e.cof for e in elems], poly.nvars, len(cof))
    return r, [c - s for c, s in zip(cof, sub)]


def buchberger(generators: Sequence[Poly], order: MonomialOrder = DEFAULT_ORDER) -> GBasisWithCofactors:
    """Reduced Groebner basis of the ideal of ``generators`` with cofactor matrix."""
    gens = tuple(generators)
    if not gens:
        raise ValueError("need at least one generator")
    if any(not g for g in gens):
        raise ValueError("generators must be nonzero")
    n = gens[0].nvars
    ngens = len(gens)
    unit = [Poly.const(1, n)]
    zero = Poly.zero(n)

    elems: List[_Element] = []
    pairs = set()

    def add(poly, cof):
        e = _Element(poly, cof, order)
        idx = len(elems)
        elems.append(e)
        for i in range(idx):
            pairs.add((i, idx))

    for j, g in enumerate(gens):
        row = [unit[0] if k == j else zero for k in range(ngens)]
        r, row = _reduce_element(g, row, elems, order) if elems else (g, row)
        if r:
            add(r, row)

    while pairs:
        i, j = min(pairs, key=lambda p: (order.key(mono_lcm(elems[p[0]].lm, elems[p[1]].lm)), p))
        pairs.discard((i, j))
        ei, ej = elems[i], elems[j]
        lcm = mono_lcm(ei.lm, ej.lm)
        if all(a == 0 or b == 0 for a, b in zip(ei.lm, ej.lm)):
            continue  # coprime leading monomials
        if any(k not in (i, j) and mono_divides(elems[k].lm, lcm)
               and (min(i, k), max(i, k)) not in pairs and (min(j, k), max(j, k)) not in pairs
               for k in range(len(elems))):
            continue  # chain criterion
        fi, fj = mono_div(lcm, ei.lm), mono_div(lcm, ej.lm)
        s = ei.poly.mul_term(fi, 1) - ej.poly.mul_term(fj, 1)
        mi, mj = Poly.monomial(fi), Poly.monomial(fj)
        cof = [a * mi - b * mj for a, b in zip(ei.cof, ej.cof)]
        r, cof = _reduce_element(s, cof, elems, order)
        if r:
            add(r, cof)
    log.debug("buchberger: %d elements before minimalization", len(elems))

    # minimalize: drop elements whose leading monomial is a multiple of another's
    keep = []
    for idx, e in enumerate(elems):
        redundant = False
        for jdx, f in enumerate(elems):
            if jdx == idx or not mono_divides(f.lm, e.lm):
                continue
            if f.lm != e.lm or jdx < idx:
                redundant = True
                break
        if not redundant:
            keep.append(e)
    keep.sort(key=lambda e: order.key(e.lm))

    # interreduce tails
    reduced: List[_Element] = []
    for idx, e in enumerate(keep):
        others = reduced + keep[idx + 1:]
        lead = Poly({e.lm: e.poly.terms[e.lm]}, n, _trusted=True)
        tail = e.poly - lead
        r, cof = _reduce_element(tail, list(e.cof), others, order)
        # e.cof expresses the whole element; subtracting quotients keeps it exact
        reduced.append(_Element(lead + r, cof, order))
    gb = tuple(e.poly for e in reduced)
    rows = tuple(tuple(e.cof) for e in reduced)
    return GBasisWithCofactors(gens, gb, rows, order)


def is_groebner(basis: GBasisWithCofactors) -> bool:
    """Check that every S-polynomial of ``basis.gb`` reduces to zero."""
    for a, b in itertools.combinations(range(len(basis.gb)), 2):
        f, g = basis.gb[a], basis.gb[b]
        lf, lg = basis.leading[a], basis.leading[b]
        lcm = mono_lcm(lf, lg)
        s = f.mul_term(mono_div(lcm, lf), 1 / f.terms[lf]) - g.mul_term(mono_div(lcm, lg), 1 / g.terms[lg])
        if normal_form(s, basis):
            return False
    return True


def is_reduced(basis: GBasisWithCofactors) -> bool:
    for k, g in enumerate(basis.gb):
        if g.terms[basis.leading[k]] != 1:
            return False
        for j, lm in enumerate(basis.leading):
            if j != k and any(mono_divides(lm, m) for m in g.terms):
                return False
    return True


# -------------------------------------------------------- standard monomials

@dataclass(frozen=True)
class StandardMonomials:
    monomials: Tuple[Monomial, ...]
    complete: bool
    reason: str
    slices: Tuple[int, ...] = ()


def _is_standard(m: Monomial, leading) -> bool:
    return not any(mono_divides(lm, m) for lm in leading)


def _monomials_of_degree(n: int, d: int):
    if n == 0:
        if d == 0:
            yield ()
        return
    for first in range(d, -1, -1):
        for rest in _monomials_of_degree(n - 1, d - first):
            yield (first,) + rest


def _charge_slice(spec, target: int, neg_vars, pos_vars, n, d):
    """Monomials of total degree ``d`` in the negative-charge variables with the given charge."""
    for ya in _monomials_of_degree(len(neg_vars), d):
        needed = target - sum(spec.charges[v] * a for v, a in zip(neg_vars, ya))
        yield from _fill_positive(spec, ya, neg_vars, pos_vars, n, needed)


def _fill_positive(spec, ya, neg_vars, pos_vars, n, needed):
    if needed < 0:
        return
    weights = [spec.charges[v] for v in pos_vars]

    def rec(k, left):
        if k == len(pos_vars):
            if left == 0:
                yield ()
            return
        w = weights[k]
        for a in range(left // w, -1, -1):
            for rest in rec(k + 1, left - a * w):
                yield (a,) + rest

    for za in rec(0, needed):
        m = [0] * n
        for v, a in zip(neg_vars, ya):
            m[v] = a
        for v, a in zip(pos_vars, za):
            m[v] = a
        yield tuple(m)


def standard_monomials(basis: GBasisWithCofactors, charge_filter=None,
                       bound: Optional[int] = None) -> StandardMonomials:
    """Monomials not divisible by any leading monomial, in ascending order.

    ``charge_filter`` is ``(ChargeSpec, target)``.  Without a filter, ``bound``
    caps the total degree.  With a filter on a non-zero-dimensional ideal the
    charge-``target`` monomials are enumerated slice by slice, slice ``d``
    holding total degree ``d`` in the negative-charge variables; ``bound`` is
    the last slice examined.  The enumeration is declared complete once two
    consecutive slices contribute nothing.
    """
    if bound is not None and bound < 0:
        raise ValueError("bound must be non-negative")
    order = basis.order
    leading = basis.leading
    n = basis.nvars
    powers = basis.pure_power_bounds()

    def keep(m):
        if charge_filter is None:
            return True
        spec, target = charge_filter
        return spec.monomial_charge(m) == target

    if powers is not None:
        found = [m for m in itertools.product(*(range(p) for p in powers))
                 if _is_standard(m, leading) and keep(m)]
        complete = True
        reason = "zero-dimensional"
        if bound is not None and any(sum(m) > bound for m in found):
            found = [m for m in found if sum(m) <= bound]
            complete = False
            reason = "degree bound below the largest standard monomial"
        found.sort(key=order.key)
        return StandardMonomials(tuple(found), complete, reason)

    if charge_filter is None:
        if bound is None:
            raise ValueError("a degree bound is required for a non-zero-dimensional ideal")
        found = [m for d in range(bound + 1) for m in _monomials_of_degree(n, d)
                 if _is_standard(m, leading)]
        found.sort(key=order.key)
        return StandardMonomials(tuple(found), False, "possibly incomplete: ideal is not zero-dimensional")

    spec, target = charge_filter
    if len(spec.charges) != n:
        raise ValueError("charge spec length does not match variable count")
    neg_vars = [v for v in range(n) if spec.charges[v] < 0]
    pos_vars = [v for v in range(n) if spec.charges[v] > 0]
    limit = 64 if bound is None else bound
    found = []
    slices = []
    complete = False
    for d in range(limit + 1):
        got = [m for m in _charge_slice(spec, target, neg_vars, pos_vars, n, d)
               if _is_standard(m, leading)]
        slices.append(len(got))
        found.extend(got)
        if not neg_vars:
            complete = True
            break
        if d >= 1 and len(slices) >= 2 and slices[-1] == 0 and slices[-2] == 0:
            complete = True
            break
    found.sort(key=order.key)
    if complete:
        reason = "charge slices stabilized" if neg_vars else "finite charge piece"
    else:
        reason = "possibly incomplete: charge slices did not stabilize within the bound"
    return StandardMonomials(tuple(found), complete, reason, tuple(slices))


# ------------------------------------------------------------ serialization

def poly_to_json(p: Poly, order: MonomialOrder = DEFAULT_ORDER):
    return [[list(m), format_fraction(c)] for m, c in p.sorted_terms(order)]


def poly_from_json(data, nvars: int) -> Poly:
    return Poly({tuple(m): Fraction(c) for m, c in data}, nvars)


def gbasis_to_dict(basis: GBasisWithCofactors) -> dict:
    o = basis.order
    return {
        "nvars": basis.nvars,
        "order": o.to_dict(),
        "generators": [poly_to_json(g, o) for g in basis.generators],
        "gb": [poly_to_json(g, o) for g in basis.gb],
        "cofactors": [[poly_to_json(c, o) for c in row] for row in basis.cofactors],
    }


def gbasis_from_dict(d: dict) -> GBasisWithCofactors:
    """Rebuild a basis and verify its cofactor identities."""
    n = d["nvars"]
    order = MonomialOrder.from_dict(d["order"])
    basis = GBasisWithCofactors(
        tuple(poly_from_json(g, n) for g in d["generators"]),
        tuple(poly_from_json(g, n) for g in d["gb"]),
        tuple(tuple(poly_from_json(c, n) for c in row) for row in d["cofactors"]),
        order,
    )
    if not basis.check_cofactors():
        raise ValueError("cached Groebner basis fails the cofactor reconstruction identity")
    return basis
