"""Exact checks of the dGBV axioms and of the flat F-manifold equations.

Every decision here is a literal zero test on an exact residual.  Failures
carry a counterexample payload (inputs and the nonzero residual, as text)
that can be reproduced from the reported seed.
"""

from __future__ import annotations

import itertools
import json
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Optional, Sequence, Tuple

from .engine import Engine, FlatFStructure, LevelError, MultiIndex, multi_index
from .groebner import _monomials_of_degree, buchberger, normal_form
from .linalg import Echelon
from .poly import Poly, format_fraction, format_poly
from .polyvector import (ChargeSpec, PolyVector, apply_Delta, apply_delta_S, charge_check,
                         format_polyvector, odd_partial)
from .quotient import Basis
from .series import TruncatedSeries, exponent_vectors, factorial_weight, to_multiset


@dataclass
class Report:
    name: str
    passed: bool
    counterexample: Optional[dict] = None
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"check": self.name, "passed": self.passed,
                "counterexample": self.counterexample, "stats": self.stats}

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = ""
        if self.counterexample:
            extra = "  " + json.dumps(self.counterexample, sort_keys=True)
        return f"{status}  {self.name}{extra}"


# ------------------------------------------------------------ dGBV axioms

def _charge_zero_candidates(nvars: int, charges: Optional[ChargeSpec], max_degree: int):
    """(key, monomial) pairs, bucketed by eta count, usable in random elements."""
    monos = [m for d in range(max_degree + 1) for m in _monomials_of_degree(nvars, d)]
    buckets: Dict[int, list] = {}
    for k in range(nvars + 1):
        for key in itertools.combinations(range(nvars), k):
            for m in monos:
                if charges is None or charges.term_charge(m, key) == 0:
                    buckets.setdefault(k, []).append((key, m))
    return buckets


def random_polyvector(rng: random.Random, nvars: int, buckets, eta_count: int, max_terms: int) -> PolyVector:
    pool = buckets.get(eta_count) or buckets[0]
    comps: Dict[tuple, Dict[tuple, Fraction]] = {}
    for _ in range(rng.randint(1, max_terms)):
        key, m = rng.choice(pool)
        c = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
        comps.setdefault(key, {})
        comps[key][m] = comps[key].get(m, 0) + c
    return PolyVector({k: Poly(v, nvars) for k, v in comps.items()}, nvars)


def check_dgbv_axioms(S: Poly, charges: Optional[ChargeSpec] = None, trials: int = 100, seed: int = 0,
                      *, max_degree: int = 3, max_terms: int = 4, names: Optional[Sequence[str]] = None,
                      delta: Optional[Callable] = None, Delta: Optional[Callable] = None) -> Report:
    """Random exact tests of delta_S^2 = Delta^2 = (delta_S + Delta)^2 = 0, Leibniz and the bracket laws.

    ``delta``/``Delta`` override the operators; used for negative controls.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    n = S.nvars
    partials = [S.partial(i) for i in range(n)]
    d = delta or (lambda a: apply_delta_S(S, a, partials))
    D = Delta or apply_Delta

    def bracket(a, b):
        sign = -1 if a.degree() & 1 else 1
        return D(a * b) - D(a) * b - (a * D(b)).scale(sign)

    rng = random.Random(seed)
    buckets = _charge_zero_candidates(n, charges, max_degree)
    fmt = lambda a: format_polyvector(a, names)
    counts = Counter()

    def fail(law, trial, inputs, residual):
        return Report("dgbv_axioms", False,
                      {"law": law, "trial": trial, "seed": seed,
                       "inputs": {k: fmt(v) for k, v in inputs.items()}, "residual": fmt(residual)},
                      {"trials": trials, "seed": seed, "checks": dict(counts)})

    for trial in range(trials):
        ks = [rng.randint(0, n) for _ in range(3)]
        a, b, c = (random_polyvector(rng, n, buckets, k, max_terms) for k in ks)
        da, db = a.degree(), b.degree()

        laws = [
            ("delta_S^2 = 0", {"a": a}, lambda: d(d(a))),
            ("Delta^2 = 0", {"a": a}, lambda: D(D(a))),
            ("(delta_S + Delta)^2 = 0", {"a": a}, lambda: (d(d(a) + D(a)) + D(d(a) + D(a)))),
            ("delta_S Leibniz", {"a": a, "b": b},
             lambda: d(a * b) - d(a) * b - (a * d(b)).scale(-1 if da & 1 else 1)),
            ("supercommutativity", {"a": a, "b": b},
             lambda: a * b - (b * a).scale(-1 if (da * db) & 1 else 1)),
            ("bracket graded symmetry", {"a": a, "b": b},
             lambda: bracket(a, b) - bracket(b, a).scale(-1 if (da * db) & 1 else 1)),
            ("bracket graded Jacobi", {"a": a, "b": b, "c": c},
             lambda: bracket(a, bracket(b, c))
             - bracket(bracket(a, b), c).scale(-1 if (da + 1) & 1 else 1)
             - bracket(b, bracket(a, c)).scale(-1 if ((da + 1) * (db + 1)) & 1 else 1)),
            ("bracket Poisson-Leibniz", {"a": a, "b": b, "c": c},
             lambda: bracket(a, b * c) - bracket(a, b) * c
             - (b * bracket(a, c)).scale(-1 if ((da + 1) * db) & 1 else 1)),
        ]
        for law, inputs, residual_fn in laws:
            counts[law] += 1
            r = residual_fn()
            if r:
                return fail(law, trial, inputs, r)
        if charges is not None:
            counts["charge preservation"] += 1
            for op_name, op in (("delta_S", d), ("Delta", D)):
                out = op(a)
                if out and charge_check(out, charges) != charge_check(a, charges):
                    return fail(f"{op_name} preserves charge", trial, {"a": a}, out)
    return Report("dgbv_axioms", True, None, {"trials": trials, "seed": seed, "checks": dict(counts)})


# ----------------------------------------------------- flat-structure series

def _taylor_series(dim: int, order: int, fn) -> TruncatedSeries:
    """Series with coefficient fn(M) / M! at t^M, M a multiset of coordinates."""
    out = {}
    for e in exponent_vectors(dim, order):
        c = fn(to_multiset(e))
        if c is None or not c:
            continue
        w = factorial_weight(e)
        out[e] = c / w if isinstance(c, Fraction) else c.scale(Fraction(1, w))
    return TruncatedSeries(dim, order, out)


class WitnessError(ValueError):
    pass


def _correction(r: Poly, partials: Sequence[Poly], charges: Optional[ChargeSpec], extra_degree: int = 2):
    """Find mu = sum mu_i eta_i with delta_S(mu) = r and Delta(mu) = 0, or None."""
    n = r.nvars
    deg_r = r.total_degree()
    min_deg = min((p.total_degree() for p in partials if p), default=0)
    top = max(deg_r - min_deg, 0) + extra_degree
    monos = [m for dd in range(top + 1) for m in _monomials_of_degree(n, dd)]
    solver = Echelon(lambda k: (k[0],) + tuple(k[1]))
    for i, dS in enumerate(partials):
        if not dS:
            continue
        for m in monos:
            if charges is not None and charges.monomial_charge(m) != charges.charges[i]:
                continue
            vec = {}
            for pm, pc in dS.terms.items():
                key = (1, tuple(a + b for a, b in zip(pm, m)))
                vec[key] = vec.get(key, 0) + pc
            if m[i]:
                e = list(m)
                e[i] -= 1
                vec[(0, tuple(e))] = Fraction(m[i])
            solver.add({k: v for k, v in vec.items() if v}, (i, m))
    target = {(1, m): c for m, c in r.terms.items()}
    comb, residual = solver.solve(target)
    if residual:
        return None
    comps: Dict[int, Dict[tuple, Fraction]] = {}
    for (i, m), c in comb.items():
        if c:
            comps.setdefault(i, {})[m] = c
    return PolyVector({(i,): Poly(t, n) for i, t in comps.items()}, n)


def check_fqm11(structure: FlatFStructure, level: Optional[int] = None, *,
                repair: bool = True) -> Report:
    """Check both flat-structure equations as t-series through order level-2.

    The tables fix lambda only up to ker(delta_S); a valid Lambda may differ
    from the stored lambdas by Delta-closed terms.  With ``repair`` those
    corrections are solved for order by order and the equations are then
    checked literally against the corrected Lambda.
    """
    L = structure.level if level is None else level
    if L < 2:
        raise LevelError("level must be at least 2")
    if L > structure.level:
        raise LevelError(f"structure only computed through level {structure.level}, {L} requested")
    N = L - 2
    dim, n = structure.dim, structure.nvars
    S = structure.potential
    partials = [S.partial(i) for i in range(n)]
    names = structure.variables
    charges = ChargeSpec(structure.charges) if structure.charges else None
    gb = buchberger(partials)

    def u(M):
        return structure.u(M)

    grad = [_taylor_series(dim, N, lambda M, k=k: u(M + (k,))) for k in range(dim)]
    gamma = _taylor_series(dim, N, lambda M: u(M) if M else None)
    dgamma = [gamma.map(lambda p, i=i: p.partial(i)) for i in range(n)]
    exps = list(exponent_vectors(dim, N))
    corrected = 0
    pairs = 0
    for a, b in itertools.combinations_with_replacement(range(dim), 2):
        pairs += 1
        A = [_taylor_series(dim, N, lambda M, r=r: Fraction(structure.a(M + (a, b))[r])) for r in range(dim)]
        lhs = grad[a] * grad[b]
        for r in range(dim):
            lhs = lhs - A[r].mul(grad[r], lambda c, p: p.scale(c))
        # Lambda coefficients in increasing order; the twist term only sees lower orders
        lam_coeffs: Dict[tuple, PolyVector] = {}
        for e in exps:
            M = to_multiset(e)
            w = factorial_weight(e)
            lam = structure.lam(M + (a, b)).scale(Fraction(1, w))
            twist = Poly.zero(n)
            for e2, l2 in lam_coeffs.items():
                diff = tuple(x - y for x, y in zip(e, e2))
                if min(diff) < 0 or not any(diff):
                    continue
                for i in range(n):
                    g = dgamma[i][diff]
                    if g:
                        twist = twist + g * odd_partial(l2, i).poly_part()
            target = (lhs[e] or Poly.zero(n)) - twist
            r = target - apply_delta_S(S, lam, partials).poly_part()
            if r and repair:
                if normal_form(r, gb):
                    return _fqm_fail(structure, a, b, M, "eq1", r, names, "residual not in the Jacobian ideal",
                                     corrected, pairs)
                mu = _correction(r, partials, charges)
                if mu is None:
                    return _fqm_fail(structure, a, b, M, "eq1", r, names,
                                     "no Delta-closed correction found", corrected, pairs)
                lam = lam + mu
                corrected += 1
                r = target - apply_delta_S(S, lam, partials).poly_part()
            if r:
                return _fqm_fail(structure, a, b, M, "eq1", r, names, "nonzero residual", corrected, pairs)
            lam_coeffs[e] = lam
            # second equation: d_a d_b Gamma = Delta(Lambda_ab)
            r2 = u(M + (a, b)).scale(Fraction(1, w)) - apply_Delta(lam).poly_part()
            if r2:
                return _fqm_fail(structure, a, b, M, "eq2", r2, names, "nonzero residual", corrected, pairs)
    return Report("fqm11", True, None, {"level": L, "max_t_order": N, "pairs": pairs,
                                        "coefficients": pairs * len(exps),
                                        "lambda_corrections": corrected})


def _fqm_fail(structure, a, b, M, eq, residual, names, why, corrected, pairs):
    return Report("fqm11", False,
                  {"equation": eq, "alpha": a, "beta": b, "t_monomial": list(M),
                   "t_order": len(M), "residual": format_poly(residual, names), "reason": why},
                  {"level": structure.level, "lambda_corrections": corrected, "pairs_checked": pairs})


def check_unit(structure: FlatFStructure) -> Report:
    """a_{e beta}^rho = delta_beta^rho at t = 0, where e indexes the representative 1."""
    e = structure.identity
    if e is None:
        return Report("unit", True, None, {"unit": "skipped: 1 is not a basis representative"})
    for beta in range(structure.dim):
        row = structure.a((e, beta))
        for rho in range(structure.dim):
            want = Fraction(1 if rho == beta else 0)
            if row[rho] != want:
                return Report("unit", False, {"law": "unit", "beta": beta, "rho": rho,
                                              "value": format_fraction(row[rho]),
                                              "expected": format_fraction(want)},
                              {"unit": "checked"})
    return Report("unit", True, None, {"unit": "checked"})


def check_flat_f(structure: FlatFStructure, max_order: Optional[int] = None) -> Report:
    """Unit law at t = 0, commutativity and order-by-order associativity."""
    dim = structure.dim
    N = structure.level - 2 if max_order is None else max_order
    if N > structure.level - 2:
        raise LevelError(f"associativity needs A through order {N}, have {structure.level - 2}")
    stats = {"dim": dim, "max_t_order": N}
    unit = check_unit(structure)
    if not unit.passed:
        return Report("flat_f", False, unit.counterexample, stats)
    stats["unit"] = unit.stats["unit"]
    for alpha, beta in itertools.product(range(dim), repeat=2):
        for rest_len in range(N + 1):
            for rest in itertools.combinations_with_replacement(range(dim), rest_len):
                for rho in range(dim):
                    x = structure.series_coefficient(alpha, beta, rho, rest)
                    y = structure.series_coefficient(beta, alpha, rho, rest)
                    if x != y:
                        return Report("flat_f", False, {"law": "commutativity", "alpha": alpha,
                                                        "beta": beta, "rho": rho, "t_monomial": list(rest)},
                                      stats)
    A = {}
    for a, b in itertools.product(range(dim), repeat=2):
        A[a, b] = [_taylor_series(dim, N, lambda M, r=r: Fraction(structure.a(M + (a, b))[r]))
                   for r in range(dim)]
    slots = 0
    for trip in itertools.combinations_with_replacement(range(dim), 3):
        for delta in range(dim):
            values = {}
            for p, q, r in set(itertools.permutations(trip)):
                tot = TruncatedSeries(dim, N)
                for rho in range(dim):
                    tot = tot + A[p, q][rho] * A[r, rho][delta]
                values[(p, q, r)] = tot
            ref_key = min(values)
            ref = values[ref_key]
            for k, v in values.items():
                diff = v - ref
                if not diff.is_zero():
                    e_bad = min(diff.coeffs, key=lambda ex: (sum(ex), ex))
                    return Report("flat_f", False,
                                  {"law": "associativity", "t_order": sum(e_bad),
                                   "t_monomial": list(to_multiset(e_bad)),
                                   "alpha_beta_gamma": list(k), "versus": list(ref_key), "delta": delta,
                                   "residual": format_fraction(diff.coeffs[e_bad])}, stats)
            slots += 1
    stats["associativity_orbits"] = slots
    stats["associativity_slots"] = dim ** 4
    return Report("flat_f", True, None, stats)


def associativity_by_order(structure: FlatFStructure) -> Dict[int, bool]:
    """Associativity pass/fail for each t-order separately."""
    out = {}
    for k in range(structure.level - 1):
        out[k] = check_flat_f(structure, k).passed
    return out


# --------------------------------------------------------- ambiguity probe

def koszul_syzygy(S: Poly, j: int, k: int) -> PolyVector:
    """dS/dx_j eta_k - dS/dx_k eta_j; annihilated by delta_S."""
    n = S.nvars
    return (PolyVector({(k,): S.partial(j)}, n) if S.partial(j) else PolyVector.zero(n)) - (
        PolyVector({(j,): S.partial(k)}, n) if S.partial(k) else PolyVector.zero(n))


def syzygy_from_coefficients(S: Poly, coefficients: Dict[Tuple[int, int], Poly]) -> PolyVector:
    out = PolyVector.zero(S.nvars)
    for (j, k), c in sorted(coefficients.items()):
        out = out + koszul_syzygy(S, j, k).scale(c)
    return out


def ambiguity_probe(basis: Basis, potential: Poly, alpha: MultiIndex, stage: int, kernel_element: PolyVector,
                    max_level: int, names: Optional[Sequence[str]] = None) -> Report:
    """Re-run the recursion with lambda^(stage)_alpha shifted by a kernel element.

    Reports whether every a_table entry at levels >= |alpha| is unchanged.
    """
    alpha = multi_index(alpha)
    m = len(alpha)
    if not 2 <= m <= max_level:
        raise LevelError("multi-index outside the computed levels")
    if not 0 <= stage <= m - 2:
        raise ValueError(f"stage must lie in 0..{m - 2}")
    if set(kernel_element.degrees()) - {-1}:
        raise ValueError("kernel element must have degree -1")
    if apply_delta_S(potential, kernel_element):
        raise ValueError("invalid syzygy: delta_S of the perturbation is nonzero")
    base = Engine(basis)
    base.run(max_level)
    probe = Engine(basis, {(alpha, stage): kernel_element})
    probe.run(max_level)
    changed = [k for k in sorted(base.table.a_table) if len(k) >= m and base.table.a_table[k] != probe.table.a_table[k]]
    u_changed = [k for k in sorted(base.table.u_table) if len(k) >= m and base.table.u_table[k] != probe.table.u_table[k]]
    stats = {"alpha": list(alpha), "stage": stage, "levels": [m, max_level],
             "delta_of_perturbation": format_poly(apply_Delta(kernel_element).poly_part(), names),
             "u_entries_changed": len(u_changed), "perturbation": format_polyvector(kernel_element, names)}
    if changed:
        k = changed[0]
        return Report("ambiguity_probe", False,
                      {"multi_index": list(k), "baseline": [format_fraction(c) for c in base.table.a_table[k]],
                       "perturbed": [format_fraction(c) for c in probe.table.a_table[k]],
                       "entries_changed": len(changed)}, stats)
    return Report("ambiguity_probe", True, None, stats)
