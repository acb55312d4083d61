"""The level-by-level recursion producing the flat F-manifold data.

Everything is keyed by *multisets* of basis indices (sorted tuples), so the
symmetry of u, a and lambda in their indices holds by construction.

For a multiset ``alpha`` of size m, level m runs the cascade

    v_0 = u^(0)_alpha
    v_i = u^(i)_alpha - Delta(lambda^(i-1))          (1 <= i <= m-2)
    v_i = sum_rho a^(i) rho u_rho + delta_S(lambda^(i))

and stores a_alpha = a^(m-2), u_alpha = Delta(lambda^(m-2)) and the final
lambda^(m-2).  The products u^(i) only involve multisets of size < m.
"""

from __future__ import annotations

import itertools
import logging
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Optional, Sequence, Tuple

from .poly import Poly
from .polyvector import PolyVector, apply_Delta, apply_delta_S
from .quotient import Basis, ReductionResult, reduce_to_basis

log = logging.getLogger(__name__)

MultiIndex = Tuple[int, ...]


def multi_index(indices) -> MultiIndex:
    return tuple(sorted(indices))


class IncompleteTableError(KeyError):
    pass


class LevelError(ValueError):
    pass


@lru_cache(maxsize=None)
def set_partitions(m: int, k: int) -> Tuple[Tuple[Tuple[int, ...], ...], ...]:
    """All partitions of positions 0..m-1 into exactly k nonempty unordered blocks."""
    out = []

    def rec(pos, blocks):
        if pos == m:
            if len(blocks) == k:
                out.append(tuple(tuple(b) for b in blocks))
            return
        if len(blocks) + (m - pos) < k:
            return
        for b in blocks:
            b.append(pos)
            rec(pos + 1, blocks)
            b.pop()
        if len(blocks) < k:
            blocks.append([pos])
            rec(pos + 1, blocks)
            blocks.pop()

    rec(0, [])
    return tuple(out)


def multiset_block_partitions(alpha: MultiIndex, k: int) -> Counter:
    """Partitions of the labelled positions of ``alpha`` into k blocks, grouped.

    Keys are sorted tuples of block multisets; values count the labelled set
    partitions that collapse to that key.
    """
    counts: Counter = Counter()
    for part in set_partitions(len(alpha), k):
        key = tuple(sorted(tuple(sorted(alpha[p] for p in block)) for block in part))
        counts[key] += 1
    return counts


@dataclass
class CoeffTable:
    u_table: Dict[MultiIndex, Poly] = field(default_factory=dict)
    a_table: Dict[MultiIndex, Tuple[Fraction, ...]] = field(default_factory=dict)
    lambda_table: Dict[MultiIndex, PolyVector] = field(default_factory=dict)
    level: int = 1

    def u(self, alpha: MultiIndex) -> Poly:
        try:
            return self.u_table[alpha]
        except KeyError:
            raise IncompleteTableError(f"u{list(alpha)} has not been computed") from None


def assemble_u_i(table: CoeffTable, alpha: MultiIndex, i: int) -> Poly:
    """u^(i)_alpha: sum over set partitions of alpha into m-i blocks of the block products."""
    alpha = multi_index(alpha)
    m = len(alpha)
    if not 0 <= i <= m - 1:
        raise ValueError(f"stage {i} out of range for |alpha| = {m}")
    total = None
    for blocks, count in sorted(multiset_block_partitions(alpha, m - i).items()):
        prod = None
        for b in blocks:
            prod = table.u(b) if prod is None else prod * table.u(b)
        term = prod.scale(count) if count != 1 else prod
        total = term if total is None else total + term
    return total


@dataclass(frozen=True)
class StepResult:
    a: Tuple[Fraction, ...]
    u: Poly
    stages: Tuple[ReductionResult, ...]

    @property
    def lam(self) -> PolyVector:
        return self.stages[-1].lam


class Engine:
    """Runs the recursion for one basis; ``perturb`` adds kernel elements to lambdas.

    ``perturb`` maps ``(multiset, stage)`` to a PolyVector added to that
    stage's lambda right after it is computed.
    """

    def __init__(self, basis: Basis, perturb: Optional[Dict[Tuple[MultiIndex, int], PolyVector]] = None):
        self.basis = basis
        self.table = CoeffTable()
        self.perturb = dict(perturb or {})
        for k, rep in enumerate(basis.reps):
            self.table.u_table[(k,)] = rep
        self.stage_log: Dict[MultiIndex, StepResult] = {}

    def step(self, alpha: MultiIndex) -> StepResult:
        alpha = multi_index(alpha)
        m = len(alpha)
        if m < 2:
            raise ValueError("step needs |alpha| >= 2")
        if self.table.level < m - 1:
            raise IncompleteTableError(f"tables only complete through level {self.table.level}")
        stages = []
        prev_delta = None
        for i in range(m - 1):
            v = assemble_u_i(self.table, alpha, i)
            if prev_delta is not None:
                v = v - prev_delta
            res = reduce_to_basis(v, self.basis)
            extra = self.perturb.get((alpha, i))
            if extra is not None:
                lam = res.lam + extra
                res = ReductionResult(res.coeffs, lam, apply_Delta(lam).poly_part())
            stages.append(res)
            prev_delta = res.delta_lambda
        return StepResult(stages[-1].coeffs, stages[-1].delta_lambda, tuple(stages))

    def run_level(self, m: int, shuffle_seed: Optional[int] = None):
        if m != self.table.level + 1:
            raise LevelError(f"level {m} requested but tables are complete through {self.table.level}")
        keys = list(itertools.combinations_with_replacement(range(self.basis.dim), m))
        if shuffle_seed is not None:
            random.Random(shuffle_seed).shuffle(keys)
        results = {alpha: self.step(alpha) for alpha in keys}
        # commit only after the whole level is done: steps read lower levels only
        for alpha in sorted(results):
            r = results[alpha]
            self.table.u_table[alpha] = r.u
            self.table.a_table[alpha] = r.a
            self.table.lambda_table[alpha] = r.lam
            self.stage_log[alpha] = r
        self.table.level = m
        log.info("level %d: %d multisets", m, len(keys))

    def run(self, max_level: int, shuffle_seed: Optional[int] = None) -> CoeffTable:
        if max_level < 2:
            raise ValueError("max level must be at least 2")
        while self.table.level < max_level:
            seed = None if shuffle_seed is None else shuffle_seed + self.table.level
            self.run_level(self.table.level + 1, seed)
        return self.table


@dataclass
class FlatFStructure:
    """Truncated flat F-manifold data for a fixed basis.

    Taylor coefficients are read off the multiset tables: the coefficient of
    ``t^alpha / m!`` in A_{ab}^rho is ``a_table[{a, b} + alpha][rho]``.
    """

    variables: Tuple[str, ...]
    potential: Poly
    basis_reps: Tuple[Poly, ...]
    identity: Optional[int]
    level: int
    table: CoeffTable
    problem_hash: str = ""
    charges: Optional[Tuple[int, ...]] = None

    @property
    def dim(self) -> int:
        return len(self.basis_reps)

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def a(self, alpha: MultiIndex) -> Tuple[Fraction, ...]:
        key = multi_index(alpha)
        if len(key) < 2 or len(key) > self.level:
            raise LevelError(f"multi-index of size {len(key)} outside computed levels 2..{self.level}")
        return self.table.a_table[key]

    def series_coefficient(self, alpha: int, beta: int, rho: int, rest: Sequence[int] = ()) -> Fraction:
        return self.a((alpha, beta) + tuple(rest))[rho]

    def u(self, alpha: MultiIndex) -> Poly:
        key = multi_index(alpha)
        if len(key) > self.level:
            raise LevelError(f"u of size {len(key)} beyond level {self.level}")
        return self.table.u(key)

    def lam(self, alpha: MultiIndex) -> PolyVector:
        key = multi_index(alpha)
        if len(key) < 2 or len(key) > self.level:
            raise LevelError(f"lambda of size {len(key)} outside computed levels")
        return self.table.lambda_table[key]


def run(problem, max_level: int, basis: Optional[Basis] = None, *, shuffle_seed: Optional[int] = None,
        perturb=None, problem_hash: str = "") -> FlatFStructure:
    """Compute the structure through ``max_level`` for ``problem``."""
    from .quotient import compute_basis
    if max_level < 2:
        raise ValueError("max level must be at least 2")
    basis = basis if basis is not None else compute_basis(problem)
    engine = Engine(basis, perturb)
    table = engine.run(max_level, shuffle_seed)
    return FlatFStructure(problem.variables, problem.potential, basis.reps, basis.identity,
                          max_level, table, problem_hash,
                          None if problem.charges is None else problem.charges.charges)


def residual_of_stage(potential: Poly, v: Poly, basis_reps: Sequence[Poly], res: ReductionResult) -> PolyVector:
    """v - sum a u - delta_S(lambda); zero for every valid reduction."""
    out = PolyVector.from_poly(v)
    for a, u in zip(res.coeffs, basis_reps):
        if a:
            out = out - PolyVector.from_poly(u.scale(a))
    return out - apply_delta_S(potential, res.lam)
