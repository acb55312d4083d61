"""The Jacobian quotient J_S = B^0 / delta_S(B^-1) made concrete.

:func:`reduce_to_basis` is the atomic operation of the flat-structure
recursion: it splits a polynomial ``v`` as ``sum_rho a^rho u_rho +
delta_S(lambda)`` and hands back ``a``, ``lambda`` and ``Delta(lambda)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .linalg import Echelon
from .groebner import (GBasisWithCofactors, buchberger, normal_form,
                       reduce_full, standard_monomials)
from .poly import DEFAULT_ORDER, MonomialOrder, Poly, format_poly
from .polyvector import ChargeError, ChargeSpec, PolyVector, charge_check

log = logging.getLogger(__name__)


class QuotientError(ValueError):
    """Base class for basis and reduction failures."""


class NotFiniteError(QuotientError):
    pass


class DependentBasisError(QuotientError):
    def __init__(self, message, combination):
        super().__init__(message)
        self.combination = combination


class NotInSpanError(QuotientError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class Problem:
    """Input data: potential, variables, order and the optional extras."""

    variables: Tuple[str, ...]
    potential: Poly
    order: MonomialOrder = DEFAULT_ORDER
    charges: Optional[ChargeSpec] = None
    basis: Optional[Tuple[Poly, ...]] = None
    bound: Optional[int] = None
    skip_spanning_check: bool = False

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if self.potential.nvars != len(self.variables):
            raise ValueError("potential has the wrong number of variables")
        if self.charges is not None:
            if len(self.charges.charges) != len(self.variables):
                raise ValueError("charges must list one entry per variable")
            if charge_check(self.potential, self.charges) != 0:
                raise ChargeError("potential must have charge 0")

    @property
    def nvars(self) -> int:
        return len(self.variables)


def jacobian_generators(S: Poly) -> List[Poly]:
    """The partial derivatives dS/dx_i in variable order."""
    return [S.partial(i) for i in range(S.nvars)]


@dataclass
class Basis:
    reps: Tuple[Poly, ...]
    identity: Optional[int]
    normal_forms: Tuple[Poly, ...]
    gbasis: GBasisWithCofactors
    charges: Optional[ChargeSpec] = None
    complete: bool = True
    reason: str = ""
    auto: bool = True
    _solver: Echelon = field(default=None, repr=False)

    def __post_init__(self):
        if self._solver is None:
            solver = Echelon(self.gbasis.order.key)
            for k, nf in enumerate(self.normal_forms):
                dep = solver.add(nf.terms, k)
                if dep is not None:
                    raise DependentBasisError(
                        f"dependent basis: vanishing combination {dict(sorted(dep.items()))}", dep)
            self._solver = solver

    @property
    def dim(self) -> int:
        return len(self.reps)

    @property
    def nvars(self) -> int:
        return self.gbasis.nvars

    def coordinates(self, nf: Poly) -> List[Fraction]:
        """Coordinates of a normal form in span{NF(u_alpha)}."""
        comb, residual = self._solver.solve(nf.terms)
        if residual:
            raise NotInSpanError("normal form is not in the span of the basis",
                                 Poly(residual, nf.nvars, _trusted=True))
        return [comb.get(k, Fraction(0)) for k in range(self.dim)]


@dataclass(frozen=True)
class ReductionResult:
    coeffs: Tuple[Fraction, ...]
    lam: PolyVector
    delta_lambda: Poly


def compute_gbasis(problem: Problem) -> GBasisWithCofactors:
    return buchberger(jacobian_generators(problem.potential), problem.order)


def compute_basis(problem: Problem, gbasis: Optional[GBasisWithCofactors] = None) -> Basis:
    """Auto-generate or validate a basis of J_S for ``problem``."""
    gb = gbasis if gbasis is not None else compute_gbasis(problem)
    charge_filter = (problem.charges, 0) if problem.charges is not None else None
    if not gb.is_zero_dimensional() and charge_filter is None and not (
            problem.basis is not None and problem.skip_spanning_check):
        raise NotFiniteError("quotient not finite-dimensional: singularity is not isolated "
                             "and no charge grading was given")
    one = Poly.const(1, problem.nvars)

    if problem.basis is None:
        std = standard_monomials(gb, charge_filter, problem.bound)
        if not std.complete:
            raise NotFiniteError(f"quotient not finite-dimensional at this filter/bound ({std.reason})")
        reps = tuple(Poly.monomial(m) for m in std.monomials)
        identity = reps.index(one) if one in reps else None
        if identity is None:
            log.warning("1 is not a basis representative; unit checks will be skipped")
        return Basis(reps, identity, reps, gb, problem.charges, True, std.reason, True)

    reps = tuple(problem.basis)
    if problem.charges is not None:
        for r in reps:
            if charge_check(r, problem.charges) != 0:
                raise ChargeError(f"basis element {format_poly(r, problem.variables)} is not charge 0")
    nfs = tuple(normal_form(r, gb) for r in reps)
    basis = Basis(reps, reps.index(one) if one in reps else None, nfs, gb, problem.charges,
                  True, "user basis", False)
    if not problem.skip_spanning_check:
        std = standard_monomials(gb, charge_filter, problem.bound)
        if std.complete and len(std.monomials) != len(reps):
            raise QuotientError(f"basis has {len(reps)} elements but the quotient has "
                                f"dimension {len(std.monomials)}")
        if not std.complete:
            basis.complete = False
            basis.reason = std.reason
    else:
        basis.complete = False
        basis.reason = "spanning check waived"
    if basis.identity is None:
        try:
            basis.coordinates(normal_form(one, gb))
            log.warning("1 lies in the span but is not itself a representative; "
                        "unit checks will be skipped")
        except NotInSpanError:
            log.warning("1 is not in the span of the basis")
    return basis


def reduce_to_basis(v: Poly, basis: Basis, gbasis: Optional[GBasisWithCofactors] = None) -> ReductionResult:
    """Write ``v = sum a^rho u_rho + delta_S(lambda)`` with lambda = sum q_i eta_i."""
    gb = gbasis if gbasis is not None else basis.gbasis
    if basis.charges is not None and v:
        ch = charge_check(v, basis.charges)
        if ch != 0:
            raise ChargeError(f"input has charge {ch}, expected 0")
    coeffs = basis.coordinates(normal_form(v, gb))
    w = v
    for a, u in zip(coeffs, basis.reps):
        if a:
            w = w - u.scale(a)
    out = reduce_full(w, gb)
    if out.remainder:
        raise NotInSpanError("residual after subtracting the basis part is not in the ideal",
                             out.remainder)
    n = v.nvars
    lam = PolyVector({(i,): q for i, q in enumerate(out.cofactors) if q}, n)
    dlam = Poly.zero(n)
    for i, q in enumerate(out.cofactors):
        if q:
            dlam = dlam + q.partial(i)
    return ReductionResult(tuple(coeffs), lam, dlam)


def basis_to_strings(basis: Basis, names: Sequence[str]) -> dict:
    return {"reps": [format_poly(r, names) for r in basis.reps], "identity": basis.identity}
