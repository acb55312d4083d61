"""Exact flat F-manifold structures from Landau-Ginzburg potentials."""

from .poly import MonomialOrder, Poly, parse_poly, format_poly
from .polyvector import ChargeSpec, PolyVector, parse_polyvector, format_polyvector
from .groebner import GBasisWithCofactors, buchberger, normal_form, standard_monomials
from .quotient import Basis, Problem, compute_basis, reduce_to_basis
from .engine import Engine, FlatFStructure, run
from .verifier import (Report, ambiguity_probe, check_dgbv_axioms, check_flat_f, check_fqm11,
                       check_unit)

__version__ = "0.1.0"

__all__ = [
    "MonomialOrder", "Poly", "parse_poly", "format_poly",
    "ChargeSpec", "PolyVector", "parse_polyvector", "format_polyvector",
    "GBasisWithCofactors", "buchberger", "normal_form", "standard_monomials",
    "Basis", "Problem", "compute_basis", "reduce_to_basis",
    "Engine", "FlatFStructure", "run",
    "Report", "ambiguity_probe", "check_dgbv_axioms", "check_flat_f", "check_fqm11", "check_unit",
]
