"""Problem files, result files and the Groebner-basis cache.

All JSON written here is canonical: sorted keys, two-space indent, rationals
as "p/q" strings, table entries ordered by (size, indices).  Two runs on the
same problem therefore produce byte-identical files.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, List, Optional, Tuple, Union

from .engine import CoeffTable, FlatFStructure
from .groebner import GBasisWithCofactors, buchberger, gbasis_from_dict, gbasis_to_dict
from .poly import MonomialOrder, format_fraction, format_poly, parse_poly
from .polyvector import ChargeSpec, format_polyvector, parse_polyvector
from .quotient import Basis, Problem, jacobian_generators

log = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]
RESULT_FORMAT = "flatf-result/1"
_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_PROBLEM_FIELDS = {"variables", "potential", "charges", "basis", "monomial_order",
                   "max_level", "bounds", "options"}
_OPTION_FIELDS = {"skip_spanning_check", "cache_dir"}


class SchemaError(ValueError):
    """A document does not match the expected shape; ``path`` locates the field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class HashMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class ProblemFile:
    problem: Problem
    max_level: int
    cache_dir: Optional[str]
    canonical: dict
    hash: str

    @property
    def variables(self) -> Tuple[str, ...]:
        return self.problem.variables


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def content_hash(canonical: dict) -> str:
    text = json.dumps(canonical, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _require(cond: bool, path: str, message: str):
    if not cond:
        raise SchemaError(path, message)


def _parse_at(path: str, text, names):
    _require(isinstance(text, str), path, "expected an expression string")
    try:
        return parse_poly(text, names)
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from exc


def _order_from_doc(doc, names) -> MonomialOrder:
    path = "$.monomial_order"
    if doc is None:
        return MonomialOrder()
    if isinstance(doc, str):
        doc = {"name": doc}
    _require(isinstance(doc, dict), path, "expected an object or a name")
    unknown = set(doc) - {"name", "precedence", "weights"}
    _require(not unknown, path, f"unknown field(s) {sorted(unknown)}")
    name = doc.get("name", "degrevlex")
    _require(name in MonomialOrder.KINDS, f"{path}.name", f"must be one of {list(MonomialOrder.KINDS)}")
    prec = doc.get("precedence")
    if prec is not None:
        _require(isinstance(prec, list) and len(prec) == len(names), f"{path}.precedence",
                 "must list every variable once")
        idx = []
        for k, v in enumerate(prec):
            if isinstance(v, str):
                _require(v in names, f"{path}.precedence[{k}]", f"unknown variable {v!r}")
                idx.append(names.index(v))
            else:
                _require(_is_int(v) and 0 <= v < len(names), f"{path}.precedence[{k}]",
                         "expected a variable name or index")
                idx.append(v)
        _require(sorted(idx) == list(range(len(names))), f"{path}.precedence", "must be a permutation")
        prec = idx
    weights = doc.get("weights")
    if weights is not None:
        _require(isinstance(weights, list) and len(weights) == len(names)
                 and all(_is_int(w) and w > 0 for w in weights), f"{path}.weights",
                 "expected one positive integer per variable")
    try:
        return MonomialOrder(name, prec, weights)
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from exc


def problem_from_dict(doc: Any) -> ProblemFile:
    """Validate a problem document and build the in-memory problem."""
    _require(isinstance(doc, dict), "$", "expected a JSON object")
    unknown = set(doc) - _PROBLEM_FIELDS
    _require(not unknown, "$", f"unknown field(s) {sorted(unknown)}")
    for req in ("variables", "potential", "max_level"):
        _require(req in doc, f"$.{req}", "required field missing")

    names = doc["variables"]
    _require(isinstance(names, list) and names, "$.variables", "expected a nonempty list of names")
    for k, v in enumerate(names):
        _require(isinstance(v, str) and _NAME_RE.match(v) is not None, f"$.variables[{k}]",
                 "expected an identifier")
    _require(len(set(names)) == len(names), "$.variables", "names must be distinct")
    names = tuple(names)

    potential = _parse_at("$.potential", doc["potential"], names)
    _require(_is_int(doc["max_level"]) and doc["max_level"] >= 2, "$.max_level", "expected an integer >= 2")

    charges = None
    if doc.get("charges") is not None:
        ch = doc["charges"]
        _require(isinstance(ch, list) and all(_is_int(c) for c in ch), "$.charges", "expected a list of integers")
        _require(len(ch) == len(names), "$.charges",
                 f"has {len(ch)} entries but there are {len(names)} variables")
        try:
            charges = ChargeSpec(tuple(ch))
        except ValueError as exc:
            raise SchemaError("$.charges", str(exc)) from exc

    basis = None
    if doc.get("basis") is not None:
        _require(isinstance(doc["basis"], list) and doc["basis"], "$.basis", "expected a nonempty list")
        basis = tuple(_parse_at(f"$.basis[{k}]", t, names) for k, t in enumerate(doc["basis"]))

    bound = doc.get("bounds")
    if bound is not None:
        _require(_is_int(bound) and bound >= 0, "$.bounds", "expected a non-negative integer")

    options = doc.get("options") or {}
    _require(isinstance(options, dict), "$.options", "expected an object")
    unknown = set(options) - _OPTION_FIELDS
    _require(not unknown, "$.options", f"unknown field(s) {sorted(unknown)}")
    skip = options.get("skip_spanning_check", False)
    _require(isinstance(skip, bool), "$.options.skip_spanning_check", "expected a boolean")
    cache_dir = options.get("cache_dir")
    _require(cache_dir is None or isinstance(cache_dir, str), "$.options.cache_dir", "expected a path string")

    order = _order_from_doc(doc.get("monomial_order"), names)
    try:
        problem = Problem(names, potential, order, charges, basis, bound, skip)
    except ValueError as exc:
        raise SchemaError("$.charges" if charges is not None else "$", str(exc)) from exc

    canonical = {
        "variables": list(names),
        "potential": format_poly(potential, names),
        "charges": None if charges is None else list(charges.charges),
        "basis": None if basis is None else [format_poly(b, names) for b in basis],
        "monomial_order": order.to_dict(),
        "bounds": bound,
        "skip_spanning_check": skip,
    }
    return ProblemFile(problem, doc["max_level"], cache_dir, canonical, content_hash(canonical))


def read_json(path: PathLike):
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError("$", f"not valid JSON ({exc})") from exc


def load_problem(path: PathLike) -> ProblemFile:
    return problem_from_dict(read_json(path))


# ------------------------------------------------------------------ cache

def resolve_cache_dir(cli_value: Optional[str], problem_value: Optional[str] = None) -> Optional[Path]:
    """Explicit flag first, then FLATF_CACHE_DIR, then the problem file's option."""
    for v in (cli_value, os.environ.get("FLATF_CACHE_DIR"), problem_value):
        if v:
            return Path(v)
    return None


def cached_gbasis(pf: ProblemFile, cache_dir: Optional[Path]) -> GBasisWithCofactors:
    """Load the Groebner basis from the cache if it checks out, otherwise compute and store it."""
    gens = tuple(jacobian_generators(pf.problem.potential))
    order = pf.problem.order
    path = None if cache_dir is None else cache_dir / f"{pf.hash}.gb.json"
    if path is not None and path.exists():
        try:
            gb = gbasis_from_dict(read_json(path))
            if gb.generators == gens and gb.order == order:
                log.info("using cached Groebner basis %s", path)
                return gb
            log.warning("cache entry %s belongs to a different problem; recomputing", path)
        except (ValueError, KeyError, TypeError) as exc:
            log.warning("ignoring unusable cache entry %s: %s", path, exc)
    gb = buchberger(gens, order)
    if path is not None:
        cache_dir.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(canonical_json(gbasis_to_dict(gb)), encoding="utf-8")
        tmp.replace(path)
        log.info("cached Groebner basis at %s", path)
    return gb


# ----------------------------------------------------------------- results

def _entry_order(key: Tuple[int, ...]):
    return (len(key), key)


def result_to_dict(pf: ProblemFile, structure: FlatFStructure, basis: Basis) -> dict:
    names = structure.variables
    t = structure.table
    return {
        "format": RESULT_FORMAT,
        "problem_hash": pf.hash,
        "problem": pf.canonical,
        "level": structure.level,
        "basis": {
            "reps": [format_poly(r, names) for r in structure.basis_reps],
            "identity": structure.identity,
            "complete": basis.complete,
            "reason": basis.reason,
        },
        "u_table": [{"index": list(k), "u": format_poly(t.u_table[k], names)}
                    for k in sorted(t.u_table, key=_entry_order)],
        "a_table": [{"index": list(k), "a": [format_fraction(c) for c in t.a_table[k]]}
                    for k in sorted(t.a_table, key=_entry_order)],
        "lambda_table": [{"index": list(k), "lambda": format_polyvector(t.lambda_table[k], names)}
                         for k in sorted(t.lambda_table, key=_entry_order)],
    }


def _fraction_at(path: str, s) -> Fraction:
    _require(isinstance(s, str), path, "expected a 'p/q' string")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(path, f"bad rational {s!r}") from exc


def _index_at(path: str, idx, dim: int) -> Tuple[int, ...]:
    _require(isinstance(idx, list) and all(_is_int(i) and 0 <= i < dim for i in idx), path,
             "expected a list of basis indices")
    _require(idx == sorted(idx), path, "indices must be sorted")
    return tuple(idx)


def structure_from_dict(doc: Any) -> Tuple[FlatFStructure, ProblemFile]:
    """Rebuild a structure from a result document after checking its problem hash."""
    _require(isinstance(doc, dict), "$", "expected a JSON object")
    _require(doc.get("format") == RESULT_FORMAT, "$.format", f"expected {RESULT_FORMAT!r}")
    for req in ("problem_hash", "problem", "level", "basis", "u_table", "a_table", "lambda_table"):
        _require(req in doc, f"$.{req}", "required field missing")
    prob = doc["problem"]
    _require(isinstance(prob, dict), "$.problem", "expected an object")
    raw = {k: v for k, v in prob.items() if k != "skip_spanning_check" and v is not None}
    raw["options"] = {"skip_spanning_check": prob.get("skip_spanning_check", False)}
    order = prob.get("monomial_order") or {}
    raw["monomial_order"] = {"name": order.get("kind", "degrevlex"),
                             **{k: order[k] for k in ("precedence", "weights") if k in order}}
    raw["max_level"] = doc["level"]
    pf = problem_from_dict(raw)
    if pf.hash != doc["problem_hash"]:
        raise HashMismatchError(f"problem hash mismatch: file says {doc['problem_hash']}, "
                                f"embedded problem hashes to {pf.hash}")
    names = pf.variables
    L = doc["level"]
    _require(_is_int(L) and L >= 2, "$.level", "expected an integer >= 2")
    b = doc["basis"]
    _require(isinstance(b, dict) and isinstance(b.get("reps"), list), "$.basis.reps", "expected a list")
    reps = tuple(_parse_at(f"$.basis.reps[{k}]", r, names) for k, r in enumerate(b["reps"]))
    dim = len(reps)
    ident = b.get("identity")
    _require(ident is None or (_is_int(ident) and 0 <= ident < dim), "$.basis.identity", "bad index")

    table = CoeffTable(level=L)
    for k, e in enumerate(doc["u_table"]):
        path = f"$.u_table[{k}]"
        _require(isinstance(e, dict), path, "expected an object")
        table.u_table[_index_at(path + ".index", e.get("index"), dim)] = _parse_at(path + ".u", e.get("u"), names)
    for k, e in enumerate(doc["a_table"]):
        path = f"$.a_table[{k}]"
        _require(isinstance(e, dict) and isinstance(e.get("a"), list) and len(e["a"]) == dim,
                 path, f"expected an object with {dim} coefficients")
        table.a_table[_index_at(path + ".index", e.get("index"), dim)] = tuple(
            _fraction_at(f"{path}.a[{j}]", c) for j, c in enumerate(e["a"]))
    for k, e in enumerate(doc["lambda_table"]):
        path = f"$.lambda_table[{k}]"
        _require(isinstance(e, dict) and isinstance(e.get("lambda"), str), path, "expected an object")
        try:
            lam = parse_polyvector(e["lambda"], names)
        except ValueError as exc:
            raise SchemaError(path + ".lambda", str(exc)) from exc
        table.lambda_table[_index_at(path + ".index", e.get("index"), dim)] = lam

    for k in range(dim):
        if table.u_table.get((k,)) != reps[k]:
            raise SchemaError("$.u_table", f"entry {[k]} does not match basis representative {k}")
    charges = None if pf.problem.charges is None else pf.problem.charges.charges
    structure = FlatFStructure(names, pf.problem.potential, reps, ident, L, table, pf.hash, charges)
    _check_complete(structure)
    return structure, pf


def _check_complete(structure: FlatFStructure):
    for m in range(1, structure.level + 1):
        for key in itertools.combinations_with_replacement(range(structure.dim), m):
            if key not in structure.table.u_table:
                raise SchemaError("$.u_table", f"missing entry {list(key)}")
            if m >= 2 and (key not in structure.table.a_table or key not in structure.table.lambda_table):
                raise SchemaError("$.a_table", f"missing entry {list(key)}")


def load_result(path: PathLike) -> Tuple[FlatFStructure, ProblemFile]:
    return structure_from_dict(read_json(path))


def write_text(path: PathLike, text: str):
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    tmp.replace(path)


def report_table(reports: List) -> str:
    return "".join(r.line() + "\n" for r in reports)


__all__ = ["SchemaError", "HashMismatchError", "ProblemFile", "problem_from_dict", "load_problem",
           "canonical_json", "content_hash", "resolve_cache_dir", "cached_gbasis", "result_to_dict",
           "structure_from_dict", "load_result", "write_text", "report_table"]
