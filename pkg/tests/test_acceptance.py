"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` (lines appear in the pytest
output) or directly with ``python3 tests/test_acceptance.py``.
"""

import copy
import itertools
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from flatf.engine import Engine, run  # noqa: E402
from flatf.poly import Poly, format_poly  # noqa: E402
from flatf.polyvector import PolyVector, apply_Delta  # noqa: E402
from flatf.quotient import compute_basis  # noqa: E402
from flatf.verifier import (ambiguity_probe, associativity_by_order, check_dgbv_axioms,  # noqa: E402
                            check_flat_f, check_fqm11, check_unit, syzygy_from_coefficients)

from conftest import a2_problem, dwork_problem, fermat_problem  # noqa: E402
from oracles import a2_tables, boolean_algebra_constants, dwork_slice_dimension  # noqa: E402


def _corrupt(structure, table, key, value):
    bad = copy.copy(structure)
    bad.table = copy.deepcopy(structure.table)
    getattr(bad.table, table)[key] = value
    return bad


def _one_term_sign_flip(a):
    out = apply_Delta(a)
    c = out.component(())
    if c:
        m, v = min(c.terms.items())
        out = out - PolyVector.from_poly(Poly({m: 2 * v}, c.nvars))
    return out


def criterion_1():
    t0 = time.perf_counter()
    notes = []
    ok = True
    for name, prob in (("A2", a2_problem()), ("Fermat", fermat_problem()), ("Dwork", dwork_problem())):
        r = check_dgbv_axioms(prob.potential, prob.charges, 200, seed=2024, names=prob.variables)
        ok &= r.passed
        notes.append(f"{name}:{'ok' if r.passed else r.counterexample['law']}")
    elapsed = time.perf_counter() - t0
    return ok and elapsed < 30, f"200 trials each [{', '.join(notes)}] in {elapsed:.1f}s (limit 30s)"


def criterion_2():
    t0 = time.perf_counter()
    s = run(a2_problem(), 4)
    e = s.identity
    checks = [
        s.dim == 2,
        s.a((1, 1)) == (0, 0),
        s.lam((1, 1)) == PolyVector.eta((0,), 1),
        s.u((1, 1)) == 0,
        s.a((1, 1, 1))[e] == -1,
        s.u((1, 1, 1)) == 0,
        s.a((1, 1, e)) == (0, 0),
    ]
    oracle_a, _, _ = a2_tables(4)
    checks.append(all(s.table.a_table[k] == v for k, v in oracle_a.items()))
    elapsed = time.perf_counter() - t0
    return all(checks) and elapsed < 1, f"{sum(checks)}/{len(checks)} exact matches in {elapsed:.3f}s (limit 1s)"


def _order_zero_slots(s):
    """Direct check of sum_rho a_ab^rho a_c rho^d = sum_rho a_bc^rho a_a rho^d on every slot."""
    d = s.dim
    a = {(i, j): s.a((i, j)) for i in range(d) for j in range(d)}
    slots = 0
    for al, be, ga, de in itertools.product(range(d), repeat=4):
        lhs = sum(a[al, be][r] * a[ga, r][de] for r in range(d))
        rhs = sum(a[be, ga][r] * a[al, r][de] for r in range(d))
        if lhs != rhs:
            return False, slots
        slots += 1
    return True, slots


def criterion_3():
    t0 = time.perf_counter()
    prob = fermat_problem()
    s = run(prob, 4)
    fq = check_fqm11(s)
    ok_slots, slots = _order_zero_slots(s)
    monos = [next(iter(r.terms)) for r in s.basis_reps]
    ring = boolean_algebra_constants(monos)
    ring_ok = all(s.a(k) == v for k, v in ring.items())
    elapsed = time.perf_counter() - t0
    ok = s.dim == 8 and fq.passed and fq.stats["max_t_order"] == 2 and ok_slots and slots == 8 ** 4 and ring_ok
    return ok and elapsed < 300, (f"dim {s.dim}, fqm11 {'pass' if fq.passed else 'FAIL'} through t-order "
                                  f"{fq.stats.get('max_t_order')} ({fq.stats.get('lambda_corrections')} "
                                  f"Delta-closed lambda corrections), order-0 associativity {slots}/4096 slots, "
                                  f"{elapsed:.1f}s (limit 300s)")


def criterion_4():
    t0 = time.perf_counter()
    prob = dwork_problem()
    basis = compute_basis(prob)
    oracle_dim = sum(dwork_slice_dimension(k) for k in range(8))
    names = [format_poly(r, prob.variables) for r in basis.reps]
    s = run(prob, 3, basis)
    fq = check_fqm11(s)
    elapsed = time.perf_counter() - t0
    ok = (basis.dim == 2 == oracle_dim and basis.complete and s.a((1, 1)) == (0, 0) and s.u((1, 1)) == 0
          and fq.passed)
    u11 = format_poly(s.u((1, 1)), prob.variables)
    return ok and elapsed < 60, (f"basis {names}, complete={basis.complete}, a11={list(map(str, s.a((1, 1))))}, "
                                 f"u11={u11}, fqm11 {'pass' if fq.passed else 'FAIL'}, {elapsed:.2f}s")


def _structures():
    return {"A2 L5": run(a2_problem(), 5), "Fermat L4": run(fermat_problem(), 4),
            "Dwork L4": run(dwork_problem(), 4)}


def criterion_5():
    results = {k: check_unit(s) for k, s in _structures().items()}
    ok = all(r.passed and r.stats["unit"] == "checked" for r in results.values())
    return ok, ", ".join(f"{k}:{'ok' if r.passed else 'FAIL'}" for k, r in results.items())


def criterion_6():
    prob = fermat_problem()
    basis = compute_basis(prob)
    S = prob.potential
    base = Engine(basis)
    base.run(4)
    shuffles = 0
    for seed in (11, 12, 13):
        eng = Engine(basis)
        eng.run(4, shuffle_seed=seed)
        if eng.table.a_table != base.table.a_table:
            return False, f"shuffle seed {seed} changed the a table"
        shuffles += 1
    x1 = Poly.var(0, 3)
    syzygies = [{(0, 1): Poly.const(1, 3)}, {(1, 2): x1 * x1 + Poly.const(2, 3)}, {(0, 2): Poly.var(1, 3)}]
    probes = 0
    for coeffs in syzygies:
        sigma = syzygy_from_coefficients(S, coeffs)
        for alpha, stage in (((1, 1), 0), ((2, 4, 6), 0), ((2, 4, 6), 1), ((7, 7), 0)):
            r = ambiguity_probe(basis, S, alpha, stage, sigma, 4)
            if not r.passed:
                return False, f"probe {alpha}/{stage} changed {r.counterexample}"
            probes += 1
    return True, f"{shuffles} shuffled orders and {probes} Koszul-syzygy probes give bit-identical a tables"


def criterion_7():
    s = run(a2_problem(), 4)
    f = run(fermat_problem(), 3)
    outcomes = {}
    ax = check_dgbv_axioms(fermat_problem().potential, None, 200, seed=1, Delta=_one_term_sign_flip)
    outcomes["axioms/Delta sign"] = ax
    outcomes["fqm11/a+1"] = check_fqm11(_corrupt(s, "a_table", (0, 1, 1), (Fraction(1), Fraction(0))))
    outcomes["fqm11/u"] = check_fqm11(_corrupt(s, "u_table", (1, 1), Poly.var(0, 1)))
    row = f.a((1, 2))
    outcomes["flat_f/transposed"] = check_flat_f(_corrupt(f, "a_table", (1, 2), tuple(reversed(row))))
    outcomes["unit/a_e1"] = check_unit(_corrupt(s, "a_table", (0, 1), (Fraction(0), Fraction(-1))))
    ok = all(not r.passed and r.counterexample for r in outcomes.values())
    return ok, ", ".join(f"{k}:{'caught' if not r.passed else 'MISSED'}" for k, r in outcomes.items())


def criterion_8():
    runs = []
    for name, prob, levels in (("A2", a2_problem(), (3, 4, 5)), ("Fermat", fermat_problem(), (3, 4)),
                               ("Dwork", dwork_problem(), (3, 4))):
        for L in levels:
            runs.append((f"{name} L{L}", run(prob, L)))
    base = dict(runs)["A2 L5"]
    runs.append(("A2 corrupted", _corrupt(base, "a_table", (1, 1, 1, 1), (Fraction(3), Fraction(0)))))
    violations = []
    passing = 0
    for name, s in runs:
        if check_fqm11(s).passed:
            passing += 1
            if not all(associativity_by_order(s).values()):
                violations.append(name)
    return not violations and passing >= 7, (f"{passing} fqm11-passing runs, "
                                             f"associativity failures among them: {violations or 'none'}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
            criterion_8]


def _line(k, ok, detail):
    return f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}"


@pytest.mark.parametrize("k", range(1, len(CRITERIA) + 1))
def test_criterion(k, capsys):
    ok, detail = CRITERIA[k - 1]()
    with capsys.disabled():
        print("\n" + _line(k, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for k, fn in enumerate(CRITERIA, 1):
        ok, detail = fn()
        failures += not ok
        print(_line(k, ok, detail), flush=True)
    sys.exit(1 if failures else 0)
