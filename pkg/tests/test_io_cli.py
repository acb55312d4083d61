import json
from pathlib import Path

import pytest

from flatf.cli import main
from flatf.io import (HashMismatchError, SchemaError, cached_gbasis, load_problem, load_result,
                      problem_from_dict, resolve_cache_dir)

from conftest import PROBLEMS

GOLDEN = Path(__file__).parent / "golden"


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def test_minimal_problem():
    pf = problem_from_dict({"variables": ["x"], "potential": "1/3*x^3", "max_level": 4})
    assert pf.max_level == 4 and pf.problem.charges is None
    assert len(pf.hash) == 64


def test_dwork_problem_file():
    pf = load_problem(PROBLEMS / "dwork_cubic.json")
    assert pf.problem.charges.charges == (-3, 1, 1, 1)
    assert pf.problem.bound == 6


def test_hash_ignores_formatting_but_not_content():
    a = problem_from_dict({"variables": ["x"], "potential": "1/3*x^3", "max_level": 4})
    b = problem_from_dict({"variables": ["x"], "potential": " 1/3 * x^3 ",
                           "max_level": 6})
    c = problem_from_dict({"variables": ["x"], "potential": "x^3", "max_level": 4})
    assert a.hash == b.hash != c.hash


@pytest.mark.parametrize("doc,path", [
    ({"variables": ["y", "z0", "z1", "z2"], "potential": "y*z0^3", "charges": [-3, 1, 1], "max_level": 3},
     "$.charges"),
    ({"variables": ["x"], "potential": "x^3", "max_level": 1}, "$.max_level"),
    ({"variables": ["x"], "potential": "x^3"}, "$.max_level"),
    ({"variables": ["x", "x"], "potential": "x^3", "max_level": 2}, "$.variables"),
    ({"variables": ["x"], "potential": "x y", "max_level": 2}, "$.potential"),
    ({"variables": ["x"], "potential": "x^3", "max_level": 2, "basis": ["1", "q"]}, "$.basis[1]"),
    ({"variables": ["x"], "potential": "x^3", "max_level": 2, "options": {"fast": True}}, "$.options"),
    ({"variables": ["x"], "potential": "x^3", "max_level": 2, "monomial_order": {"name": "lex"}},
     "$.monomial_order.name"),
    ({"variables": ["y", "z"], "potential": "y*z^2", "charges": [-3, 1], "max_level": 2}, "$.charges"),
    ({"variables": ["x"], "potential": "x^3", "max_level": 2, "extra": 1}, "$"),
])
def test_schema_errors_carry_field_path(doc, path):
    with pytest.raises(SchemaError) as err:
        problem_from_dict(doc)
    assert err.value.path == path


def test_precedence_by_name():
    pf = problem_from_dict({"variables": ["a", "b"], "potential": "a^3 + b^3", "max_level": 2,
                            "monomial_order": {"name": "deglex", "precedence": ["b", "a"]}})
    assert pf.problem.order.precedence == (1, 0)


def test_cache_roundtrip_and_rejects_tampering(tmp_path):
    pf = load_problem(PROBLEMS / "fermat_cubic.json")
    gb = cached_gbasis(pf, tmp_path)
    entry = tmp_path / f"{pf.hash}.gb.json"
    assert entry.exists()
    assert cached_gbasis(pf, tmp_path).gb == gb.gb
    doc = json.loads(entry.read_text())
    doc["cofactors"][0][0] = [[[0, 0, 0], "2"]]
    entry.write_text(json.dumps(doc))
    assert cached_gbasis(pf, tmp_path).gb == gb.gb
    assert json.loads(entry.read_text())["cofactors"] != doc["cofactors"]


def test_cache_dir_precedence(monkeypatch):
    monkeypatch.setenv("FLATF_CACHE_DIR", "/env")
    assert resolve_cache_dir("/flag", "/file") == Path("/flag")
    assert resolve_cache_dir(None, "/file") == Path("/env")
    monkeypatch.delenv("FLATF_CACHE_DIR")
    assert resolve_cache_dir(None, "/file") == Path("/file")
    assert resolve_cache_dir(None, None) is None


def test_compute_writes_golden_a2_result(tmp_path, cache_dir, capsys):
    out = tmp_path / "a2.out.json"
    assert main(["compute", str(PROBLEMS / "a2.json"), "--out", str(out)]) == 0
    assert "dim J_S = 2" in capsys.readouterr().out
    assert out.read_text() == (GOLDEN / "a2_level4.json").read_text()
    assert list(cache_dir.glob("*.gb.json"))
    doc = json.loads(out.read_text())
    entry = next(e for e in doc["a_table"] if e["index"] == [1, 1, 1])
    assert entry["a"] == ["-1", "0"]


def test_result_reload_verifies_without_recompute(tmp_path, cache_dir):
    out = tmp_path / "f.json"
    assert main(["compute", str(PROBLEMS / "fermat_cubic.json"), "--out", str(out), "--max-level", "3"]) == 0
    structure, pf = load_result(out)
    assert structure.dim == 8 and structure.level == 3
    assert main(["verify", str(out)]) == 0


def test_verify_detects_tampered_coefficient(tmp_path, cache_dir, capsys):
    out = tmp_path / "a2.json"
    main(["compute", str(PROBLEMS / "a2.json"), "--out", str(out)])
    doc = json.loads(out.read_text())
    entry = next(e for e in doc["a_table"] if e["index"] == [1, 1, 1])
    entry["a"][0] = "-2"
    out.write_text(json.dumps(doc))
    capsys.readouterr()
    assert main(["verify", str(out)]) == 1
    assert "FAIL  fqm11" in capsys.readouterr().out


def test_verify_rejects_hash_mismatch(tmp_path, cache_dir):
    out = tmp_path / "a2.json"
    main(["compute", str(PROBLEMS / "a2.json"), "--out", str(out)])
    doc = json.loads(out.read_text())
    doc["problem"]["potential"] = "x^3"
    out.write_text(json.dumps(doc))
    with pytest.raises(HashMismatchError):
        load_result(out)
    assert main(["verify", str(out)]) == 2


def test_usage_errors_exit_two(tmp_path, cache_dir, capsys):
    assert main(["compute", str(tmp_path / "missing.json")]) == 2
    assert main(["axioms", str(PROBLEMS / "a2.json"), "--trials", "0"]) == 2
    assert main(["verify", str(PROBLEMS / "a2.json"), "--checks", "nope"]) == 2
    assert main(["frobnicate"]) == 2
    assert main([]) == 2
    bad = write(tmp_path, "bad.json", {"variables": ["x"], "potential": "x^3", "max_level": 0})
    assert main(["compute", str(bad)]) == 2
    assert "$.max_level" in capsys.readouterr().err


def test_not_finite_exits_one(tmp_path, cache_dir):
    p = write(tmp_path, "p.json", {"variables": ["x", "y"], "potential": "x^2*y", "max_level": 2})
    assert main(["basis", str(p)]) == 1
    assert main(["compute", str(p)]) == 1


def test_axioms_output_is_deterministic(capsys):
    args = ["axioms", str(PROBLEMS / "a2.json"), "--trials", "200", "--seed", "7", "--json"]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    assert capsys.readouterr().out == first
    assert first.startswith("PASS  dgbv_axioms")


def test_basis_command(cache_dir, capsys):
    assert main(["basis", str(PROBLEMS / "dwork_cubic.json")]) == 0
    out = capsys.readouterr().out
    assert "u[1] = y*z0*z1*z2" in out and "dim = 2" in out and "complete = true" in out


def test_verify_subset_and_json(tmp_path, cache_dir, capsys):
    out = tmp_path / "d.json"
    main(["compute", str(PROBLEMS / "dwork_cubic.json"), "--out", str(out)])
    capsys.readouterr()
    assert main(["verify", str(out), "--checks", "unit", "--json"]) == 0
    text = capsys.readouterr().out
    assert text.splitlines()[0] == "PASS  unit"
    assert json.loads(text.split("\n", 1)[1])[0]["check"] == "unit"
