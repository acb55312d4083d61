import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from flatf.engine import run  # noqa: E402
from flatf.poly import parse_poly  # noqa: E402
from flatf.polyvector import ChargeSpec  # noqa: E402
from flatf.quotient import Problem, compute_basis  # noqa: E402

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"

FERMAT_VARS = ("x1", "x2", "x3")
DWORK_VARS = ("y", "z0", "z1", "z2")


def a2_problem():
    return Problem(("x",), parse_poly("1/3*x^3", ["x"]))


def fermat_problem():
    return Problem(FERMAT_VARS, parse_poly("1/3*(x1^3 + x2^3 + x3^3)", FERMAT_VARS))


def dwork_problem():
    return Problem(DWORK_VARS, parse_poly("y*(z0^3 + z1^3 + z2^3)", DWORK_VARS),
                   charges=ChargeSpec((-3, 1, 1, 1)))


@pytest.fixture(scope="session")
def a2():
    return a2_problem()


@pytest.fixture(scope="session")
def fermat():
    return fermat_problem()


@pytest.fixture(scope="session")
def dwork():
    return dwork_problem()


@pytest.fixture(scope="session")
def a2_structure(a2):
    return run(a2, 5)


@pytest.fixture(scope="session")
def fermat_structure(fermat):
    return run(fermat, 4)


@pytest.fixture(scope="session")
def dwork_structure(dwork):
    return run(dwork, 4)


@pytest.fixture(scope="session")
def a2_basis(a2):
    return compute_basis(a2)


@pytest.fixture(scope="session")
def fermat_basis(fermat):
    return compute_basis(fermat)


@pytest.fixture(scope="session")
def dwork_basis(dwork):
    return compute_basis(dwork)


@pytest.fixture
def cache_dir(tmp_path, monkeypatch):
    d = tmp_path / "cache"
    monkeypatch.setenv("FLATF_CACHE_DIR", str(d))
    return d
