import pytest

from flatf.poly import Poly, parse_poly
from flatf.polyvector import (ChargeError, ChargeSpec, PolyVector, apply_Delta, apply_delta_S, bv_bracket,
                              charge_check, format_polyvector, odd_partial, parse_polyvector)

X = ["x1", "x2"]


def pv(text, names=X):
    return parse_polyvector(text, names)


def test_koszul_sign_on_products():
    a = pv("x1*e[2]")
    b = pv("x2*e[1]")
    assert a * b == pv("-x1*x2*e[1,2]")
    assert pv("e[1]") * pv("e[1]") == 0


def test_odd_derivative_sign_by_position():
    assert odd_partial(pv("e[1,2]"), 0) == pv("e[2]")
    assert odd_partial(pv("e[1,2]"), 1) == pv("-e[1]")
    assert odd_partial(pv("x1"), 0) == 0


def test_delta_S_contracts_with_gradient():
    S = parse_poly("1/3*x1^3 + x1*x2^2", X)
    out = apply_delta_S(S, pv("e[1] + x1*e[2]"))
    assert out == PolyVector.from_poly(parse_poly("x1^2 + x2^2 + 2*x1^2*x2", X))
    assert apply_delta_S(S, apply_delta_S(S, pv("x2*e[1,2]"))) == 0


def test_Delta_is_divergence_on_vector_fields():
    assert apply_Delta(pv("x1^2*e[1] + x1*x2*e[2]")) == PolyVector.from_poly(parse_poly("3*x1", X))
    assert apply_Delta(apply_Delta(pv("x1*x2^2*e[1,2]"))) == 0


def test_bracket_values():
    assert bv_bracket(pv("x1"), pv("e[1]")) == PolyVector.from_poly(Poly.const(1, 2))
    assert bv_bracket(pv("x1^2"), pv("e[1]")) == pv("2*x1")
    with pytest.raises(ValueError):
        bv_bracket(pv("x1 + e[1]"), pv("e[2]"))


def test_degree_of_inhomogeneous_element_raises():
    a = pv("x1 + e[1]")
    assert not a.is_homogeneous()
    with pytest.raises(ValueError):
        a.degree()
    assert pv("e[1,2]").degree() == -2


@pytest.mark.parametrize("text", ["0", "x1", "e[1]", "-e[1,2]", "(x1 + 1/2*x2^2)*e[2] - 3*x1*e[1,2] + x2"])
def test_text_roundtrip(text):
    a = pv(text)
    assert pv(format_polyvector(a, X)) == a


@pytest.mark.parametrize("text", ["e[2,1]", "e[0]", "e[3]", "e[1,1]"])
def test_bad_eta_indices(text):
    with pytest.raises(ValueError):
        pv(text)


def test_charge_bookkeeping():
    names = ["y", "z0", "z1", "z2"]
    spec = ChargeSpec((-3, 1, 1, 1))
    assert charge_check(parse_poly("y*(z0^3 + z1^3)", names), spec) == 0
    # eta carries minus the charge of its variable
    assert charge_check(parse_polyvector("z0*e[1]", names), spec) == 4
    with pytest.raises(ChargeError):
        charge_check(parse_poly("y + z0", names), spec)
    with pytest.raises(ValueError):
        ChargeSpec((0, 1))
