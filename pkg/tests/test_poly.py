from fractions import Fraction

import pytest

from flatf.poly import (MonomialOrder, Poly, PolyParseError, format_fraction, format_poly, mono_divides,
                        mono_lcm, parse_poly)

X = ["x1", "x2", "x3"]


def p(text, names=X):
    return parse_poly(text, names)


def test_zero_coefficients_are_never_stored():
    q = p("x1 + x2") - p("x2")
    assert q.terms == {(1, 0, 0): 1}
    assert not (q - q)
    assert (q - q).terms == {}


def test_whitespace_is_insignificant():
    assert p("  x1 *  x2 ") == p("x1*x2")
    assert p("\tx1\n") == p("x1")


def test_product_and_power():
    assert p("(x1 + x2)^2") == p("x1^2 + 2*x1*x2 + x2^2")
    assert p("(x1 - 1)^3") * p("0") == 0
    assert p("x1^0") == 1


def test_partials_exact_rationals():
    f = p("1/3*x1^3 + 1/2*x1*x2^2")
    assert f.partial(0) == p("x1^2 + 1/2*x2^2")
    assert f.partial(1) == p("x1*x2")
    assert f.partial(2) == 0


def test_format_descending_degrevlex():
    assert format_poly(p("1 + x1^2 + 1/3*x1^3"), X) == "1/3*x1^3 + x1^2 + 1"
    assert format_poly(p("-x2 + x1"), X) == "x1 - x2"
    assert format_poly(Poly.zero(3), X) == "0"
    assert format_fraction(Fraction(-6, 4)) == "-3/2"


@pytest.mark.parametrize("text", ["x1 x2", "2x1", "x1^-1", "x1^x2", "1/0", "x1 +", "(x1", "x4", "x1 $ 2"])
def test_malformed_input_is_rejected(text):
    with pytest.raises(PolyParseError):
        p(text)


def test_parse_error_reports_position():
    with pytest.raises(PolyParseError) as err:
        p("x1 + 3/0")
    assert err.value.pos == 7


def test_rational_literal_only_between_integers():
    assert p("3/4*x1") == p("x1").scale(Fraction(3, 4))
    with pytest.raises(PolyParseError):
        p("x1/2")


def test_degrevlex_and_deglex_differ():
    a, b = (1, 0, 1), (0, 2, 0)
    grevlex = MonomialOrder("degrevlex")
    lex = MonomialOrder("deglex")
    assert grevlex.key(b) > grevlex.key(a)
    assert lex.key(a) > lex.key(b)


def test_precedence_reorders_variables():
    o = MonomialOrder("deglex", precedence=[2, 1, 0])
    assert p("x1 + x3").leading_monomial(o) == (0, 0, 1)
    assert p("x1 + x3").leading_monomial() == (1, 0, 0)
    with pytest.raises(ValueError):
        MonomialOrder("deglex", precedence=[0, 0, 1])
    with pytest.raises(ValueError):
        MonomialOrder("lex")


def test_order_roundtrips_through_dict():
    o = MonomialOrder("wdegrevlex", precedence=[1, 0, 2], weights=[1, 2, 3])
    assert MonomialOrder.from_dict(o.to_dict()) == o


def test_monomial_helpers():
    assert mono_divides((1, 0, 2), (1, 1, 2))
    assert not mono_divides((2, 0, 0), (1, 1, 2))
    assert mono_lcm((2, 0, 1), (1, 3, 0)) == (2, 3, 1)


def test_mismatched_variable_counts_rejected():
    with pytest.raises(ValueError):
        Poly.var(0, 2) + Poly.var(0, 3)
