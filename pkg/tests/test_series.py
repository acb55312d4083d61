from fractions import Fraction

import pytest

from flatf.series import TruncatedSeries, exponent_vectors, factorial_weight, to_multiset


def s(dim, order, coeffs):
    return TruncatedSeries(dim, order, {e: Fraction(c) for e, c in coeffs.items()})


def test_exponent_enumeration():
    es = list(exponent_vectors(2, 2))
    assert es == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert len(list(exponent_vectors(8, 2))) == 45


def test_multiset_and_weights():
    assert to_multiset((2, 0, 1)) == (0, 0, 2)
    assert factorial_weight((3, 2)) == 12


def test_product_truncates():
    a = s(1, 2, {(0,): 1, (1,): 1})
    sq = a * a
    assert sq.coeffs == {(0,): 1, (1,): 2, (2,): 1}
    cube = sq * a
    assert cube.coeffs == {(0,): 1, (1,): 3, (2,): 3}


def test_mixed_orders_use_the_smaller():
    a = s(2, 3, {(3, 0): 1, (0, 0): 1})
    b = s(2, 1, {(1, 0): 1})
    assert (a + b).order == 1
    assert (a + b).coeffs == {(0, 0): 1, (1, 0): 1}


def test_cancellation_and_derivative():
    a = s(2, 2, {(1, 1): 3, (0, 2): 1})
    assert (a - a).is_zero()
    d = a.derivative(1)
    assert d.order == 1
    assert d.coeffs == {(1, 0): 3, (0, 1): 2}
    assert a.nonzero_orders() == [2]
    assert a.truncate(1).is_zero()


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        s(1, 1, {}) + s(2, 1, {})
