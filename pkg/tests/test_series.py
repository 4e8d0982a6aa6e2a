"""Tests for truncated power series."""

import math

import numpy as np
import pytest
from hyperflux.errors import DimensionMismatch
from hyperflux.series import (
    TruncatedSeries,
    evaluate,
    max_relative_difference,
    monomial_indices,
    series_mul,
)
from hyperflux.transforms import elementary_factor


def test_monomial_order():
    """Degree first, then x_1 before x_2 within a degree."""
    rows = [tuple(r) for r in monomial_indices(2, 2)]
    assert rows == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


@pytest.mark.parametrize("n,D", [(1, 5), (2, 4), (3, 6)])
def test_monomial_count(n, D):
    """There are C(n+D, n) indices of total degree at most D."""
    assert len(monomial_indices(n, D)) == math.comb(n + D, n)


def test_from_dict_drops_high_degrees():
    """Entries beyond the truncation are ignored."""
    s = TruncatedSeries.from_dict(2, 2, {(1, 1): 2.0, (3, 0): 5.0})
    assert s.coefficient((1, 1)) == 2.0
    assert s.coefficient((3, 0)) == 0
    assert list(s.items()) == [((1, 1), 2.0)]


def test_from_dict_rejects_bad_indices():
    """Wrong arity and negative exponents are errors."""
    with pytest.raises(DimensionMismatch):
        TruncatedSeries.from_dict(2, 2, {(1,): 1.0})
    with pytest.raises(ValueError):
        TruncatedSeries.from_dict(2, 2, {(1, -1): 1.0})


def test_coefficient_count_checked():
    """The coefficient vector length must match n and D."""
    with pytest.raises(DimensionMismatch):
        TruncatedSeries(2, 2, np.zeros(5))


def test_cauchy_product():
    """(1 + x)(1 - x) = 1 - x^2."""
    a = TruncatedSeries.from_dict(1, 4, {(0,): 1, (1,): 1})
    b = TruncatedSeries.from_dict(1, 4, {(0,): 1, (1,): -1})
    product = series_mul(a, b)
    assert dict(product.items()) == {(0,): 1, (2,): -1}


def test_product_of_exponentials():
    """exp(x + y) exp(x) has coefficients 2^i / (i! j!)."""
    u = elementary_factor("exponential_sum", [], 2, 6)
    v = elementary_factor("exponential_sum", [], 2, 6, support=(0,))
    w = u * v
    assert w.coefficient((3, 2)) == pytest.approx(8 / (6 * 2))


def test_add_needs_matching_variables():
    """Series in different variable counts do not add."""
    with pytest.raises(DimensionMismatch):
        TruncatedSeries.zeros(1, 3) + TruncatedSeries.zeros(2, 3)


def test_add_truncates_to_lower_degree():
    """Sums live at the smaller truncation."""
    s = TruncatedSeries.constant(1.0, 2, 5) + TruncatedSeries.constant(2.0, 2, 3)
    assert s.D == 3
    assert s.coefficient((0, 0)) == 3.0


def test_evaluate_exponential():
    """Summing exp(x) at 0.5 gives sqrt(e) with a tiny shell estimate."""
    value, shell = evaluate(elementary_factor("exponential_sum", [], 1, 30), [0.5])
    assert abs(value - math.exp(0.5)) <= 1e-14
    assert shell < 1e-30


def test_evaluate_checks_point():
    """The point must have n coordinates."""
    with pytest.raises(DimensionMismatch):
        evaluate(TruncatedSeries.zeros(2, 3), [0.1])


def test_max_relative_difference_floor():
    """Small coefficients are compared absolutely."""
    a = TruncatedSeries.from_dict(1, 2, {(0,): 1e-3, (1,): 100.0})
    b = TruncatedSeries.from_dict(1, 2, {(0,): 2e-3, (1,): 101.0})
    assert max_relative_difference(a, b) == pytest.approx(1 / 101)


def test_json_keeps_reliable_degree():
    """Reduced reliability survives serialization."""
    s = TruncatedSeries.from_dict(2, 3, {(1, 0): 0.5 + 0.25j})
    s = s.with_coeffs(s.coeffs, reliable=2)
    data = s.to_json()
    assert data["reliable"] == 2
    back = TruncatedSeries.from_json(data)
    assert back.reliable == 2
    assert back.coefficient((1, 0)) == 0.5 + 0.25j


def test_truncate_cannot_extend():
    """Raising the truncation is refused."""
    with pytest.raises(ValueError):
        TruncatedSeries.zeros(1, 3).truncate(4)
