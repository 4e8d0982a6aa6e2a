"""Tests for the Gamma kernel."""

import cmath

import mpmath
import pytest
from hyperflux.errors import PoleError
from hyperflux.gamma import (
    gamma,
    gamma_product,
    gamma_ratio,
    log_gamma,
    nonpositive_integer,
    pochhammer,
    pochhammer_table,
)


@pytest.mark.parametrize(
    "z",
    [0.5, 1.0, 3.7, 12.25, 0.3 + 0.4j, 2.0 - 1.5j, -0.7 + 0.2j, -3.4 - 1.1j, 0.01 + 5.0j],
)
def test_log_gamma_matches_mpmath(z):
    """log_gamma follows the principal branch of mpmath.loggamma."""
    expected = complex(mpmath.loggamma(z))
    assert abs(log_gamma(z) - expected) <= 1e-12 * max(1.0, abs(expected))


@pytest.mark.parametrize("z", [-20.5 - 0.1j, -35.2 + 0.7j, -12.9 + 1e-3j, -50.5 - 2.0j])
def test_log_gamma_far_left_by_recurrence(z):
    """Shifting up by the recurrence keeps the principal branch far left of the origin."""
    expected = complex(mpmath.loggamma(z))
    assert abs(log_gamma(z) - expected) <= 1e-13 * max(1.0, abs(expected))
    assert abs(cmath.exp(log_gamma(z)) - complex(mpmath.gamma(z))) <= 1e-11 * abs(
        complex(mpmath.gamma(z))
    )


@pytest.mark.parametrize("z", [-2.5, -0.5, -7.3, 1e-3])
def test_gamma_on_negative_reals(z):
    """Gamma is right on the negative real axis, where only the modulus branch matters."""
    expected = complex(mpmath.gamma(z))
    assert abs(gamma(z) - expected) <= 1e-12 * abs(expected)


@pytest.mark.parametrize("z", [0, -1, -4, -4 + 0j])
def test_log_gamma_poles(z):
    """Nonpositive integers are poles."""
    with pytest.raises(PoleError):
        log_gamma(z)


def test_nonpositive_integer():
    """Pole detection uses the configured tolerance."""
    assert nonpositive_integer(-3 + 1e-12)
    assert not nonpositive_integer(-3 + 1e-6)
    assert not nonpositive_integer(2)


def test_pochhammer():
    """Rising factorials match mpmath.rf, including zero crossings."""
    for a in (0.3, 1.5 + 0.2j, -2.5):
        for k in range(6):
            assert abs(pochhammer(a, k) - complex(mpmath.rf(a, k))) <= 1e-12 * max(
                1.0, abs(complex(mpmath.rf(a, k)))
            )
    assert pochhammer(-2, 3) == 0
    with pytest.raises(ValueError):
        pochhammer(1.0, -1)


def test_pochhammer_table():
    """The table is the running product (a)_0 .. (a)_K."""
    table = pochhammer_table(0.5, 4)
    assert list(table.real) == pytest.approx([1.0, 0.5, 0.75, 1.875, 6.5625])


def test_gamma_ratio_generic():
    """Generic ratios agree with mpmath."""
    value = gamma_ratio([0.3 + 0.1j, 2.2], [1.7 - 0.4j])
    expected = complex(mpmath.gamma(0.3 + 0.1j) * mpmath.gamma(2.2) / mpmath.gamma(1.7 - 0.4j))
    assert abs(value - expected) <= 1e-12 * abs(expected)


def test_gamma_ratio_pairs_poles():
    """Gamma(-3)/Gamma(-5) is the limit (-5)(-4) = 20."""
    assert gamma_ratio([-3], [-5]) == pytest.approx(20)
    assert gamma_ratio([-5], [-3]) == pytest.approx(1 / 20)
    assert gamma_ratio([-2, 1.5], [-2]) == pytest.approx(complex(mpmath.gamma(1.5)))


def test_gamma_ratio_denominator_pole_is_zero():
    """Only a denominator pole gives exactly zero."""
    assert gamma_ratio([1.0], [-2]) == 0


def test_gamma_ratio_uncancelled_pole():
    """A lone numerator pole raises."""
    with pytest.raises(PoleError):
        gamma_ratio([-2], [1.0])


def test_gamma_product_and_reflection():
    """Gamma(z)Gamma(1-z) = pi / sin(pi z)."""
    z = 0.3 + 0.2j
    assert abs(gamma_product([z, 1 - z]) - cmath.pi / cmath.sin(cmath.pi * z)) <= 1e-12
