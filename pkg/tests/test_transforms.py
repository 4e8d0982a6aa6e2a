"""Tests for the K and L coefficient transforms."""

import mpmath
import numpy as np
import pytest
from hyperflux.errors import DimensionMismatch, PoleError, TruncationError
from hyperflux.quad import riemann_liouville
from hyperflux.series import TruncatedSeries, evaluate, max_relative_difference
from hyperflux.transforms import (
    MonomialMap,
    TransformSpec,
    apply_K,
    apply_L,
    apply_transform,
    elementary_factor,
    first_variable_multiplier,
    multiplier_K,
    multiplier_L,
    substitute_monomial_map,
)


@pytest.fixture
def rng():
    """Seeded generator."""
    return np.random.default_rng(11)


def random_series(rng, n, D):
    size = len(TruncatedSeries.zeros(n, D).coeffs)
    return TruncatedSeries(n, D, rng.normal(size=size) + 1j * rng.normal(size=size))


def test_multiplier_matches_gamma_law():
    """K multiplies x^m by Gamma(lambda+m) / Gamma(|lambda+m| + mu)."""
    spec = TransformSpec.full(0.7 + 0.2j, [0.4, 1.1 - 0.3j])
    m = (2, 3)
    numerator = mpmath.gamma(0.4 + 2) * mpmath.gamma(1.1 - 0.3j + 3)
    expected = numerator / mpmath.gamma(0.4 + 1.1 - 0.3j + 5 + 0.7 + 0.2j)
    assert abs(multiplier_K(spec, m) - complex(expected)) <= 1e-12 * abs(complex(expected))


def gamma_law(lam, mu, pm):
    args = [mpmath.mpc(v) + int(k) for v, k in zip(lam, pm)]
    return complex(mpmath.fprod([mpmath.gamma(a) for a in args]) / mpmath.gamma(sum(args) + mu))


def test_multiplier_under_monomial_map():
    """p = ((1,1),(0,1)), m = (1,1) gives Gamma(l1+2) Gamma(l2+1) / Gamma(l1+l2+3+mu)."""
    lam, mu = (0.4 + 0.1j, 0.9), 0.6 - 0.2j
    spec = TransformSpec((0, 1), mu, lam, MonomialMap(np.array([[1, 1], [0, 1]])))
    expected = complex(
        mpmath.gamma(lam[0] + 2) * mpmath.gamma(lam[1] + 1) / mpmath.gamma(sum(lam) + 3 + mu)
    )
    assert abs(multiplier_K(spec, (1, 1)) - expected) <= 1e-12 * abs(expected)
    assert abs(multiplier_L(spec, (1, 1)) * expected - 1) <= 1e-12


@pytest.mark.parametrize(
    "p,relaxed",
    [
        (None, False),
        ([[1, 1], [0, 1]], False),
        ([[1, 0], [1, 1]], False),
        ([[1, 1], [0, -1]], True),
    ],
)
def test_multiplier_laws_on_random_draws(p, relaxed):
    """K and L multipliers agree with mpmath on 50 random draws per map."""
    rng = np.random.default_rng(23)
    mapping = MonomialMap(np.array(p)) if p is not None else None
    for _ in range(50):
        lam = tuple(rng.uniform(0.3, 1.3, 2) + 1j * rng.uniform(0.3, 1.3, 2))
        mu = complex(rng.uniform(0.3, 1.3) + 1j * rng.uniform(0.3, 1.3))
        m = tuple(int(k) for k in rng.integers(0, 6, 2))
        spec = TransformSpec((0, 1), mu, lam, mapping, relaxed)
        pm = mapping.image(m) if mapping is not None else m
        expected = gamma_law(lam, mu, pm)
        assert abs(multiplier_K(spec, m) - expected) <= 1e-11 * abs(expected)
        assert abs(multiplier_L(spec, m) * expected - 1) <= 1e-11


@pytest.mark.parametrize("n,D", [(1, 8), (2, 6), (3, 5)])
def test_K_and_L_are_inverse(rng, n, D):
    """K o L and L o K are the identity on generic parameters."""
    u = random_series(rng, n, D)
    spec = TransformSpec.full(0.6 + 0.3j, list(0.5 + rng.uniform(size=n) + 0.2j))
    assert max_relative_difference(apply_K(apply_L(u, spec), spec), u) <= 1e-11
    assert max_relative_difference(apply_L(apply_K(u, spec), spec), u) <= 1e-11


def test_subset_transform_leaves_other_variables(rng):
    """A transform in x_2 only scales by a function of m_2."""
    u = random_series(rng, 2, 4)
    spec = TransformSpec((1,), 0.8, (0.6,))
    v = apply_transform(u, spec, "K")
    for m, c in u.items():
        expected = c * complex(mpmath.gamma(0.6 + m[1]) / mpmath.gamma(0.6 + m[1] + 0.8))
        assert abs(v.coefficient(m) - expected) <= 1e-12 * max(1.0, abs(expected))


def test_first_variable_reduction():
    """On a function of x_1 alone, K is Gamma(lambda') times a one-variable Euler integral."""
    mu, lam = 0.9, [0.6, 0.7, 1.2]
    spec = TransformSpec.full(mu, lam)
    poly = [0.8, -0.3, 0.5, 0.25]
    u = TruncatedSeries.from_dict(3, 6, {(k, 0, 0): c for k, c in enumerate(poly)})
    x = 0.5
    mu_single = mu + lam[1] + lam[2]
    integral = riemann_liouville(
        lambda t: np.polynomial.polynomial.polyval(t, poly),
        0.0,
        mu_single,
        x,
        left_power=lam[0] - 1,
    )
    scale = complex(mpmath.gamma(lam[1]) * mpmath.gamma(lam[2]))
    expected = scale * x ** (1 - lam[0] - mu_single) * integral

    value, _ = evaluate(apply_K(u, spec), [x, 0.0, 0.0])
    assert abs(value - expected) <= 1e-10 * abs(expected)
    reduced = sum(c * first_variable_multiplier(spec, k) * x**k for k, c in enumerate(poly))
    assert abs(reduced - expected) <= 1e-10 * abs(expected)


def test_pole_in_multiplier_reports_index():
    """lambda = -2 puts x^0 on a Gamma pole."""
    spec = TransformSpec.full(0.5, [-2.0])
    with pytest.raises(PoleError) as info:
        apply_K(TruncatedSeries.constant(1.0, 1, 3), spec)
    assert info.value.index == (0,)


def test_zero_coefficients_skip_poles():
    """Poles at vanishing coefficients are never evaluated."""
    spec = TransformSpec.full(0.5, [-2.0])
    u = TruncatedSeries.from_dict(1, 4, {(3,): 1.0})
    assert apply_K(u, spec).coefficient((3,)) != 0


def test_spec_validation():
    """Subset and lambda must agree, and the subset must fit the series."""
    with pytest.raises(DimensionMismatch):
        TransformSpec((0, 1), 0.5, (0.3,))
    with pytest.raises(ValueError):
        TransformSpec((0, 0), 0.5, (0.3, 0.4))
    with pytest.raises(DimensionMismatch):
        apply_K(TruncatedSeries.zeros(1, 3), TransformSpec((1,), 0.5, (0.3,)))


def test_strict_map_rows_must_be_nonnegative():
    """Selecting a row with -1 needs relaxed mode."""
    ratios = MonomialMap.ratios(2)
    with pytest.raises(ValueError):
        TransformSpec((1,), 0.5, (0.3,), map=ratios)
    assert TransformSpec((1,), 0.5, (0.3,), map=ratios, relaxed=True).relaxed


def test_monomial_map_must_be_unimodular():
    """det = 2 is rejected."""
    with pytest.raises(ValueError):
        MonomialMap(np.array([[2, 0], [0, 1]]))
    ratios = MonomialMap.ratios(3)
    assert ratios.inverted().inverted().p.tolist() == ratios.p.tolist()


def test_spec_json():
    """Specs read back with the same subset, parameters and map."""
    spec = TransformSpec((0,), 0.5 + 0.1j, (0.3,), map=MonomialMap.ratios(2))
    back = TransformSpec.from_json(spec.to_json())
    assert back.subset == (0,)
    assert back.mu == 0.5 + 0.1j
    assert back.map.p.tolist() == [[1, 1], [0, -1]]


def test_substitute_monomial_map():
    """x^(1,1) moves to x^(2,1) under x -> (x_1, x_1 x_2)."""
    mapping = MonomialMap(np.array([[1, 1], [0, 1]]))
    u = TruncatedSeries.from_dict(2, 4, {(1, 1): 3.0})
    assert dict(substitute_monomial_map(u, mapping).items()) == {(2, 1): 3.0}


def test_substitute_negative_exponent():
    """The ratio map sends x_2 to x_1 / x_2."""
    u = TruncatedSeries.from_dict(2, 3, {(0, 1): 1.0})
    with pytest.raises(TruncationError):
        substitute_monomial_map(u, MonomialMap.ratios(2))


def test_binomial_sum_coefficients():
    """(1 - x - y)^{-l} has x y coefficient (l)_2."""
    u = elementary_factor("binomial_sum", [0.4], 2, 3)
    assert u.coefficient((1, 1)) == pytest.approx(0.4 * 1.4)
    assert u.coefficient((2, 0)) == pytest.approx(0.4 * 1.4 / 2)


def test_binomial_per_var_coefficients():
    """prod (1 - x_i)^{-l_i} factorizes."""
    u = elementary_factor("binomial_per_var", [0.5, 2.0], 2, 3)
    assert u.coefficient((1, 2)) == pytest.approx(0.5 * (2.0 * 3.0 / 2))


def test_exponential_support():
    """exp(x_2) has no x_1 terms."""
    u = elementary_factor("exponential_sum", [], 2, 4, support=(1,))
    assert u.coefficient((1, 0)) == 0
    assert u.coefficient((0, 3)) == pytest.approx(1 / 6)


def test_power_monomial_shift():
    """x^(1,0) times a series shifts every term and lowers nothing below D."""
    base = elementary_factor("exponential_sum", [], 2, 3)
    shifted = elementary_factor("power_monomial", [1, 0], 2, 3, base=base)
    assert shifted.coefficient((1, 0)) == 1
    assert shifted.coefficient((0, 0)) == 0
    assert shifted.coefficient((2, 1)) == pytest.approx(1.0)
    with pytest.raises(TruncationError):
        elementary_factor("power_monomial", [-1, 0], 2, 3, base=base)
