"""Coefficient-multiplier transforms K^{mu,lambda} and L^{mu,lambda}.

Both act diagonally on monomials: K multiplies the coefficient of x^m by
Gamma(lambda + (pm)_S) / Gamma(|lambda + (pm)_S| + mu), L by the reciprocal, where S is the
selected subset of variables and p an optional unimodular monomial map.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionMismatch, PoleError, TruncationError
from .gamma import gamma_product, gamma_ratio, pochhammer_table
from .series import TruncatedSeries, index_lookup, monomial_indices

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MonomialMap:
    """Unimodular integer matrix p; x -> x^p sends x^m to x^{pm}."""
    p: np.ndarray
    inverse: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        p = np.array(self.p)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise DimensionMismatch(f"monomial map must be square, got shape {p.shape}")
        if not np.all(np.equal(np.round(p), p)):
            raise ValueError("monomial map entries must be integers")
        p = p.astype(np.int64)
        det = int(round(np.linalg.det(p)))
        if abs(det) != 1:
            raise ValueError(f"monomial map must be unimodular, det = {det}")
        q = np.rint(np.linalg.inv(p)).astype(np.int64)
        if not np.array_equal(p @ q, np.eye(len(p), dtype=np.int64)):
            raise ValueError("monomial map inverse is not integral")
        p.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "inverse", q)

    @property
    def n(self) -> int:
        return self.p.shape[0]

    @classmethod
    def identity(cls, n: int) -> "MonomialMap":
        return cls(np.eye(n, dtype=np.int64))

    @classmethod
    def ratios(cls, n: int) -> "MonomialMap":
        """x -> (x_1, x_1/x_2, ..., x_1/x_n); row 0 of p is all ones so (pm)_0 = |m|."""
        p = np.zeros((n, n), dtype=np.int64)
        p[0, :] = 1
        for j in range(1, n):
            p[j, j] = -1
        return cls(p)

    def image(self, m: Sequence[int]) -> np.ndarray:
        return self.p @ np.asarray(m, dtype=np.int64)

    def inverted(self) -> "MonomialMap":
        return MonomialMap(self.inverse)

    def to_json(self) -> list:
        return self.p.tolist()


def _complex(value: Any) -> complex:
    if isinstance(value, (list, tuple)):
        return complex(value[0], value[1])
    return complex(value)


@dataclass(frozen=True, eq=False)
class TransformSpec:
    """Parameters of K^{mu,lambda}_{x_S} or its monomial-map generalization.

    `subset` uses 0-based variable indices. Strict mode requires the selected rows of the map
    to be nonnegative; relaxed mode defines the transform by the multiplier law alone.
    """
    subset: Tuple[int, ...]
    mu: complex
    lam: Tuple[complex, ...]
    map: Optional[MonomialMap] = None
    relaxed: bool = False

    def __post_init__(self):
        subset = tuple(int(i) for i in self.subset)
        lam = tuple(_complex(v) for v in self.lam)
        object.__setattr__(self, "subset", subset)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu", _complex(self.mu))
        if len(set(subset)) != len(subset):
            raise ValueError(f"subset indices must be distinct: {list(subset)}")
        if len(lam) != len(subset):
            raise DimensionMismatch(f"{len(subset)} selected variables but {len(lam)} lambdas")
        if any(i < 0 for i in subset):
            raise ValueError(f"subset indices must be >= 0: {list(subset)}")
        if self.map is not None:
            if max(subset, default=-1) >= self.map.n:
                raise DimensionMismatch(f"subset {list(subset)} out of range for n={self.map.n}")
            if not self.relaxed and np.any(self.map.p[list(subset), :] < 0):
                raise ValueError("selected rows of the monomial map must be nonnegative")

    @classmethod
    def full(cls, mu: complex, lam: Sequence[complex]) -> "TransformSpec":
        """Transform in every variable with the identity map."""
        return cls(tuple(range(len(lam))), mu, tuple(lam))

    def check_dimension(self, n: int) -> None:
        if self.subset and max(self.subset) >= n:
            raise DimensionMismatch(f"subset {list(self.subset)} out of range for n={n}")
        if self.map is not None and self.map.n != n:
            raise DimensionMismatch(f"monomial map is {self.map.n}x{self.map.n}, series has n={n}")

    def arguments(self, m: Sequence[int]) -> np.ndarray:
        """lambda + (pm)_S."""
        pm = self.map.image(m) if self.map is not None else np.asarray(m, dtype=np.int64)
        return np.asarray(self.lam, dtype=complex) + pm[list(self.subset)]

    def to_json(self) -> Dict[str, Any]:
        return {
            "subset": list(self.subset),
            "mu": [self.mu.real, self.mu.imag],
            "lambda": [[v.real, v.imag] for v in self.lam],
            "p": self.map.to_json() if self.map is not None else None,
            "relaxed": self.relaxed,
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "TransformSpec":
        p = data.get("p")
        return cls(
            subset=tuple(data["subset"]),
            mu=_complex(data["mu"]),
            lam=tuple(_complex(v) for v in data["lambda"]),
            map=MonomialMap(np.array(p)) if p is not None else None,
            relaxed=bool(data.get("relaxed", False)),
        )


def multiplier_K(spec: TransformSpec, m: Sequence[int]) -> complex:
    args = spec.arguments(m)
    try:
        return gamma_ratio(list(args), [args.sum() + spec.mu])
    except PoleError as e:
        raise PoleError(f"K multiplier undefined: {e}", index=m) from e


def multiplier_L(spec: TransformSpec, m: Sequence[int]) -> complex:
    args = spec.arguments(m)
    try:
        return gamma_ratio([args.sum() + spec.mu], list(args))
    except PoleError as e:
        raise PoleError(f"L multiplier undefined: {e}", index=m) from e


class Direction(str, Enum):
    K = "K"
    L = "L"


def _apply(u: TruncatedSeries, spec: TransformSpec, multiplier) -> TruncatedSeries:
    spec.check_dimension(u.n)
    coeffs = np.array(u.coeffs, dtype=complex)
    for pos, (row, c) in enumerate(zip(u.indices, u.coeffs)):
        if c != 0:
            coeffs[pos] = c * multiplier(spec, row)
    return u.with_coeffs(coeffs)


def apply_K(u: TruncatedSeries, spec: TransformSpec) -> TruncatedSeries:
    """K^{mu,lambda} coefficientwise; zero coefficients stay zero."""
    return _apply(u, spec, multiplier_K)


def apply_L(u: TruncatedSeries, spec: TransformSpec) -> TruncatedSeries:
    """L^{mu,lambda} coefficientwise; inverse of apply_K."""
    return _apply(u, spec, multiplier_L)


def apply_transform(u: TruncatedSeries, spec: TransformSpec, direction: str) -> TruncatedSeries:
    if Direction(direction) is Direction.K:
        return apply_K(u, spec)
    return apply_L(u, spec)


def first_variable_multiplier(spec: TransformSpec, k: int) -> complex:
    """K multiplier on x_1^k for the full identity-map transform, via one variable.

    On functions of x_1 alone, K^{mu,lambda}_x reduces to Gamma(lambda') times the
    one-variable K^{mu+|lambda'|,lambda_1}_{x_1}, lambda' = (lambda_2, ..., lambda_n).
    """
    rest = spec.lam[1:]
    single = TransformSpec((0,), spec.mu + sum(rest), (spec.lam[0],))
    return gamma_product(rest) * multiplier_K(single, (k,))


def substitute_monomial_map(
    u: TruncatedSeries, mapping: MonomialMap, D: Optional[int] = None
) -> TruncatedSeries:
    """u(x^p): the coefficient of x^m moves to x^{pm}.

    Images above D are dropped; an image with a negative exponent raises TruncationError.
    The result is reliable up to the lowest degree whose preimage lies beyond u.reliable.
    """
    if mapping.n != u.n:
        raise DimensionMismatch(f"monomial map is {mapping.n}x{mapping.n}, series has n={u.n}")
    D = u.D if D is None else D
    out: Dict[Tuple[int, ...], complex] = {}
    for m, c in u.items():
        image = mapping.image(m)
        if np.any(image < 0):
            raise TruncationError(f"x^{list(m)} maps to a negative exponent {image.tolist()}")
        if image.sum() <= D:
            out[tuple(int(v) for v in image)] = c
    reliable = D
    for row in monomial_indices(u.n, D):
        pre = mapping.inverse @ row
        if np.all(pre >= 0) and pre.sum() > u.reliable:
            reliable = min(reliable, int(row.sum()) - 1)
    result = TruncatedSeries.from_dict(u.n, D, out)
    return result.with_coeffs(result.coeffs, reliable=max(reliable, 0))


class FactorKind(str, Enum):
    BINOMIAL_SUM = "binomial_sum"
    BINOMIAL_PER_VAR = "binomial_per_var"
    EXPONENTIAL_SUM = "exponential_sum"
    POWER_MONOMIAL = "power_monomial"


def _support_mask(indices: np.ndarray, n: int, support: Optional[Sequence[int]]) -> np.ndarray:
    if support is None:
        return np.ones(len(indices), dtype=bool)
    outside = [i for i in range(n) if i not in set(support)]
    if not outside:
        return np.ones(len(indices), dtype=bool)
    return np.all(indices[:, outside] == 0, axis=1)


def _shift(base: TruncatedSeries, alpha: Sequence[int]) -> TruncatedSeries:
    alpha = np.asarray(alpha, dtype=np.int64)
    if alpha.shape != (base.n,):
        raise DimensionMismatch(f"shift {alpha.tolist()} does not have {base.n} entries")
    lookup = index_lookup(base.n, base.D)
    coeffs = np.zeros(len(lookup), dtype=complex)
    kept = 0
    nonzero = 0
    for m, c in base.items():
        nonzero += 1
        target = np.asarray(m) + alpha
        if np.any(target < 0):
            raise TruncationError(f"x^{alpha.tolist()} * x^{list(m)} has a negative exponent")
        key = tuple(int(v) for v in target)
        if key in lookup:
            coeffs[lookup[key]] = c
            kept += 1
    if nonzero and not kept:
        raise TruncationError(f"shift by {alpha.tolist()} pushes every term beyond D={base.D}")
    reliable = max(0, min(base.D, base.reliable + int(alpha.sum())))
    return TruncatedSeries(base.n, base.D, coeffs, reliable)


def elementary_factor(
    kind: str,
    params: Sequence[complex],
    n: int,
    D: int,
    base: Optional[TruncatedSeries] = None,
    support: Optional[Sequence[int]] = None,
) -> TruncatedSeries:
    """Generator series of the catalog.

    binomial_sum: (1 - sum_{i in S} x_i)^{-lambda}; binomial_per_var: prod (1 - x_i)^{-lambda_i};
    exponential_sum: exp(sum_{i in S} x_i); power_monomial: x^alpha * base.
    """
    kind = FactorKind(kind)
    if kind is FactorKind.POWER_MONOMIAL:
        if base is None:
            raise ValueError("power_monomial needs a base series")
        return _shift(base, [int(a) for a in params])
    if D < 0:
        raise ValueError(f"truncation degree must be >= 0, got {D}")
    indices = monomial_indices(n, D)
    factorial = pochhammer_table(1, D)
    inverse_factorial = np.prod(1.0 / factorial[indices], axis=1)
    if kind is FactorKind.BINOMIAL_PER_VAR:
        if len(params) != n:
            raise DimensionMismatch(f"binomial_per_var needs {n} exponents, got {len(params)}")
        coeffs = inverse_factorial.astype(complex)
        for i, lam in enumerate(params):
            coeffs = coeffs * pochhammer_table(lam, D)[indices[:, i]]
        return TruncatedSeries(n, D, coeffs)
    mask = _support_mask(indices, n, support)
    if kind is FactorKind.BINOMIAL_SUM:
        if len(params) != 1:
            raise DimensionMismatch(f"binomial_sum takes one exponent, got {len(params)}")
        coeffs = pochhammer_table(params[0], D)[indices.sum(axis=1)] * inverse_factorial
    else:
        coeffs = inverse_factorial.astype(complex)
    return TruncatedSeries(n, D, np.where(mask, coeffs, 0))
