"""Truncated multivariate complex power series.

Coefficients are stored densely, one slot per multi-index of total degree at most D,
ranked in total-degree-lex order: by degree first, then lexicographically descending
within a degree, so x_1 comes before x_2.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Dict, Iterator, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionMismatch

logger = logging.getLogger(__name__)

MultiIndex = Tuple[int, ...]


def _compositions(d: int, n: int) -> Iterator[MultiIndex]:
    if n == 1:
        yield (d,)
        return
    for first in range(d, -1, -1):
        for rest in _compositions(d - first, n - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def monomial_indices(n: int, D: int) -> np.ndarray:
    """All multi-indices with |m| <= D in ranked order, shape (M, n)."""
    if n < 1:
        raise DimensionMismatch(f"series need at least one variable, got n={n}")
    if D < 0:
        raise ValueError(f"truncation degree must be >= 0, got {D}")
    rows = [m for d in range(D + 1) for m in _compositions(d, n)]
    table = np.array(rows, dtype=np.int64).reshape(len(rows), n)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def index_lookup(n: int, D: int) -> Dict[MultiIndex, int]:
    """Position of each multi-index in the ranked order."""
    return {tuple(int(v) for v in row): pos for pos, row in enumerate(monomial_indices(n, D))}


def total_degrees(n: int, D: int) -> np.ndarray:
    return monomial_indices(n, D).sum(axis=1)


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Power series in n variables known up to total degree D.

    `reliable` is the degree up to which the stored coefficients are exact; operators that
    lower degrees (derivatives) reduce it.
    """
    n: int
    D: int
    coeffs: np.ndarray
    reliable: int = -1

    def __post_init__(self):
        expected = len(monomial_indices(self.n, self.D))
        data = np.array(self.coeffs, dtype=complex).reshape(-1)
        if data.shape[0] != expected:
            raise DimensionMismatch(
                f"series with n={self.n}, D={self.D} needs {expected} coefficients, "
                f"got {data.shape[0]}"
            )
        if not np.all(np.isfinite(data)):
            raise ValueError("series coefficients must be finite")
        data.setflags(write=False)
        object.__setattr__(self, "coeffs", data)
        reliable = self.D if self.reliable < 0 else min(self.reliable, self.D)
        object.__setattr__(self, "reliable", reliable)

    # -- construction ------------------------------------------------------

    @classmethod
    def zeros(cls, n: int, D: int) -> "TruncatedSeries":
        return cls(n, D, np.zeros(len(monomial_indices(n, D)), dtype=complex))

    @classmethod
    def constant(cls, value: complex, n: int, D: int) -> "TruncatedSeries":
        coeffs = np.zeros(len(monomial_indices(n, D)), dtype=complex)
        coeffs[0] = value
        return cls(n, D, coeffs)

    @classmethod
    def monomial(cls, m: Sequence[int], n: int, D: int, value: complex = 1.0) -> "TruncatedSeries":
        return cls.from_dict(n, D, {tuple(m): value})

    @classmethod
    def from_function(
        cls, n: int, D: int, fn: Callable[[MultiIndex], complex]
    ) -> "TruncatedSeries":
        """Build the series whose coefficient at m is fn(m)."""
        coeffs = [fn(tuple(int(v) for v in row)) for row in monomial_indices(n, D)]
        return cls(n, D, np.array(coeffs, dtype=complex))

    @classmethod
    def from_dict(
        cls, n: int, D: int, mapping: Mapping[Sequence[int], complex]
    ) -> "TruncatedSeries":
        lookup = index_lookup(n, D)
        coeffs = np.zeros(len(lookup), dtype=complex)
        for m, value in mapping.items():
            key = tuple(int(v) for v in m)
            if len(key) != n:
                raise DimensionMismatch(f"index {list(key)} does not have {n} entries")
            if min(key) < 0:
                raise ValueError(f"index {list(key)} has a negative entry")
            if key in lookup:
                coeffs[lookup[key]] += value
        return cls(n, D, coeffs)

    @classmethod
    def from_dense(cls, dense: np.ndarray, n: int, D: int, reliable: int = -1) -> "TruncatedSeries":
        idx = monomial_indices(n, D)
        return cls(n, D, dense[tuple(idx.T)], reliable)

    def to_dense(self) -> np.ndarray:
        """Coefficients in an (D+1)^n array, zero outside the simplex."""
        dense = np.zeros((self.D + 1,) * self.n, dtype=complex)
        dense[tuple(self.indices.T)] = self.coeffs
        return dense

    def with_coeffs(self, coeffs: np.ndarray, reliable: Optional[int] = None) -> "TruncatedSeries":
        reliable = self.reliable if reliable is None else reliable
        return TruncatedSeries(self.n, self.D, coeffs, reliable)

    # -- access ------------------------------------------------------------

    @property
    def indices(self) -> np.ndarray:
        return monomial_indices(self.n, self.D)

    @property
    def degrees(self) -> np.ndarray:
        return total_degrees(self.n, self.D)

    def coefficient(self, m: Sequence[int]) -> complex:
        pos = index_lookup(self.n, self.D).get(tuple(int(v) for v in m))
        return 0j if pos is None else complex(self.coeffs[pos])

    def items(self) -> Iterator[Tuple[MultiIndex, complex]]:
        """Nonzero (index, coefficient) pairs in ranked order."""
        for row, c in zip(self.indices, self.coeffs):
            if c != 0:
                yield tuple(int(v) for v in row), complex(c)

    def truncate(self, D: int) -> "TruncatedSeries":
        if D > self.D:
            raise ValueError(f"cannot extend a series truncated at {self.D} to {D}")
        count = len(monomial_indices(self.n, D))
        return TruncatedSeries(self.n, D, self.coeffs[:count], min(self.reliable, D))

    # -- arithmetic --------------------------------------------------------

    def _aligned(self, other: "TruncatedSeries") -> Tuple["TruncatedSeries", "TruncatedSeries"]:
        if self.n != other.n:
            raise DimensionMismatch(f"variable counts differ: {self.n} vs {other.n}")
        D = min(self.D, other.D)
        return self.truncate(D), other.truncate(D)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        a, b = self._aligned(other)
        return TruncatedSeries(a.n, a.D, a.coeffs + b.coeffs, min(a.reliable, b.reliable))

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + other.scale(-1)

    def __neg__(self) -> "TruncatedSeries":
        return self.scale(-1)

    def scale(self, factor: complex) -> "TruncatedSeries":
        return self.with_coeffs(self.coeffs * complex(factor))

    def __mul__(self, factor: complex) -> "TruncatedSeries":
        if isinstance(factor, TruncatedSeries):
            return series_mul(self, factor)
        return self.scale(factor)

    __rmul__ = __mul__

    # -- interchange -------------------------------------------------------

    def to_json(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "n": self.n,
            "D": self.D,
            "coeffs": [{"m": list(m), "re": c.real, "im": c.imag} for m, c in self.items()],
        }
        if self.reliable != self.D:
            data["reliable"] = self.reliable
        return data

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "TruncatedSeries":
        n, D = int(data["n"]), int(data["D"])
        mapping = {
            tuple(e["m"]): complex(e.get("re", 0.0), e.get("im", 0.0)) for e in data["coeffs"]
        }
        s = cls.from_dict(n, D, mapping)
        return s.with_coeffs(s.coeffs, reliable=int(data.get("reliable", D)))


def series_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a + b


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product truncated at min(a.D, b.D)."""
    a, b = a._aligned(b)
    D, n = a.D, a.n
    right = b.to_dense()
    out = np.zeros_like(right)
    for m, c in a.items():
        target = tuple(slice(k, D + 1) for k in m)
        source = tuple(slice(0, D + 1 - k) for k in m)
        out[target] += c * right[source]
    return TruncatedSeries.from_dense(out, n, D, min(a.reliable, b.reliable))


def evaluate(s: TruncatedSeries, point: Sequence[complex]) -> Tuple[complex, float]:
    """Sum the series at a point.

    Returns the value together with the magnitude of the last reliable degree shell,
    which serves as the truncation-error estimate.
    """
    x = np.asarray(point, dtype=complex).reshape(-1)
    if x.shape[0] != s.n:
        raise DimensionMismatch(f"point has {x.shape[0]} coordinates, series has {s.n}")
    monomials = np.prod(x[None, :] ** s.indices, axis=1)
    terms = s.coeffs * monomials
    shells = np.zeros(s.D + 1, dtype=complex)
    np.add.at(shells, s.degrees, terms)
    value = 0j
    for d in range(s.reliable, -1, -1):
        value += shells[d]
    return complex(value), float(abs(shells[s.reliable]))


def max_relative_difference(
    a: TruncatedSeries, b: TruncatedSeries, degree: Optional[int] = None, floor: float = 1.0
) -> float:
    """max over |m| <= degree of |a_m - b_m| / max(floor, |b_m|)."""
    a, b = a._aligned(b)
    if degree is None:
        degree = min(a.reliable, b.reliable)
    mask = a.degrees <= degree
    if not np.any(mask):
        return 0.0
    diff = np.abs(a.coeffs[mask] - b.coeffs[mask])
    scale = np.maximum(floor, np.abs(b.coeffs[mask]))
    return float(np.max(diff / scale))
