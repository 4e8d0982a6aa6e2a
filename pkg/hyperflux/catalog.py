"""Named hypergeometric series: direct coefficient laws, transform pipelines and the F1
connection formula."""

import cmath
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ArityError, ConvergenceError, HyperfluxError, ResonanceError
from .gamma import gamma_ratio, pochhammer_table
from .series import TruncatedSeries, evaluate, monomial_indices, series_mul
from .transforms import MonomialMap, TransformSpec, apply_K, apply_L, elementary_factor

logger = logging.getLogger(__name__)

Param = Union[complex, Tuple[complex, ...]]


class SeriesKind(str, Enum):
    FA = "FA"
    FB = "FB"
    FC = "FC"
    FD = "FD"
    F1 = "F1"
    F2 = "F2"
    F3 = "F3"
    F4 = "F4"
    GAUSS = "Gauss"
    KUMMER = "Kummer"
    PHI2 = "Phi2"
    PSI1 = "Psi1"
    PSI2 = "Psi2"
    G2 = "G2"
    GENERAL_PQR = "GeneralPQR"
    GENERAL_HORN = "GeneralHorn"
    S211 = "S211"


# "s": scalar, "n": vector of length n, "*": vector of any positive length
SIGNATURES: Dict[SeriesKind, Dict[str, str]] = {
    SeriesKind.FA: {"lambda0": "s", "mu": "n", "lambda": "n"},
    SeriesKind.FB: {"lambda": "n", "lambdap": "n", "mu": "s"},
    SeriesKind.FC: {"mu": "s", "lambda0": "s", "lambda": "n"},
    SeriesKind.FD: {"lambda0": "s", "lambda": "n", "mu": "s"},
    SeriesKind.F1: {"a": "s", "b": "s", "bp": "s", "c": "s"},
    SeriesKind.F2: {"a": "s", "b1": "s", "b2": "s", "c1": "s", "c2": "s"},
    SeriesKind.F3: {"a1": "s", "a2": "s", "b1": "s", "b2": "s", "c": "s"},
    SeriesKind.F4: {"a": "s", "b": "s", "c1": "s", "c2": "s"},
    SeriesKind.GAUSS: {"a": "s", "b": "s", "c": "s"},
    SeriesKind.KUMMER: {"a": "s", "c": "s"},
    SeriesKind.PHI2: {"b": "s", "bp": "s", "c": "s"},
    SeriesKind.PSI1: {"a": "s", "b": "s", "c": "s", "cp": "s"},
    SeriesKind.PSI2: {"a": "s", "c": "s", "cp": "s"},
    SeriesKind.G2: {"a": "s", "b": "s", "c": "s", "d": "s"},
    SeriesKind.GENERAL_PQR: {
        "alpha": "*", "alphap": "*", "beta": "*", "betap": "*", "gamma": "*", "gammap": "*",
    },
    SeriesKind.GENERAL_HORN: {"a": "*", "ap": "*", "b": "*", "bp": "*", "c": "*", "cp": "*"},
    SeriesKind.S211: {
        "alpha1": "s", "alpha2": "s", "beta1": "s", "beta2": "s", "gamma1": "s", "gamma2": "s",
    },
}

FIXED_N = {
    SeriesKind.F1: 2, SeriesKind.F2: 2, SeriesKind.F3: 2, SeriesKind.F4: 2,
    SeriesKind.GAUSS: 1, SeriesKind.KUMMER: 1, SeriesKind.PHI2: 2, SeriesKind.PSI1: 2,
    SeriesKind.PSI2: 2, SeriesKind.G2: 2, SeriesKind.GENERAL_PQR: 2,
    SeriesKind.GENERAL_HORN: 2, SeriesKind.S211: 1,
}

ROUTES: Dict[SeriesKind, Tuple[str, ...]] = {
    SeriesKind.FA: ("K", "L"),
    SeriesKind.FB: ("K",),
    SeriesKind.FC: ("L",),
    SeriesKind.FD: ("K", "map"),
    SeriesKind.F1: ("K", "map"),
    SeriesKind.F2: ("K", "L"),
    SeriesKind.F3: ("K",),
    SeriesKind.F4: ("L",),
    SeriesKind.GAUSS: ("K",),
    SeriesKind.KUMMER: ("K",),
    SeriesKind.PHI2: ("K",),
    SeriesKind.PSI1: ("L",),
    SeriesKind.PSI2: ("L",),
    SeriesKind.GENERAL_PQR: ("K",),
    SeriesKind.S211: ("K",),
}


def _as_param(value: Any, vector: bool) -> Param:
    if vector:
        if isinstance(value, (list, tuple, np.ndarray)):
            return tuple(complex(v) for v in value)
        return (complex(value),)
    if isinstance(value, (list, tuple, np.ndarray)):
        raise ArityError(f"expected a scalar parameter, got {value!r}")
    return complex(value)


@dataclass(frozen=True, eq=False)
class SeriesId:
    """A named series with its parameters and truncation."""
    kind: SeriesKind
    params: Mapping[str, Param]
    n: int
    D: int

    def __post_init__(self):
        kind = SeriesKind(self.kind)
        object.__setattr__(self, "kind", kind)
        signature = SIGNATURES[kind]
        given = set(self.params)
        if given != set(signature):
            missing = sorted(set(signature) - given)
            extra = sorted(given - set(signature))
            raise ArityError(f"{kind.value}: missing parameters {missing}, unexpected {extra}")
        if kind in FIXED_N and self.n != FIXED_N[kind]:
            raise ArityError(
                f"{kind.value} is a series in {FIXED_N[kind]} variables, got n={self.n}"
            )
        if self.n < 1:
            raise ArityError(f"series need at least one variable, got n={self.n}")
        params = {}
        for name, shape in signature.items():
            value = _as_param(self.params[name], shape != "s")
            if shape == "n" and len(value) != self.n:
                raise ArityError(f"{kind.value}: {name} needs {self.n} entries, got {len(value)}")
            params[name] = value
        object.__setattr__(self, "params", params)
        self._check_constraints()

    def _check_constraints(self) -> None:
        p = self.params
        if self.kind is SeriesKind.GENERAL_PQR:
            for head, tail in (("alpha", "alphap"), ("beta", "betap"), ("gamma", "gammap")):
                if not p[head]:
                    raise ArityError(f"GeneralPQR: {head} must not be empty")
                if len(p[head]) != len(p[tail]):
                    raise ArityError(f"GeneralPQR: {head} and {tail} lengths differ")
            if p["alphap"][0] != 0 or p["betap"][0] != 0:
                raise ArityError("GeneralPQR requires alphap[0] = betap[0] = 0")
        if self.kind is SeriesKind.GENERAL_HORN:
            x_excess = len(p["a"]) + len(p["b"]) - len(p["ap"]) - len(p["bp"])
            y_excess = len(p["a"]) + len(p["c"]) - len(p["ap"]) - len(p["cp"])
            if x_excess != 1 or y_excess != 1:
                raise ArityError(
                    "GeneralHorn needs (K+M)-(K'+M') = (K+N)-(K'+N') = 1, "
                    f"got {x_excess}, {y_excess}"
                )

    def s(self, name: str) -> complex:
        return self.params[name]

    def v(self, name: str) -> Tuple[complex, ...]:
        return self.params[name]

    def with_params(self, **changes: Param) -> "SeriesId":
        params = dict(self.params)
        params.update(changes)
        return SeriesId(self.kind, params, self.n, self.D)

    def to_json(self) -> Dict[str, Any]:
        def encode(value: Param):
            if isinstance(value, tuple):
                return [[c.real, c.imag] for c in value]
            return [value.real, value.imag]

        return {
            "kind": self.kind.value,
            "n": self.n,
            "D": self.D,
            "params": {k: encode(v) for k, v in self.params.items()},
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "SeriesId":
        kind = SeriesKind(data["kind"])
        params = {}
        for name, value in data["params"].items():
            if SIGNATURES[kind].get(name, "s") == "s":
                params[name] = complex(*value) if isinstance(value, list) else complex(value)
            else:
                params[name] = tuple(
                    complex(*e) if isinstance(e, list) else complex(e) for e in value
                )
        return cls(kind, params, int(data["n"]), int(data["D"]))


# -- direct coefficient laws ---------------------------------------------------


class _Law:
    """Accumulates numerator and denominator Pochhammer factors over all indices."""

    def __init__(self, n: int, D: int):
        self.n, self.D = n, D
        self.indices = monomial_indices(n, D)
        self.degrees = self.indices.sum(axis=1)
        self.num = np.ones(len(self.indices), dtype=complex)
        self.den = np.ones(len(self.indices), dtype=complex)

    def total(self, a: complex, over: bool = False) -> None:
        values = pochhammer_table(a, self.D)[self.degrees]
        if over:
            self.den *= values
        else:
            self.num *= values

    def var(self, i: int, a: complex, over: bool = False) -> None:
        values = pochhammer_table(a, self.D)[self.indices[:, i]]
        if over:
            self.den *= values
        else:
            self.num *= values

    def signed(self, a: complex, k: np.ndarray) -> None:
        """(a)_k for integer k of either sign, (a)_{-k} = 1 / (a-k)_k."""
        for pos, kk in enumerate(k):
            if kk >= 0:
                self.num[pos] *= pochhammer_table(a, int(kk))[-1]
            else:
                self.den[pos] *= pochhammer_table(a + kk, int(-kk))[-1]

    def factorials(self) -> None:
        for i in range(self.n):
            self.var(i, 1, over=True)

    def series(self, label: str) -> TruncatedSeries:
        zero = np.flatnonzero(self.den == 0)
        if zero.size:
            raise ResonanceError(
                f"{label} coefficient law divides by zero", index=self.indices[zero[0]]
            )
        return TruncatedSeries(self.n, self.D, self.num / self.den)


def _lauricella(kind: SeriesKind, params: Mapping[str, Param], n: int, D: int) -> TruncatedSeries:
    law = _Law(n, D)
    if kind is SeriesKind.FA:
        law.total(params["lambda0"])
        for i in range(n):
            law.var(i, params["mu"][i])
            law.var(i, params["lambda"][i], over=True)
    elif kind is SeriesKind.FB:
        for i in range(n):
            law.var(i, params["lambda"][i])
            law.var(i, params["lambdap"][i])
        law.total(params["mu"], over=True)
    elif kind is SeriesKind.FC:
        law.total(params["mu"])
        law.total(params["lambda0"])
        for i in range(n):
            law.var(i, params["lambda"][i], over=True)
    else:
        law.total(params["lambda0"])
        for i in range(n):
            law.var(i, params["lambda"][i])
        law.total(params["mu"], over=True)
    law.factorials()
    return law.series(kind.value)


def as_lauricella(sid: SeriesId) -> Tuple[SeriesKind, Dict[str, Param]]:
    """Appell and Gauss series in Lauricella form (F1=FD, F2=FA, F3=FB, F4=FC)."""
    p = sid.params
    if sid.kind is SeriesKind.F1:
        return SeriesKind.FD, {"lambda0": p["a"], "lambda": (p["b"], p["bp"]), "mu": p["c"]}
    if sid.kind is SeriesKind.F2:
        return SeriesKind.FA, {
            "lambda0": p["a"], "mu": (p["b1"], p["b2"]), "lambda": (p["c1"], p["c2"]),
        }
    if sid.kind is SeriesKind.F3:
        return SeriesKind.FB, {
            "lambda": (p["a1"], p["a2"]), "lambdap": (p["b1"], p["b2"]), "mu": p["c"],
        }
    if sid.kind is SeriesKind.F4:
        return SeriesKind.FC, {"mu": p["a"], "lambda0": p["b"], "lambda": (p["c1"], p["c2"])}
    if sid.kind is SeriesKind.GAUSS:
        return SeriesKind.FD, {"lambda0": p["b"], "lambda": (p["a"],), "mu": p["c"]}
    return sid.kind, dict(p)


def build_direct(sid: SeriesId) -> TruncatedSeries:
    """Coefficients from the explicit Pochhammer law of the kind."""
    kind, p = as_lauricella(sid)
    n, D = sid.n, sid.D
    if kind in (SeriesKind.FA, SeriesKind.FB, SeriesKind.FC, SeriesKind.FD):
        return _lauricella(kind, p, n, D)
    law = _Law(n, D)
    m, k = law.indices[:, 0], (law.indices[:, 1] if n > 1 else None)
    if kind is SeriesKind.KUMMER:
        law.total(p["a"])
        law.total(p["c"], over=True)
        law.factorials()
    elif kind is SeriesKind.PHI2:
        law.var(0, p["b"])
        law.var(1, p["bp"])
        law.total(p["c"], over=True)
        law.factorials()
    elif kind in (SeriesKind.PSI1, SeriesKind.PSI2):
        law.total(p["a"])
        if kind is SeriesKind.PSI1:
            law.var(0, p["b"])
        law.var(0, p["c"], over=True)
        law.var(1, p["cp"], over=True)
        law.factorials()
    elif kind is SeriesKind.G2:
        law.var(0, p["a"])
        law.var(1, p["b"])
        law.signed(p["c"], k - m)
        law.signed(p["d"], m - k)
        law.factorials()
    elif kind is SeriesKind.GENERAL_PQR:
        for a, ap in zip(p["alpha"], p["alphap"]):
            law.var(0, a)
            law.var(0, 1 - ap, over=True)
        for b, bp in zip(p["beta"], p["betap"]):
            law.var(1, b)
            law.var(1, 1 - bp, over=True)
        for g, gp in zip(p["gamma"], p["gammap"]):
            law.total(g)
            law.total(1 - gp, over=True)
    elif kind is SeriesKind.GENERAL_HORN:
        for a in p["a"]:
            law.total(a)
        for a in p["ap"]:
            law.total(a, over=True)
        for b in p["b"]:
            law.var(0, b)
        for b in p["bp"]:
            law.var(0, b, over=True)
        for c in p["c"]:
            law.var(1, c)
        for c in p["cp"]:
            law.var(1, c, over=True)
        law.factorials()
    elif kind is SeriesKind.S211:
        return _s211_direct(p, D)
    return law.series(sid.kind.value)


def _s211_direct(p: Mapping[str, complex], D: int) -> TruncatedSeries:
    """sum over m+l=k of (a1)_m (b1)_m (-a2)_l (b2)_k / ((g1)_m (g2)_k m! l!)."""
    a1, b1, g1 = (pochhammer_table(p[name], D) for name in ("alpha1", "beta1", "gamma1"))
    a2 = pochhammer_table(-p["alpha2"], D)
    b2, g2 = pochhammer_table(p["beta2"], D), pochhammer_table(p["gamma2"], D)
    fact = pochhammer_table(1, D)
    coeffs = np.zeros(D + 1, dtype=complex)
    for total in range(D + 1):
        if g2[total] == 0:
            raise ResonanceError("S211 coefficient law divides by zero", index=(total,))
        acc = 0j
        for m in range(total + 1):
            if g1[m] == 0:
                raise ResonanceError("S211 coefficient law divides by zero", index=(total,))
            acc += a1[m] * b1[m] * a2[total - m] / (g1[m] * fact[m] * fact[total - m])
        coeffs[total] = acc * b2[total] / g2[total]
    return TruncatedSeries(1, D, coeffs)


# -- transform pipelines -------------------------------------------------------


def pipeline_routes(kind: Union[str, SeriesKind]) -> Tuple[str, ...]:
    return ROUTES.get(SeriesKind(kind), ())


def _lauricella_pipeline(
    kind: SeriesKind, p: Mapping[str, Param], n: int, D: int, route: str
) -> TruncatedSeries:
    if kind is SeriesKind.FA and route == "K":
        u = elementary_factor("binomial_sum", [p["lambda0"]], n, D)
        for i in range(n):
            u = apply_K(u, TransformSpec((i,), p["lambda"][i] - p["mu"][i], (p["mu"][i],)))
        return u.scale(gamma_ratio(p["lambda"], p["mu"]))
    if kind is SeriesKind.FA and route == "L":
        u = elementary_factor("binomial_per_var", p["mu"], n, D)
        u = apply_L(u, TransformSpec.full(p["lambda0"] - sum(p["lambda"]), p["lambda"]))
        return u.scale(gamma_ratio(p["lambda"], [p["lambda0"]]))
    if kind is SeriesKind.FB:
        u = elementary_factor("binomial_per_var", p["lambdap"], n, D)
        u = apply_K(u, TransformSpec.full(p["mu"] - sum(p["lambda"]), p["lambda"]))
        return u.scale(gamma_ratio([p["mu"]], p["lambda"]))
    if kind is SeriesKind.FC:
        u = elementary_factor("binomial_sum", [p["lambda0"]], n, D)
        u = apply_L(u, TransformSpec.full(p["mu"] - sum(p["lambda"]), p["lambda"]))
        return u.scale(gamma_ratio(p["lambda"], [p["mu"]]))
    if kind is SeriesKind.FD and route == "K":
        u = elementary_factor("binomial_sum", [p["lambda0"]], n, D)
        u = apply_K(u, TransformSpec.full(p["mu"] - sum(p["lambda"]), p["lambda"]))
        return u.scale(gamma_ratio([p["mu"]], p["lambda"]))
    # FD through x -> (x_1, x_1/x_2, ..., x_1/x_n)
    u = elementary_factor("binomial_per_var", p["lambda"], n, D)
    spec = TransformSpec((0,), p["mu"] - p["lambda0"], (p["lambda0"],), map=MonomialMap.ratios(n))
    u = apply_K(u, spec)
    return u.scale(gamma_ratio([p["mu"]], [p["lambda0"]]))


def build_via_transform(sid: SeriesId, route: Optional[str] = None) -> TruncatedSeries:
    """The series assembled from generators, K/L transforms and Gamma prefactors."""
    routes = pipeline_routes(sid.kind)
    if not routes:
        raise HyperfluxError(f"{sid.kind.value} has no transform pipeline")
    route = route or routes[0]
    if route not in routes:
        raise HyperfluxError(f"{sid.kind.value} has no {route!r} route, choose from {list(routes)}")
    logger.debug(f"Building {sid.kind.value} (n={sid.n}, D={sid.D}) via route {route}")

    kind, p = as_lauricella(sid)
    n, D = sid.n, sid.D
    if kind in (SeriesKind.FA, SeriesKind.FB, SeriesKind.FC, SeriesKind.FD):
        return _lauricella_pipeline(kind, p, n, D, route)
    if kind is SeriesKind.KUMMER:
        spec = TransformSpec.full(p["c"] - p["a"], [p["a"]])
        u = apply_K(elementary_factor("exponential_sum", [], 1, D), spec)
        return u.scale(gamma_ratio([p["c"]], [p["a"]]))
    if kind is SeriesKind.PHI2:
        lam = (p["b"], p["bp"])
        spec = TransformSpec.full(p["c"] - sum(lam), lam)
        u = apply_K(elementary_factor("exponential_sum", [], 2, D), spec)
        return u.scale(gamma_ratio([p["c"]], lam))
    if kind in (SeriesKind.PSI1, SeriesKind.PSI2):
        lam = (p["c"], p["cp"])
        if kind is SeriesKind.PSI1:
            u = series_mul(
                elementary_factor("binomial_per_var", [p["b"], 0], 2, D),
                elementary_factor("exponential_sum", [], 2, D, support=(1,)),
            )
        else:
            u = elementary_factor("exponential_sum", [], 2, D)
        u = apply_L(u, TransformSpec.full(p["a"] - sum(lam), lam))
        return u.scale(gamma_ratio(lam, [p["a"]]))
    if kind is SeriesKind.GENERAL_PQR:
        return _pqr_pipeline(p, D)
    return _s211_pipeline(p, D)


def _pqr_pipeline(p: Mapping[str, Tuple[complex, ...]], D: int) -> TruncatedSeries:
    u = elementary_factor("binomial_per_var", [p["alpha"][0], p["beta"][0]], 2, D)
    prefactor = 1 + 0j
    for a, ap in zip(p["alpha"][1:], p["alphap"][1:]):
        u = apply_K(u, TransformSpec((0,), 1 - ap - a, (a,)))
        prefactor *= gamma_ratio([1 - ap], [a])
    for b, bp in zip(p["beta"][1:], p["betap"][1:]):
        u = apply_K(u, TransformSpec((1,), 1 - bp - b, (b,)))
        prefactor *= gamma_ratio([1 - bp], [b])
    ratios = MonomialMap.ratios(2)
    for g, gp in zip(p["gamma"], p["gammap"]):
        u = apply_K(u, TransformSpec((0,), 1 - gp - g, (g,), map=ratios))
        prefactor *= gamma_ratio([1 - gp], [g])
    return u.scale(prefactor)


def _s211_pipeline(p: Mapping[str, complex], D: int) -> TruncatedSeries:
    u = elementary_factor("binomial_per_var", [p["alpha1"]], 1, D)
    u = apply_K(u, TransformSpec.full(p["gamma1"] - p["beta1"], [p["beta1"]]))
    u = series_mul(elementary_factor("binomial_per_var", [-p["alpha2"]], 1, D), u)
    u = apply_K(u, TransformSpec.full(p["gamma2"] - p["beta2"], [p["beta2"]]))
    return u.scale(gamma_ratio([p["gamma1"], p["gamma2"]], [p["beta1"], p["beta2"]]))


# -- connection formulas -------------------------------------------------------


def gauss_connection_coeffs(a: complex, b: complex, c: complex) -> Tuple[complex, complex]:
    """(C_a, C_b) of the Gauss connection formula between 0 and infinity."""
    c_a = gamma_ratio([c, b - a], [b, c - a])
    c_b = gamma_ratio([c, a - b], [a, c - b])
    return c_a, c_b


def gauss(a: complex, b: complex, c: complex, D: int) -> TruncatedSeries:
    return build_direct(SeriesId(SeriesKind.GAUSS, {"a": a, "b": b, "c": c}, 1, D))


def gauss_value(a: complex, b: complex, c: complex, x: float, D: int) -> Tuple[complex, float]:
    """F(a,b,c;x) with a truncation estimate; for |x| > 1 through the expansion at 1/x."""
    if abs(x) < 1:
        return evaluate(gauss(a, b, c, D), [x])
    c_a, c_b = gauss_connection_coeffs(a, b, c)
    w = complex(-1 / x)
    fa, sa = evaluate(gauss(a, a - c + 1, a - b + 1, D), [1 / x])
    fb, sb = evaluate(gauss(b, b - c + 1, b - a + 1, D), [1 / x])
    pa, pb = w ** a * c_a, w ** b * c_b
    return pa * fa + pb * fb, abs(pa) * sa + abs(pb) * sb


def f1_connection_residual(
    a: complex,
    b: complex,
    bp: complex,
    c: complex,
    x: float = -4.0,
    y: float = 0.05,
    D: int = 40,
    budget: float = 1e-9,
) -> float:
    """Relative gap between both sides of the F1 connection relation at (x, y).

    The left side resums F1 over powers of y with Gauss values continued through their own
    connection formula; the right side uses F1 and G2 series at (1/x, y/x) and (-1/x, -y).
    """
    lhs = 0j
    lhs_error = 0.0
    weights = pochhammer_table(a, D) * pochhammer_table(bp, D) / (
        pochhammer_table(c, D) * pochhammer_table(1, D)
    )
    for k in range(D + 1):
        term_weight = weights[k] * complex(y) ** k
        if term_weight == 0:
            continue
        value, shell = gauss_value(a + k, b, c + k, x, D)
        lhs += term_weight * value
        lhs_error += abs(term_weight) * shell
    lhs_error += abs(weights[D] * complex(y) ** D)

    c_a, c_b = gauss_connection_coeffs(a, b, c)
    f1a = build_direct(
        SeriesId(SeriesKind.F1, {"a": a, "b": a - c + 1, "bp": bp, "c": a - b + 1}, 2, D)
    )
    g2b = build_direct(SeriesId(SeriesKind.G2, {"a": b, "b": bp, "c": a - b, "d": b - c + 1}, 2, D))
    va, sa = evaluate(f1a, [1 / x, y / x])
    vb, sb = evaluate(g2b, [-1 / x, -y])
    w = complex(-1 / x)
    pa, pb = w ** a * c_a, w ** b * c_b
    rhs = pa * va + pb * vb
    rhs_error = abs(pa) * sa + abs(pb) * sb

    scale = abs(lhs)
    if lhs_error > budget * scale or rhs_error > budget * scale:
        raise ConvergenceError(
            f"truncation at D={D} too coarse: shell estimates {lhs_error:.3e} / {rhs_error:.3e} "
            f"against |F1| = {scale:.3e}"
        )
    residual = abs(lhs - rhs) / scale
    logger.debug(f"F1 connection residual at ({x}, {y}): {residual:.3e}")
    return float(residual)


def parse_params(kind: Union[str, SeriesKind], text: str) -> Dict[str, Param]:
    """Parse "a=0.3,b=0.7" style parameters; vectors use ':' as in "lambda=0.3:0.4".

    Complex values use Python syntax, e.g. "a=0.3+0.1j".
    """
    kind = SeriesKind(kind)
    signature = SIGNATURES[kind]
    params: Dict[str, Param] = {}
    for item in filter(None, (part.strip() for part in text.split(","))):
        if "=" not in item:
            raise ArityError(f"parameter {item!r} is not of the form name=value")
        name, raw = (s.strip() for s in item.split("=", 1))
        if name not in signature:
            raise ArityError(f"{kind.value} has no parameter {name!r}")
        try:
            values = [complex(v.replace(" ", "")) for v in raw.split(":")]
        except ValueError as e:
            raise ArityError(f"cannot parse value of {name!r}: {raw!r}") from e
        scalar = signature[name] == "s" and len(values) == 1
        params[name] = complex(values[0]) if scalar else tuple(values)
    return params


def infer_n(kind: Union[str, SeriesKind], params: Mapping[str, Param]) -> int:
    kind = SeriesKind(kind)
    if kind in FIXED_N:
        return FIXED_N[kind]
    for name, shape in SIGNATURES[kind].items():
        if shape == "n" and isinstance(params.get(name), tuple):
            return len(params[name])
    raise ArityError(f"cannot infer the variable count of {kind.value}")
