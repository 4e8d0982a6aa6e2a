"""Gauss-Jacobi quadrature for Euler-type integrals.

Endpoint powers t^{a-1}(1-t)^{b-1} are absorbed into Jacobi weights; complex exponents put
their real part into the weight and keep the oscillating remainder in the integrand.
"""

import logging
from functools import lru_cache
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.special import roots_jacobi

from .catalog import SeriesId, SeriesKind, as_lauricella, build_direct
from .errors import DomainError
from .gamma import gamma, gamma_product, gamma_ratio
from .series import evaluate

logger = logging.getLogger(__name__)

DEFAULT_NODES = 64
MAX_NODES = 512


@lru_cache(maxsize=256)
def jacobi_rule(count: int, alpha: float, beta: float) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1] for the weight (1-s)^alpha (1+s)^beta."""
    nodes, weights = roots_jacobi(count, alpha, beta)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def beta_rule(a: complex, b: complex, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """Points t in (0,1) and weights w with sum w g(t) ~ int_0^1 t^{a-1}(1-t)^{b-1} g(t) dt."""
    a, b = complex(a), complex(b)
    if a.real <= 0 or b.real <= 0:
        raise DomainError(f"Euler integral needs Re a > 0 and Re b > 0, got a={a}, b={b}")
    s, w = jacobi_rule(count, round(b.real - 1, 15), round(a.real - 1, 15))
    weights = w * 2.0 ** (-(a + b - 1))
    if a.imag:
        weights = weights * (1 + s) ** (1j * a.imag)
    if b.imag:
        weights = weights * (1 - s) ** (1j * b.imag)
    return (1 + s) / 2, weights


def _values(f: Callable, *args: np.ndarray) -> np.ndarray:
    out = np.asarray(f(*args), dtype=complex)
    return np.broadcast_to(out, np.broadcast(*args).shape)


def _converge(
    rule: Callable[[int], complex], nodes: int, max_nodes: int, tol: float, label: str
) -> complex:
    """Double the node count until two successive values agree to tol."""
    count = nodes
    value = rule(count)
    while count < max_nodes:
        count *= 2
        refined = rule(count)
        if abs(refined - value) <= tol * max(1.0, abs(refined)):
            logger.debug(f"{label}: converged with {count} nodes")
            return refined
        value = refined
    logger.warning(f"{label}: not self-converged at {max_nodes} nodes")
    return value


def riemann_liouville(
    f: Callable[[np.ndarray], Any],
    c: float,
    mu: complex,
    x: float,
    left_power: complex = 0.0,
    nodes: int = DEFAULT_NODES,
    max_nodes: int = MAX_NODES,
    tol: float = 1e-9,
) -> complex:
    """(1/Gamma(mu)) int_c^x (t-c)^left_power f(t) (x-t)^{mu-1} dt.

    left_power absorbs an endpoint singularity of the integrand at c; the plain transform is
    left_power = 0.
    """
    mu = complex(mu)
    if mu.real <= 0:
        raise DomainError(f"Riemann-Liouville integral needs Re mu > 0, got {mu}")
    if complex(left_power).real <= -1:
        raise DomainError(f"endpoint power {left_power} is not integrable")
    h = x - c

    def rule(count: int) -> complex:
        t, w = beta_rule(complex(left_power) + 1, mu, count)
        return complex(np.sum(w * _values(f, c + h * t)))

    integral = _converge(rule, nodes, max_nodes, tol, "riemann_liouville")
    return complex(h) ** (mu + left_power) * integral / gamma(mu)


def simplex_integral_K(
    f: Callable[..., Any],
    mu: complex,
    lam: Sequence[complex],
    x: Sequence[float],
    nodes: int = DEFAULT_NODES,
    max_nodes: int = MAX_NODES,
    tol: float = 1e-9,
) -> complex:
    """K^{mu,lambda} f at x as (1/Gamma(mu)) int_simplex t^{lambda-1}(1-|t|)^{mu-1} f(t x) dt.

    Two variables use t_2 = (1 - t_1) s, which splits the weight into
    t_1^{lambda_1-1}(1-t_1)^{lambda_2+mu-1} and s^{lambda_2-1}(1-s)^{mu-1}.
    """
    lam = [complex(v) for v in lam]
    mu = complex(mu)
    x = [complex(v) for v in x]
    n = len(lam)
    if n not in (1, 2) or len(x) != n:
        raise DomainError(f"simplex quadrature supports n <= 2 with matching point, got n={n}")
    if mu.real <= 0 or any(v.real <= 0 for v in lam):
        raise DomainError(f"simplex integral needs Re mu > 0 and Re lambda > 0, got {mu}, {lam}")

    if n == 1:
        def rule(count: int) -> complex:
            t, w = beta_rule(lam[0], mu, count)
            return complex(np.sum(w * _values(f, t * x[0])))
    else:
        def rule(count: int) -> complex:
            t1, w1 = beta_rule(lam[0], lam[1] + mu, count)
            s, w2 = beta_rule(lam[1], mu, count)
            outer = t1[:, None]
            grid = _values(f, outer * x[0], (1 - outer) * s[None, :] * x[1])
            return complex(w1 @ (grid @ w2))

    return _converge(rule, nodes, max_nodes, tol, "simplex_integral_K") / gamma(mu)


def box_integral_K(
    f: Callable[..., Any],
    mus: Sequence[complex],
    lams: Sequence[complex],
    x: Sequence[float],
    nodes: int = DEFAULT_NODES,
    max_nodes: int = MAX_NODES,
    tol: float = 1e-9,
) -> complex:
    """Product of one-variable transforms K_{x_i}^{mu_i,lambda_i} applied to f, n <= 2."""
    n = len(lams)
    if n not in (1, 2) or len(mus) != n or len(x) != n:
        raise DomainError(f"box quadrature supports n <= 2 with matching sizes, got n={n}")

    def rule(count: int) -> complex:
        rules = [beta_rule(lams[i], mus[i], count) for i in range(n)]
        if n == 1:
            t, w = rules[0]
            return complex(np.sum(w * _values(f, t * x[0])))
        (t1, w1), (t2, w2) = rules
        grid = _values(f, t1[:, None] * x[0], t2[None, :] * x[1])
        return complex(w1 @ (grid @ w2))

    return _converge(rule, nodes, max_nodes, tol, "box_integral_K") / gamma_product(mus)


def _representations(sid: SeriesId, point: Sequence[float]) -> Dict[str, Callable[[], complex]]:
    """Integral representations of a catalog series, keyed by name."""
    kind, p = as_lauricella(sid)
    n = sid.n
    reps: Dict[str, Callable[[], complex]] = {}
    if n > 2:
        return reps
    if kind is SeriesKind.FD:
        lam = list(p["lambda"])

        def fd() -> complex:
            integrand = lambda *t: (1 - sum(t)) ** (-p["lambda0"])
            return gamma_ratio([p["mu"]], lam) * simplex_integral_K(
                integrand, p["mu"] - sum(lam), lam, point
            )

        reps["euler_simplex"] = fd
    elif kind is SeriesKind.FB:
        lam, lamp = list(p["lambda"]), list(p["lambdap"])

        def fb() -> complex:
            def integrand(*t):
                out = 1
                for ti, e in zip(t, lamp):
                    out = out * (1 - ti) ** (-e)
                return out

            return gamma_ratio([p["mu"]], lam) * simplex_integral_K(
                integrand, p["mu"] - sum(lam), lam, point
            )

        reps["euler_simplex"] = fb
    elif kind is SeriesKind.FA:
        lam, mus = list(p["lambda"]), list(p["mu"])

        def fa() -> complex:
            integrand = lambda *t: (1 - sum(t)) ** (-p["lambda0"])
            return gamma_ratio(lam, mus) * box_integral_K(
                integrand, [l - m for l, m in zip(lam, mus)], mus, point
            )

        reps["euler_box"] = fa
    elif kind is SeriesKind.KUMMER:
        def kummer() -> complex:
            return gamma_ratio([p["c"]], [p["a"]]) * simplex_integral_K(
                np.exp, p["c"] - p["a"], [p["a"]], point
            )

        reps["euler_simplex"] = kummer
    elif kind is SeriesKind.PHI2:
        lam = [p["b"], p["bp"]]

        def phi2() -> complex:
            return gamma_ratio([p["c"]], lam) * simplex_integral_K(
                lambda s, t: np.exp(s + t), p["c"] - sum(lam), lam, point
            )

        reps["euler_simplex"] = phi2
    return reps


def verify_representation(
    sid: SeriesId,
    point: Sequence[float],
    tolerances: Optional[Dict[str, float]] = None,
    nodes: int = DEFAULT_NODES,
    max_nodes: int = MAX_NODES,
) -> Dict[str, Any]:
    """Compare every integral representation of a series with its truncated sum."""
    tol = (tolerances or {}).get("residual", 1e-6)
    series_value, shell = evaluate(build_direct(sid), point)
    report: Dict[str, Any] = {
        "kind": sid.kind.value,
        "point": [float(v) for v in point],
        "series": [series_value.real, series_value.imag],
        "truncation_estimate": shell,
        "representations": {},
    }
    passed = True
    for name, compute in _representations(sid, point).items():
        try:
            value = compute()
        except DomainError as e:
            logger.warning(f"{sid.kind.value}: {name} skipped: {e}")
            report["representations"][name] = {"skipped": str(e)}
            continue
        residual = abs(value - series_value) / max(abs(series_value), 1e-300)
        ok = residual <= tol
        passed = passed and ok
        report["representations"][name] = {"residual": float(residual), "passed": ok}
    report["passed"] = passed
    return report
