"""Operator calculus in the Weyl algebra W[x].

Operators are normal-ordered sums c x^a d^b. Internally many operations go through the
graded form sum x^w f(theta) with integer weights w (possibly negative) and polynomials f in
theta = x d, where x^w f(theta) x^v g(theta) = x^{w+v} f(theta + v) g(theta). Additions by
x^c, the tilde involution, the K/L substitution rules and the reduced representative are all
simple in that form.
"""

import itertools
import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from types import MappingProxyType
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionMismatch, ZeroOperator
from .series import TruncatedSeries

logger = logging.getLogger(__name__)

Exps = Tuple[int, ...]
Poly = Dict[Exps, complex]
Graded = Dict[Exps, Poly]

CHOP = 1e-12
ROOT_TOL = 1e-10


# -- polynomials in theta ----------------------------------------------------------


def _unit(n: int, i: int, value: int = 1) -> Exps:
    return tuple(value if j == i else 0 for j in range(n))


def _padd(f: Poly, g: Poly, scale: complex = 1) -> Poly:
    out = dict(f)
    for k, v in g.items():
        out[k] = out.get(k, 0) + scale * v
    return out


def _pmul(f: Poly, g: Poly) -> Poly:
    out: Poly = {}
    for k1, v1 in f.items():
        for k2, v2 in g.items():
            key = tuple(a + b for a, b in zip(k1, k2))
            out[key] = out.get(key, 0) + v1 * v2
    return out


def _paffine(f: Poly, scale: Sequence[complex], shift: Sequence[complex]) -> Poly:
    """f with theta_i replaced by scale_i theta_i + shift_i."""
    out: Poly = {}
    for exps, c in f.items():
        partial: List[Tuple[Exps, complex]] = [((), complex(c))]
        for i, e in enumerate(exps):
            nxt = []
            for head, coeff in partial:
                for k in range(e + 1):
                    term = comb(e, k) * scale[i] ** k * shift[i] ** (e - k)
                    if term != 0:
                        nxt.append((head + (k,), coeff * term))
            partial = nxt
        for key, coeff in partial:
            out[key] = out.get(key, 0) + coeff
    return out


def _ff_poly(n: int, i: int, count: int, offset: complex = 0) -> Poly:
    """prod_{j < count} (theta_i - offset - j)."""
    poly: Poly = {(0,) * n: 1 + 0j}
    for j in range(count):
        poly = _pmul(poly, {_unit(n, i): 1, (0,) * n: -(offset + j)})
    return poly


@lru_cache(maxsize=None)
def stirling2(j: int, k: int) -> int:
    if j == k:
        return 1
    if k == 0 or k > j:
        return 0
    return k * stirling2(j - 1, k) + stirling2(j - 1, k - 1)


def _to_falling(f: Poly) -> Poly:
    """Coefficients of f in the basis prod_i ff(theta_i, b_i)."""
    out: Poly = {}
    for exps, c in f.items():
        choices = [[(k, stirling2(e, k)) for k in range(e + 1) if stirling2(e, k)] for e in exps]
        for combo in itertools.product(*choices):
            key = tuple(k for k, _ in combo)
            weight = 1
            for _, s in combo:
                weight *= s
            out[key] = out.get(key, 0) + c * weight
    return out


def _peval_var(f: Poly, var: int, r: complex) -> Poly:
    """f with theta_var set to r (the exponent slot is kept at zero)."""
    out: Poly = {}
    for exps, c in f.items():
        key = tuple(0 if j == var else e for j, e in enumerate(exps))
        out[key] = out.get(key, 0) + c * r ** exps[var]
    return out


def _vanishes(f: Poly, var: int, r: complex, tol: float = ROOT_TOL) -> bool:
    scale = sum(abs(c) * max(1.0, abs(r)) ** exps[var] for exps, c in f.items())
    residual = max((abs(c) for c in _peval_var(f, var, r).values()), default=0.0)
    return residual <= tol * max(scale, 1e-300)


def _pdivide_linear(f: Poly, var: int, r: complex) -> Poly:
    """Quotient of f by (theta_var - r); the remainder is assumed negligible."""
    groups: Dict[Exps, Dict[int, complex]] = {}
    for exps, c in f.items():
        rest = tuple(0 if j == var else e for j, e in enumerate(exps))
        groups.setdefault(rest, {})[exps[var]] = c
    out: Poly = {}
    for rest, coeffs in groups.items():
        top = max(coeffs)
        carry = 0j
        for e in range(top, 0, -1):
            carry = coeffs.get(e, 0) + r * carry
            key = tuple(e - 1 if j == var else v for j, v in enumerate(rest))
            out[key] = out.get(key, 0) + carry
    return out


def _pchop(f: Poly, tol: float) -> Poly:
    return {k: v for k, v in f.items() if abs(v) > tol}


# -- operators -----------------------------------------------------------------


def _ff(value: complex, count: int) -> complex:
    out = 1 + 0j
    for j in range(count):
        out *= value - j
    return out


@dataclass(frozen=True, eq=False)
class WeylOperator:
    """sum c x^a d^b in normal order, keyed by (a, b)."""
    n: int
    terms: Mapping[Tuple[Exps, Exps], complex]

    def __post_init__(self):
        clean: Dict[Tuple[Exps, Exps], complex] = {}
        for (a, b), c in dict(self.terms).items():
            a, b = tuple(int(v) for v in a), tuple(int(v) for v in b)
            if len(a) != self.n or len(b) != self.n:
                raise DimensionMismatch(f"term exponents {a}, {b} do not have {self.n} entries")
            if min(a + b, default=0) < 0:
                raise ValueError(f"negative exponent in term x^{a} d^{b}")
            c = complex(c)
            if c != 0:
                clean[(a, b)] = clean.get((a, b), 0) + c
        object.__setattr__(self, "terms", MappingProxyType(clean))

    # -- generators ---------------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "WeylOperator":
        return cls(n, {})

    @classmethod
    def const(cls, value: complex, n: int) -> "WeylOperator":
        zero = (0,) * n
        return cls(n, {(zero, zero): value})

    @classmethod
    def x(cls, i: int, n: int) -> "WeylOperator":
        return cls(n, {(_unit(n, i), (0,) * n): 1})

    @classmethod
    def d(cls, i: int, n: int) -> "WeylOperator":
        return cls(n, {((0,) * n, _unit(n, i)): 1})

    @classmethod
    def theta(cls, i: int, n: int) -> "WeylOperator":
        return cls(n, {(_unit(n, i), _unit(n, i)): 1})

    # -- arithmetic ---------------------------------------------------------

    def _lift(self, other: Any) -> "WeylOperator":
        if isinstance(other, WeylOperator):
            if other.n != self.n:
                raise DimensionMismatch(f"operators in {self.n} and {other.n} variables")
            return other
        return WeylOperator.const(other, self.n)

    def __add__(self, other: Any) -> "WeylOperator":
        other = self._lift(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, 0) + v
        return WeylOperator(self.n, terms)

    __radd__ = __add__

    def __neg__(self) -> "WeylOperator":
        return self.scale(-1)

    def __sub__(self, other: Any) -> "WeylOperator":
        return self + (-self._lift(other))

    def __rsub__(self, other: Any) -> "WeylOperator":
        return self._lift(other) - self

    def scale(self, factor: complex) -> "WeylOperator":
        return WeylOperator(self.n, {k: v * factor for k, v in self.terms.items()})

    def __mul__(self, other: Any) -> "WeylOperator":
        if isinstance(other, WeylOperator):
            return compose(self, other)
        return self.scale(other)

    def __rmul__(self, other: Any) -> "WeylOperator":
        return self.scale(other)

    def __pow__(self, k: int) -> "WeylOperator":
        out = WeylOperator.const(1, self.n)
        for _ in range(k):
            out = compose(out, self)
        return out

    def abs(self) -> "WeylOperator":
        return WeylOperator(self.n, {k: abs(v) for k, v in self.terms.items()})

    def chop(self, tol: float = CHOP) -> "WeylOperator":
        """Drop coefficients below tol relative to the largest one."""
        if not self.terms:
            return self
        cutoff = tol * max(abs(v) for v in self.terms.values())
        return WeylOperator(self.n, {k: v for k, v in self.terms.items() if abs(v) > cutoff})

    def is_zero(self) -> bool:
        return not self.terms

    def distance(self, other: "WeylOperator") -> float:
        diff = self - other
        return max((abs(v) for v in diff.terms.values()), default=0.0)

    def leading_key(self) -> Tuple[Exps, Exps]:
        """Highest d-order term, ties broken by d exponents then x-degree."""
        return max(self.terms, key=lambda k: (sum(k[1]), k[1], sum(k[0]), k[0]))

    def normalized(self) -> "WeylOperator":
        if self.is_zero():
            raise ZeroOperator("cannot normalize the zero operator")
        return self.scale(1 / self.terms[self.leading_key()])

    # -- interchange --------------------------------------------------------

    def to_json(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "terms": [
                {"x": list(a), "d": list(b), "re": c.real, "im": c.imag}
                for (a, b), c in sorted(self.terms.items())
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "WeylOperator":
        terms: Dict[Tuple[Exps, Exps], complex] = {}
        for t in data["terms"]:
            key = (tuple(t["x"]), tuple(t["d"]))
            terms[key] = terms.get(key, 0) + complex(t.get("re", 0.0), t.get("im", 0.0))
        return cls(int(data["n"]), terms)

    def __repr__(self) -> str:
        return f"WeylOperator(n={self.n}, {format_operator(self)})"


def compose(A: WeylOperator, B: WeylOperator) -> WeylOperator:
    """Normal-ordered product AB using d^b x^c = sum_k C(b,k) c!/(c-k)! x^{c-k} d^{b-k}."""
    if A.n != B.n:
        raise DimensionMismatch(f"operators in {A.n} and {B.n} variables")
    out: Dict[Tuple[Exps, Exps], complex] = {}
    for (a1, b1), c1 in A.terms.items():
        for (a2, b2), c2 in B.terms.items():
            ranges = [range(min(u, v) + 1) for u, v in zip(b1, a2)]
            for k in itertools.product(*ranges):
                weight = 1
                for bi, ai, ki in zip(b1, a2, k):
                    weight *= comb(bi, ki) * _ff(ai, ki).real
                a = tuple(x + y - z for x, y, z in zip(a1, a2, k))
                b = tuple(x - z + y for x, y, z in zip(b1, b2, k))
                out[(a, b)] = out.get((a, b), 0) + c1 * c2 * weight
    return WeylOperator(A.n, out)


# -- theta forms -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ThetaForm:
    """sum c d^alpha theta^beta, keyed by (alpha, beta)."""
    n: int
    terms: Mapping[Tuple[Exps, Exps], complex]

    def __post_init__(self):
        clean = {
            (tuple(a), tuple(b)): complex(c) for (a, b), c in dict(self.terms).items() if c != 0
        }
        object.__setattr__(self, "terms", MappingProxyType(clean))

    def to_graded(self) -> Graded:
        n = self.n
        out: Graded = {}
        for (alpha, beta), c in self.terms.items():
            poly: Poly = {beta: c}
            for i, a in enumerate(alpha):
                poly = _pmul(poly, _ff_poly(n, i, a))
            w = tuple(-a for a in alpha)
            out[w] = _padd(out.get(w, {}), poly)
        return out

    def to_weyl(self) -> WeylOperator:
        return _graded_to_weyl(self.to_graded(), self.n, reduce=False)

    def substitute_theta(self, shift: Sequence[complex]) -> "ThetaForm":
        """theta_i -> theta_i + shift_i inside every theta^beta."""
        out: Dict[Tuple[Exps, Exps], complex] = {}
        ones = [1] * self.n
        for (alpha, beta), c in self.terms.items():
            for b, v in _paffine({beta: c}, ones, shift).items():
                out[(alpha, b)] = out.get((alpha, b), 0) + v
        return ThetaForm(self.n, out)


def _graded_from_weyl(P: WeylOperator) -> Graded:
    n = P.n
    out: Graded = {}
    for (a, b), c in P.terms.items():
        poly: Poly = {(0,) * n: c}
        for i, bi in enumerate(b):
            poly = _pmul(poly, _ff_poly(n, i, bi))
        w = tuple(x - y for x, y in zip(a, b))
        out[w] = _padd(out.get(w, {}), poly)
    return out


def _graded_mul(A: Graded, B: Graded, n: int) -> Graded:
    out: Graded = {}
    ones = [1] * n
    for wa, fa in A.items():
        for wb, gb in B.items():
            w = tuple(x + y for x, y in zip(wa, wb))
            out[w] = _padd(out.get(w, {}), _pmul(_paffine(fa, ones, wb), gb))
    return out


def _graded_shift_theta(G: Graded, shift: Sequence[complex], n: int) -> Graded:
    ones = [1] * n
    return {w: _paffine(f, ones, shift) for w, f in G.items()}


def _graded_to_weyl(G: Graded, n: int, reduce: bool) -> WeylOperator:
    """Back to normal order; reduce clears the minimal left monomial and normalizes."""
    raw: Dict[Tuple[Exps, Exps], complex] = {}
    for w, f in G.items():
        for b, d in _to_falling(f).items():
            a = tuple(x + y for x, y in zip(w, b))
            raw[(a, b)] = raw.get((a, b), 0) + d
    cutoff = CHOP * max((abs(v) for v in raw.values()), default=0.0)
    raw = {k: v for k, v in raw.items() if abs(v) > cutoff}
    if not raw:
        if reduce:
            raise ZeroOperator("operator reduced to zero")
        return WeylOperator.zero(n)
    if reduce:
        delta = [min(a[i] for a, _ in raw) for i in range(n)]
        raw = {(tuple(x - y for x, y in zip(a, delta)), b): v for (a, b), v in raw.items()}
        return WeylOperator(n, raw).normalized()
    if any(min(a) < 0 for a, _ in raw):
        raise ValueError("graded operator is not a polynomial-coefficient operator")
    return WeylOperator(n, raw)


def to_theta_form(P: WeylOperator) -> Tuple[Exps, ThetaForm]:
    """(gamma, Q) with d^gamma P = sum c d^alpha theta^beta, gamma_j = max(0, a_j - b_j)."""
    n = P.n
    gamma = tuple(
        max([0] + [a[j] - b[j] for a, b in P.terms]) for j in range(n)
    )
    lifted = P
    for j, g in enumerate(gamma):
        lifted = compose(WeylOperator.d(j, n) ** g, lifted)
    out: Dict[Tuple[Exps, Exps], complex] = {}
    for (a, b), c in lifted.terms.items():
        k = tuple(y - x for x, y in zip(a, b))
        poly: Poly = {(0,) * n: c}
        for i in range(n):
            poly = _pmul(poly, _ff_poly(n, i, a[i], offset=k[i]))
        for beta, v in poly.items():
            out[(k, beta)] = out.get((k, beta), 0) + v
    return gamma, ThetaForm(n, out)


def reduced_representative(P: WeylOperator) -> WeylOperator:
    """P with its largest common left monomial factor removed, leading coefficient 1."""
    P = P.chop()
    if P.is_zero():
        raise ZeroOperator("the zero operator has no reduced representative")
    delta = [min(a[i] for a, _ in P.terms) for i in range(P.n)]
    terms = {(tuple(x - y for x, y in zip(a, delta)), b): c for (a, b), c in P.terms.items()}
    return WeylOperator(P.n, terms).normalized()


def _strip_linear_factor(P: WeylOperator, var: int, c: complex) -> Tuple[WeylOperator, bool]:
    """Left-divide by (x_var - c) when every coefficient polynomial vanishes at c."""
    n = P.n
    groups: Dict[Tuple[Exps, Exps], Dict[int, complex]] = {}
    for (a, b), v in P.terms.items():
        rest = tuple(0 if j == var else e for j, e in enumerate(a))
        groups.setdefault((rest, b), {})[a[var]] = v
    out: Dict[Tuple[Exps, Exps], complex] = {}
    for (rest, b), coeffs in groups.items():
        top = max(coeffs)
        carry = 0j
        for e in range(top, 0, -1):
            carry = coeffs.get(e, 0) + c * carry
            key = tuple(e - 1 if j == var else x for j, x in enumerate(rest))
            out[(key, b)] = out.get((key, b), 0) + carry
        remainder = coeffs.get(0, 0) + c * carry
        scale = sum(abs(v) * max(1.0, abs(c)) ** e for e, v in coeffs.items())
        if abs(remainder) > ROOT_TOL * scale:
            return P, False
    return WeylOperator(n, out), True


def addition(
    P: WeylOperator,
    kind: str,
    var: int = 0,
    c: complex = 0.0,
    lam: complex = 0.0,
    poly: Optional[Mapping[Sequence[int], complex]] = None,
) -> WeylOperator:
    """Ad(f)P = f P f^{-1}, reduced.

    kind "power_at_c": f = (x_var - c)^lam; kind "exp_poly": f = exp(r(x)) with r given as
    {exponents: coefficient}.
    """
    n = P.n
    if kind == "power_at_c":
        if c == 0:
            shift = [-lam if j == var else 0 for j in range(n)]
            return _graded_to_weyl(_graded_shift_theta(_graded_from_weyl(P), shift, n), n, True)
        top = max((b[var] for _, b in P.terms), default=0)
        out = WeylOperator.zero(n)
        for (a, b), coeff in P.terms.items():
            for k in range(b[var] + 1):
                weight = comb(b[var], k) * _ff(-lam, k)
                if weight == 0:
                    continue
                power = top - k
                # (x_var - c)^power expanded
                for i in range(power + 1):
                    x_exp = tuple(e + (i if j == var else 0) for j, e in enumerate(a))
                    d_exp = tuple(e - (k if j == var else 0) for j, e in enumerate(b))
                    out = out + WeylOperator(
                        n, {(x_exp, d_exp): coeff * weight * comb(power, i) * (-c) ** (power - i)}
                    )
        out = out.chop()
        stripped = True
        while stripped and not out.is_zero():
            out, stripped = _strip_linear_factor(out, var, c)
        return reduced_representative(out)
    if kind == "exp_poly":
        if not poly:
            return reduced_representative(P)
        gradients = []
        for j in range(n):
            grad: Dict[Tuple[Exps, Exps], complex] = {}
            for exps, coeff in poly.items():
                exps = tuple(int(e) for e in exps)
                if exps[j] > 0:
                    key = (tuple(e - (1 if i == j else 0) for i, e in enumerate(exps)), (0,) * n)
                    grad[key] = grad.get(key, 0) + coeff * exps[j]
            gradients.append(WeylOperator.d(j, n) - WeylOperator(n, grad))
        out = WeylOperator.zero(n)
        for (a, b), coeff in P.terms.items():
            term = WeylOperator(n, {(a, (0,) * n): coeff})
            for j in range(n):
                term = compose(term, gradients[j] ** b[j])
            out = out + term
        return reduced_representative(out)
    raise ValueError(f"unknown addition kind {kind!r}")


def middle_convolution(P: WeylOperator, mu: complex) -> WeylOperator:
    """mc_mu(P) for ordinary operators: theta -> theta - mu in d^k P, then strip d^m."""
    if P.n != 1:
        raise DimensionMismatch("middle convolution is defined for one variable")
    P = P.chop()
    if P.is_zero():
        raise ZeroOperator("middle convolution of the zero operator")
    _, form = to_theta_form(P)
    G = form.substitute_theta([-mu]).to_graded()
    stripped = 0
    while G and all(_vanishes(f, 0, -(w[0] + 1)) for w, f in G.items()):
        G = {(w[0] + 1,): _pdivide_linear(f, 0, -(w[0] + 1)) for w, f in G.items()}
        G = {w: _pchop(f, 0.0) for w, f in G.items() if f}
        stripped += 1
    result = _graded_to_weyl(G, 1, reduce=True)
    if all(sum(a) == 0 and sum(b) == 0 for a, b in result.terms):
        logger.warning(f"mc_{mu} collapsed to a constant operator (stripped d^{stripped})")
    return result


def tilde(P: WeylOperator) -> WeylOperator:
    """Coordinate change x -> 1/x: d -> -x(theta + 1), theta -> -theta - 1, then R."""
    n = P.n
    G = _graded_from_weyl(P)
    flipped = {
        tuple(-v for v in w): _paffine(f, [-1] * n, [-1] * n) for w, f in G.items()
    }
    return _graded_to_weyl(flipped, n, reduce=True)


def transform_op(Q: ThetaForm, mu: complex, direction: str) -> WeylOperator:
    """Image of a theta form under the K or L operator rule, reduced.

    K: d_k -> x_k^{-1}(theta_1 + ... + theta_n + mu + n - 1), theta unchanged.
    L: d_k -> -x_k(theta_1 + ... + theta_n + mu + n), theta_j -> -theta_j - 1.
    """
    n = Q.n
    zero = (0,) * n
    total: Poly = {_unit(n, i): 1 for i in range(n)}
    if direction == "K":
        d_images = [{_unit(n, k, -1): _padd(total, {zero: mu + n - 1})} for k in range(n)]
        t_images = [{zero: {_unit(n, j): 1}} for j in range(n)]
    elif direction == "L":
        d_images = [{_unit(n, k): _padd({}, _padd(total, {zero: mu + n}), -1)} for k in range(n)]
        t_images = [{zero: {_unit(n, j): -1, zero: -1}} for j in range(n)]
    else:
        raise ValueError(f"direction must be 'K' or 'L', got {direction!r}")
    out: Graded = {}
    for (alpha, beta), c in Q.terms.items():
        G: Graded = {zero: {zero: c}}
        for k, a in enumerate(alpha):
            for _ in range(a):
                G = _graded_mul(G, d_images[k], n)
        for j, b in enumerate(beta):
            for _ in range(b):
                G = _graded_mul(G, t_images[j], n)
        for w, f in G.items():
            out[w] = _padd(out.get(w, {}), f)
    return _graded_to_weyl(out, n, reduce=True)


def transform_annihilator(
    P: WeylOperator, mu: complex, lam: Sequence[complex], direction: str
) -> WeylOperator:
    """Annihilator of K^{mu,lambda}u (or L) in every variable from an annihilator P of u."""
    n = P.n
    lam = [complex(v) for v in lam]
    if len(lam) != n:
        raise DimensionMismatch(f"{len(lam)} lambdas for an operator in {n} variables")
    G = _graded_shift_theta(_graded_from_weyl(P), [-(v - 1) for v in lam], n)
    prepared = _graded_to_weyl(G, n, reduce=True)
    if direction == "L":
        prepared = tilde(prepared)
    _, form = to_theta_form(prepared)
    image = transform_op(form, mu, direction)
    G = _graded_shift_theta(_graded_from_weyl(image), [v - 1 for v in lam], n)
    return _graded_to_weyl(G, n, reduce=True)


# -- action ------------------------------------------------------------------------


def apply_to_series(P: WeylOperator, u: TruncatedSeries) -> TruncatedSeries:
    """Exact action on stored coefficients.

    Each d lowers the degree of known information, so the result is reliable up to
    u.reliable - max over terms of (|b| - |a|)^+.
    """
    if P.n != u.n:
        raise DimensionMismatch(f"operator in {P.n} variables, series in {u.n}")
    n, D = u.n, u.D
    source = u.to_dense()
    grid = np.arange(D + 1)
    out = np.zeros_like(source)
    loss = 0
    for (a, b), c in P.terms.items():
        loss = max(loss, sum(b) - sum(a))
        weighted = source
        for i, bi in enumerate(b):
            if bi:
                factor = np.ones(D + 1)
                for j in range(bi):
                    factor = factor * (grid - j)
                shape = [1] * n
                shape[i] = D + 1
                weighted = weighted * factor.reshape(shape)
        lengths = [D + 1 - max(ai, bi) for ai, bi in zip(a, b)]
        if min(lengths) <= 0:
            continue
        src = tuple(slice(bi, bi + L) for bi, L in zip(b, lengths))
        dst = tuple(slice(ai, ai + L) for ai, L in zip(a, lengths))
        out[dst] += c * weighted[src]
    return TruncatedSeries.from_dense(out, n, D, max(0, u.reliable - loss))


def annihilation_residual(P: WeylOperator, u: TruncatedSeries) -> float:
    """max |(P u)_m| / (|P| |u|)_m over the reliable coefficients of P u.

    The denominator applies P with absolute coefficients to |u|, so the ratio measures
    cancellation rather than coefficient size.
    """
    image = apply_to_series(P, u)
    bound = apply_to_series(P.abs(), u.with_coeffs(np.abs(u.coeffs)))
    keep = image.degrees <= image.reliable
    num = np.abs(image.coeffs[keep])
    den = np.abs(bound.coeffs[keep])
    mask = den > 0
    if not np.any(mask):
        return float(np.max(num, initial=0.0))
    return float(np.max(num[mask] / den[mask]))


def apply_to_monomial(P: WeylOperator, s: Sequence[complex]) -> Dict[Exps, complex]:
    """P x^s as {shift a - b: coefficient} for complex exponents s."""
    if len(s) != P.n:
        raise DimensionMismatch(f"exponent has {len(s)} entries, operator has n={P.n}")
    out: Dict[Exps, complex] = {}
    for (a, b), c in P.terms.items():
        value = c
        for si, bi in zip(s, b):
            value *= _ff(complex(si), bi)
        shift = tuple(x - y for x, y in zip(a, b))
        out[shift] = out.get(shift, 0) + value
    return {k: v for k, v in out.items() if v != 0}


# -- systems of named series -----------------------------------------------------------


def _t(i: int, n: int = 2) -> WeylOperator:
    return WeylOperator.theta(i, n)


def _d(i: int, n: int = 2) -> WeylOperator:
    return WeylOperator.d(i, n)


def f1_system(a: complex, b: complex, bp: complex, c: complex) -> List[WeylOperator]:
    """Annihilators of F1(a, b, b', c; x, y)."""
    total = _t(0) + _t(1)
    return [
        (_t(0) + b) * (total + a) - _d(0) * (total + (c - 1)),
        (_t(1) + bp) * (total + a) - _d(1) * (total + (c - 1)),
    ]


def f2_system(a: complex, b1: complex, b2: complex, c1: complex, c2: complex) -> List[WeylOperator]:
    """Annihilators of F2(a; b1, b2; c1, c2; x, y)."""
    total = _t(0) + _t(1)
    return [
        (_t(0) + b1) * (total + a) - _d(0) * (_t(0) + (c1 - 1)),
        (_t(1) + b2) * (total + a) - _d(1) * (_t(1) + (c2 - 1)),
    ]


def f3_system(a1: complex, a2: complex, b1: complex, b2: complex, c: complex) -> List[WeylOperator]:
    """Annihilators of F3(a1, a2; b1, b2; c; x, y)."""
    total = _t(0) + _t(1)
    return [
        (_t(0) + a1) * (_t(0) + b1) - _d(0) * (total + (c - 1)),
        (_t(1) + a2) * (_t(1) + b2) - _d(1) * (total + (c - 1)),
    ]


def f4_system(a: complex, b: complex, c1: complex, c2: complex) -> List[WeylOperator]:
    """Annihilators of F4(a, b; c1, c2; x, y)."""
    total = _t(0) + _t(1)
    return [
        (total + a) * (total + b) - _d(0) * (_t(0) + (c1 - 1)),
        (total + a) * (total + b) - _d(1) * (_t(1) + (c2 - 1)),
    ]


# -- text syntax -----------------------------------------------------------------------

_FACTOR = re.compile(r"^(?P<sym>[xdt])(?P<idx>\d*)(?:\^(?P<pow>\d+))?$")


def _parse_number(text: str) -> complex:
    return complex(text.replace(" ", "").replace("i", "j"))


def parse_operator(text: str, n: int) -> WeylOperator:
    """Parse "x1^2*d1 + 3*t2 - 2": x = coordinate, d = derivative, t = theta, 1-based."""
    body = text.replace(" ", "")
    if not body:
        raise ValueError("empty operator expression")
    if body[0] in "+-":
        body = "0" + body
    pieces = re.split(r"(?<=[^eE^*])([+-])", body)
    if pieces[0] == "":
        pieces = pieces[1:]
    else:
        pieces = ["+"] + pieces
    total = WeylOperator.zero(n)
    for sign, term in zip(pieces[0::2], pieces[1::2]):
        if not term:
            raise ValueError(f"dangling sign in {text!r}")
        product = WeylOperator.const(-1 if sign == "-" else 1, n)
        for factor in term.split("*"):
            match = _FACTOR.match(factor)
            if match is None:
                try:
                    product = product.scale(_parse_number(factor))
                except ValueError as e:
                    raise ValueError(f"cannot parse factor {factor!r} in {text!r}") from e
                continue
            idx = int(match["idx"]) - 1 if match["idx"] else 0
            if not 0 <= idx < n:
                raise ValueError(f"variable index in {factor!r} out of range for n={n}")
            gen = {"x": WeylOperator.x, "d": WeylOperator.d, "t": WeylOperator.theta}[match["sym"]]
            product = compose(product, gen(idx, n) ** int(match["pow"] or 1))
        total = total + product
    return total


def format_operator(P: WeylOperator) -> str:
    """Inverse of parse_operator up to coefficient formatting."""
    if P.is_zero():
        return "0"
    parts = []
    for (a, b), c in sorted(P.terms.items()):
        factors = [f"({c.real:g}{c.imag:+g}i)" if c.imag else f"{c.real:g}"]
        for i, e in enumerate(a):
            if e:
                factors.append(f"x{i + 1}" + (f"^{e}" if e > 1 else ""))
        for i, e in enumerate(b):
            if e:
                factors.append(f"d{i + 1}" + (f"^{e}" if e > 1 else ""))
        parts.append("*".join(factors))
    return " + ".join(parts)
