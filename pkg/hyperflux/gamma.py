"""Complex Gamma kernel: log-Gamma, Pochhammer symbols and pole-aware Gamma ratios."""

import cmath
import logging
import math
from typing import List, Sequence, Tuple

import numpy as np

from .errors import PoleError

logger = logging.getLogger(__name__)

# Lanczos approximation, g = 7, n = 9
LANCZOS_G = 7.0
LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)

POLE_TOL = 1e-9


def nonpositive_integer(z: complex, tol: float = POLE_TOL) -> bool:
    """True when z is within tol of 0, -1, -2, ..."""
    z = complex(z)
    nearest = round(z.real)
    return nearest <= 0 and abs(z - nearest) <= tol


def _lanczos_log_gamma(z: complex) -> complex:
    z -= 1.0
    x = LANCZOS_COEFFS[0]
    for i in range(1, len(LANCZOS_COEFFS)):
        x += LANCZOS_COEFFS[i] / (z + i)
    t = z + LANCZOS_G + 0.5
    return HALF_LOG_TWO_PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def log_gamma(z: complex) -> complex:
    """Principal branch of log Gamma(z).

    Arguments left of Re z = 0.5 are shifted up with the recurrence
    log Gamma(z) = log Gamma(z + k) - sum log(z + j), which keeps the principal branch.
    """
    z = complex(z)
    if nonpositive_integer(z, tol=0.0):
        raise PoleError(f"Gamma has a pole at {z}")
    if z.real >= 0.5:
        return _lanczos_log_gamma(z)
    k = math.ceil(0.5 - z.real)
    shift = 0j
    for j in range(k):
        shift += cmath.log(z + j)
    return _lanczos_log_gamma(z + k) - shift


def pochhammer(a: complex, k: int) -> complex:
    """Rising factorial a(a+1)...(a+k-1) by direct product."""
    if k < 0:
        raise ValueError(f"pochhammer needs k >= 0, got {k}")
    result = 1 + 0j
    a = complex(a)
    for j in range(k):
        result *= a + j
    return result


def pochhammer_table(a: complex, K: int) -> np.ndarray:
    """(a)_0, (a)_1, ..., (a)_K as a complex array."""
    table = np.ones(K + 1, dtype=complex)
    if K > 0:
        table[1:] = np.cumprod(complex(a) + np.arange(K))
    return table


def _pair_poles(
    numerators: List[complex], denominators: List[complex]
) -> Tuple[List[complex], List[complex], complex]:
    """Cancel numerator poles against denominator poles.

    Gamma(z_d + k) / Gamma(z_d) = (z_d)_k for k >= 0 and 1 / (z_n)_{-k} otherwise; both
    products avoid zero because the two arguments sit at poles on the same side.
    """
    nums = list(numerators)
    dens = list(denominators)
    factor = 1 + 0j
    num_poles = [i for i, z in enumerate(nums) if nonpositive_integer(z)]
    den_poles = [i for i, z in enumerate(dens) if nonpositive_integer(z)]
    paired_num, paired_den = set(), set()
    for i, j in zip(num_poles, den_poles):
        zn, zd = nums[i], dens[j]
        k = int(round((zn - zd).real))
        if k >= 0:
            factor *= pochhammer(zd, k)
        else:
            factor /= pochhammer(zn, -k)
        paired_num.add(i)
        paired_den.add(j)
    rest_num = [z for i, z in enumerate(nums) if i not in paired_num]
    rest_den = [z for j, z in enumerate(dens) if j not in paired_den]
    return rest_num, rest_den, factor


def gamma_ratio(numerators: Sequence[complex], denominators: Sequence[complex]) -> complex:
    """prod Gamma(numerators) / prod Gamma(denominators) with matched poles cancelled.

    Returns exactly 0 when only a denominator sits at a pole.
    """
    nums, dens, factor = _pair_poles(
        [complex(z) for z in numerators], [complex(z) for z in denominators]
    )
    for z in nums:
        if nonpositive_integer(z):
            raise PoleError(f"uncancelled Gamma pole at {z}")
    if any(nonpositive_integer(z) for z in dens):
        return 0j
    total = 0j
    for z in nums:
        total += log_gamma(z)
    for z in dens:
        total -= log_gamma(z)
    return factor * cmath.exp(total)


def gamma(z: complex) -> complex:
    """Gamma(z)."""
    return gamma_ratio([z], [])


def gamma_product(values: Sequence[complex]) -> complex:
    """Gamma(v_1)...Gamma(v_k) for a parameter vector."""
    return gamma_ratio(list(values), [])
