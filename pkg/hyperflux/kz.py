"""KZ residue families on five points and their convolution transforms.

A family stores the six residue matrices A_ij, 0 <= i < j <= 3. The residues at the
fifth point are derived as A_i4 = -sum_nu A_i,nu. Convolution in x, y or along the
blow-up coordinate (x, x/y) triples the size; the invariant subspace L is then
quotiented out.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np
from scipy import linalg

from .errors import (
    ClusterError,
    DimensionMismatch,
    GenericityError,
    InvalidFamily,
    InvarianceViolation,
    NotHomogeneous,
)

logger = logging.getLogger(__name__)

POINTS = 5
FINITE = 4
FINITE_PAIRS: Tuple[Tuple[int, int], ...] = tuple(combinations(range(FINITE), 2))
PAIRS: Tuple[Tuple[int, int], ...] = tuple(combinations(range(POINTS), 2))

KERNEL_RTOL = 1e-9

SWAP_XY = (1, 0, 2, 3, 4)
BLOWUP_XY = (2, 1, 0, 4, 3)


class Axis(Enum):
    """Variable a convolution acts on."""

    X = "x"
    Y = "y"
    XY = "xy"


AXIS_PERMUTATION = {Axis.X: (0, 1, 2, 3, 4), Axis.Y: SWAP_XY, Axis.XY: BLOWUP_XY}


def pair_key(i: int, j: int) -> str:
    i, j = sorted((i, j))
    return f"{i}{j}"


def parse_pair(key: str) -> Tuple[int, int]:
    if len(key) != 2 or not key.isdigit():
        raise InvalidFamily(f"bad pair key {key!r}")
    i, j = sorted((int(key[0]), int(key[1])))
    if i == j or j >= POINTS:
        raise InvalidFamily(f"bad pair key {key!r}")
    return i, j


def _matrix(value: Any, N: int, label: str) -> np.ndarray:
    arr = np.asarray(value, dtype=complex)
    if arr.ndim == 0 and N == 1:
        arr = arr.reshape(1, 1)
    if arr.shape != (N, N):
        raise DimensionMismatch(f"{label}: expected {N}x{N}, got shape {arr.shape}")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


def encode_matrix(m: np.ndarray) -> List[List[List[float]]]:
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def decode_matrix(rows: Sequence[Sequence[Any]]) -> np.ndarray:
    def entry(v: Any) -> complex:
        if isinstance(v, (list, tuple)):
            return complex(v[0], v[1])
        return complex(v)

    return np.array([[entry(v) for v in row] for row in rows], dtype=complex)


@dataclass(frozen=True, eq=False)
class ResidueFamily:
    """Residue matrices of a KZ equation on the points x_0, ..., x_3 (and x_4 at infinity)."""

    N: int
    A: Mapping[Tuple[int, int], np.ndarray]
    q: int = 3

    def __post_init__(self):
        if self.q != 3:
            raise InvalidFamily(f"only q=3 families are supported, got q={self.q}")
        if self.N < 1:
            raise InvalidFamily(f"matrix size must be positive, got {self.N}")
        blocks = {}
        for key, value in dict(self.A).items():
            i, j = parse_pair(key) if isinstance(key, str) else tuple(sorted(key))
            if (i, j) not in FINITE_PAIRS:
                raise InvalidFamily(f"residue A_{i}{j} is derived, not stored")
            blocks[(i, j)] = _matrix(value, self.N, f"A_{i}{j}")
        for pair in FINITE_PAIRS:
            blocks.setdefault(pair, _matrix(np.zeros((self.N, self.N)), self.N, "zero"))
        object.__setattr__(self, "A", blocks)

    @classmethod
    def zeros(cls, N: int) -> "ResidueFamily":
        return cls(N, {})

    @classmethod
    def from_pairs(cls, blocks: Mapping[Any, Any]) -> "ResidueFamily":
        """Build from {pair: matrix}; the size is read off the first matrix."""
        if not blocks:
            raise InvalidFamily("empty residue family")
        first = np.atleast_2d(np.asarray(next(iter(blocks.values())), dtype=complex))
        return cls(first.shape[0], dict(blocks))

    def get(self, i: int, j: int) -> np.ndarray:
        """A_ij for any pair of distinct points, deriving residues at x_4."""
        if i == j:
            raise InvalidFamily(f"A_{i}{i} is not a residue")
        i, j = sorted((i, j))
        if j < FINITE:
            return self.A[(i, j)]
        total = np.zeros((self.N, self.N), dtype=complex)
        for nu in range(FINITE):
            if nu != i:
                total = total + self.A[tuple(sorted((i, nu)))]
        return -total

    def __getitem__(self, key: str) -> np.ndarray:
        return self.get(*parse_pair(key))

    def total(self) -> np.ndarray:
        """Sum of the six stored residues; zero for a homogeneous family."""
        return sum(self.A.values(), np.zeros((self.N, self.N), dtype=complex))

    def is_homogeneous(self, tol: float = 1e-9) -> bool:
        return float(np.linalg.norm(self.total())) <= tol

    def max_difference(self, other: "ResidueFamily") -> float:
        if other.N != self.N:
            raise DimensionMismatch(f"family sizes differ: {self.N} vs {other.N}")
        return max(float(np.max(np.abs(self.get(*p) - other.get(*p)))) for p in PAIRS)

    def to_json(self) -> Dict[str, Any]:
        return {
            "q": self.q,
            "N": self.N,
            "A": {pair_key(*p): encode_matrix(self.A[p]) for p in FINITE_PAIRS},
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "ResidueFamily":
        try:
            N = int(data["N"])
            blocks = {key: decode_matrix(rows) for key, rows in data["A"].items()}
            return cls(N, blocks, int(data.get("q", 3)))
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidFamily(f"malformed family JSON: {e}") from e

    def __repr__(self) -> str:
        return f"ResidueFamily(N={self.N})"


@dataclass
class ValidationReport:
    integrability: float
    homogeneity: float
    tol: float
    require_homogeneous: bool = False
    worst: str = ""

    @property
    def passed(self) -> bool:
        if self.integrability > self.tol:
            return False
        return not self.require_homogeneous or self.homogeneity <= self.tol

    def to_json(self) -> Dict[str, Any]:
        return {
            "integrability": self.integrability,
            "homogeneity": self.homogeneity,
            "tol": self.tol,
            "require_homogeneous": self.require_homogeneous,
            "worst": self.worst,
            "passed": self.passed,
        }


def _commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def validate(
    F: ResidueFamily, tol: float = 1e-9, require_homogeneous: bool = False
) -> ValidationReport:
    """Integrability defects and the homogeneity defect of a family.

    Checks [A_ij, A_kl] for disjoint pairs and [A_ij, A_ik + A_jk] for every triple.
    """
    worst, label = 0.0, ""
    for (i, j), (k, l) in combinations(FINITE_PAIRS, 2):
        if {i, j} & {k, l}:
            continue
        d = float(np.linalg.norm(_commutator(F.get(i, j), F.get(k, l))))
        if d > worst:
            worst, label = d, f"[A_{i}{j}, A_{k}{l}]"
    for triple in combinations(range(FINITE), 3):
        for i, j in combinations(triple, 2):
            (k,) = set(triple) - {i, j}
            d = float(np.linalg.norm(_commutator(F.get(i, j), F.get(i, k) + F.get(j, k))))
            if d > worst:
                worst, label = d, f"[A_{i}{j}, A_{i}{k}+A_{j}{k}]"
    homogeneity = float(np.linalg.norm(F.total()))
    report = ValidationReport(worst, homogeneity, tol, require_homogeneous, label)
    logger.debug(
        f"validate N={F.N}: integrability {worst:.3e} {label}, homogeneity {homogeneity:.3e}"
    )
    return report


def homogenize(F: ResidueFamily, tol: float = 1e-9) -> Tuple[ResidueFamily, complex, bool]:
    """Gauge u -> (x_2 - x_3)^{-kappa} u with kappa = trace(sum A)/N.

    Returns the shifted family, kappa and whether sum A - kappa I was numerically zero.
    """
    total = F.total()
    kappa = complex(np.trace(total) / F.N)
    scalar_ok = float(np.linalg.norm(total - kappa * np.eye(F.N))) <= tol
    if not scalar_ok:
        logger.warning(f"homogenize: residue sum is not scalar, kappa={kappa:.6g}")
    blocks = dict(F.A)
    blocks[(2, 3)] = F.A[(2, 3)] - kappa * np.eye(F.N)
    return ResidueFamily(F.N, blocks), kappa, scalar_ok


def _check_permutation(sigma: Sequence[int]) -> Tuple[int, ...]:
    sigma = tuple(int(s) for s in sigma)
    if sorted(sigma) != list(range(POINTS)):
        raise InvalidFamily(f"{sigma} is not a permutation of 0..4")
    return sigma


def s5_transform(F: ResidueFamily, sigma: Sequence[int], tol: float = 1e-9) -> ResidueFamily:
    """Relabel the five points: A'_ij = A_{s(i) s(j)} with s the inverse of sigma.

    sigma[i] is the image of i, so the action composes as s5(F, sigma o tau) =
    s5(s5(F, tau), sigma). Moving the point x_4 requires a homogeneous family.
    """
    sigma = _check_permutation(sigma)
    if sigma[FINITE] != FINITE and not F.is_homogeneous(tol):
        raise NotHomogeneous(
            f"permutation {sigma} moves x_4 but the residue sum has norm "
            f"{np.linalg.norm(F.total()):.3e}"
        )
    inverse = [0] * POINTS
    for i, s in enumerate(sigma):
        inverse[s] = i
    return ResidueFamily(F.N, {(i, j): F.get(inverse[i], inverse[j]) for i, j in FINITE_PAIRS})


def block_matrix(rows: Sequence[Sequence[Any]], N: int) -> np.ndarray:
    """Assemble a 3N matrix from a 3x3 grid of N-blocks; 0 stands for the zero block."""
    zero = np.zeros((N, N), dtype=complex)
    return np.block([[zero if isinstance(b, int) and b == 0 else b for b in row] for row in rows])


def tilde_blocks(F: ResidueFamily, mu: complex, lam: complex, axis: Axis) -> Dict[str, np.ndarray]:
    """All ten residues of the convolved family as closed-form block matrices.

    The x and xy tables are the explicit formulas; y is the x table conjugated by the swap
    of x_0 and x_1. The index-4 entries agree with the derived residues on homogeneous input.
    """
    axis = Axis(axis)
    if axis is Axis.Y:
        swapped = tilde_blocks(s5_transform(F, SWAP_XY), mu, lam, Axis.X)
        return {pair_key(SWAP_XY[i], SWAP_XY[j]): swapped[pair_key(i, j)] for i, j in PAIRS}
    N = F.N
    I = np.eye(N, dtype=complex)
    m, l = complex(mu), complex(lam)
    A = {pair_key(*p): F.get(*p) for p in PAIRS}
    if axis is Axis.X:
        A01, A02, A03, A12, A13, A23 = (A[k] for k in ("01", "02", "03", "12", "13", "23"))
        s = A12 + A01 + A02 + m * I
        t = A02 + A03 + A23
        u = A01 + A13 + A03
        return {
            "01": block_matrix([[m * I + A01, A02, A03 + l * I], [0, 0, 0], [0, 0, 0]], N),
            "02": block_matrix([[0, 0, 0], [A01, m * I + A02, A03 + l * I], [0, 0, 0]], N),
            "03": block_matrix([[-(m + l) * I, 0, 0], [0, -(m + l) * I, 0], [A01, A02, A03]], N),
            "04": block_matrix(
                [
                    [-A01 + l * I, -A02, -A03 - l * I],
                    [-A01, -A02 + l * I, -A03 - l * I],
                    [-A01, -A02, -A03],
                ],
                N,
            ),
            "12": block_matrix([[A12 + A02, -A02, 0], [-A01, A12 + A01, 0], [0, 0, A12]], N),
            "13": block_matrix(
                [[A13 + A03 + l * I, 0, -A03 - l * I], [0, A13, 0], [-A01, 0, A01 + A13]], N
            ),
            "14": block_matrix([[A23 - (m + l) * I, 0, 0], [A01, t, 0], [A01, 0, t]], N),
            "23": block_matrix(
                [[A23, 0, 0], [0, A03 + A23 + l * I, -A03 - l * I], [0, -A02, A02 + A23]], N
            ),
            "24": block_matrix([[u, A02, 0], [0, A13 - (m + l) * I, 0], [0, A02, u]], N),
            "34": block_matrix([[s, 0, A03 + l * I], [0, s, A03 + l * I], [0, 0, A12]], N),
        }
    A01, A02, A03, A04, A12 = (A[k] for k in ("01", "02", "03", "04", "12"))
    A13, A14, A24 = A["13"], A["14"], A["24"]
    s = A01 + A02 + A12 + m * I
    return {
        "01": block_matrix([[A01 + A02, -A02, 0], [-A12, A01 + A12, 0], [0, 0, A01]], N),
        "02": block_matrix([[0, 0, 0], [A12, A02 + m * I, A24 + l * I], [0, 0, 0]], N),
        "03": block_matrix([[A03, A02, 0], [0, A14 - (m + l) * I, 0], [0, A02, A03]], N),
        "04": block_matrix(
            [[A04 + A24, 0, 0], [0, A04 + A24 + l * I, -A24 - l * I], [0, -A02, A02 + A04]], N
        ),
        "12": block_matrix([[A12 + m * I, A02, A24 + l * I], [0, 0, 0], [0, 0, 0]], N),
        "13": block_matrix([[A04 - (m + l) * I, 0, 0], [A12, A13, 0], [A12, 0, A13]], N),
        "14": block_matrix(
            [[A14 + A24 + l * I, 0, -A24 - l * I], [0, A14 + A24, 0], [-A12, 0, A12 + A14]], N
        ),
        "23": block_matrix(
            [
                [-A12 + l * I, -A02, -A24 - l * I],
                [-A12, -A02 + l * I, -A24 - l * I],
                [-A12, -A02, -A24],
            ],
            N,
        ),
        "24": block_matrix([[-(m + l) * I, 0, 0], [0, -(m + l) * I, 0], [A12, A02, A24]], N),
        "34": block_matrix([[s, 0, A24 + l * I], [0, s, A24 + l * I], [0, 0, A01]], N),
    }


def tilde_convolve(F: ResidueFamily, mu: complex, lam: complex, axis: Axis) -> ResidueFamily:
    """Residue family of the convolved system, size 3N."""
    if not isinstance(F, ResidueFamily):
        raise InvalidFamily(f"expected a ResidueFamily, got {type(F).__name__}")
    blocks = tilde_blocks(F, mu, lam, Axis(axis))
    return ResidueFamily(3 * F.N, {p: blocks[pair_key(*p)] for p in FINITE_PAIRS})


def _threshold(s: np.ndarray) -> float:
    return KERNEL_RTOL * max(float(s[0]) if s.size else 0.0, 1.0)


def matrix_rank(M: np.ndarray) -> int:
    """Rank with singular values below 1e-9 * max(sigma_max, 1) counted as zero."""
    if M.size == 0:
        return 0
    s = linalg.svd(M, compute_uv=False)
    return int(np.sum(s > _threshold(s)))


def kernel(M: np.ndarray) -> np.ndarray:
    """Orthonormal basis of ker M as columns."""
    _, s, vh = linalg.svd(M)
    rank = int(np.sum(s > _threshold(s)))
    return vh[rank:].conj().T


def span(columns: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the column space."""
    if columns.shape[1] == 0:
        return columns
    u, s, _ = linalg.svd(columns, full_matrices=False)
    rank = int(np.sum(s > _threshold(s)))
    return u[:, :rank]


def invariant_subspace(
    F_tilde: ResidueFamily,
    F: ResidueFamily,
    mu: complex,
    lam: complex,
    axis: Axis,
    tol: float = 1e-9,
) -> np.ndarray:
    """Orthonormal basis of L, the subspace every convolved residue preserves.

    For x, L = (ker A_01, ker A_02, ker A_03 + lambda) + ker(A~_04 - mu - lambda); y and xy
    read the same formula through their point relabelling.
    """
    axis = Axis(axis)
    N = F.N
    if F_tilde.N != 3 * N:
        raise DimensionMismatch(f"convolved size {F_tilde.N} is not 3 x {N}")
    sigma = AXIS_PERMUTATION[axis]
    relabelled = [F.get(sigma[0], sigma[k]) for k in (1, 2, 3)]
    relabelled[2] = relabelled[2] + complex(lam) * np.eye(N)
    columns = []
    for slot, M in enumerate(relabelled):
        K = kernel(M)
        embedded = np.zeros((3 * N, K.shape[1]), dtype=complex)
        embedded[slot * N : (slot + 1) * N] = K
        columns.append(embedded)
    at_infinity = F_tilde.get(sigma[0], sigma[4]) - (complex(mu) + complex(lam)) * np.eye(3 * N)
    columns.append(kernel(at_infinity))
    basis = span(np.hstack(columns))
    logger.debug(f"invariant_subspace {axis.value}: dim L = {basis.shape[1]} in C^{3 * N}")
    check_invariant(F_tilde, basis, tol)
    return basis


def check_invariant(F: ResidueFamily, basis: np.ndarray, tol: float = 1e-9) -> float:
    """Largest ||A v - proj_L A v|| over residues and basis vectors; raises above tol."""
    if basis.shape[1] == 0:
        return 0.0
    projector = np.eye(F.N) - basis @ basis.conj().T
    worst = 0.0
    for p in PAIRS:
        M = F.get(*p)
        scale = max(1.0, float(np.linalg.norm(M, 2)))
        worst = max(worst, float(np.max(np.linalg.norm(projector @ M @ basis, axis=0))) / scale)
    if worst > tol:
        raise InvarianceViolation(
            f"subspace of dim {basis.shape[1]} is not invariant: defect {worst:.3e}"
        )
    return worst


def quotient_projection(basis: np.ndarray, size: int) -> np.ndarray:
    """Rows spanning the orthogonal complement of L; the canonical map C^size -> C^size/L."""
    if basis.shape[1] == 0:
        return np.eye(size, dtype=complex)
    q, _ = linalg.qr(basis, mode="full")
    complement = q[:, basis.shape[1] :]
    return complement.conj().T


def quotient(F_tilde: ResidueFamily, basis: np.ndarray, tol: float = 1e-9) -> ResidueFamily:
    """Residues induced on C^{3N}/L."""
    check_invariant(F_tilde, basis, tol)
    pi = quotient_projection(basis, F_tilde.N)
    lift = pi.conj().T
    size = pi.shape[0]
    if size == 0:
        raise InvalidFamily("the invariant subspace is the whole space")
    return ResidueFamily(size, {p: pi @ F_tilde.A[p] @ lift for p in FINITE_PAIRS})


def convolve_and_reduce(
    F: ResidueFamily, mu: complex, lam: complex, axis: Axis, tol: float = 1e-9
) -> ResidueFamily:
    """tilde_convolve followed by the quotient by L."""
    F_tilde = tilde_convolve(F, mu, lam, axis)
    return quotient(F_tilde, invariant_subspace(F_tilde, F, mu, lam, axis, tol), tol)


PARAMETER_NAMES = ("alpha", "alphap", "beta", "betap", "gamma", "gammap")


@dataclass
class PQRParameters:
    """Exponents of the (p, q, r) family; alphap[0] and betap[0] are fixed to 0."""

    alpha: List[complex]
    alphap: List[complex]
    beta: List[complex]
    betap: List[complex]
    gamma: List[complex]
    gammap: List[complex]

    def __post_init__(self):
        for name in PARAMETER_NAMES:
            setattr(self, name, [complex(v) for v in getattr(self, name)])
        if not (len(self.alpha) == len(self.alphap) >= 1):
            raise InvalidFamily("alpha and alphap need the same positive length")
        if not (len(self.beta) == len(self.betap) >= 1):
            raise InvalidFamily("beta and betap need the same positive length")
        if not (len(self.gamma) == len(self.gammap) >= 1):
            raise InvalidFamily("gamma and gammap need the same positive length")
        if abs(self.alphap[0]) > 0 or abs(self.betap[0]) > 0:
            raise InvalidFamily("alphap[0] and betap[0] must be 0")

    @property
    def pqr(self) -> Tuple[int, int, int]:
        return len(self.alpha), len(self.beta), len(self.gamma)

    @classmethod
    def draw(
        cls, p: int, q: int, r: int, rng: np.random.Generator, low: float = 0.3, high: float = 1.3
    ) -> "PQRParameters":
        """Generic parameters with real and imaginary parts uniform in [low, high]."""

        def vec(k: int) -> List[complex]:
            return list(rng.uniform(low, high, k) + 1j * rng.uniform(low, high, k))

        alphap, betap = vec(p), vec(q)
        alphap[0] = betap[0] = 0j
        return cls(vec(p), alphap, vec(q), betap, vec(r), vec(r))

    def to_json(self) -> Dict[str, Any]:
        return {name: [[v.real, v.imag] for v in getattr(self, name)] for name in PARAMETER_NAMES}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "PQRParameters":
        def vec(values: Iterable[Any]) -> List[complex]:
            return [complex(*v) if isinstance(v, (list, tuple)) else complex(v) for v in values]

        return cls(**{name: vec(data[name]) for name in PARAMETER_NAMES})


def pqr_rank(p: int, q: int, r: int) -> int:
    return p * q + q * r + r * p


def pqr_seed(params: PQRParameters) -> ResidueFamily:
    """Rank-one family of (1-x)^{-alpha_1} (1-y)^{-beta_1}, homogeneous."""
    a1, b1 = params.alpha[0], params.beta[0]
    return ResidueFamily(1, {(0, 2): [[-a1]], (1, 2): [[-b1]], (2, 3): [[a1 + b1]]})


def pipeline_pqr(
    p: int,
    q: int,
    r: int,
    params: PQRParameters,
    tol: float = 1e-9,
) -> ResidueFamily:
    """Convolve the seed along xy for every gamma, then y for beta_2.., then x for alpha_2..."""
    if min(p, q, r) < 1:
        raise InvalidFamily(f"p, q, r must be positive, got {(p, q, r)}")
    if params.pqr != (p, q, r):
        raise InvalidFamily(f"parameter lengths {params.pqr} do not match {(p, q, r)}")
    stages = [
        (Axis.XY, g, gp, (1, 1, k + 1))
        for k, (g, gp) in enumerate(zip(params.gamma, params.gammap))
    ]
    stages += [
        (Axis.Y, b, bp, (1, j + 1, r))
        for j, (b, bp) in enumerate(zip(params.beta, params.betap))
        if j >= 1
    ]
    stages += [
        (Axis.X, a, ap, (i + 1, q, r))
        for i, (a, ap) in enumerate(zip(params.alpha, params.alphap))
        if i >= 1
    ]
    F = pqr_seed(params)
    for axis, lam, lamp, shape in stages:
        F = convolve_and_reduce(F, -lamp - lam, lam, axis, tol)
        expected = pqr_rank(*shape)
        logger.debug(f"pipeline {(p, q, r)}: {axis.value} stage -> rank {F.N} (shape {shape})")
        if F.N != expected:
            raise GenericityError(
                f"stage {axis.value} towards {shape} gave rank {F.N}, expected {expected}"
            )
    logger.info(f"pipeline {(p, q, r)}: rank {F.N}")
    return F


@dataclass
class GeneralizedRiemannScheme:
    """Eigenvalues with multiplicities of every residue matrix, keyed by pair ("01".."34")."""

    N: int
    pairs: Dict[str, List[Tuple[complex, int]]] = field(default_factory=dict)

    def __post_init__(self):
        for key, entries in self.pairs.items():
            total = sum(m for _, m in entries)
            if total != self.N:
                raise InvalidFamily(f"multiplicities at {key} sum to {total}, not {self.N}")

    def distance(self, other: "GeneralizedRiemannScheme") -> float:
        """Largest eigenvalue mismatch under a multiplicity-preserving matching; inf if none."""
        if other.N != self.N or set(other.pairs) != set(self.pairs):
            return float("inf")
        worst = 0.0
        for key, entries in self.pairs.items():
            remaining = list(other.pairs[key])
            for value, mult in sorted(entries, key=lambda e: -e[1]):
                candidates = [k for k, (_, m) in enumerate(remaining) if m == mult]
                if not candidates:
                    return float("inf")
                best = min(candidates, key=lambda k: abs(remaining[k][0] - value))
                worst = max(worst, abs(remaining[best][0] - value))
                remaining.pop(best)
        return worst

    def matches(self, other: "GeneralizedRiemannScheme", tol: float = 1e-7) -> bool:
        return self.distance(other) <= tol

    def to_json(self) -> Dict[str, Any]:
        return {
            "N": self.N,
            "pairs": {
                key: [[[v.real, v.imag], m] for v, m in entries]
                for key, entries in self.pairs.items()
            },
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "GeneralizedRiemannScheme":
        pairs = {
            key: [(complex(v[0], v[1]), int(m)) for v, m in entries]
            for key, entries in data["pairs"].items()
        }
        return cls(int(data["N"]), pairs)


def _order(entries: List[Tuple[complex, int]]) -> List[Tuple[complex, int]]:
    return sorted(entries, key=lambda e: (-e[1], round(e[0].real, 9), round(e[0].imag, 9)))


def cluster_eigenvalues(values: Sequence[complex], tol: float = 1e-7) -> List[Tuple[complex, int]]:
    """Group values closer than tol (transitively); the representative is the cluster mean."""
    n = len(values)
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in combinations(range(n), 2):
        if abs(values[a] - values[b]) < tol:
            parent[find(a)] = find(b)
    groups: Dict[int, List[complex]] = {}
    for a in range(n):
        groups.setdefault(find(a), []).append(complex(values[a]))
    entries = [(complex(np.mean(g)), len(g)) for g in groups.values()]
    for (u, _), (v, _) in combinations(entries, 2):
        if abs(u - v) < 10 * tol:
            raise ClusterError(f"eigenvalues {u:.6g} and {v:.6g} are within {10 * tol:g}")
    return _order(entries)


def riemann_scheme(F: ResidueFamily, tol: float = 1e-7) -> GeneralizedRiemannScheme:
    """Eigenvalue multiplicities of all ten residues."""
    pairs = {}
    for p in PAIRS:
        pairs[pair_key(*p)] = cluster_eigenvalues(linalg.eigvals(F.get(*p)), tol)
    return GeneralizedRiemannScheme(F.N, pairs)


def _collect(entries: Iterable[Tuple[complex, int]]) -> List[Tuple[complex, int]]:
    merged: List[Tuple[complex, int]] = []
    for value, mult in entries:
        if mult <= 0:
            continue
        for k, (v, m) in enumerate(merged):
            if abs(v - value) < 1e-12:
                merged[k] = (v, m + mult)
                break
        else:
            merged.append((complex(value), mult))
    return _order(merged)


def predicted_scheme(p: int, q: int, r: int, params: PQRParameters) -> GeneralizedRiemannScheme:
    """Closed-form scheme of the (p, q, r) pipeline output."""
    a, ap, b, bp, g, gp = (
        params.alpha,
        params.alphap,
        params.beta,
        params.betap,
        params.gamma,
        params.gammap,
    )
    A2 = sum(a) + sum(ap)
    B2 = sum(b) + sum(bp)
    G2 = sum(g) + sum(gp)
    R = pqr_rank(p, q, r)

    def cross(xs: Sequence[complex], ys: Sequence[complex]) -> List[Tuple[complex, int]]:
        return [(x + y, 1) for x in xs for y in ys]

    def each(xs: Sequence[complex], mult: int) -> List[Tuple[complex, int]]:
        return [(x, mult) for x in xs]

    table = {
        "01": [(0, p * q + (p + q - 1) * r), (-A2 - B2, r)],
        "02": [(0, p * r + (p + r - 1) * q), (-A2 - G2, q)],
        "03": each(ap, q + r) + cross(b, gp),
        "04": each(a, q + r) + cross(bp, g),
        "12": [(0, q * r + (q + r - 1) * p), (-B2 - G2, p)],
        "13": each(bp, p + r) + cross(a, gp),
        "23": each(g, p + q) + cross(a, b),
        "14": each(b, p + r) + cross(ap, g),
        "24": each(gp, p + q) + cross(ap, bp),
        "34": [
            (0, R - (p + q + r) + 1),
            (-A2 - B2 - G2, 2),
            (-A2 - B2, r - 1),
            (-B2 - G2, p - 1),
            (-A2 - G2, q - 1),
        ],
    }
    return GeneralizedRiemannScheme(R, {key: _collect(entries) for key, entries in table.items()})


def commutator_map(A: np.ndarray) -> np.ndarray:
    """Matrix of X -> AX - XA on column-stacked X."""
    N = A.shape[0]
    I = np.eye(N)
    return np.kron(I, A) - np.kron(A.T, I)


def centralizer_dimension(A: np.ndarray) -> int:
    """dim Z(A) = N^2 - rank(X -> AX - XA)."""
    A = np.asarray(A, dtype=complex)
    return A.shape[0] ** 2 - matrix_rank(commutator_map(A))


def rigidity_index_of(matrices: Sequence[np.ndarray]) -> int:
    """Sum of centralizer dimensions minus 2N^2 over the singular points of an ODE."""
    matrices = [np.asarray(m, dtype=complex) for m in matrices]
    N = matrices[0].shape[0]
    return sum(centralizer_dimension(m) for m in matrices) - 2 * N * N


RIGIDITY_PAIRS = {
    "x": ((0, 1), (0, 2), (0, 3), (0, 4)),
    "y": ((0, 1), (1, 2), (1, 3), (1, 4)),
}


def rigidity_index(F: ResidueFamily, variable: str = "x") -> int:
    """Index of rigidity of the ordinary equation in x (x_0) or y (x_1)."""
    if variable not in RIGIDITY_PAIRS:
        raise InvalidFamily(f"variable must be 'x' or 'y', got {variable!r}")
    return rigidity_index_of([F.get(*p) for p in RIGIDITY_PAIRS[variable]])


def rigidity_formula(p: int, q: int, r: int) -> int:
    """Closed form 2 - 2(q-1)(r-1)(q+r+1) of the x-index of the (p, q, r) family."""
    return 2 - 2 * (q - 1) * (r - 1) * (q + r + 1)
