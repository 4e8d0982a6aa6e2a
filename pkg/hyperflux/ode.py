"""Fuchsian restrictions du/dx = (A_y/(x-y) + A_1/(x-1) + A_0/x) u and their convolutions.

B_1 and B_0 are the residues of the companion equation in y at y=1 and y=0; they enter the
convolutions along y and along the blow-up coordinate.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Mapping

import numpy as np

from .errors import DimensionMismatch, InvalidFamily, InvarianceViolation
from .kz import (
    Axis,
    ResidueFamily,
    block_matrix,
    decode_matrix,
    encode_matrix,
    commutator_map,
    kernel,
    matrix_rank,
    quotient_projection,
    rigidity_index_of,
    span,
)

logger = logging.getLogger(__name__)

MATRIX_NAMES = ("A_y", "A_1", "A_0", "B_0", "B_1")


@dataclass(frozen=True, eq=False)
class OdeTriple:
    A_y: np.ndarray
    A_1: np.ndarray
    A_0: np.ndarray
    B_0: np.ndarray
    B_1: np.ndarray

    def __post_init__(self):
        N = np.atleast_2d(np.asarray(self.A_y)).shape[0]
        for name in MATRIX_NAMES:
            m = np.atleast_2d(np.asarray(getattr(self, name), dtype=complex)).copy()
            if m.shape != (N, N):
                raise DimensionMismatch(f"{name}: expected {N}x{N}, got shape {m.shape}")
            m.setflags(write=False)
            object.__setattr__(self, name, m)

    @property
    def N(self) -> int:
        return self.A_y.shape[0]

    @classmethod
    def from_family(cls, F: ResidueFamily) -> "OdeTriple":
        """Restriction of a KZ family: x is x_0, y is x_1, 1 is x_2 and 0 is x_3."""
        return cls(F.get(0, 1), F.get(0, 2), F.get(0, 3), F.get(1, 3), F.get(1, 2))

    def to_family(self) -> ResidueFamily:
        """Embed as a KZ family, choosing A_23 so that the residues sum to zero."""
        a23 = -(self.A_y + self.A_1 + self.A_0 + self.B_1 + self.B_0)
        return ResidueFamily(
            self.N,
            {
                (0, 1): self.A_y,
                (0, 2): self.A_1,
                (0, 3): self.A_0,
                (1, 2): self.B_1,
                (1, 3): self.B_0,
                (2, 3): a23,
            },
        )

    @property
    def A_14(self) -> np.ndarray:
        return -self.A_y - self.B_0 - self.B_1

    @property
    def A_24(self) -> np.ndarray:
        return self.A_y + self.A_0 + self.B_0

    def residues(self) -> Dict[str, np.ndarray]:
        return {"y": self.A_y, "1": self.A_1, "0": self.A_0}

    def to_json(self) -> Dict[str, Any]:
        return {name: encode_matrix(getattr(self, name)) for name in MATRIX_NAMES}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "OdeTriple":
        try:
            return cls(**{name: decode_matrix(data[name]) for name in MATRIX_NAMES})
        except KeyError as e:
            raise InvalidFamily(f"ODE triple JSON lacks {e}") from e


@dataclass
class OdeConvolution:
    """Convolved residues at x = y, 1, 0 on C^{3N} and the invariant subspace L."""

    source: OdeTriple
    mu: complex
    axis: Axis
    residues: Dict[str, np.ndarray]
    basis: np.ndarray

    @property
    def size(self) -> int:
        return 3 * self.source.N

    def defect(self) -> float:
        """Largest ||A v - proj_L A v|| over the three residues, relative to their norms."""
        if self.basis.shape[1] == 0:
            return 0.0
        projector = np.eye(self.size) - self.basis @ self.basis.conj().T
        worst = 0.0
        for M in self.residues.values():
            scale = max(1.0, float(np.linalg.norm(M, 2)))
            residual = np.linalg.norm(projector @ M @ self.basis, axis=0)
            worst = max(worst, float(np.max(residual)) / scale)
        return worst

    def require_invariant(self, tol: float = 1e-9) -> float:
        worst = self.defect()
        if worst > tol:
            raise InvarianceViolation(
                f"L of dim {self.basis.shape[1]} is not invariant under the {self.axis.value} "
                f"residues: defect {worst:.3e}"
            )
        return worst

    def quotient(self, tol: float = 1e-9) -> Dict[str, np.ndarray]:
        """Residues induced on C^{3N}/L."""
        self.require_invariant(tol)
        pi = quotient_projection(self.basis, self.size)
        lift = pi.conj().T
        return {point: pi @ M @ lift for point, M in self.residues.items()}


def _embed_kernels(blocks, N: int):
    columns = []
    for slot, M in enumerate(blocks):
        K = kernel(M)
        embedded = np.zeros((3 * N, K.shape[1]), dtype=complex)
        embedded[slot * N : (slot + 1) * N] = K
        columns.append(embedded)
    return columns


def ode_convolve(T: OdeTriple, mu: complex, axis: Axis) -> OdeConvolution:
    """Middle-convolution residues of the restriction along x, y or the blow-up coordinate."""
    axis = Axis(axis)
    N = T.N
    I = np.eye(N, dtype=complex)
    m = complex(mu)
    Ay, A1, A0, B0, B1 = T.A_y, T.A_1, T.A_0, T.B_0, T.B_1
    if axis is Axis.X:
        residues = {
            "y": block_matrix([[Ay + m * I, A1, A0], [0, 0, 0], [0, 0, 0]], N),
            "1": block_matrix([[0, 0, 0], [Ay, A1 + m * I, A0], [0, 0, 0]], N),
            "0": block_matrix([[-m * I, 0, 0], [0, -m * I, 0], [Ay, A1, A0]], N),
        }
        first = (Ay, A1, A0)
    elif axis is Axis.Y:
        residues = {
            "y": block_matrix([[Ay + m * I, B1, B0], [0, 0, 0], [0, 0, 0]], N),
            "1": block_matrix([[A1 + B1, -B1, 0], [-Ay, A1 + Ay, 0], [0, 0, A1]], N),
            "0": block_matrix([[A0 + B0, 0, -B0], [0, A0, 0], [-Ay, 0, A0 + Ay]], N),
        }
        first = (Ay, B1, B0)
    else:
        A14, A24 = T.A_14, T.A_24
        residues = {
            "y": block_matrix([[Ay + A1, -A1, 0], [-B1, Ay + B1, 0], [0, 0, Ay]], N),
            "1": block_matrix([[0, 0, 0], [B1, A1 + m * I, A24], [0, 0, 0]], N),
            "0": block_matrix([[A0, A1, 0], [0, A14 - m * I, 0], [0, A1, A0]], N),
        }
        first = (B1, A1, A24)
    a, b, c = first
    column = block_matrix([[a + m * I, b, c], [a, b + m * I, c], [a, b, c + m * I]], N)
    basis = span(np.hstack(_embed_kernels(first, N) + [kernel(column)]))
    logger.debug(f"ode_convolve {axis.value}: dim L = {basis.shape[1]} in C^{3 * N}")
    return OdeConvolution(T, m, axis, residues, basis)


def centralizer_intersection_dimension(*matrices: np.ndarray) -> int:
    """dim of the common centralizer Z(M_1) n ... n Z(M_k)."""
    stacked = np.vstack([commutator_map(np.asarray(M, dtype=complex)) for M in matrices])
    N = np.asarray(matrices[0]).shape[0]
    return N * N - matrix_rank(stacked)


def irreducibility_hint(T: OdeTriple) -> int:
    """dim(Z(A_y) n Z(A_1) n Z(A_0)); an irreducible equation gives 1."""
    return centralizer_intersection_dimension(T.A_y, T.A_1, T.A_0)


def ode_rigidity_index(T: OdeTriple) -> int:
    """dim Z(A_y) + dim Z(A_1) + dim Z(A_0) + dim Z(A_y + A_1 + A_0) - 2N^2."""
    return rigidity_index_of([T.A_y, T.A_1, T.A_0, T.A_y + T.A_1 + T.A_0])