"""Exception hierarchy for hyperflux."""

from typing import Optional, Sequence


class HyperfluxError(Exception):
    """Root of every error raised by hyperflux."""


class PoleError(HyperfluxError):
    """A Gamma argument hit a pole that nothing cancels."""

    def __init__(self, message: str, index: Optional[Sequence[int]] = None):
        self.index = tuple(int(v) for v in index) if index is not None else None
        if self.index is not None:
            message = f"{message} (at m={list(self.index)})"
        super().__init__(message)


class ResonanceError(PoleError):
    """A series coefficient law divides by a vanishing Pochhammer symbol."""


class DimensionMismatch(HyperfluxError, ValueError):
    """Operands disagree on their variable count or matrix size."""


class TruncationError(HyperfluxError):
    """A shift or substitution pushed every term outside the truncation."""


class ArityError(HyperfluxError, ValueError):
    """Series parameters do not match the signature of their kind."""


class ConvergenceError(HyperfluxError):
    """A truncated evaluation did not reach its tolerance budget."""


class DomainError(HyperfluxError, ValueError):
    """An integral representation was requested outside its half-plane."""


class ZeroOperator(HyperfluxError):
    """An operator computation produced the zero operator."""


class NotHomogeneous(HyperfluxError):
    """The residue family is not homogeneous where homogeneity is required."""


class InvalidFamily(HyperfluxError):
    """The residue family is malformed."""


class InvarianceViolation(HyperfluxError):
    """A subspace expected to be invariant is not."""


class GenericityError(HyperfluxError):
    """A quotient rank deviates from the generic prediction."""


class ClusterError(HyperfluxError):
    """Eigenvalues are too close to be assigned multiplicities reliably."""
