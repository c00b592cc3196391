"""Dense Hermitian linear algebra: spectral decompositions, matrix functions,
Schatten norms, and the log-domain density-matrix representation.

Everything here is dense and double precision; the methods built on top are
spectral-decomposition-bound, so there is nothing to gain from sparsity at
the target sizes (d <= 64).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import DomainError, InvalidInput

__all__ = [
    "HermitianOperator",
    "SpectralDecomposition",
    "DensityState",
    "spectral_decompose",
    "matrix_function",
    "trace_inner_product",
    "schatten_norm",
    "eigen_extremes",
    "group_eigenvalues",
]

DEFAULT_EIG_FLOOR = 1e-13


class HermitianOperator:
    """A d x d complex Hermitian matrix.

    The constructor symmetrizes via (A + A^H)/2 so that round-off from
    upstream arithmetic never produces a non-Hermitian operator. Instances
    are immutable after construction.
    """

    __slots__ = ("mat",)

    def __init__(self, entries):
        a = np.asarray(entries, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidInput(f"expected a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a.view(np.float64))):
            raise InvalidInput("matrix has non-finite entries")
        a = 0.5 * (a + a.conj().T)
        a.flags.writeable = False
        self.mat = a

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def identity(cls, d: int) -> "HermitianOperator":
        return cls(np.eye(d))

    @classmethod
    def diag(cls, values) -> "HermitianOperator":
        return cls(np.diag(np.asarray(values, dtype=np.complex128)))

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        return HermitianOperator(self.mat + other.mat)

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        return HermitianOperator(self.mat - other.mat)

    def __mul__(self, scalar: float) -> "HermitianOperator":
        return HermitianOperator(self.mat * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "HermitianOperator":
        return HermitianOperator(-self.mat)

    def __repr__(self):
        return f"HermitianOperator(dim={self.dim})"


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigensystem of a Hermitian operator, eigenvalues ascending.

    Column j of ``eigenvectors`` pairs with ``eigenvalues[j]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def spectral_decompose(a: HermitianOperator) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian operator, eigenvalues ascending."""
    vals, vecs = np.linalg.eigh(a.mat)
    vals.flags.writeable = False
    vecs.flags.writeable = False
    return SpectralDecomposition(vals, vecs)


def matrix_function(a: HermitianOperator, g: Callable[[np.ndarray], np.ndarray]) -> HermitianOperator:
    """Apply a scalar function to a Hermitian operator through its spectrum.

    ``g`` must be defined (finite) on every eigenvalue of ``a``; otherwise a
    DomainError is raised (e.g. log of a non-positive eigenvalue).
    """
    dec = spectral_decompose(a)
    with np.errstate(all="ignore"):
        gvals = np.asarray(g(dec.eigenvalues), dtype=np.float64)
    if gvals.shape != dec.eigenvalues.shape or not np.all(np.isfinite(gvals)):
        raise DomainError("scalar function undefined on part of the spectrum")
    v = dec.eigenvectors
    return HermitianOperator((v * gvals) @ v.conj().T)


def trace_inner_product(a: HermitianOperator, b: HermitianOperator) -> float:
    """Hilbert-Schmidt inner product tr(A^H B); imaginary residue discarded."""
    if a.dim != b.dim:
        raise InvalidInput(f"dimension mismatch: {a.dim} vs {b.dim}")
    return float(np.vdot(a.mat, b.mat).real)


def schatten_norm(a: HermitianOperator, p) -> float:
    """Schatten p-norm for p in {1, 2, inf} of a Hermitian operator."""
    vals = np.linalg.eigvalsh(a.mat)
    if p == 1:
        return float(np.sum(np.abs(vals)))
    if p == 2:
        return float(np.sqrt(np.sum(vals * vals)))
    if p in (np.inf, float("inf"), "inf"):
        return float(np.max(np.abs(vals))) if vals.size else 0.0
    raise InvalidInput(f"unsupported Schatten order {p!r}")


def eigen_extremes(a: HermitianOperator) -> tuple[float, float]:
    """Smallest and largest eigenvalues (lambda_min, lambda_max)."""
    vals = np.linalg.eigvalsh(a.mat)
    return float(vals[0]), float(vals[-1])


def group_eigenvalues(values: np.ndarray, scale: float | None = None) -> list[slice]:
    """Group ascending eigenvalues that agree within 1e-10 * max(1, scale).

    Returns slices into the ascending eigenvalue array; each slice indexes
    one (possibly degenerate) eigenprojector. ``scale`` defaults to the
    largest modulus in ``values``.
    """
    values = np.asarray(values)
    if scale is None:
        scale = float(np.max(np.abs(values))) if values.size else 0.0
    tol = 1e-10 * max(1.0, scale)
    groups: list[slice] = []
    start = 0
    for i in range(1, len(values)):
        if values[i] - values[i - 1] > tol:
            groups.append(slice(start, i))
            start = i
    groups.append(slice(start, len(values)))
    return groups


class DensityState:
    """Strictly positive-definite, unit-trace Hermitian matrix in log domain.

    The state is carried as a Hermitian exponent H with rho = exp(H), kept
    normalized so that tr exp(H) = 1 (logsumexp of H's eigenvalues is zero).
    The realized eigensystem of rho is stored alongside. If a materialized
    eigenvalue falls below the floor the state is flagged, not rejected:
    the solver observes near-singularity rather than fabricating interiority.
    """

    __slots__ = ("exponent", "eigenvalues", "eigenvectors", "floor_clamped")

    def __init__(self, exponent, eigenvalues, eigenvectors, floor_clamped):
        self.exponent = exponent
        self.eigenvalues = eigenvalues
        self.eigenvectors = eigenvectors
        self.floor_clamped = floor_clamped

    @classmethod
    def from_exponent(cls, h, eig_floor: float = DEFAULT_EIG_FLOOR) -> "DensityState":
        """Build exp(H)/tr exp(H) from a Hermitian exponent H."""
        if not isinstance(h, HermitianOperator):
            h = HermitianOperator(h)
        dec = spectral_decompose(h)
        shift = float(logsumexp(dec.eigenvalues))
        w = dec.eigenvalues - shift
        v = dec.eigenvectors
        exponent = HermitianOperator((v * w) @ v.conj().T)
        eigenvalues = np.exp(w)
        eigenvalues.flags.writeable = False
        return cls(exponent, eigenvalues, v, bool(eigenvalues[0] < eig_floor))

    @classmethod
    def from_matrix(cls, rho, eig_floor: float = DEFAULT_EIG_FLOOR) -> "DensityState":
        """Build from a positive-definite unit-trace matrix."""
        if not isinstance(rho, HermitianOperator):
            rho = HermitianOperator(rho)
        vals, vecs = np.linalg.eigh(rho.mat)
        tr = float(np.sum(vals))
        if abs(tr - 1.0) > 1e-8:
            raise InvalidInput(f"trace {tr} is not 1")
        if vals[0] <= 0.0:
            raise DomainError("matrix is singular or indefinite; cannot take log")
        return cls.from_exponent(HermitianOperator((vecs * np.log(vals)) @ vecs.conj().T), eig_floor)

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityState":
        return cls.from_exponent(HermitianOperator(np.zeros((d, d))))

    @property
    def dim(self) -> int:
        return self.exponent.dim

    @property
    def min_eig(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def matrix(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def operator(self) -> HermitianOperator:
        return HermitianOperator(self.matrix)

    def inverse(self) -> HermitianOperator:
        v = self.eigenvectors
        return HermitianOperator((v * (1.0 / self.eigenvalues)) @ v.conj().T)

    def __repr__(self):
        return f"DensityState(dim={self.dim}, min_eig={self.min_eig:.3e})"
