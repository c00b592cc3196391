"""Entropy functionals and divergences on density matrices and probability
vectors.

The quantum relative entropy is evaluated in the two eigenbases of its
arguments (tr(rho log sigma) as sum_ij |<u_i, v_j>|^2 lam_i^rho log lam_j^sigma)
instead of chaining matrix logs, which keeps the computation stable when an
argument is close to singular.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, InvalidInput
from .linalg import DensityState, schatten_norm, HermitianOperator

__all__ = [
    "ProbabilityVector",
    "von_neumann_entropy_neg",
    "quantum_relative_entropy",
    "classical_relative_entropy",
    "pinsker_gap",
]


class ProbabilityVector:
    """Nonnegative vector with unit sum; the simplex analogue of a density
    matrix. EG iterates are additionally strictly positive."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        x = np.asarray(entries, dtype=np.float64)
        if x.ndim != 1 or x.size == 0:
            raise InvalidInput(f"expected a nonempty vector, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise InvalidInput("vector has non-finite entries")
        if np.any(x < 0.0):
            raise InvalidInput("vector has negative entries")
        if abs(float(np.sum(x)) - 1.0) > 1e-12:
            raise InvalidInput(f"entries sum to {float(np.sum(x))}, not 1")
        x.flags.writeable = False
        self.entries = x

    @classmethod
    def uniform(cls, d: int) -> "ProbabilityVector":
        return cls(np.full(d, 1.0 / d))

    @property
    def dim(self) -> int:
        return self.entries.size

    def __repr__(self):
        return f"ProbabilityVector({np.array2string(self.entries, precision=4)})"


def von_neumann_entropy_neg(rho: DensityState) -> float:
    """Negative von Neumann entropy tr(rho log rho) - tr(rho)."""
    lam = rho.eigenvalues
    if lam[0] <= 0.0:
        raise DomainError("entropy undefined for a singular state")
    return float(np.sum(lam * np.log(lam)) - np.sum(lam))


def quantum_relative_entropy(rho: DensityState, sigma: DensityState) -> float:
    """tr(rho log rho) - tr(rho log sigma) - tr(rho - sigma).

    For unit-trace arguments the last term vanishes, but it is computed
    anyway so the function is correct on general positive operators.
    """
    if rho.dim != sigma.dim:
        raise InvalidInput(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    lam_r, lam_s = rho.eigenvalues, sigma.eigenvalues
    if lam_s[0] <= 0.0:
        raise DomainError("relative entropy undefined against a singular state")
    if lam_r[0] <= 0.0:
        raise DomainError("relative entropy undefined for a singular state")
    overlap = np.abs(rho.eigenvectors.conj().T @ sigma.eigenvectors) ** 2
    own = float(np.sum(lam_r * np.log(lam_r)))
    cross = float(lam_r @ overlap @ np.log(lam_s))
    traces = float(np.sum(lam_r) - np.sum(lam_s))
    return own - cross - traces


def classical_relative_entropy(p: ProbabilityVector, q: ProbabilityVector) -> float:
    """KL divergence sum p_i log(p_i/q_i) - sum(p_i - q_i), with 0 log 0 = 0."""
    if p.dim != q.dim:
        raise InvalidInput(f"dimension mismatch: {p.dim} vs {q.dim}")
    pe, qe = p.entries, q.entries
    if np.any((qe == 0.0) & (pe > 0.0)):
        raise DomainError("KL divergence undefined: q vanishes where p does not")
    mask = pe > 0.0
    kl = float(np.sum(pe[mask] * (np.log(pe[mask]) - np.log(qe[mask]))))
    return kl - float(np.sum(pe) - np.sum(qe))


def pinsker_gap(rho: DensityState, sigma: DensityState) -> float:
    """D(rho, sigma) - 0.5 * ||rho - sigma||_1^2; nonnegative by Pinsker."""
    d = quantum_relative_entropy(rho, sigma)
    tn = schatten_norm(HermitianOperator(rho.matrix - sigma.matrix), 1)
    return d - 0.5 * tn * tn
