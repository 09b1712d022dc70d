"""Small dense complex-matrix kernel used everywhere else in the package.

All matrices here are square numpy arrays of dimension 2 or 4 with complex
entries. Functions validate shape and finiteness at the boundary and raise
typed errors from holo.errors instead of returning garbage.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NotAntiHermitian

__all__ = [
    "as_matrix",
    "dagger",
    "frobenius",
    "expm_antihermitian",
    "unitary_distance",
    "unitarity_defect",
    "subspace_block",
    "polar_unitary",
]

_ALLOWED_DIMS = (2, 4)


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Validate and return m as a square complex array of dimension 2 or 4."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    if a.shape[0] not in _ALLOWED_DIMS:
        raise DimensionMismatch(
            f"{name} must have dimension 2 or 4, got {a.shape[0]}"
        )
    if not (np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag))):
        raise DimensionMismatch(f"{name} has non-finite entries")
    return a


def dagger(m) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(m).conj().T


def frobenius(m) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(np.asarray(m)))


def expm_antihermitian(m, tol: float = 1e-12) -> np.ndarray:
    """Exponential of an anti-hermitian matrix via the eigendecomposition of
    the hermitian matrix -i*m, so the result is unitary to rounding.

    Raises NotAntiHermitian when any element of m + m^dagger exceeds tol in
    magnitude.
    """
    a = as_matrix(m)
    defect = float(np.max(np.abs(a + a.conj().T)))
    if not defect <= tol:
        raise NotAntiHermitian(
            f"max |m + m^dagger| element is {defect:.3e}, tolerance {tol:.3e}"
        )
    h = -1j * a
    h = (h + h.conj().T) / 2.0
    eigvals, p = np.linalg.eigh(h)
    d = np.exp(1j * eigvals)
    return (p * d) @ p.conj().T


def unitary_distance(u, v) -> float:
    """Frobenius norm of u - v for same-dimension square matrices."""
    a = as_matrix(u, "u")
    b = as_matrix(v, "v")
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def unitarity_defect(u) -> float:
    """Frobenius norm of u^dagger u - I."""
    a = as_matrix(u)
    eye = np.eye(a.shape[0])
    return float(np.linalg.norm(a.conj().T @ a - eye))


def subspace_block(m, subspace: str) -> np.ndarray:
    """Extract the 2x2 diagonal block of a 4x4 matrix.

    subspace "plus" selects rows/columns 1,2 (the upper energy pair),
    "minus" selects rows/columns 3,4.
    """
    a = as_matrix(m)
    if a.shape[0] != 4:
        raise DimensionMismatch(
            f"subspace_block expects a 4x4 matrix, got {a.shape[0]}x{a.shape[0]}"
        )
    if subspace == "plus":
        return a[:2, :2].copy()
    if subspace == "minus":
        return a[2:, 2:].copy()
    raise DimensionMismatch(f"subspace must be 'plus' or 'minus', got {subspace!r}")


def polar_unitary(m) -> np.ndarray:
    """Closest unitary in Frobenius norm, via SVD (the polar factor)."""
    a = as_matrix(m)
    u, _, vh = np.linalg.svd(a)
    return u @ vh
