"""Double-precision complex arithmetic primitives shared by every module.

Vectors are 1-D ``complex128`` arrays, dense matrices are 2-D ``complex128``
arrays in row-major (C) order, and 2x2 blocks are ordinary dense matrices of
shape (2, 2).  Matrix products deliberately go through a plain O(n^3)
contraction (``np.einsum`` without BLAS dispatch): the dense path exists as a
ground-truth reference and cost baseline, not as a tuned kernel.
"""

from __future__ import annotations

import numpy as np

# Type aliases used in signatures throughout the package.
ComplexScalar = complex
ComplexVector = np.ndarray  # shape (n,), complex128
Matrix2 = np.ndarray  # shape (2, 2), complex128
DenseComplexMatrix = np.ndarray  # shape (rows, cols), complex128


def require_finite(a: np.ndarray, what: str = "array") -> np.ndarray:
    """Raise ValueError if any entry is NaN or infinite."""
    if not np.all(np.isfinite(a.view(np.float64) if np.iscomplexobj(a) else a)):
        raise ValueError(f"{what} contains non-finite entries")
    return a


def as_complex_vector(x, n: int | None = None) -> ComplexVector:
    """Coerce to a 1-D complex128 vector, optionally checking its length."""
    v = np.asarray(x, dtype=np.complex128)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"expected a 1-D vector of length >= 1, got shape {v.shape}")
    if n is not None and v.size != n:
        raise ValueError(f"expected vector of length {n}, got {v.size}")
    return v


def as_complex_matrix(m) -> DenseComplexMatrix:
    """Coerce to a 2-D complex128 matrix."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    return a


def cmul(a: ComplexScalar, b: ComplexScalar) -> ComplexScalar:
    """Complex product of two scalars."""
    return complex(a) * complex(b)


def mat2_apply(m: Matrix2, x0: ComplexScalar, x1: ComplexScalar):
    """Apply a 2x2 matrix to the pair (x0, x1); returns the output pair."""
    return (m[0, 0] * x0 + m[0, 1] * x1, m[1, 0] * x0 + m[1, 1] * x1)


def dense_matmul(a: DenseComplexMatrix, b: DenseComplexMatrix) -> DenseComplexMatrix:
    """Dense matrix product via an explicit cubic contraction (no BLAS)."""
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(
            f"dimension mismatch: ({a.shape[0]}x{a.shape[1]}) @ ({b.shape[0]}x{b.shape[1]})"
        )
    return np.einsum("ik,kj->ij", a, b, optimize=False)


def dense_apply(m: DenseComplexMatrix, x: ComplexVector) -> ComplexVector:
    """Matrix-vector product."""
    m = as_complex_matrix(m)
    x = as_complex_vector(x)
    if m.shape[1] != x.size:
        raise ValueError(f"dimension mismatch: ({m.shape[0]}x{m.shape[1]}) @ ({x.size},)")
    return np.einsum("ij,j->i", m, x, optimize=False)


def hermitian_deviation(m: DenseComplexMatrix) -> float:
    """Max absolute entry of (M^H M - I); zero iff M is unitary.

    Raises ValueError for non-square input.
    """
    m = as_complex_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"unitarity check needs a square matrix, got {m.shape}")
    gram = dense_matmul(m.conj().T, m)
    gram[np.diag_indices_from(gram)] -= 1.0
    return float(np.max(np.abs(gram)))
