"""Dense complex matrix helpers: determinants, block assembly, Kronecker products.

All functions accept plain ``numpy`` arrays.  Matrix arguments may carry
leading batch dimensions; the matrix itself always lives in the last two axes.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, DomainError

__all__ = ["as_complex_matrix", "determinant", "block2x2", "kron"]


def as_complex_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce ``m`` to a complex128 array with at least two dimensions."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim < 2:
        raise DimensionError(f"{name} must be at least 2-dimensional, got shape {a.shape}")
    return a


def determinant(m) -> complex | np.ndarray:
    """Determinant via row-pivoted LU factorization (LAPACK).

    Accepts a single square matrix or a stack of them; returns a complex
    scalar or an array of determinants.  Entries are expected finite.
    """
    a = as_complex_matrix(m)
    if a.shape[-1] != a.shape[-2]:
        raise DimensionError(f"determinant requires a square matrix, got shape {a.shape}")
    if a.ndim == 2 and not np.all(np.isfinite(a)):
        raise DomainError("determinant requires finite entries")
    d = np.linalg.det(a)
    return complex(d) if a.ndim == 2 else d


def block2x2(a, b, c, d) -> np.ndarray:
    """Assemble the block matrix ``[[a, b], [c, d]]``.

    ``a`` and ``d`` must be square; ``b`` and ``c`` must fill the remaining
    corners exactly.  Batch dimensions broadcast across blocks.
    """
    a = as_complex_matrix(a, "a")
    b = as_complex_matrix(b, "b")
    c = as_complex_matrix(c, "c")
    d = as_complex_matrix(d, "d")
    p, q = a.shape[-2:], d.shape[-2:]
    if p[0] != p[1]:
        raise DimensionError(f"block a must be square, got {p}")
    if q[0] != q[1]:
        raise DimensionError(f"block d must be square, got {q}")
    if b.shape[-2:] != (p[0], q[1]):
        raise DimensionError(f"block b must be {p[0]}x{q[1]}, got {b.shape[-2:]}")
    if c.shape[-2:] != (q[0], p[1]):
        raise DimensionError(f"block c must be {q[0]}x{p[1]}, got {c.shape[-2:]}")
    batch = np.broadcast_shapes(a.shape[:-2], b.shape[:-2], c.shape[:-2], d.shape[:-2])
    n = p[0] + q[0]
    out = np.zeros(batch + (n, n), dtype=np.complex128)
    out[..., : p[0], : p[1]] = a
    out[..., : p[0], p[1]:] = b
    out[..., p[0]:, : p[1]] = c
    out[..., p[0]:, p[1]:] = d
    return out


def kron(a, b) -> np.ndarray:
    """Kronecker product with standard row-block ordering."""
    a = as_complex_matrix(a, "a")
    b = as_complex_matrix(b, "b")
    return np.kron(a, b)
