"""Dense float64 helpers shared by the dynamics, metrics and comparison code.

Thin wrappers over numpy that pin the dtype and shape conventions and raise
structured errors instead of letting broadcasting paper over mistakes.
Matrices are 2-D float64 arrays, row-major, one sample per row where a batch
is involved. Operations allocate fresh outputs; nothing mutates its inputs.
"""

from __future__ import annotations

import numpy as np


class ShapeMismatchError(ValueError):
    """Two operands whose shapes cannot be combined by the requested op."""

    def __init__(self, op: str, left_shape, right_shape):
        self.op = op
        self.left_shape = tuple(left_shape)
        self.right_shape = tuple(right_shape)
        super().__init__(
            f"{op}: incompatible shapes {self.left_shape} x {self.right_shape}"
        )


class UndefinedCosineError(ValueError):
    """Cosine requested against a zero-norm operand."""


def as_matrix(values) -> np.ndarray:
    """Coerce to a fresh 2-D float64 array and reject non-finite entries."""
    m = np.array(values, dtype=np.float64, order="C")
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2:
        raise ValueError(f"matrix must be 2-D, got ndim={m.ndim}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise ShapeMismatchError("matmul", a.shape, b.shape)
    return a @ b


def outer_mean(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Batch mean of per-sample outer products.

    a is (n, p), b is (n, q); the result is (p, q), the average over the n
    rows of a[i] (outer) b[i]. Equals matmul(a.T, b) scaled by 1/n.
    """
    if a.shape[0] != b.shape[0]:
        raise ShapeMismatchError("outer_mean", a.shape, b.shape)
    if a.shape[0] == 0:
        raise ValueError("outer_mean: empty batch")
    return (a.T @ b) / a.shape[0]


def frobenius_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m))


def cosine_flat(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of the angle between two same-shape arrays flattened to vectors.

    Raises UndefinedCosineError when either operand has zero norm; the result
    is clamped to [-1, 1] so downstream acos never sees a rounding excursion.
    """
    if a.shape != b.shape:
        raise ShapeMismatchError("cosine_flat", a.shape, b.shape)
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise UndefinedCosineError("cosine undefined for zero-norm operand")
    c = float(np.dot(a.ravel(), b.ravel()) / (na * nb))
    return min(1.0, max(-1.0, c))


def add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape != b.shape:
        raise ShapeMismatchError("add", a.shape, b.shape)
    return a + b


def sub(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape != b.shape:
        raise ShapeMismatchError("sub", a.shape, b.shape)
    return a - b


def scale(m: np.ndarray, c: float) -> np.ndarray:
    return m * float(c)


def elementwise(m: np.ndarray, f) -> np.ndarray:
    """Apply a scalar map to every entry. f sees and returns Python floats."""
    out = np.empty_like(m, dtype=np.float64)
    flat_in = m.ravel()
    flat_out = out.ravel()
    for i in range(flat_in.size):
        flat_out[i] = f(float(flat_in[i]))
    return out
