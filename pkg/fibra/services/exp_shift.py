"""Numeric one-parameter shifts ``a(t) = exp(tA)`` over a sampled real line.

The only non-finite example the library carries. ``matrix_exp`` scales the
argument until its norm is at most 1/2, sums a Horner-evaluated Taylor
polynomial and squares back up.
"""

import logging
import math
from typing import List, Sequence

import numpy as np

from fibra.services.errors import NonFinite, NonSquare, SizeMismatch

logger = logging.getLogger(__name__)

DEFAULT_DEGREE = 18
SCALE_TARGET = 0.5


def _as_square(a: Sequence[Sequence[float]]) -> np.ndarray:
    matrix = np.asarray(a, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise NonSquare(
            f"Expected a square matrix, got shape {matrix.shape}", {"shape": list(matrix.shape)}
        )
    if not np.isfinite(matrix).all():
        raise NonFinite("Matrix has non-finite entries")
    return matrix


def matrix_exp(
    a: Sequence[Sequence[float]], t: float = 1.0, degree: int = DEFAULT_DEGREE
) -> np.ndarray:
    """Compute exp(tA) by scaling and squaring.

    Args:
        a: Square matrix A
        t: Real parameter
        degree: Degree of the truncated Taylor series

    Returns:
        The matrix exponential as a float array
    """
    if not math.isfinite(t):
        raise NonFinite("Parameter t must be finite", {"t": t})
    m = _as_square(a) * t
    n = m.shape[0]

    norm = float(np.abs(m).sum(axis=1).max()) if n else 0.0
    squarings = max(0, math.ceil(math.log2(norm / SCALE_TARGET))) if norm > SCALE_TARGET else 0
    scaled = m / 2.0**squarings

    coefficients = np.ones(degree + 1)
    for k in range(degree):
        coefficients[k + 1] = coefficients[k] / (k + 1)

    result = np.identity(n) * coefficients[degree]
    for k in range(degree - 1, -1, -1):
        result = scaled @ result + np.identity(n) * coefficients[k]
    for _ in range(squarings):
        result = result @ result
    return result


def one_parameter_defect(a: Sequence[Sequence[float]], s: float, t: float) -> float:
    """Max-norm of exp(sA) exp(tA) - exp((s+t)A)."""
    lhs = matrix_exp(a, s) @ matrix_exp(a, t)
    return float(np.abs(lhs - matrix_exp(a, s + t)).max())


def sample_grid(samples: int, start: float = -1.0, stop: float = 1.0) -> np.ndarray:
    """Evenly spaced base points standing in for the real line."""
    if samples < 1:
        raise SizeMismatch("Need at least one sample", {"samples": samples})
    return np.linspace(start, stop, samples)


def exp_shift_section(a: Sequence[Sequence[float]], grid: Sequence[float]) -> List[np.ndarray]:
    """The group section t -> exp(tA) on every grid point."""
    return [matrix_exp(a, float(t)) for t in grid]


def shift_vector_section(
    a: Sequence[Sequence[float]], grid: Sequence[float], vector: Sequence[float]
) -> np.ndarray:
    """Shift the constant vector section by a(t); row k is exp(t_k A) v."""
    matrix = _as_square(a)
    v = np.asarray(vector, dtype=float)
    if v.shape != (matrix.shape[0],):
        raise SizeMismatch(
            f"Vector of length {v.size} does not fit a {matrix.shape[0]}x{matrix.shape[0]} matrix",
            {"vector": v.size, "matrix": matrix.shape[0]},
        )
    shifted = np.array([e @ v for e in exp_shift_section(matrix, grid)])
    logger.debug(f"Shifted vector section over {len(shifted)} samples")
    return shifted
