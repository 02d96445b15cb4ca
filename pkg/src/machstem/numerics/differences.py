"""
Finite-difference and extrapolation helpers used as independent oracles.
"""

from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial


def central_difference(fn: Callable[[float], float], x: float, h: float) -> float:
    return (fn(x + h) - fn(x - h)) / (2.0 * h)


def richardson_derivative(fn: Callable[[float], float], x: float, h: float) -> float:
    """Centered difference with one Richardson step: O(h^4)."""
    coarse = central_difference(fn, x, h)
    fine = central_difference(fn, x, 0.5 * h)
    return (4.0 * fine - coarse) / 3.0


def jacobian_fd(fn: Callable[[np.ndarray], np.ndarray], x: np.ndarray, steps: np.ndarray) -> np.ndarray:
    """Column-by-column centered-difference Jacobian."""
    x = np.asarray(x, dtype=float)
    columns = []
    for index, step in enumerate(steps):
        offset = np.zeros_like(x)
        offset[index] = step
        columns.append((np.asarray(fn(x + offset)) - np.asarray(fn(x - offset))) / (2.0 * step))
    return np.column_stack(columns)


def mixed_partial(fn: Callable[[float, float], float], a: float, b: float, ha: float, hb: float) -> float:
    """Four-point centered estimate of d2 fn / da db, refined by one Richardson step."""

    def estimate(scale: float) -> float:
        da, db = ha * scale, hb * scale
        return (
            fn(a + da, b + db) - fn(a + da, b - db) - fn(a - da, b + db) + fn(a - da, b - db)
        ) / (4.0 * da * db)

    return (4.0 * estimate(0.5) - estimate(1.0)) / 3.0


def extrapolate_to_zero(h: Sequence[float], values: Sequence[float], degree: int | None = None) -> float:
    """Polynomial fit of values against h, evaluated at h = 0."""
    h_arr = np.asarray(h, dtype=float)
    v_arr = np.asarray(values, dtype=float)
    degree = len(h_arr) - 1 if degree is None else degree
    coefficients = polynomial.polyfit(h_arr, v_arr, degree)
    return float(coefficients[0])
