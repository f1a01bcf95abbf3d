"""Input checks shared by the public entry points."""

from __future__ import annotations

import numbers

import numpy as np


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_vertex(t, n: int, name: str = "target") -> int:
    if isinstance(t, bool) or not isinstance(t, numbers.Integral):
        raise TypeError(f"{name} must be an integer vertex index")
    if not 0 <= t < n:
        raise ValueError(f"{name}={t} out of range for {n} vertices")
    return int(t)


def check_symmetric(matrix, name: str = "matrix", rtol: float = 1e-12) -> np.ndarray:
    """Return ``matrix`` as a float array after checking it is square and symmetric.

    Symmetry is judged relative to the largest entry, so an all-zero matrix passes.
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if a.size and np.max(np.abs(a - a.T)) > rtol * scale:
        raise ValueError(f"{name} is not symmetric")
    return a


def check_unit_vector(psi, n: int, name: str = "psi0", atol: float = 1e-9) -> np.ndarray:
    v = np.asarray(psi, dtype=complex).reshape(-1)
    if v.shape[0] != n:
        raise ValueError(f"{name} has length {v.shape[0]}, expected {n}")
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > atol:
        raise ValueError(f"{name} must be a unit vector (norm={norm:.12g})")
    return v


def check_time_grid(taus) -> np.ndarray:
    grid = np.asarray(taus, dtype=float).reshape(-1)
    if grid.size and (np.any(grid < 0) or not np.all(np.isfinite(grid))):
        raise ValueError("times must be finite and non-negative")
    return grid
