"""Dense symmetric eigendecomposition and target-overlap profiles."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ._validation import check_symmetric, check_vertex
from .graphs import SearchOperator

__all__ = [
    "DEFAULT_DEGENERACY_TOL",
    "EigenSolverError",
    "Spectrum",
    "Level",
    "OverlapProfile",
    "eig_sym",
    "ground_shift",
    "target_overlaps",
]

DEFAULT_DEGENERACY_TOL = 1e-9
RESIDUAL_TOL = 1e-8
ORTHO_TOL = 1e-10


class EigenSolverError(RuntimeError):
    """Raised when a decomposition misses the residual or orthonormality contract."""

    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(f"{message} (residual={residual:.3e})")


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)
    shift_applied: float = 0.0

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    def to_dict(self, include_vectors: bool = False) -> dict:
        out = {
            "n": self.n,
            "shift_applied": float(self.shift_applied),
            "eigenvalues": [float(x) for x in self.eigenvalues],
        }
        if include_vectors:
            out["eigenvectors"] = self.eigenvectors.tolist()
        return out


def eig_sym(op) -> Spectrum:
    """Full eigendecomposition of a real symmetric matrix or :class:`SearchOperator`.

    Backed by LAPACK ``syevd`` through :func:`numpy.linalg.eigh`; the result is
    checked against the residual ``|A v - E v| <= 1e-8 |A|`` and the
    orthonormality bound ``1e-10`` before it is returned.
    """
    if isinstance(op, SearchOperator):
        a, shift = op.matrix, op.shift_applied
    else:
        a, shift = check_symmetric(op), 0.0
    try:
        evals, evecs = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigensolver did not converge: {exc}", float("nan")) from exc
    # spectral norm of a symmetric matrix
    scale = max(float(np.abs(evals).max()) if a.size else 0.0, np.finfo(float).tiny)
    resid = np.linalg.norm(a @ evecs - evecs * evals, axis=0).max() if a.size else 0.0
    if not resid <= RESIDUAL_TOL * scale:
        raise EigenSolverError("eigenpair residual above tolerance", float(resid / scale))
    ortho = np.abs(evecs.T @ evecs - np.eye(a.shape[0])).max() if a.size else 0.0
    if not ortho <= ORTHO_TOL:
        raise EigenSolverError("eigenvectors not orthonormal", float(ortho))
    evals.setflags(write=False)
    evecs.setflags(write=False)
    return Spectrum(evals, evecs, float(shift))


def ground_shift(s: Spectrum) -> Spectrum:
    """Move the least eigenvalue to exactly 0; the shift is accumulated in ``shift_applied``."""
    e0 = float(s.eigenvalues[0])
    if e0 == 0.0:
        return s
    shifted = s.eigenvalues - e0
    shifted[0] = 0.0
    shifted.setflags(write=False)
    return replace(s, eigenvalues=shifted, shift_applied=s.shift_applied + e0)


@dataclass(frozen=True)
class Level:
    energy: float
    multiplicity: int
    weight: float
    start: int = field(default=0, repr=False)


@dataclass(frozen=True)
class OverlapProfile:
    """Distinct eigenvalue levels with the target's squared projection onto each.

    ``spectrum`` is kept so callers can rebuild vectors (the low-subspace state,
    eigenstate reconstructions); it plays no part in equality.
    """

    levels: tuple[Level, ...]
    target: int
    spectrum: Spectrum | None = field(default=None, repr=False, compare=False)

    @property
    def energies(self) -> np.ndarray:
        return np.array([lv.energy for lv in self.levels])

    @property
    def weights(self) -> np.ndarray:
        return np.array([lv.weight for lv in self.levels])

    @property
    def multiplicities(self) -> np.ndarray:
        return np.array([lv.multiplicity for lv in self.levels], dtype=int)

    @property
    def n(self) -> int:
        return int(self.multiplicities.sum())

    def boundaries(self) -> list[int]:
        """Eigenvalue counts that do not split a level: ``1..`` cumulative multiplicities."""
        return np.cumsum(self.multiplicities).tolist()

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "levels": [
                {"energy": lv.energy, "multiplicity": lv.multiplicity, "weight": lv.weight}
                for lv in self.levels
            ],
        }


def _group(evals: np.ndarray, tol: float) -> list[tuple[int, int]]:
    groups = []
    start = 0
    for i in range(1, len(evals) + 1):
        if i < len(evals):
            a, b = evals[i - 1], evals[i]
            if abs(b - a) <= tol * max(1.0, abs(a), abs(b)):
                continue
        groups.append((start, i))
        start = i
    return groups


def target_overlaps(
    s: Spectrum, t: int, tol_degeneracy: float = DEFAULT_DEGENERACY_TOL
) -> OverlapProfile:
    """Aggregate squared overlaps of vertex ``t`` per eigenvalue level.

    Neighbouring eigenvalues merge when ``|E_i - E_j| <= tol * max(1, |E_i|, |E_j|)``
    (chained). Pass ``tol_degeneracy=0`` to merge only bit-identical values.
    Level weights are projection norms and so do not depend on how the solver
    picked a basis inside a degenerate eigenspace.
    """
    t = check_vertex(t, s.n)
    if tol_degeneracy < 0:
        raise ValueError("tol_degeneracy must be non-negative")
    row = s.eigenvectors[t] ** 2
    levels = []
    for a, b in _group(s.eigenvalues, tol_degeneracy):
        energy = float(s.eigenvalues[a]) if b - a == 1 else float(np.mean(s.eigenvalues[a:b]))
        if a == 0 and s.eigenvalues[0] == 0.0:
            energy = 0.0
        levels.append(Level(energy, b - a, float(row[a:b].sum()), a))
    return OverlapProfile(tuple(levels), t, s)
