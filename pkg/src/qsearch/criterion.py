"""Two-level reduction of the search Hamiltonian and its predictions.

Given the overlap profile of a target on a shifted operator spectrum, the low
subspace (first ``m`` eigenstates) fixes ``alpha`` and the levels above it fix
the inverse moments ``M1`` and ``M2``. Those three numbers determine the pair of
Hamiltonian eigenvalues straddling zero, the optimal time and the peak overlap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .spectral import OverlapProfile

__all__ = [
    "DEFAULT_CHI_MIN",
    "CriterionError",
    "TargetInvisibleError",
    "UndefinedMomentsError",
    "NoSpectralGapError",
    "SearchAnalysis",
    "MSelection",
    "SRGCheck",
    "moments",
    "analyze",
    "select_m",
    "predicted_overlap_curve",
    "gamma_sensitivity_band",
    "closed_form_moments",
    "lattice_energies",
    "srg_check",
]

DEFAULT_CHI_MIN = 10.0


class CriterionError(ValueError):
    pass


class TargetInvisibleError(CriterionError):
    def __init__(self, m: int):
        super().__init__(f"target invisible to low subspace (alpha = 0 for m={m})")


class UndefinedMomentsError(CriterionError):
    def __init__(self, energy: float):
        super().__init__(
            f"moments undefined: level above the gap has energy {energy:.3e} <= 0 "
            "(shift the operator first)"
        )


class NoSpectralGapError(CriterionError):
    """No ``m`` reaches ``chi_min``; ``best`` holds the candidate with the largest margin."""

    def __init__(self, chi_min: float, best: "SearchAnalysis | None", rejected: list):
        self.best = best
        self.rejected = rejected
        detail = f"; best m={best.m} with chi_eff={best.chi_eff:.4g}" if best else ""
        super().__init__(
            f"no spectral gap supports the two-level reduction at chi_min={chi_min}{detail}"
        )


@dataclass(frozen=True)
class SearchAnalysis:
    m: int
    alpha: float
    M1: float
    M2: float
    gamma: float
    gamma_c: float
    delta: float
    eta: float
    lambda_plus: float
    lambda_minus: float
    T: float
    peak_overlap: float
    chi_eff: float
    chi_min: float
    target: int
    sigma: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def flagged(self) -> bool:
        """True when the margin is below ``chi_min`` and the predictions are rough."""
        return not self.chi_eff >= self.chi_min

    @property
    def peak_probability(self) -> float:
        return self.peak_overlap**2

    def to_dict(self, include_sigma: bool = False) -> dict:
        out = {
            k: _num(getattr(self, k))
            for k in (
                "m", "alpha", "M1", "M2", "gamma", "gamma_c", "delta", "eta",
                "lambda_plus", "lambda_minus", "T", "peak_overlap", "chi_eff",
                "chi_min", "target",
            )
        }
        out["flagged"] = self.flagged
        if include_sigma and self.sigma is not None:
            out["sigma"] = [float(x) for x in self.sigma]
        return out


def _num(x):
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    return x if math.isfinite(x) else None


def _split(profile: OverlapProfile, m: int) -> int:
    """Number of levels that make up the first ``m`` eigenstates."""
    bounds = profile.boundaries()
    if m not in bounds:
        raise CriterionError(f"m={m} splits a degenerate level; valid values are {bounds}")
    return bounds.index(m) + 1


def moments(profile: OverlapProfile, m: int) -> tuple[float, float, float]:
    """Return ``(alpha, M1, M2)`` for a low subspace of ``m`` eigenstates."""
    k = _split(profile, m)
    e = profile.energies
    w = profile.weights
    if k >= len(e):
        raise CriterionError(f"m={m} leaves no levels above the gap")
    high_e, high_w = e[k:], w[k:]
    if np.any(high_e <= 0):
        raise UndefinedMomentsError(float(high_e.min()))
    alpha = math.sqrt(max(float(w[:k].sum()), 0.0))
    M1 = float(np.sum(high_w / high_e))
    M2 = float(np.sum(high_w / high_e**2))
    return alpha, M1, M2


def _sigma(profile: OverlapProfile, m: int, alpha: float) -> np.ndarray | None:
    s = profile.spectrum
    if s is None:
        return None
    low = s.eigenvectors[:, :m]
    return low @ low[profile.target] / alpha


def _chi(profile: OverlapProfile, k: int, gamma: float, lam: float) -> float:
    e = profile.energies
    left = math.inf if e[k - 1] <= 0 else lam / (gamma * e[k - 1])
    right = gamma * e[k] / lam
    return min(left, right)


def analyze(
    profile: OverlapProfile,
    m: int,
    gamma: float | str = "critical",
    chi_min: float = DEFAULT_CHI_MIN,
) -> SearchAnalysis:
    """Predict ``lambda+-``, ``T`` and the peak target overlap for ``m`` low eigenstates.

    ``gamma="critical"`` uses ``gamma = M1``. A numeric gamma goes through the
    general path: the quadratic for ``lambda`` is solved in closed form with the
    cancellation-free root pairing.
    """
    alpha, M1, M2 = moments(profile, m)
    if alpha == 0.0:
        raise TargetInvisibleError(m)
    if not M2 > 0:
        raise CriterionError(f"target has no weight above the gap for m={m}")
    k = _split(profile, m)
    sqm2 = math.sqrt(M2)
    if isinstance(gamma, str):
        if gamma != "critical":
            raise ValueError(f"gamma must be a positive number or 'critical', got {gamma!r}")
        g = M1
        delta = 0.0
        eta = math.pi / 4
        lam_p = alpha * M1 / sqm2
        lam_m = -lam_p
        T = math.pi * sqm2 / (2 * M1 * alpha)
        peak = M1 / sqm2
    else:
        g = float(gamma)
        if not g > 0:
            raise ValueError(f"gamma must be positive, got {gamma}")
        delta = M1 / g - 1.0
        # M2/g^2 * lam^2 + delta * lam - alpha^2 = 0
        a = M2 / g**2
        root = math.sqrt(delta * delta + 4 * a * alpha * alpha)
        if delta >= 0:
            q = -0.5 * (delta + root)
            lam_m, lam_p = q / a, -alpha * alpha / q
        else:
            q = -0.5 * (delta - root)
            lam_p, lam_m = q / a, -alpha * alpha / q
        eta = math.atan2(lam_p * sqm2, alpha * g)
        T = math.pi / (lam_p - lam_m)
        peak = g / sqm2 * math.sin(2 * eta)
    chi = _chi(profile, k, g, max(abs(lam_p), abs(lam_m)))
    return SearchAnalysis(
        m=m, alpha=alpha, M1=M1, M2=M2, gamma=g, gamma_c=M1, delta=delta, eta=eta,
        lambda_plus=lam_p, lambda_minus=lam_m, T=T, peak_overlap=peak,
        chi_eff=chi, chi_min=chi_min, target=profile.target,
        sigma=_sigma(profile, m, alpha),
    )


@dataclass(frozen=True)
class MSelection:
    m: int
    analysis: SearchAnalysis
    rejected: list[tuple[int, float | None]]

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "chi_eff": _num(self.analysis.chi_eff),
            "rejected": [{"m": m, "chi_eff": _num(c) if c is not None else None}
                         for m, c in self.rejected],
        }


def select_m(profile: OverlapProfile, chi_min: float = DEFAULT_CHI_MIN) -> MSelection:
    """Smallest level boundary ``m`` whose critical-gamma margin reaches ``chi_min``.

    Candidates where the target has no weight below the gap, or where a level
    above it is not strictly positive, are rejected with ``chi_eff=None``.
    """
    if not chi_min > 1:
        raise ValueError(f"chi_min must exceed 1, got {chi_min}")
    rejected = []
    best = None
    for m in profile.boundaries()[:-1]:
        try:
            a = analyze(profile, m, "critical", chi_min)
        except CriterionError:
            rejected.append((m, None))
            continue
        if a.chi_eff >= chi_min:
            return MSelection(m, a, rejected)
        rejected.append((m, float(a.chi_eff)))
        if best is None or a.chi_eff > best.chi_eff:
            best = a
    raise NoSpectralGapError(chi_min, best, rejected)


def predicted_overlap_curve(a: SearchAnalysis, taus) -> np.ndarray:
    """``|<t|phi(tau)>|`` of the two-level model on a time grid."""
    taus = np.asarray(taus, dtype=float)
    gap = a.lambda_plus - a.lambda_minus
    amp = a.gamma / math.sqrt(a.M2) * math.sin(2 * a.eta) / 2
    return amp * np.abs(1 - np.exp(-1j * gap * taus))


def gamma_sensitivity_band(a: SearchAnalysis) -> float:
    """Detuning ``|gamma - gamma_c|`` scale past which the search stops working."""
    return 2 * a.alpha * math.sqrt(a.M2)


# --------------------------------------------------------------------------- closed forms


def lattice_energies(d: int, side: int) -> np.ndarray:
    """All ``2(d - sum cos k_j)`` over the periodic k-grid, zero mode first."""
    ks = 2 * np.pi * np.arange(side) / side
    one = 2 - 2 * np.cos(ks)
    e = np.zeros((1,))
    for _ in range(d):
        e = (e[:, None] + one[None, :]).ravel()
    return e


def closed_form_moments(family: str, r: int, **params) -> float:
    """Inverse moment ``M_r`` (``r`` in 1, 2) from a family's known spectrum, with ``m = 1``.

    Families and parameters: ``hypercube(n)``, ``lattice(d, side)``, ``sc(R, w)``
    and ``srg(N, k, lam, mu)``.
    """
    if r not in (1, 2):
        raise ValueError(f"r must be 1 or 2, got {r}")
    if family == "hypercube":
        n = int(params["n"])
        if n < 1:
            raise ValueError("hypercube needs n >= 1")
        return sum(math.comb(n, p) / (2 * p) ** r for p in range(1, n + 1)) / 2**n
    if family == "lattice":
        d, side = int(params["d"]), int(params["side"])
        if d < 1 or side < 3 or side % 2 == 0:
            raise ValueError("lattice needs d >= 1 and odd side >= 3")
        e = lattice_energies(d, side)[1:]
        return float(np.sum(e ** (-float(r)))) / side**d
    if family == "sc":
        R, w = params["R"], params["w"]
        if R < 2 or not w > 0:
            raise ValueError("sc needs R >= 2 and w > 0")
        return 1 / (R * w**r) + 1 / R**r
    if family == "srg":
        N, k, lam, mu = (int(params[x]) for x in ("N", "k", "lam", "mu"))
        chk = srg_check(N, k, lam, mu)
        if not chk.feasible:
            raise ValueError(f"infeasible strongly regular parameters {(N, k, lam, mu)}")
        disc = (lam - mu) ** 2 + 4 * (k - mu)
        skew = (2 * k + (N - 1) * (lam - mu)) / math.sqrt(disc)
        mult_low = ((N - 1) - skew) / 2
        mult_high = ((N - 1) + skew) / 2
        low, high = chk.F1 - chk.F2, chk.F1 + chk.F2
        # every eigenspace projector of an SRG has constant diagonal mult/N
        return (mult_low / low**r + mult_high / high**r) / N
    raise ValueError(f"unknown family {family!r}")


@dataclass(frozen=True)
class SRGCheck:
    feasible: bool
    F1: float
    F2: float
    gap_condition: bool
    identity_residual: float

    def to_dict(self) -> dict:
        return {k: _num(v) if not isinstance(v, bool) else v for k, v in self.__dict__.items()}


def srg_check(N: int, k: int, lam: int, mu: int, ratio: float = 10.0) -> SRGCheck:
    """Feasibility, Laplacian level centre/half-width and the gap condition.

    The identity residual is computed in exact rational arithmetic, so it is
    exactly 0 for feasible parameters.
    """
    if min(N, k, mu) < 1 or lam < 0:
        raise ValueError("N, k, mu must be positive and lam non-negative")
    f1 = Fraction(2 * k - (lam - mu), 2)
    f2sq = Fraction(k - mu) + Fraction((lam - mu) ** 2, 4)
    residual = abs(f1 * f1 - Fraction((lam - mu) ** 2, 4) - (N * mu + k - mu))
    feasible = k * (k - lam - 1) == (N - k - 1) * mu and f2sq >= 0
    F2 = math.sqrt(f2sq) if f2sq >= 0 else math.nan
    gap = f2sq >= 0 and N * mu >= ratio * f2sq
    return SRGCheck(bool(feasible), float(f1), F2, bool(gap), float(residual))
