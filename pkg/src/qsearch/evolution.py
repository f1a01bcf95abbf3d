"""Exact dynamics under ``H = gamma*L - |t><t|`` by spectral decomposition."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_positive_int, check_time_grid, check_unit_vector, check_vertex
from .criterion import (
    DEFAULT_CHI_MIN,
    CriterionError,
    SearchAnalysis,
    analyze,
)
from .graphs import SearchOperator, shift_operator, simplex_complete_operator
from .spectral import OverlapProfile, eig_sym, ground_shift, target_overlaps

__all__ = [
    "EigenConditionError",
    "Propagator",
    "EvolutionTrace",
    "LambdaStates",
    "TwoStageResult",
    "build_hamiltonian",
    "evolve",
    "success_curve",
    "uniform_state",
    "verify_eigen_condition",
    "reconstruct_lambda_states",
    "two_stage_sc",
]

POLE_TOL = 1e-12
DEFAULT_STEPS = 1001
_GOLDEN = (math.sqrt(5) - 1) / 2


class EigenConditionError(ValueError):
    pass


def build_hamiltonian(op: SearchOperator, gamma: float, t: int) -> np.ndarray:
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    t = check_vertex(t, op.n)
    h = gamma * np.array(op.matrix)
    h[t, t] -= 1.0
    return h


def uniform_state(n: int) -> np.ndarray:
    return np.full(n, 1 / math.sqrt(n), dtype=complex)


class Propagator:
    """One eigendecomposition of ``H`` reused for every evolution time."""

    def __init__(self, h):
        s = eig_sym(h)
        self.energies = s.eigenvalues
        self.modes = s.eigenvectors
        self.n = s.n

    def evolve(self, psi0, tau: float) -> np.ndarray:
        psi0 = check_unit_vector(psi0, self.n)
        if tau < 0:
            raise ValueError("tau must be non-negative")
        c = self.modes.T @ psi0
        return self.modes @ (np.exp(-1j * self.energies * tau) * c)

    def amplitudes(self, psi0, taus, t: int, chunk: int = 256) -> np.ndarray:
        """``<t|exp(-iH tau)|psi0>`` for every tau, without forming full states."""
        psi0 = check_unit_vector(psi0, self.n)
        taus = check_time_grid(taus)
        weights = self.modes[t] * (self.modes.T @ psi0)
        out = np.empty(taus.size, dtype=complex)
        for lo in range(0, taus.size, chunk):
            block = taus[lo:lo + chunk]
            out[lo:lo + chunk] = np.exp(-1j * np.outer(block, self.energies)) @ weights
        return out

    def probability(self, psi0, tau: float, t: int) -> float:
        return float(abs(self.amplitudes(psi0, [tau], t)[0]) ** 2)


def evolve(h, psi0, tau: float) -> np.ndarray:
    """``exp(-iH tau) psi0`` for a real symmetric ``H``."""
    return Propagator(h).evolve(psi0, tau)


@dataclass(frozen=True)
class EvolutionTrace:
    taus: np.ndarray = field(repr=False)
    probs: np.ndarray = field(repr=False)
    peak_tau: float
    peak_prob: float
    refined_peak_tau: float
    refined_peak_prob: float
    gamma: float
    target: int
    initial: str

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "target": self.target,
            "initial": self.initial,
            "peak_tau": self.peak_tau,
            "peak_prob": self.peak_prob,
            "refined_peak_tau": self.refined_peak_tau,
            "refined_peak_prob": self.refined_peak_prob,
            "taus": [float(x) for x in self.taus],
            "probs": [float(x) for x in self.probs],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["tau", "prob"])
        for tau, p in zip(self.taus, self.probs):
            w.writerow([f"{tau:.17g}", f"{p:.17g}"])
        return buf.getvalue()


def _golden_max(f, a: float, b: float, iters: int = 60) -> tuple[float, float]:
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if b - a <= 1e-12 * max(1.0, abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return x, f(x)


def _resolve_initial(psi0, n: int, sigma=None) -> tuple[np.ndarray, str]:
    if psi0 is None or (isinstance(psi0, str) and psi0 == "uniform"):
        return uniform_state(n), "uniform"
    if isinstance(psi0, str):
        if psi0 == "sigma":
            if sigma is None:
                raise ValueError("initial state 'sigma' needs an analysis with sigma")
            return np.asarray(sigma, dtype=complex), "sigma"
        raise ValueError(f"unknown initial state {psi0!r}")
    return check_unit_vector(psi0, n), "custom"


def success_curve(
    op: SearchOperator,
    gamma: float,
    t: int,
    psi0=None,
    tau_max: float = 1.0,
    steps: int = DEFAULT_STEPS,
    propagator: Propagator | None = None,
) -> EvolutionTrace:
    """Sample ``|<t|psi(tau)>|^2`` on ``steps`` uniform points of ``[0, tau_max]``.

    The grid argmax is refined by golden-section search over its two adjacent
    cells. ``psi0`` may be a vector or ``"uniform"`` (default).
    """
    check_positive_int(steps, "steps", minimum=2)
    if not tau_max > 0:
        raise ValueError("tau_max must be positive")
    prop = propagator or Propagator(build_hamiltonian(op, gamma, t))
    psi, label = _resolve_initial(psi0, op.n)
    taus = np.linspace(0.0, tau_max, steps)
    probs = np.abs(prop.amplitudes(psi, taus, t)) ** 2
    k = int(np.argmax(probs))
    lo, hi = taus[max(k - 1, 0)], taus[min(k + 1, steps - 1)]
    rtau, rprob = _golden_max(lambda x: prop.probability(psi, x, t), lo, hi)
    if rprob < probs[k]:
        rtau, rprob = taus[k], probs[k]
    return EvolutionTrace(
        taus, probs, float(taus[k]), float(probs[k]), float(rtau), float(rprob),
        float(gamma), t, label,
    )


def verify_eigen_condition(profile: OverlapProfile, gamma: float, lam: float) -> float:
    """``|sum_z t_z^2 / (gamma E_z - lam) - 1|``; zero exactly at eigenvalues of ``H``."""
    e = profile.energies
    w = profile.weights
    gaps = gamma * e - lam
    live = w > 0
    if np.any(np.abs(gaps[live]) < POLE_TOL):
        raise EigenConditionError(f"lambda={lam!r} sits on a pole gamma*E_z")
    return float(abs(np.sum(w[live] / gaps[live]) - 1.0))


@dataclass(frozen=True)
class LambdaStates:
    plus: np.ndarray = field(repr=False)
    minus: np.ndarray = field(repr=False)
    t_overlap_plus: float
    t_overlap_minus: float
    sigma_overlap_plus: float
    sigma_overlap_minus: float
    predicted_t_overlap_plus: float
    predicted_t_overlap_minus: float


def reconstruct_lambda_states(profile: OverlapProfile, a: SearchAnalysis) -> LambdaStates:
    """Rebuild the two eigenstates of ``H`` nearest zero from the operator eigenbasis.

    Components are ``t_z / (gamma E_z - lambda)``; each vector is normalised and
    its sign fixed so ``<t|lambda> > 0``.
    """
    s = profile.spectrum
    if s is None:
        raise ValueError("profile carries no spectrum")
    if a.flagged:
        raise CriterionError(f"chi_eff={a.chi_eff:.3g} below chi_min={a.chi_min}")
    tz = s.eigenvectors[profile.target]
    out = []
    for lam in (a.lambda_plus, a.lambda_minus):
        gaps = a.gamma * s.eigenvalues - lam
        live = tz != 0
        if np.any(np.abs(gaps[live]) < POLE_TOL):
            raise EigenConditionError(f"lambda={lam!r} sits on a pole gamma*E_z")
        coef = np.where(live, tz / np.where(live, gaps, 1.0), 0.0)
        v = s.eigenvectors @ coef
        v /= np.linalg.norm(v)
        if v[profile.target] < 0:
            v = -v
        out.append(v)
    plus, minus = out
    sigma = a.sigma
    return LambdaStates(
        plus, minus,
        float(plus[profile.target]), float(minus[profile.target]),
        float(sigma @ plus) if sigma is not None else math.nan,
        float(sigma @ minus) if sigma is not None else math.nan,
        a.gamma / math.sqrt(a.M2) * math.sin(a.eta),
        a.gamma / math.sqrt(a.M2) * math.cos(a.eta),
    )


@dataclass(frozen=True)
class TwoStageResult:
    R: int
    w: float
    gamma1: float
    T1: float
    T1_candidates: dict
    peak_tau1: float
    peak_prob1: float
    target_prob_T1: float
    predicted_peak_prob1: float
    fidelity_s1: float
    gamma2: float
    T2: float
    final_overlap: float
    final_peak_prob: float
    stage2_from_s1: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _m_for_count(profile: OverlapProfile, count: int) -> int:
    if count not in profile.boundaries():
        raise CriterionError(f"no level boundary at {count} eigenstates")
    return count


def two_stage_sc(
    R: int,
    w: float,
    steps: int = DEFAULT_STEPS,
    gamma_mode: str = "critical",
    chi_min: float = DEFAULT_CHI_MIN,
) -> TwoStageResult:
    """Localise onto the target's block, then search inside it.

    Target is vertex 0 (block 0). Stage 1 starts from the uniform state with
    ``m = 1``; stage 2 starts from the stage-1 state at its predicted time with
    ``m = R + 1``. ``gamma_mode="critical"`` takes each stage's rate from the
    numeric moments; ``"closed_form"`` uses ``(1 + 1/w)/R`` and ``1/R``.
    """
    check_positive_int(R, "R", minimum=4)
    if not 1 <= w < math.sqrt(R):
        raise ValueError(f"need 1 <= w < sqrt(R), got w={w}, R={R}")
    if gamma_mode not in ("critical", "closed_form"):
        raise ValueError(f"unknown gamma_mode {gamma_mode!r}")
    raw = simplex_complete_operator(R, w)
    spectrum = ground_shift(eig_sym(raw))
    op = shift_operator(raw, spectrum.shift_applied)
    profile = target_overlaps(spectrum, 0)
    N = op.n
    s1 = np.zeros(N, dtype=complex)
    s1[:R] = 1 / math.sqrt(R)

    g1 = "critical" if gamma_mode == "critical" else (1 + 1 / w) / R
    a1 = analyze(profile, 1, g1, chi_min)
    prop1 = Propagator(build_hamiltonian(op, a1.gamma, 0))
    psi = uniform_state(N)
    trace1 = success_curve(op, a1.gamma, 0, psi, 2 * a1.T, steps, propagator=prop1)
    psi_t1 = prop1.evolve(psi, a1.T)

    g2 = "critical" if gamma_mode == "critical" else 1 / R
    a2 = analyze(profile, _m_for_count(profile, R + 1), g2, chi_min)
    prop2 = Propagator(build_hamiltonian(op, a2.gamma, 0))
    final = prop2.amplitudes(psi_t1 / np.linalg.norm(psi_t1), [a2.T], 0)[0]
    trace2 = success_curve(op, a2.gamma, 0, psi_t1 / np.linalg.norm(psi_t1), 2 * a2.T, steps,
                           propagator=prop2)
    ideal = prop2.amplitudes(s1, [a2.T], 0)[0]
    scale = math.pi * math.sqrt(R * N)
    return TwoStageResult(
        R=R, w=float(w),
        gamma1=a1.gamma, T1=a1.T,
        T1_candidates={"2w+1": scale / (2 * w + 1), "2(w+1)": scale / (2 * (w + 1))},
        peak_tau1=trace1.refined_peak_tau, peak_prob1=trace1.refined_peak_prob,
        target_prob_T1=float(abs(psi_t1[0]) ** 2),
        predicted_peak_prob1=a1.peak_probability,
        fidelity_s1=float(abs(np.vdot(s1, psi_t1)) ** 2),
        gamma2=a2.gamma, T2=a2.T,
        final_overlap=float(abs(final) ** 2),
        final_peak_prob=trace2.refined_peak_prob,
        stage2_from_s1=float(abs(ideal) ** 2),
    )
