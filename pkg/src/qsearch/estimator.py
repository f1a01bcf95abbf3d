"""scikit-learn style wrapper around the spectral search criterion."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_time_grid
from .criterion import (
    DEFAULT_CHI_MIN,
    NoSpectralGapError,
    analyze,
    gamma_sensitivity_band,
    predicted_overlap_curve,
    select_m,
)
from .evolution import success_curve
from .graphs import Graph, SearchOperator, laplacian, shift_operator, shifted_adjacency
from .spectral import DEFAULT_DEGENERACY_TOL, eig_sym, ground_shift, target_overlaps


class SearchCriterion(BaseEstimator):
    """Fit on a graph or search operator; predict the target overlap over time.

    Parameters
    ----------
    target : int
        Marked vertex.
    gamma : float or "critical"
        Jumping rate; "critical" uses the first inverse moment.
    m : int or "auto"
        Number of low eigenstates. "auto" picks the smallest level boundary with
        margin ``chi_min``; when none qualifies the best candidate is kept and
        ``gap_ok_`` is False.
    chi_min : float
        Required spectral margin.
    operator : {"laplacian", "adjacency"}
        Operator built when ``fit`` receives a :class:`Graph`.
    tol_degeneracy : float
        Level-merging tolerance passed to :func:`target_overlaps`.

    Attributes
    ----------
    spectrum_, profile_, analysis_, operator_ : fitted results
    sensitivity_band_ : float
    gap_ok_ : bool
    """

    def __init__(
        self,
        target=0,
        gamma="critical",
        m="auto",
        chi_min=DEFAULT_CHI_MIN,
        operator="laplacian",
        tol_degeneracy=DEFAULT_DEGENERACY_TOL,
    ):
        self.target = target
        self.gamma = gamma
        self.m = m
        self.chi_min = chi_min
        self.operator = operator
        self.tol_degeneracy = tol_degeneracy

    def _as_operator(self, X) -> SearchOperator:
        if isinstance(X, SearchOperator):
            return X
        if isinstance(X, Graph):
            if self.operator == "laplacian":
                return laplacian(X)
            if self.operator == "adjacency":
                return shifted_adjacency(X)
            raise ValueError(f"unknown operator {self.operator!r}")
        return SearchOperator(np.asarray(X, dtype=float), kind="custom")

    def fit(self, X, y=None):
        raw = self._as_operator(X)
        self.spectrum_ = ground_shift(eig_sym(raw))
        self.operator_ = shift_operator(raw, self.spectrum_.shift_applied - raw.shift_applied)
        self.profile_ = target_overlaps(self.spectrum_, self.target, self.tol_degeneracy)
        if self.m == "auto":
            try:
                m = select_m(self.profile_, self.chi_min).m
                self.gap_ok_ = True
            except NoSpectralGapError as exc:
                if exc.best is None:
                    raise
                m = exc.best.m
                self.gap_ok_ = False
        else:
            m = int(self.m)
        self.analysis_ = analyze(self.profile_, m, self.gamma, self.chi_min)
        if self.m != "auto":
            self.gap_ok_ = not self.analysis_.flagged
        self.sensitivity_band_ = gamma_sensitivity_band(self.analysis_)
        self.n_features_in_ = self.operator_.n
        return self

    def predict(self, taus) -> np.ndarray:
        """Two-level model ``|<t|phi(tau)>|`` on the given times."""
        check_is_fitted(self, "analysis_")
        return predicted_overlap_curve(self.analysis_, check_time_grid(taus))

    def simulate(self, tau_max=None, steps=1001, initial="uniform"):
        """Exact success curve on ``[0, tau_max]`` (default twice the predicted time)."""
        check_is_fitted(self, "analysis_")
        a = self.analysis_
        psi0 = a.sigma.astype(complex) if initial == "sigma" else initial
        return success_curve(self.operator_, a.gamma, self.target, psi0,
                             tau_max or 2 * a.T, steps)

    def score(self, X=None, y=None) -> float:
        """Exact peak success probability from the uniform state."""
        return self.simulate().refined_peak_prob
