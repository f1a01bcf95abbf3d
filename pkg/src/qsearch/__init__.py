"""Spectral criteria for continuous-time quantum search on graphs.

Typical use::

    from qsearch import complete_graph, laplacian, SearchCriterion

    est = SearchCriterion(target=0).fit(laplacian(complete_graph(64)))
    est.analysis_.T, est.analysis_.peak_overlap
"""

__version__ = "0.1.0"

from .criterion import (
    DEFAULT_CHI_MIN,
    CriterionError,
    MSelection,
    NoSpectralGapError,
    SearchAnalysis,
    SRGCheck,
    TargetInvisibleError,
    UndefinedMomentsError,
    analyze,
    closed_form_moments,
    gamma_sensitivity_band,
    moments,
    predicted_overlap_curve,
    select_m,
    srg_check,
)
from .estimator import SearchCriterion
from .evolution import (
    EvolutionTrace,
    Propagator,
    build_hamiltonian,
    evolve,
    reconstruct_lambda_states,
    success_curve,
    two_stage_sc,
    uniform_state,
    verify_eigen_condition,
)
from .graphs import (
    EdgeListError,
    Graph,
    SearchOperator,
    complete_graph,
    cubic_lattice,
    disjoint_union,
    erdos_renyi,
    hypercube,
    joined_complete,
    laplacian,
    latin_square_graph,
    load_edgelist,
    paley,
    save_edgelist,
    shift_operator,
    shifted_adjacency,
    simplex_complete_operator,
    srg_parameters,
)
from .spectral import (
    EigenSolverError,
    OverlapProfile,
    Spectrum,
    eig_sym,
    ground_shift,
    target_overlaps,
)
