"""Rigorous upper bounds on bond percolation thresholds of self-dual tilings.

The pipeline: grow combinatorial {m,m} disk patches (tiling), enumerate
rooted connected edge subgraphs with boundary tallies (animals),
evaluate the truncated rank-difference series and solve for the
threshold bound (bound), and cross-check the underlying homology and
component-count identities on square tori (gf2, percolation).
"""

from ._patch import DEFAULT_MAX_VERTICES, ResourceLimitError, grow_patch
from .animals import (Animal, TallyTable, animal_stats, default_workers,
                      enumerate_animals, host_ball, iter_animals,
                      stream_animals)
from .bound import (BoundResult, BracketingError, IsoperimetryReport,
                    check_isoperimetry, eval_Dn, eval_fn,
                    isoperimetric_constant, solve_ph)
from .gf2 import (EdgeConfig, Gf2Matrix, component_count, cycle_code_dim,
                  face_edge_matrix, homology_dim_direct, homology_dim_formula,
                  incidence_matrix)
from .percolation import (Estimate, TrialRecord, count_components,
                          expected_kappa_bruteforce, expected_kappa_series,
                          iter_trials, monte_carlo_rank_difference,
                          rank_difference_trial, sample_config, trials_to_csv)
from .tiling import (BallCertificate, BallGraph, Tiling, build_ball,
                     build_ball_graph, build_torus, dual, from_json, to_json,
                     validate)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "DEFAULT_MAX_VERTICES",
    "ResourceLimitError",
    "grow_patch",
    "Animal",
    "TallyTable",
    "animal_stats",
    "default_workers",
    "enumerate_animals",
    "host_ball",
    "iter_animals",
    "stream_animals",
    "BoundResult",
    "BracketingError",
    "IsoperimetryReport",
    "check_isoperimetry",
    "eval_Dn",
    "eval_fn",
    "isoperimetric_constant",
    "solve_ph",
    "EdgeConfig",
    "Gf2Matrix",
    "component_count",
    "cycle_code_dim",
    "face_edge_matrix",
    "homology_dim_direct",
    "homology_dim_formula",
    "incidence_matrix",
    "Estimate",
    "TrialRecord",
    "count_components",
    "expected_kappa_bruteforce",
    "expected_kappa_series",
    "iter_trials",
    "monte_carlo_rank_difference",
    "rank_difference_trial",
    "sample_config",
    "trials_to_csv",
    "BallCertificate",
    "BallGraph",
    "Tiling",
    "build_ball",
    "build_ball_graph",
    "build_torus",
    "dual",
    "from_json",
    "to_json",
    "validate",
]
