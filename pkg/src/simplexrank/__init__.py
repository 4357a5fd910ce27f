"""Identify influential simplices in simplicial complexes.

The package builds hierarchical bipartite operators between simplex
layers, generates ground-truth influence labels by Monte-Carlo
contagion, and trains a spectral ranking model evaluated with Kendall
tau against classical centrality baselines.
"""

__version__ = "0.1.0"

from .centrality import (
    DEFAULT_FEATURES,
    FeatureMatrix,
    higher_order_degree,
    iterative_centrality,
    node_centrality,
    node_features,
    simplex_features,
    standardize,
)
from .complexes import (
    InfluenceScores,
    Simplex,
    SimplicialComplex,
    clique_lift,
    from_edge_list,
    from_simplex_list,
    generalized_degree,
    incidence_matrix,
)
from .diffusion import (
    DiffusionParams,
    RunOutcome,
    epidemic_threshold,
    generate_labels,
    hsir_run,
    immunize_and_spread,
    immunize_runs,
    simplex_infection_ability,
    sir_run,
)
from .errors import (
    ConfigError,
    LayerCapExceededError,
    MissingLayerError,
    SimplexRankError,
    ThresholdUndefinedError,
    ValidationError,
)
from .estimator import SimplexRanker
from .evaluation import kendall_tau, split, truth_pairs
from .model import (
    ModelParams,
    TrainConfig,
    forward,
    gradients,
    init_params,
    predict_rank,
    predict_scores,
    ranking_loss,
    train,
)
from .operators import (
    HubFringeOperator,
    build_operator,
    build_operators,
    chebyshev_apply,
    hub_adjacency,
    hub_laplacian,
)

__all__ = [
    "__version__",
    "ConfigError",
    "DEFAULT_FEATURES",
    "DiffusionParams",
    "FeatureMatrix",
    "HubFringeOperator",
    "InfluenceScores",
    "LayerCapExceededError",
    "MissingLayerError",
    "ModelParams",
    "RunOutcome",
    "Simplex",
    "SimplexRankError",
    "SimplexRanker",
    "SimplicialComplex",
    "ThresholdUndefinedError",
    "TrainConfig",
    "ValidationError",
    "build_operator",
    "build_operators",
    "chebyshev_apply",
    "clique_lift",
    "epidemic_threshold",
    "forward",
    "from_edge_list",
    "from_simplex_list",
    "generalized_degree",
    "generate_labels",
    "gradients",
    "higher_order_degree",
    "hsir_run",
    "hub_adjacency",
    "hub_laplacian",
    "immunize_and_spread",
    "immunize_runs",
    "incidence_matrix",
    "init_params",
    "iterative_centrality",
    "kendall_tau",
    "node_centrality",
    "node_features",
    "predict_rank",
    "predict_scores",
    "ranking_loss",
    "simplex_features",
    "simplex_infection_ability",
    "sir_run",
    "split",
    "standardize",
    "train",
    "truth_pairs",
]
