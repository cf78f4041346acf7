"""Batch active learning with core-set acquisition.

The package is organised around small, pure modules:

- :mod:`coreset_al.geometry` -- tiled Euclidean distance kernels
- :mod:`coreset_al.selection` -- acquisition strategies (greedy core-set,
  doubt-weighted variant, beam search, and the usual baselines)
- :mod:`coreset_al.model` -- a from-scratch multinomial logistic classifier
- :mod:`coreset_al.data` -- synthetic datasets and pool splitting
- :mod:`coreset_al.bounds` -- convergence-bound formulas and their checks
- :mod:`coreset_al.harness` -- the closed acquire/label/retrain loop
- :mod:`coreset_al.dataio` -- the CSV formats shared with the CLI
"""

from coreset_al.geometry import (
    DEFAULT_BATCH_SIZE,
    compute_min_delta,
    core_set_radius,
    pairwise_distance,
)
from coreset_al.selection import (
    ACQUIRED_POINT,
    CANDIDATE_POINT,
    BeamCandidate,
    beam_doubted_coreset,
    doubt,
    doubted_coreset,
    greedy_coreset,
    kmeans_closest_coreset,
    least_confidence_acquisition,
    max_entropy_acquisition,
    optimal_coreset,
    random_acquisition,
    uncertainty_score,
)
from coreset_al.model import Classifier, TrainConfig, evaluate, predict_proba, train
from coreset_al.data import (
    LabeledDataset,
    PoolSplit,
    SplitSpec,
    gen_gaussian_clusters,
    gen_quadrants,
    split,
)
from coreset_al.bounds import (
    BoundParams,
    beta_lower_bound,
    beta_scaled,
    delta_star,
    doubt_upper_bound,
    bound_curve_grid,
    hat_delta_bound,
    p_err_bound,
    verify_claims,
)
from coreset_al.harness import (
    ExperimentConfig,
    MetricRecord,
    boundary_concentration,
    run_experiment,
    run_trial,
)

__version__ = "0.1.0"

__all__ = [
    "ACQUIRED_POINT",
    "CANDIDATE_POINT",
    "BeamCandidate",
    "BoundParams",
    "Classifier",
    "DEFAULT_BATCH_SIZE",
    "ExperimentConfig",
    "LabeledDataset",
    "MetricRecord",
    "PoolSplit",
    "SplitSpec",
    "TrainConfig",
    "beam_doubted_coreset",
    "beta_lower_bound",
    "beta_scaled",
    "boundary_concentration",
    "compute_min_delta",
    "core_set_radius",
    "delta_star",
    "doubt",
    "doubt_upper_bound",
    "doubted_coreset",
    "evaluate",
    "bound_curve_grid",
    "gen_gaussian_clusters",
    "gen_quadrants",
    "greedy_coreset",
    "hat_delta_bound",
    "kmeans_closest_coreset",
    "least_confidence_acquisition",
    "max_entropy_acquisition",
    "optimal_coreset",
    "p_err_bound",
    "pairwise_distance",
    "predict_proba",
    "random_acquisition",
    "run_experiment",
    "run_trial",
    "split",
    "train",
    "uncertainty_score",
    "verify_claims",
]
