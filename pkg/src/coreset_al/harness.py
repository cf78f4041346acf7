"""Closed acquire/label/retrain loop and its metrics.

A trial fixes a dataset and an initial pool split, trains on the seed
labels, then alternates acquisition and retraining for a configured number
of iterations. The dataset and split depend only on the trial seed, never
on the strategy, so different strategies face identical pools. Models are
retrained from zero-initialised weights each iteration; nothing
warm-starts.

Per-iteration wall-clock time is tracked on the in-memory records for
reporting but is never written to the CSV outputs, which must reproduce
byte for byte under a fixed seed.
"""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass, field

import numpy as np

from coreset_al.data import (
    LabeledDataset,
    PoolSplit,
    SplitSpec,
    gen_quadrants,
    make_cluster_dataset,
    split,
    holdout_size,
)
from coreset_al.geometry import DEFAULT_BATCH_SIZE, compute_min_delta, core_set_radius
from coreset_al.model import Classifier, TrainConfig, evaluate, predict_proba, train
from coreset_al.seeding import derive_seed
from coreset_al.selection import (
    ACQUIRED_POINT,
    SCALING_MODES,
    beam_doubted_coreset,
    doubt,
    doubted_coreset,
    greedy_coreset,
    kmeans_closest_coreset,
    least_confidence_acquisition,
    max_entropy_acquisition,
    random_acquisition,
    uncertainty_score,
)

DATASET_QUADRANTS = "quadrants"
DATASET_CLUSTERS = "clusters"
DATASETS = (DATASET_QUADRANTS, DATASET_CLUSTERS)

STRATEGIES = (
    "random",
    "coreset",
    "doubt-coreset",
    "beam-coreset",
    "least-confidence",
    "max-entropy",
    "kmeans-closest",
)

# seed-derivation roles (second coordinate under the trial seed)
_ROLE_DATASET = 0
_ROLE_SPLIT = 1
_ROLE_STRATEGY = 2
_ROLE_TRAIN = 3


@dataclass
class ExperimentConfig:
    """Everything a reproducible experiment needs.

    ``strategies`` lists the acquisition strategies to compare; all of them
    see the same per-trial dataset and split. For the quadrant dataset the
    size is ``n``; the cluster dataset has ``per_cluster * class_count *
    clusters_per_class`` rows arranged by :func:`coreset_al.data.default_cluster_layout`.
    """

    dataset: str = DATASET_CLUSTERS
    n: int = 2000
    per_cluster: int = 250
    std: float = 1.0
    ring_radius: float = 5.0
    class_count: int = 4
    clusters_per_class: int = 2
    initial_labeled: int = 100
    test_fraction: float = 0.25
    budget: int = 50
    iterations: int = 5
    strategies: tuple[str, ...] = ("coreset",)
    beam_width: int = 10
    scaling_mode: str = ACQUIRED_POINT
    distance_batch_size: int = DEFAULT_BATCH_SIZE
    trials: int = 5
    base_seed: int = 0
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        if self.dataset not in DATASETS:
            raise ValueError(f"unknown dataset {self.dataset!r}; expected one of {DATASETS}")
        if isinstance(self.strategies, str):
            self.strategies = (self.strategies,)
        self.strategies = tuple(self.strategies)
        if not self.strategies:
            raise ValueError("need at least one strategy")
        for name in self.strategies:
            if name not in STRATEGIES:
                raise ValueError(f"unknown strategy {name!r}; expected one of {STRATEGIES}")
        if len(set(self.strategies)) != len(self.strategies):
            raise ValueError(f"duplicate strategy in {self.strategies}")
        if self.scaling_mode not in SCALING_MODES:
            raise ValueError(
                f"unknown scaling_mode {self.scaling_mode!r}; expected one of {SCALING_MODES}"
            )
        if self.budget < 1:
            raise ValueError(f"budget must be at least 1, got {self.budget}")
        if self.iterations < 0:
            raise ValueError(f"iterations must be nonnegative, got {self.iterations}")
        if self.beam_width < 1:
            raise ValueError(f"beam_width must be at least 1, got {self.beam_width}")
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        if self.distance_batch_size < 1:
            raise ValueError(
                f"distance_batch_size must be at least 1, got {self.distance_batch_size}"
            )
        size = self.dataset_size()
        pool = size - holdout_size(size, self.test_fraction)
        needed = self.initial_labeled + self.budget * self.iterations
        if needed > pool:
            raise ValueError(
                f"initial_labeled + budget * iterations = {needed} exceeds the "
                f"train pool of {pool} (dataset size {size}, test fraction "
                f"{self.test_fraction})"
            )

    def dataset_size(self) -> int:
        if self.dataset == DATASET_QUADRANTS:
            return self.n
        return self.per_cluster * self.class_count * self.clusters_per_class


@dataclass
class MetricRecord:
    """State of one trial after ``iteration`` acquisition rounds.

    ``iteration`` 0 is the state right after training on the seed labels.
    ``acquisition_uncertainty`` is the uncertainty score of the batch
    acquired in this iteration (0.0 at iteration 0). ``early_stop`` marks
    the final record of a run that ended because the pool could no longer
    fund a full acquisition batch.
    """

    strategy: str
    trial: int
    iteration: int
    labeled_count: int
    test_accuracy: float
    coreset_radius: float
    empirical_coreset_loss: float
    acquisition_uncertainty: float
    wall_time_ms: float
    early_stop: bool = False


@dataclass
class SummaryRecord:
    """Across-trial aggregate for one (strategy, iteration) cell."""

    strategy: str
    iteration: int
    labeled_count: int
    trials: int
    mean_test_accuracy: float
    std_test_accuracy: float
    mean_coreset_radius: float
    std_coreset_radius: float
    mean_coreset_loss: float
    std_coreset_loss: float
    mean_uncertainty: float
    std_uncertainty: float


@dataclass
class TrialResult:
    """Full output of one trial, including what the CSV writers need."""

    strategy: str
    trial: int
    records: list[MetricRecord]
    acquisitions: list[np.ndarray]  # dataset row ids acquired at iteration i+1
    acquisition_masks: list[tuple[np.ndarray, np.ndarray]]  # (pool rows, bits)
    dataset: LabeledDataset
    split: PoolSplit
    models: list[Classifier]


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[MetricRecord]
    summary: list[SummaryRecord]
    trials: dict[tuple[str, int], TrialResult]


def make_dataset(config: ExperimentConfig, seed: int) -> LabeledDataset:
    """The dataset a trial runs on; depends only on config geometry and seed."""
    if config.dataset == DATASET_QUADRANTS:
        return gen_quadrants(config.n, seed)
    return make_cluster_dataset(
        per_cluster=config.per_cluster,
        std=config.std,
        seed=seed,
        class_count=config.class_count,
        clusters_per_class=config.clusters_per_class,
        radius=config.ring_radius,
    )


def run_trial(config: ExperimentConfig, trial_seed: int, strategy: str | None = None) -> list[MetricRecord]:
    """Metric records of one trial (see :func:`run_trial_detailed`)."""
    return run_trial_detailed(config, trial_seed, strategy).records


def run_trial_detailed(
    config: ExperimentConfig, trial_seed: int, strategy: str | None = None
) -> TrialResult:
    """Run one acquire/label/retrain trial end to end.

    Args:
        config: Experiment parameters.
        trial_seed: Seed of this trial; dataset noise, the pool split,
            strategy randomness, and shuffle order all derive sub-streams
            from it.
        strategy: Which acquisition strategy to drive; defaults to the
            first entry of ``config.strategies``.

    Returns:
        The trial's records plus the dataset, split, and per-iteration
        acquisitions needed for reporting.
    """
    if strategy is None:
        strategy = config.strategies[0]
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")

    started = time.perf_counter()
    dataset = make_dataset(config, derive_seed(trial_seed, _ROLE_DATASET))
    pool_split = split(
        dataset,
        SplitSpec(
            initial_labeled=config.initial_labeled,
            test_fraction=config.test_fraction,
            seed=derive_seed(trial_seed, _ROLE_SPLIT),
        ),
    )
    features, labels = dataset.features, dataset.labels
    labeled = pool_split.labeled.copy()
    unlabeled = pool_split.unlabeled.copy()
    train_pool = np.sort(np.concatenate([labeled, unlabeled]))

    model = _fit(config, features, labels, labeled, dataset.class_count, trial_seed, 0)
    records = [
        _measure(
            config, strategy, trial_seed, 0, model, features, labels,
            labeled, unlabeled, train_pool, pool_split,
            uncertainty=0.0, elapsed_ms=(time.perf_counter() - started) * 1e3,
        )
    ]
    acquisitions: list[np.ndarray] = []
    masks: list[tuple[np.ndarray, np.ndarray]] = []
    models = [model]

    for iteration in range(1, config.iterations + 1):
        if unlabeled.size < config.budget:
            records[-1].early_stop = True
            break
        tick = time.perf_counter()
        probs = predict_proba(model, features[unlabeled])
        doubts = doubt(probs)
        mask = _dispatch(config, strategy, features, labeled, unlabeled, doubts, probs, trial_seed, iteration)
        acquired = unlabeled[mask]
        uncertainty = uncertainty_score(doubts[mask])
        masks.append((unlabeled.copy(), mask))
        acquisitions.append(acquired)

        labeled = np.sort(np.concatenate([labeled, acquired]))
        unlabeled = unlabeled[~mask]
        model = _fit(config, features, labels, labeled, dataset.class_count, trial_seed, iteration)
        models.append(model)
        records.append(
            _measure(
                config, strategy, trial_seed, iteration, model, features, labels,
                labeled, unlabeled, train_pool, pool_split,
                uncertainty=uncertainty, elapsed_ms=(time.perf_counter() - tick) * 1e3,
            )
        )

    return TrialResult(
        strategy=strategy,
        trial=trial_seed,
        records=records,
        acquisitions=acquisitions,
        acquisition_masks=masks,
        dataset=dataset,
        split=pool_split,
        models=models,
    )


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run every configured strategy over ``config.trials`` trials.

    Trial ``t`` uses seed ``base_seed + t``, so adding trials extends a
    run without disturbing earlier ones. Summary rows aggregate each
    (strategy, iteration) cell across the trials that reached it.
    """
    records: list[MetricRecord] = []
    trials: dict[tuple[str, int], TrialResult] = {}
    for strategy in config.strategies:
        for t in range(config.trials):
            result = run_trial_detailed(config, config.base_seed + t, strategy)
            result.trial = t
            for rec in result.records:
                rec.trial = t
            trials[(strategy, t)] = result
            records.extend(result.records)
    return ExperimentResult(
        config=config,
        records=records,
        summary=summarize(records, config.strategies),
        trials=trials,
    )


def summarize(records, strategy_order) -> list[SummaryRecord]:
    """Aggregate records into per-(strategy, iteration) means and stds.

    Standard deviations use ``ddof=1`` and are 0.0 when only one trial
    reached the cell.
    """
    cells: dict[tuple[str, int], list[MetricRecord]] = {}
    for rec in records:
        cells.setdefault((rec.strategy, rec.iteration), []).append(rec)
    rows = []
    for strategy in strategy_order:
        iterations = sorted(it for (s, it) in cells if s == strategy)
        for iteration in iterations:
            group = cells[(strategy, iteration)]
            counts = {rec.labeled_count for rec in group}
            if len(counts) != 1:
                raise ValueError(
                    f"inconsistent labeled_count across trials for "
                    f"({strategy}, iteration {iteration}): {sorted(counts)}"
                )
            rows.append(
                SummaryRecord(
                    strategy=strategy,
                    iteration=iteration,
                    labeled_count=counts.pop(),
                    trials=len(group),
                    **_mean_std(group, "test_accuracy", "mean_test_accuracy", "std_test_accuracy"),
                    **_mean_std(group, "coreset_radius", "mean_coreset_radius", "std_coreset_radius"),
                    **_mean_std(group, "empirical_coreset_loss", "mean_coreset_loss", "std_coreset_loss"),
                    **_mean_std(group, "acquisition_uncertainty", "mean_uncertainty", "std_uncertainty"),
                )
            )
    return rows


def boundary_concentration(points) -> float:
    """Mean distance from 2-D points to the nearest coordinate axis.

    The quadrant dataset's class boundaries are exactly the axes, so lower
    values mean the points concentrate where classes meet.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"points must be a (n, 2) array, got shape {pts.shape}")
    if pts.shape[0] == 0:
        raise ValueError("boundary concentration of an empty set is undefined")
    return float(np.abs(pts).min(axis=1).mean())


def _fit(config, features, labels, labeled, class_count, trial_seed, iteration) -> Classifier:
    train_config = dataclasses.replace(
        config.train, seed=derive_seed(trial_seed, _ROLE_TRAIN, iteration)
    )
    return train(features[labeled], labels[labeled], train_config, class_count=class_count)


def _dispatch(config, strategy, features, labeled, unlabeled, doubts, probs, trial_seed, iteration):
    x_u = features[unlabeled]
    x_l = features[labeled]
    bs = config.distance_batch_size
    if strategy == "random":
        return random_acquisition(
            unlabeled.size, config.budget, derive_seed(trial_seed, _ROLE_STRATEGY, iteration)
        )
    if strategy == "coreset":
        return greedy_coreset(x_u, x_l, config.budget, bs)
    if strategy == "doubt-coreset":
        return doubted_coreset(x_u, x_l, doubts, config.budget, bs, config.scaling_mode)
    if strategy == "beam-coreset":
        mask, _ = beam_doubted_coreset(
            x_u, x_l, doubts, config.budget, bs, config.beam_width, config.scaling_mode
        )
        return mask
    if strategy == "least-confidence":
        return least_confidence_acquisition(doubts, config.budget)
    if strategy == "max-entropy":
        return max_entropy_acquisition(probs, config.budget)
    if strategy == "kmeans-closest":
        return kmeans_closest_coreset(
            x_u, x_l, config.budget, derive_seed(trial_seed, _ROLE_STRATEGY, iteration)
        )
    raise ValueError(f"unknown strategy {strategy!r}")


def _measure(
    config, strategy, trial_seed, iteration, model, features, labels,
    labeled, unlabeled, train_pool, pool_split, uncertainty, elapsed_ms,
) -> MetricRecord:
    if unlabeled.size:
        radius = core_set_radius(
            compute_min_delta(features[unlabeled], features[labeled], config.distance_batch_size)
        )
    else:
        radius = 0.0  # fully covered pool
    test_eval = evaluate(model, features[pool_split.test], labels[pool_split.test])
    pool_eval = evaluate(model, features[train_pool], labels[train_pool])
    return MetricRecord(
        strategy=strategy,
        trial=trial_seed,
        iteration=iteration,
        labeled_count=int(labeled.size),
        test_accuracy=test_eval.accuracy,
        coreset_radius=radius,
        empirical_coreset_loss=pool_eval.mean_cross_entropy,
        acquisition_uncertainty=float(uncertainty),
        wall_time_ms=float(elapsed_ms),
    )


def _mean_std(group, attr, mean_name, std_name):
    values = np.asarray([getattr(rec, attr) for rec in group], dtype=np.float64)
    std = float(values.std(ddof=1)) if values.size > 1 else 0.0
    return {mean_name: float(values.mean()), std_name: std}
