"""Synthetic datasets and pool splitting.

Two desk-scale families: uniform points labeled by quadrant (a four-class
problem whose Bayes boundary is the coordinate axes) and isotropic Gaussian
blobs on a ring. Splitting carves a dataset into disjoint test, initially
labeled, and unlabeled index sets; the split depends only on the dataset
size and its own seed, never on the acquisition strategy, so strategies can
be compared on identical pools.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from coreset_al.geometry import as_feature_matrix
from coreset_al.seeding import make_rng


@dataclass
class LabeledDataset:
    """Feature rows with integer labels in ``[0, class_count)``."""

    features: np.ndarray
    labels: np.ndarray
    class_count: int

    def __post_init__(self):
        self.features = as_feature_matrix(self.features, "features")
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if not np.isfinite(self.features).all():
            raise ValueError("features must be finite")
        if self.labels.ndim != 1 or self.labels.shape[0] != self.features.shape[0]:
            raise ValueError(
                f"labels must be a vector of length {self.features.shape[0]}, "
                f"got shape {self.labels.shape}"
            )
        if self.class_count < 2:
            raise ValueError(f"class_count must be at least 2, got {self.class_count}")
        if self.labels.size and (
            self.labels.min() < 0 or self.labels.max() >= self.class_count
        ):
            raise ValueError("labels must lie in [0, class_count)")

    def __len__(self) -> int:
        return self.features.shape[0]


def quadrant_label(points) -> np.ndarray:
    """Quadrant index of each 2-D point.

    Counter-clockwise from the upper-right: (+,+) is 0, (-,+) is 1, (-,-) is
    2, (+,-) is 3. A coordinate exactly on an axis counts as nonnegative.
    """
    pts = as_feature_matrix(points, "points")
    if pts.shape[1] != 2:
        raise ValueError(f"quadrant labels need 2-D points, got {pts.shape[1]} dims")
    right = pts[:, 0] >= 0.0
    top = pts[:, 1] >= 0.0
    labels = np.empty(pts.shape[0], dtype=np.int64)
    labels[right & top] = 0
    labels[~right & top] = 1
    labels[~right & ~top] = 2
    labels[right & ~top] = 3
    return labels


def gen_quadrants(n: int, seed: int) -> LabeledDataset:
    """Uniform points on [-1, 1]^2 labeled by quadrant."""
    n = int(n)
    if n < 4:
        raise ValueError(f"quadrant dataset needs at least 4 points, got {n}")
    features = make_rng(seed).uniform(-1.0, 1.0, size=(n, 2))
    return LabeledDataset(features, quadrant_label(features), class_count=4)


def gen_gaussian_clusters(
    cluster_centers,
    std: float,
    per_cluster: int,
    labels_per_cluster,
    seed: int,
) -> LabeledDataset:
    """Isotropic Gaussian blobs, one per center, each carrying a class label.

    Args:
        cluster_centers: Array-like of shape (k, d).
        std: Common standard deviation, positive.
        per_cluster: Points per blob, at least 1.
        labels_per_cluster: Class of each blob, length k.
        seed: Noise seed; blobs are drawn in center order from one stream.

    Returns:
        A dataset of ``k * per_cluster`` rows, blob-ordered.
    """
    centers = as_feature_matrix(cluster_centers, "cluster_centers")
    labels = np.asarray(labels_per_cluster, dtype=np.int64)
    if labels.ndim != 1 or labels.shape[0] != centers.shape[0]:
        raise ValueError(
            f"labels_per_cluster must have one entry per center "
            f"({centers.shape[0]}), got shape {labels.shape}"
        )
    if std <= 0.0:
        raise ValueError(f"std must be positive, got {std}")
    per_cluster = int(per_cluster)
    if per_cluster < 1:
        raise ValueError(f"per_cluster must be at least 1, got {per_cluster}")
    if labels.min() < 0:
        raise ValueError("cluster labels must be nonnegative")

    rng = make_rng(seed)
    blobs = [
        center + std * rng.standard_normal((per_cluster, centers.shape[1]))
        for center in centers
    ]
    features = np.concatenate(blobs, axis=0)
    row_labels = np.repeat(labels, per_cluster)
    return LabeledDataset(features, row_labels, class_count=max(2, int(labels.max()) + 1))


def default_cluster_layout(
    class_count: int = 4,
    clusters_per_class: int = 2,
    radius: float = 5.0,
):
    """Evenly spaced ring of cluster centers with contiguous class wedges.

    Centers sit at angles ``2 pi k / (class_count * clusters_per_class)``
    and consecutive ``clusters_per_class`` centers share a class, so each
    class occupies one contiguous arc and a linear-in-features classifier
    can separate the wedges.

    Returns:
        ``(centers, labels_per_cluster)``.
    """
    if class_count < 2:
        raise ValueError(f"class_count must be at least 2, got {class_count}")
    if clusters_per_class < 1:
        raise ValueError(f"clusters_per_class must be at least 1, got {clusters_per_class}")
    total = class_count * clusters_per_class
    angles = 2.0 * np.pi * np.arange(total) / total
    centers = radius * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    labels = np.arange(total) // clusters_per_class
    return centers, labels


def make_cluster_dataset(
    per_cluster: int,
    std: float,
    seed: int,
    class_count: int = 4,
    clusters_per_class: int = 2,
    radius: float = 5.0,
) -> LabeledDataset:
    """Ring-of-blobs dataset using :func:`default_cluster_layout`."""
    centers, labels = default_cluster_layout(class_count, clusters_per_class, radius)
    return gen_gaussian_clusters(centers, std, per_cluster, labels, seed)


@dataclass
class SplitSpec:
    """How to carve a dataset: test fraction first, then the labeled seed set.

    ``initial_labeled`` points are drawn uniformly from the non-test
    remainder; everything else starts unlabeled.
    """

    initial_labeled: int
    test_fraction: float = 0.25
    seed: int = 0

    def __post_init__(self):
        if self.initial_labeled < 1:
            raise ValueError(
                f"initial_labeled must be at least 1, got {self.initial_labeled}"
            )
        if not 0.0 < self.test_fraction < 1.0:
            raise ValueError(
                f"test_fraction must lie in (0, 1), got {self.test_fraction}"
            )


@dataclass
class PoolSplit:
    """Disjoint sorted index sets covering the whole dataset."""

    labeled: np.ndarray
    unlabeled: np.ndarray
    test: np.ndarray


def holdout_size(n: int, test_fraction: float) -> int:
    """Number of test rows carved from ``n`` (shared with config validation)."""
    return int(round(n * test_fraction))


def split(dataset: LabeledDataset, spec: SplitSpec) -> PoolSplit:
    """Partition dataset indices into labeled / unlabeled / test sets.

    One permutation of the rows is drawn from ``spec.seed``; the first
    ``holdout_size`` become the test set and the next ``initial_labeled`` the
    seed labels, which makes both draws uniform without replacement.
    """
    n = len(dataset)
    n_test = holdout_size(n, spec.test_fraction)
    if n_test < 1:
        raise ValueError(f"test_fraction {spec.test_fraction} leaves no test rows for n={n}")
    if spec.initial_labeled > n - n_test:
        raise ValueError(
            f"initial_labeled {spec.initial_labeled} exceeds the train pool of "
            f"{n - n_test} (n={n}, test={n_test})"
        )
    perm = make_rng(spec.seed).permutation(n)
    return PoolSplit(
        labeled=np.sort(perm[n_test : n_test + spec.initial_labeled]),
        unlabeled=np.sort(perm[n_test + spec.initial_labeled :]),
        test=np.sort(perm[:n_test]),
    )
