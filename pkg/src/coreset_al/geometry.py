"""Euclidean distance kernels and tiled minimum-distance computation.

Squared distances are expanded as ``|a|^2 + |b|^2 - 2 a.b`` so a tile of
``B x B`` pairs costs O(B^2 + B d) floats instead of materialising the
O(B^2 d) difference tensor. The expansion cancels catastrophically when two
rows are much closer together than they are to the origin (it can even go
a few ulp negative), so entries small relative to the row norms are
recomputed from the actual row differences before the square root is taken.
"""

from __future__ import annotations

import numpy as np

DEFAULT_BATCH_SIZE = 256

_EPS = np.finfo(np.float64).eps

# The expansion's absolute error in a squared distance is O(eps * (|a|^2 +
# |b|^2)). Entries at or below this fraction of that scale are recomputed
# exactly; entries above it keep a relative error below ~2e-10 after the
# square root, comfortably inside the 1e-9 the distance kernels promise.
_RECOMPUTE_FRACTION = 1e-4


def as_feature_matrix(data, name: str = "features") -> np.ndarray:
    """Coerce to a C-contiguous float64 matrix of shape (points, dims)."""
    arr = np.ascontiguousarray(data, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(
            f"{name} must be a 2-D array of shape (points, dims), got shape {arr.shape}"
        )
    if arr.shape[1] < 1:
        raise ValueError(f"{name} needs at least one feature dimension")
    return arr


def pairwise_distance(a, b) -> np.ndarray:
    """Dense Euclidean distance matrix between two row sets.

    Args:
        a: Array-like of shape (n, d).
        b: Array-like of shape (m, d).

    Returns:
        Array of shape (n, m); entry (i, j) is ``|a_i - b_j|_2``. An entry
        is exactly zero iff the two rows are identical.
    """
    a = as_feature_matrix(a, "a")
    b = as_feature_matrix(b, "b")
    if a.shape[1] != b.shape[1]:
        raise ValueError(
            f"dimension mismatch: a has {a.shape[1]} features, b has {b.shape[1]}"
        )
    sq_a = np.einsum("ij,ij->i", a, a)
    sq_b = np.einsum("ij,ij->i", b, b)
    sq = sq_a[:, None] + sq_b[None, :] - 2.0 * (a @ b.T)
    np.maximum(sq, 0.0, out=sq)
    _recompute_small_entries(sq, a, b, sq_a, sq_b)
    return np.sqrt(sq, out=sq)


def _recompute_small_entries(sq, a, b, sq_a, sq_b) -> None:
    # Entries small relative to the row norms carry the expansion's full
    # cancellation error (identical rows can come out at ~1e-6 after the
    # square root). Recomputing them from the row differences restores
    # naive accuracy there and makes identical rows exactly zero.
    scale = sq_a[:, None] + sq_b[None, :]
    suspect = sq <= _RECOMPUTE_FRACTION * scale
    if not suspect.any():
        return
    ii, jj = np.nonzero(suspect)
    diff = a[ii] - b[jj]
    sq[ii, jj] = np.einsum("ij,ij->i", diff, diff)


def compute_min_delta(x_u, x_l, batch_size: int = DEFAULT_BATCH_SIZE) -> np.ndarray:
    """Distance from each unlabeled point to its nearest labeled point.

    The computation is tiled: only one ``batch_size x batch_size`` distance
    block is live at a time, so peak working memory is independent of
    ``|x_u| * |x_l|``. The result does not depend on ``batch_size``.

    Args:
        x_u: Unlabeled rows, shape (n, d). May be empty.
        x_l: Labeled rows, shape (m, d). Must be nonempty.
        batch_size: Tile edge, at least 1.

    Returns:
        Float vector of length n; entry i is ``min_j |x_u[i] - x_l[j]|``.
    """
    x_u = as_feature_matrix(x_u, "x_u")
    x_l = as_feature_matrix(x_l, "x_l")
    if x_l.shape[0] == 0:
        raise ValueError("labeled pool is empty: nearest-labeled distances are undefined")
    if x_u.shape[1] != x_l.shape[1]:
        raise ValueError(
            f"dimension mismatch: x_u has {x_u.shape[1]} features, x_l has {x_l.shape[1]}"
        )
    batch_size = int(batch_size)
    if batch_size < 1:
        raise ValueError(f"batch_size must be at least 1, got {batch_size}")

    out = np.full(x_u.shape[0], np.inf)
    for i in range(0, x_u.shape[0], batch_size):
        rows = x_u[i : i + batch_size]
        best = out[i : i + batch_size]
        for j in range(0, x_l.shape[0], batch_size):
            tile = pairwise_distance(rows, x_l[j : j + batch_size])
            np.minimum(best, tile.min(axis=1), out=best)
    return out


def core_set_radius(min_delta) -> float:
    """Largest nearest-labeled distance over the pool (the covering radius)."""
    arr = np.asarray(min_delta, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"min_delta must be a 1-D vector, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("no unlabeled points: core-set radius is undefined")
    return float(arr.max())
