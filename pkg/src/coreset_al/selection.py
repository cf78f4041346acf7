"""Acquisition strategies over an unlabeled pool.

Every strategy is a pure function returning a boolean selection mask over
the rows of the unlabeled feature matrix (some return extras alongside).
Arg-max and arg-min ties always resolve to the lowest index, so a strategy
run is reproducible bit for bit.

The doubt-weighted variants maintain two parallel vectors over the shrinking
working pool: the plain running minimum distance (used for radius metrics)
and the doubt-scaled working distance that drives the arg-max. After a point
is acquired it is spliced out of the working pool, and the scaled distances
from it to the survivors are folded into the running minima. Two scalings
are available for that fold-in: ``acquired-point`` multiplies the fresh
distances by the acquired point's own doubt, ``candidate-point`` by each
surviving candidate's doubt.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from coreset_al.geometry import (
    DEFAULT_BATCH_SIZE,
    as_feature_matrix,
    compute_min_delta,
    pairwise_distance,
)
from coreset_al.seeding import make_rng

ACQUIRED_POINT = "acquired-point"
CANDIDATE_POINT = "candidate-point"
SCALING_MODES = (ACQUIRED_POINT, CANDIDATE_POINT)

#: Exhaustive search is capped at this many candidate subsets.
OPTIMAL_SUBSET_LIMIT = 1_000_000

# Doubt of exactly 1 would send the uncertainty score's log to -inf.
_DOUBT_CEILING = 1.0 - 1e-12


def doubt(probabilities) -> np.ndarray:
    """Per-row doubt ``1 - max_y P(y|x)`` of a probability matrix.

    Rows must be normalised to 1 within 1e-6. The result lies in
    ``[0, 1 - 1/C]`` for C columns.
    """
    rows = _as_probability_rows(probabilities)
    return 1.0 - rows.max(axis=1)


def uncertainty_score(selected_doubts) -> float:
    """Score of a selection: ``-mean(log(1 - I))`` over its doubts.

    Higher means the batch sits in regions the model is less sure about.
    Zero doubt everywhere gives a score of exactly 0; any entry at or above
    1 is rejected because its log term would be infinite.
    """
    arr = np.asarray(selected_doubts, dtype=np.float64).ravel()
    if arr.size == 0:
        raise ValueError("uncertainty score needs at least one selected point")
    if np.any(arr < 0.0) or np.any(arr >= 1.0):
        raise ValueError("doubt entries must lie in [0, 1)")
    clipped = np.minimum(arr, _DOUBT_CEILING)
    return float(-np.mean(np.log1p(-clipped)))


def greedy_coreset(x_u, x_l, budget, batch_size: int = DEFAULT_BATCH_SIZE) -> np.ndarray:
    """Greedy max-min core-set selection mask (see :func:`greedy_coreset_sequence`)."""
    x_u = as_feature_matrix(x_u, "x_u")
    order = greedy_coreset_sequence(x_u, x_l, budget, batch_size)
    return _mask_from(order, x_u.shape[0])


def greedy_coreset_sequence(x_u, x_l, budget, batch_size: int = DEFAULT_BATCH_SIZE) -> list[int]:
    """Ordered pool indices acquired by the greedy max-min-distance rule.

    Each step acquires the point farthest from everything labeled so far
    (initial labels plus earlier acquisitions) and folds its distances into
    the running minima. The greedy covering radius is within a factor two
    of the best achievable by any subset of the same size.

    Args:
        x_u: Unlabeled rows, shape (n, d).
        x_l: Labeled rows, shape (m, d), nonempty.
        budget: Number of points to acquire, ``0 <= budget <= n``.
        batch_size: Tile edge for the distance kernels.

    Returns:
        List of ``budget`` distinct indices into ``x_u``, in acquisition order.
    """
    x_u = as_feature_matrix(x_u, "x_u")
    budget = _check_budget(budget, x_u.shape[0])
    if budget == 0:
        return []
    min_d = compute_min_delta(x_u, x_l, batch_size)
    order: list[int] = []
    for _ in range(budget):
        pick = int(np.argmax(min_d))
        order.append(pick)
        fresh = pairwise_distance(x_u, x_u[pick : pick + 1]).ravel()
        np.minimum(min_d, fresh, out=min_d)
        min_d[pick] = -1.0  # never re-pick, even when the whole pool is covered
    return order


def doubted_coreset(
    x_u,
    x_l,
    doubt,
    budget,
    batch_size: int = DEFAULT_BATCH_SIZE,
    scaling_mode: str = ACQUIRED_POINT,
) -> np.ndarray:
    """Doubt-weighted core-set selection mask (see :func:`doubted_coreset_sequence`)."""
    x_u = as_feature_matrix(x_u, "x_u")
    order = doubted_coreset_sequence(x_u, x_l, doubt, budget, batch_size, scaling_mode)
    return _mask_from(order, x_u.shape[0])


def doubted_coreset_sequence(
    x_u,
    x_l,
    doubt,
    budget,
    batch_size: int = DEFAULT_BATCH_SIZE,
    scaling_mode: str = ACQUIRED_POINT,
) -> list[int]:
    """Ordered pool indices acquired by the doubt-weighted greedy rule.

    Identical to the plain greedy rule except that working distances are
    multiplied by doubt, which drags acquisitions toward regions where the
    classifier is unsure. With uniform doubt the two rules pick the same
    sequence. Doubt entries must lie in ``[0, 1)``.
    """
    x_u = as_feature_matrix(x_u, "x_u")
    doubts = _as_doubt(doubt, x_u.shape[0])
    budget = _check_budget(budget, x_u.shape[0])
    _check_scaling_mode(scaling_mode)
    state = _initial_state(x_u, x_l, doubts, batch_size)
    order: list[int] = []
    for _ in range(budget):
        pick = int(np.argmax(state.min_hat_delta))
        order.append(int(state.index_map[pick]))
        state = _acquire(state, pick, scaling_mode)
    return order


@dataclass
class _PoolState:
    """Working pool of a doubt-weighted run after zero or more splices."""

    features: np.ndarray  # remaining unlabeled rows
    index_map: np.ndarray  # original pool position of each remaining row
    min_delta: np.ndarray  # unscaled running min distance (metrics only)
    min_hat_delta: np.ndarray  # doubt-scaled working distance (drives arg-max)
    doubts: np.ndarray  # doubt of each remaining row


def _initial_state(x_u, x_l, doubts, batch_size) -> _PoolState:
    min_d = compute_min_delta(x_u, x_l, batch_size)
    return _PoolState(
        features=x_u,
        index_map=np.arange(x_u.shape[0]),
        min_delta=min_d.copy(),
        min_hat_delta=min_d * doubts,
        doubts=doubts,
    )


def _acquire(state: _PoolState, pick: int, scaling_mode: str) -> _PoolState:
    """Splice row ``pick`` out of the pool and fold its distances into the minima."""
    acquired = state.features[pick]
    acquired_doubt = state.doubts[pick]
    feats = np.delete(state.features, pick, axis=0)
    index_map = np.delete(state.index_map, pick)
    min_d = np.delete(state.min_delta, pick)
    min_hat = np.delete(state.min_hat_delta, pick)
    doubts = np.delete(state.doubts, pick)
    if feats.shape[0]:
        fresh = pairwise_distance(feats, acquired[None, :]).ravel()
        scale = acquired_doubt if scaling_mode == ACQUIRED_POINT else doubts
        np.minimum(min_hat, fresh * scale, out=min_hat)
        np.minimum(min_d, fresh, out=min_d)
    return _PoolState(feats, index_map, min_d, min_hat, doubts)


@dataclass
class BeamCandidate:
    """One partial (or final) batch configuration tracked by the beam.

    ``selected`` holds original pool indices in acquisition order; ``state``
    is the surviving working pool; ``score`` is the uncertainty score of the
    selection so far (0.0 for the empty selection).
    """

    selected: tuple[int, ...]
    state: _PoolState
    score: float

    @property
    def peak_min_hat_delta(self) -> float:
        if self.state.min_hat_delta.size == 0:
            return 0.0
        return float(self.state.min_hat_delta.max())


def beam_doubted_coreset(
    x_u,
    x_l,
    doubt,
    budget,
    batch_size: int = DEFAULT_BATCH_SIZE,
    beam_width: int = 1,
    scaling_mode: str = ACQUIRED_POINT,
) -> tuple[np.ndarray, list[BeamCandidate]]:
    """Beam search over doubt-weighted batch configurations.

    Instead of committing to the single arg-max at each step, the beam keeps
    the ``beam_width`` best partial selections. Every survivor expands its
    top ``beam_width`` working distances, duplicates that select the same
    set of points (in a different order) are merged, and the pool is pruned
    back to ``beam_width`` by uncertainty score (higher is better; ties
    break toward the smaller peak working distance, then the
    lexicographically smaller selection).

    Args:
        x_u: Unlabeled rows, shape (n, d).
        x_l: Labeled rows, nonempty.
        doubt: Doubt per unlabeled row, entries in ``[0, 1)``.
        budget: Points per configuration, ``0 <= budget <= n``.
        batch_size: Tile edge for the distance kernels.
        beam_width: Number of configurations kept per step, at least 1.
        scaling_mode: ``"acquired-point"`` or ``"candidate-point"``.

    Returns:
        ``(mask, ranked)`` where ``mask`` selects the top-ranked
        configuration and ``ranked`` lists the surviving candidates by
        decreasing uncertainty score. With ``beam_width=1`` the mask equals
        the plain doubt-weighted selection exactly.
    """
    x_u = as_feature_matrix(x_u, "x_u")
    doubts = _as_doubt(doubt, x_u.shape[0])
    budget = _check_budget(budget, x_u.shape[0])
    _check_scaling_mode(scaling_mode)
    beam_width = int(beam_width)
    if beam_width < 1:
        raise ValueError(f"beam_width must be at least 1, got {beam_width}")

    beam = [BeamCandidate((), _initial_state(x_u, x_l, doubts, batch_size), 0.0)]
    for _ in range(budget):
        pooled: dict[frozenset, BeamCandidate] = {}
        for cand in beam:
            expand = np.argsort(-cand.state.min_hat_delta, kind="stable")[:beam_width]
            for pick in expand:
                original = int(cand.state.index_map[pick])
                selected = cand.selected + (original,)
                key = frozenset(selected)
                if key in pooled:
                    # same configuration reached through a different order;
                    # the working state is order-independent, so keep the first
                    continue
                pooled[key] = BeamCandidate(
                    selected=selected,
                    state=_acquire(cand.state, int(pick), scaling_mode),
                    score=uncertainty_score(doubts[list(selected)]),
                )
        beam = sorted(pooled.values(), key=_beam_rank_key)[:beam_width]
    ranked = sorted(beam, key=_beam_rank_key)
    return _mask_from(ranked[0].selected, x_u.shape[0]), ranked


def _beam_rank_key(cand: BeamCandidate):
    return (-cand.score, cand.peak_min_hat_delta, tuple(sorted(cand.selected)))


def random_acquisition(pool_size, budget, seed) -> np.ndarray:
    """Uniform sample of ``budget`` distinct pool indices, as a mask."""
    pool_size = int(pool_size)
    budget = _check_budget(budget, pool_size)
    picks = make_rng(seed).choice(pool_size, size=budget, replace=False)
    return _mask_from(picks, pool_size)


def least_confidence_acquisition(doubt, budget) -> np.ndarray:
    """Mask of the ``budget`` highest-doubt points (ties toward lower index)."""
    arr = np.asarray(doubt, dtype=np.float64).ravel()
    budget = _check_budget(budget, arr.shape[0])
    order = np.argsort(-arr, kind="stable")[:budget]
    return _mask_from(order, arr.shape[0])


def max_entropy_acquisition(probabilities, budget) -> np.ndarray:
    """Mask of the ``budget`` highest-entropy prediction rows.

    Entropy uses the convention ``0 * log 0 = 0``; rows must be normalised.
    """
    rows = _as_probability_rows(probabilities)
    budget = _check_budget(budget, rows.shape[0])
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(rows > 0.0, rows * np.log(rows), 0.0)
    entropy = -terms.sum(axis=1)
    order = np.argsort(-entropy, kind="stable")[:budget]
    return _mask_from(order, rows.shape[0])


def optimal_coreset(x_u, x_l, budget) -> tuple[np.ndarray, float]:
    """Exhaustively optimal core-set of ``budget`` points and its radius.

    Tries every subset, so it is only usable when ``C(n, budget)`` stays at
    or below :data:`OPTIMAL_SUBSET_LIMIT`. Ties keep the first subset in
    lexicographic order.

    Returns:
        ``(mask, radius)`` with ``radius`` the smallest achievable covering
        radius over the pool.
    """
    x_u = as_feature_matrix(x_u, "x_u")
    n = x_u.shape[0]
    if n == 0:
        raise ValueError("optimal core-set needs a nonempty unlabeled pool")
    budget = _check_budget(budget, n)
    total = math.comb(n, budget)
    if total > OPTIMAL_SUBSET_LIMIT:
        raise ValueError(
            f"exhaustive search over C({n}, {budget}) = {total} subsets exceeds "
            f"the limit of {OPTIMAL_SUBSET_LIMIT}"
        )
    to_labeled = compute_min_delta(x_u, x_l)
    among = pairwise_distance(x_u, x_u)
    best_radius = math.inf
    best: tuple[int, ...] = ()
    for subset in itertools.combinations(range(n), budget):
        if subset:
            covered = np.minimum(to_labeled, among[:, subset].min(axis=1))
        else:
            covered = to_labeled
        radius = float(covered.max())
        if radius < best_radius:
            best_radius = radius
            best = subset
    return _mask_from(best, n), best_radius


def kmeans_closest_coreset(x_u, x_l, budget, seed, max_iters: int = 100) -> np.ndarray:
    """Pool points nearest to ``budget`` K-means centers, as a mask.

    Lloyd iterations run on the unlabeled pool alone (``x_l`` is accepted
    for signature uniformity with the other strategies and only checked for
    dimension). Centers are initialised by a uniform sample of distinct pool
    points; a cluster that empties keeps its previous center. Each center
    then claims its nearest not-yet-claimed pool point, in center order.
    """
    x_u = as_feature_matrix(x_u, "x_u")
    if x_l is not None:
        x_l = as_feature_matrix(x_l, "x_l")
        if x_u.shape[1] != x_l.shape[1]:
            raise ValueError(
                f"dimension mismatch: x_u has {x_u.shape[1]} features, "
                f"x_l has {x_l.shape[1]}"
            )
    n = x_u.shape[0]
    budget = _check_budget(budget, n)
    if budget == 0:
        return _mask_from([], n)

    rng = make_rng(seed)
    centers = x_u[rng.choice(n, size=budget, replace=False)].copy()
    assign = np.full(n, -1)
    for _ in range(int(max_iters)):
        new_assign = pairwise_distance(x_u, centers).argmin(axis=1)
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for k in range(budget):
            members = x_u[assign == k]
            if members.shape[0]:
                centers[k] = members.mean(axis=0)

    taken = np.zeros(n, dtype=bool)
    chosen = []
    dist = pairwise_distance(x_u, centers)
    for k in range(budget):
        column = dist[:, k].copy()
        column[taken] = np.inf
        pick = int(np.argmin(column))
        taken[pick] = True
        chosen.append(pick)
    return _mask_from(chosen, n)


def _mask_from(indices, pool_size: int) -> np.ndarray:
    mask = np.zeros(pool_size, dtype=bool)
    mask[np.asarray(list(indices), dtype=np.intp)] = True
    return mask


def _check_budget(budget, pool_size: int) -> int:
    budget = int(budget)
    if budget < 0:
        raise ValueError(f"budget must be nonnegative, got {budget}")
    if budget > pool_size:
        raise ValueError(f"budget {budget} exceeds the unlabeled pool of {pool_size}")
    return budget


def _check_scaling_mode(scaling_mode: str) -> None:
    if scaling_mode not in SCALING_MODES:
        raise ValueError(
            f"unknown scaling_mode {scaling_mode!r}; expected one of {SCALING_MODES}"
        )


def _as_doubt(doubt, expected_len: int) -> np.ndarray:
    arr = np.asarray(doubt, dtype=np.float64).ravel()
    if arr.shape[0] != expected_len:
        raise ValueError(
            f"doubt has {arr.shape[0]} entries for a pool of {expected_len}"
        )
    if np.any(arr < 0.0) or np.any(arr >= 1.0):
        raise ValueError("doubt entries must lie in [0, 1)")
    return arr


def _as_probability_rows(probabilities) -> np.ndarray:
    rows = np.asarray(probabilities, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] < 1:
        raise ValueError(
            f"probabilities must be a 2-D (points, classes) matrix, got shape {rows.shape}"
        )
    if np.any(rows < 0.0) or np.any(rows > 1.0):
        raise ValueError("probability entries must lie in [0, 1]")
    sums = rows.sum(axis=1)
    bad = np.abs(sums - 1.0) > 1e-6
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise ValueError(f"probability row {k} sums to {sums[k]!r}, expected 1 within 1e-6")
    return rows
