"""CSV formats shared by the library and the command line.

All files are plain comma-separated text with a mandatory header row and
``\n`` line endings. Floats are written with shortest-roundtrip precision,
so rerunning a command with identical inputs reproduces files byte for
byte. Readers validate headers strictly and reject non-finite values.
"""

from __future__ import annotations

import csv

import numpy as np

from coreset_al.data import LabeledDataset, PoolSplit

ROLE_LABELED = "labeled"
ROLE_UNLABELED = "unlabeled"
ROLE_TEST = "test"
_ROLES = (ROLE_LABELED, ROLE_UNLABELED, ROLE_TEST)


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(float(value))


def _open_writer(path):
    handle = open(path, "w", newline="")
    return handle, csv.writer(handle, lineterminator="\n")


def _feature_header(dims: int) -> list[str]:
    return [f"f{i}" for i in range(dims)]


def write_feature_csv(path, features) -> None:
    """Feature matrix with header ``f0,...,f{d-1}``."""
    arr = np.asarray(features, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"features must be 2-D, got shape {arr.shape}")
    handle, writer = _open_writer(path)
    with handle:
        writer.writerow(_feature_header(arr.shape[1]))
        for row in arr:
            writer.writerow([_fmt(v) for v in row])


def read_feature_csv(path) -> np.ndarray:
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or header != _feature_header(len(header)):
            raise ValueError(f"{path}: expected a 'f0,f1,...' header, got {header}")
        rows = [_float_row(path, row, len(header)) for row in reader]
    arr = np.asarray(rows, dtype=np.float64).reshape(len(rows), len(header))
    if not np.isfinite(arr).all():
        raise ValueError(f"{path}: features must be finite")
    return arr


def write_dataset_csv(path, dataset: LabeledDataset) -> None:
    """Labeled dataset with header ``f0,...,f{d-1},label``."""
    handle, writer = _open_writer(path)
    with handle:
        writer.writerow(_feature_header(dataset.features.shape[1]) + ["label"])
        for row, label in zip(dataset.features, dataset.labels):
            writer.writerow([_fmt(v) for v in row] + [_fmt(label)])


def read_dataset_csv(path, class_count: int | None = None) -> LabeledDataset:
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if (
            header is None
            or len(header) < 2
            or header[-1] != "label"
            or header[:-1] != _feature_header(len(header) - 1)
        ):
            raise ValueError(f"{path}: expected a 'f0,...,label' header, got {header}")
        dims = len(header) - 1
        feats, labels = [], []
        for row in reader:
            if len(row) != dims + 1:
                raise ValueError(f"{path}: row has {len(row)} fields, expected {dims + 1}")
            feats.append([float(v) for v in row[:-1]])
            labels.append(int(row[-1]))
    features = np.asarray(feats, dtype=np.float64).reshape(len(feats), dims)
    label_arr = np.asarray(labels, dtype=np.int64)
    if class_count is None:
        class_count = max(2, int(label_arr.max()) + 1) if label_arr.size else 2
    return LabeledDataset(features, label_arr, class_count)


def write_selection_csv(path, indices, selected) -> None:
    """Selection mask rows ``index,selected`` (one row per pool point)."""
    indices = np.asarray(indices, dtype=np.int64)
    bits = np.asarray(selected, dtype=bool)
    if indices.shape != bits.shape or indices.ndim != 1:
        raise ValueError("indices and selected must be matching 1-D arrays")
    handle, writer = _open_writer(path)
    with handle:
        writer.writerow(["index", "selected"])
        for idx, bit in zip(indices, bits):
            writer.writerow([_fmt(idx), _fmt(bit)])


def read_selection_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Returns ``(indices, selected)`` from a selection mask file."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["index", "selected"]:
            raise ValueError(f"{path}: expected header 'index,selected', got {header}")
        indices, bits = [], []
        for row in reader:
            if len(row) != 2:
                raise ValueError(f"{path}: row has {len(row)} fields, expected 2")
            indices.append(int(row[0]))
            if row[1] not in ("0", "1"):
                raise ValueError(f"{path}: selected must be 0 or 1, got {row[1]!r}")
            bits.append(row[1] == "1")
    return np.asarray(indices, dtype=np.int64), np.asarray(bits, dtype=bool)


def write_split_csv(path, split: PoolSplit) -> None:
    """Role per dataset row: ``index,role`` ordered by index."""
    triples = (
        [(int(i), ROLE_LABELED) for i in split.labeled]
        + [(int(i), ROLE_UNLABELED) for i in split.unlabeled]
        + [(int(i), ROLE_TEST) for i in split.test]
    )
    triples.sort()
    handle, writer = _open_writer(path)
    with handle:
        writer.writerow(["index", "role"])
        for idx, role in triples:
            writer.writerow([str(idx), role])


def read_split_csv(path) -> PoolSplit:
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["index", "role"]:
            raise ValueError(f"{path}: expected header 'index,role', got {header}")
        buckets = {role: [] for role in _ROLES}
        for row in reader:
            if len(row) != 2:
                raise ValueError(f"{path}: row has {len(row)} fields, expected 2")
            if row[1] not in buckets:
                raise ValueError(f"{path}: unknown role {row[1]!r}")
            buckets[row[1]].append(int(row[0]))
    return PoolSplit(
        labeled=np.asarray(sorted(buckets[ROLE_LABELED]), dtype=np.int64),
        unlabeled=np.asarray(sorted(buckets[ROLE_UNLABELED]), dtype=np.int64),
        test=np.asarray(sorted(buckets[ROLE_TEST]), dtype=np.int64),
    )


def write_beam_csv(path, ranked, index_map=None) -> None:
    """Ranked beam output: ``rank,uncertainty_score,indices``.

    ``indices`` is the selected set in ascending order, joined by
    semicolons. ``index_map`` translates working-pool positions back to
    original row ids when the beam ran on a subset of a larger file.
    """
    handle, writer = _open_writer(path)
    with handle:
        writer.writerow(["rank", "uncertainty_score", "indices"])
        for rank, cand in enumerate(ranked, start=1):
            chosen = list(cand.selected)
            if index_map is not None:
                mapping = np.asarray(index_map, dtype=np.int64)
                chosen = [int(mapping[i]) for i in chosen]
            joined = ";".join(str(i) for i in sorted(chosen))
            writer.writerow([str(rank), _fmt(cand.score), joined])


def write_bounds_csv(path, rows) -> None:
    """Bound curve rows: ``z,delta,beta_lower,beta_lower_clamped,delta_star,quadratic_regime``."""
    handle, writer = _open_writer(path)
    with handle:
        writer.writerow(
            ["z", "delta", "beta_lower", "beta_lower_clamped", "delta_star", "quadratic_regime"]
        )
        for row in rows:
            writer.writerow(
                [
                    _fmt(row.z),
                    _fmt(row.delta),
                    _fmt(row.beta_lower),
                    _fmt(row.beta_lower_clamped),
                    _fmt(row.delta_star),
                    _fmt(row.quadratic_regime),
                ]
            )


METRICS_HEADER = [
    "strategy",
    "trial",
    "iteration",
    "labeled_count",
    "test_accuracy",
    "coreset_radius",
    "empirical_coreset_loss",
    "acquisition_uncertainty",
    "early_stop",
]


def write_metrics_csv(path, records) -> None:
    """Per-(strategy, trial, iteration) metric rows.

    Wall-clock timings tracked in memory are deliberately not written:
    output files must be byte-identical across reruns of the same seed.
    """
    handle, writer = _open_writer(path)
    with handle:
        writer.writerow(METRICS_HEADER)
        for rec in records:
            writer.writerow(
                [
                    rec.strategy,
                    _fmt(rec.trial),
                    _fmt(rec.iteration),
                    _fmt(rec.labeled_count),
                    _fmt(rec.test_accuracy),
                    _fmt(rec.coreset_radius),
                    _fmt(rec.empirical_coreset_loss),
                    _fmt(rec.acquisition_uncertainty),
                    _fmt(rec.early_stop),
                ]
            )


SUMMARY_HEADER = [
    "strategy",
    "iteration",
    "labeled_count",
    "trials",
    "mean_test_accuracy",
    "std_test_accuracy",
    "mean_coreset_radius",
    "std_coreset_radius",
    "mean_coreset_loss",
    "std_coreset_loss",
    "mean_uncertainty",
    "std_uncertainty",
]


def write_summary_csv(path, rows) -> None:
    """Across-trial aggregates, one row per (strategy, iteration)."""
    handle, writer = _open_writer(path)
    with handle:
        writer.writerow(SUMMARY_HEADER)
        for row in rows:
            writer.writerow(
                [
                    row.strategy,
                    _fmt(row.iteration),
                    _fmt(row.labeled_count),
                    _fmt(row.trials),
                    _fmt(row.mean_test_accuracy),
                    _fmt(row.std_test_accuracy),
                    _fmt(row.mean_coreset_radius),
                    _fmt(row.std_coreset_radius),
                    _fmt(row.mean_coreset_loss),
                    _fmt(row.std_coreset_loss),
                    _fmt(row.mean_uncertainty),
                    _fmt(row.std_uncertainty),
                ]
            )


def _float_row(path, row, width):
    if len(row) != width:
        raise ValueError(f"{path}: row has {len(row)} fields, expected {width}")
    return [float(v) for v in row]
