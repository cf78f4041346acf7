"""CSV format tests: roundtrips, strict headers, byte-level determinism."""

import numpy as np
import pytest

from coreset_al import dataio
from coreset_al.data import LabeledDataset, PoolSplit
from coreset_al.harness import MetricRecord, SummaryRecord
from coreset_al.selection import beam_doubted_coreset


def test_feature_csv_roundtrip_exact(tmp_path):
    rng = np.random.default_rng(0)
    features = rng.normal(size=(17, 5)) * 1e3
    path = tmp_path / "features.csv"
    dataio.write_feature_csv(path, features)
    assert path.read_text().splitlines()[0] == "f0,f1,f2,f3,f4"
    back = dataio.read_feature_csv(path)
    assert np.array_equal(back, features)  # shortest-roundtrip floats are exact


def test_feature_csv_write_is_deterministic(tmp_path):
    features = np.random.default_rng(1).normal(size=(8, 3))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    dataio.write_feature_csv(a, features)
    dataio.write_feature_csv(b, features)
    assert a.read_bytes() == b.read_bytes()


def test_feature_csv_rejects_wrong_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y\n1,2\n")
    with pytest.raises(ValueError):
        dataio.read_feature_csv(path)


def test_feature_csv_rejects_nonfinite(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("f0\nnan\n")
    with pytest.raises(ValueError):
        dataio.read_feature_csv(path)


def test_dataset_csv_roundtrip(tmp_path):
    ds = LabeledDataset(np.array([[0.5, -1.0], [2.0, 3.0]]), np.array([1, 0]), 2)
    path = tmp_path / "ds.csv"
    dataio.write_dataset_csv(path, ds)
    assert path.read_text().splitlines()[0] == "f0,f1,label"
    back = dataio.read_dataset_csv(path)
    assert np.array_equal(back.features, ds.features)
    assert np.array_equal(back.labels, ds.labels)


def test_selection_csv_roundtrip(tmp_path):
    indices = np.array([4, 7, 9, 12])
    bits = np.array([True, False, True, False])
    path = tmp_path / "mask.csv"
    dataio.write_selection_csv(path, indices, bits)
    lines = path.read_text().splitlines()
    assert lines[0] == "index,selected"
    assert lines[1] == "4,1"
    got_idx, got_bits = dataio.read_selection_csv(path)
    assert np.array_equal(got_idx, indices)
    assert np.array_equal(got_bits, bits)


def test_selection_csv_rejects_nonbinary(tmp_path):
    path = tmp_path / "mask.csv"
    path.write_text("index,selected\n0,2\n")
    with pytest.raises(ValueError):
        dataio.read_selection_csv(path)


def test_split_csv_roundtrip(tmp_path):
    sp = PoolSplit(
        labeled=np.array([1, 4]), unlabeled=np.array([0, 2, 5]), test=np.array([3])
    )
    path = tmp_path / "split.csv"
    dataio.write_split_csv(path, sp)
    lines = path.read_text().splitlines()
    assert lines[0] == "index,role"
    assert lines[1] == "0,unlabeled" and lines[4] == "3,test"
    back = dataio.read_split_csv(path)
    assert np.array_equal(back.labeled, sp.labeled)
    assert np.array_equal(back.unlabeled, sp.unlabeled)
    assert np.array_equal(back.test, sp.test)


def test_beam_csv_format(tmp_path):
    rng = np.random.default_rng(6)
    x_u = rng.normal(size=(15, 2))
    x_l = rng.normal(size=(2, 2))
    doubts = rng.uniform(0.1, 0.7, size=15)
    _, ranked = beam_doubted_coreset(x_u, x_l, doubts, 3, beam_width=4)
    path = tmp_path / "beam.csv"
    dataio.write_beam_csv(path, ranked, index_map=np.arange(100, 115))
    lines = path.read_text().splitlines()
    assert lines[0] == "rank,uncertainty_score,indices"
    assert len(lines) == 1 + len(ranked)
    first = lines[1].split(",")
    assert first[0] == "1"
    assert float(first[1]) == ranked[0].score
    ids = [int(v) for v in first[2].split(";")]
    assert ids == sorted(ids)
    assert all(100 <= v < 115 for v in ids)


def test_metrics_csv_omits_wall_time(tmp_path):
    rec = MetricRecord(
        strategy="coreset",
        trial=0,
        iteration=1,
        labeled_count=20,
        test_accuracy=0.9,
        coreset_radius=1.5,
        empirical_coreset_loss=0.3,
        acquisition_uncertainty=0.7,
        wall_time_ms=123.4,
        early_stop=False,
    )
    path = tmp_path / "metrics.csv"
    dataio.write_metrics_csv(path, [rec])
    text = path.read_text()
    header = text.splitlines()[0]
    assert "wall" not in header  # timings vary run to run; files must not
    assert header.split(",") == dataio.METRICS_HEADER
    assert text.splitlines()[1] == "coreset,0,1,20,0.9,1.5,0.3,0.7,0"


def test_summary_csv_header(tmp_path):
    row = SummaryRecord(
        strategy="random",
        iteration=0,
        labeled_count=10,
        trials=3,
        mean_test_accuracy=0.5,
        std_test_accuracy=0.01,
        mean_coreset_radius=2.0,
        std_coreset_radius=0.1,
        mean_coreset_loss=1.0,
        std_coreset_loss=0.05,
        mean_uncertainty=0.0,
        std_uncertainty=0.0,
    )
    path = tmp_path / "summary.csv"
    dataio.write_summary_csv(path, [row])
    lines = path.read_text().splitlines()
    assert lines[0].split(",") == dataio.SUMMARY_HEADER
    assert lines[1].startswith("random,0,10,3,0.5,")
