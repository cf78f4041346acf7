"""End-to-end CLI tests driven through ``main(argv)``."""

import numpy as np
import pytest

from coreset_al import dataio
from coreset_al.cli import load_config, main, parse_config_text
from coreset_al.harness import ExperimentConfig


# ----- config parsing -----------------------------------------------------------


def test_parse_config_text_values_and_comments():
    text = """
    # full-line comment
    dataset = quadrants
    n = 120          # trailing comment
    test_fraction = 0.2
    strategy = coreset

    budget = 5
    """
    values = parse_config_text(text)
    assert values == {
        "dataset": "quadrants",
        "n": 120,
        "test_fraction": 0.2,
        "strategy": "coreset",
        "budget": 5,
    }


def test_parse_config_text_errors_carry_line_numbers():
    with pytest.raises(ValueError, match=r"cfg:1: unknown config key 'color'"):
        parse_config_text("color = red", source="cfg")
    with pytest.raises(ValueError, match=r"cfg:3: duplicate config key 'n'"):
        parse_config_text("n = 5\n\nn = 6", source="cfg")
    with pytest.raises(ValueError, match=r"cfg:1: empty value"):
        parse_config_text("n =   # nothing", source="cfg")
    with pytest.raises(ValueError, match=r"cfg:1: expected 'key = value'"):
        parse_config_text("just words", source="cfg")
    with pytest.raises(ValueError, match=r"cfg:1: cannot parse 'many' as int"):
        parse_config_text("n = many", source="cfg")


def test_load_config_maps_strategy_list_and_train_keys(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text(
        "dataset = quadrants\n"
        "n = 200\n"
        "initial_labeled = 10\n"
        "budget = 5\n"
        "iterations = 2\n"
        "strategy = random, coreset\n"
        "trials = 1\n"
        "learning_rate = 0.1\n"
        "epochs = 40\n"
        "train_batch_size = 16\n"
        "optimizer = plain-gradient\n"
    )
    config = load_config(path)
    assert isinstance(config, ExperimentConfig)
    assert config.strategies == ("random", "coreset")
    assert config.train.learning_rate == 0.1
    assert config.train.epochs == 40
    assert config.train.batch_size == 16
    assert config.train.optimizer == "plain-gradient"


def test_load_config_rejects_bad_dataset_and_optimizer(tmp_path):
    bad_dataset = tmp_path / "a.cfg"
    bad_dataset.write_text("dataset = spiral\n")
    with pytest.raises(ValueError, match="unknown dataset 'spiral'"):
        load_config(bad_dataset)

    bad_opt = tmp_path / "b.cfg"
    bad_opt.write_text("optimizer = newton\n")
    with pytest.raises(ValueError, match="unknown optimizer 'newton'"):
        load_config(bad_opt)


# ----- acquire ------------------------------------------------------------------


def write_pool(tmp_path, features, labeled_bits):
    features = np.asarray(features, dtype=float)
    fpath = tmp_path / "features.csv"
    mpath = tmp_path / "mask.csv"
    dataio.write_feature_csv(fpath, features)
    dataio.write_selection_csv(
        mpath, np.arange(features.shape[0]), np.asarray(labeled_bits, dtype=bool)
    )
    return fpath, mpath


def test_acquire_coreset_hand_instance(tmp_path, capsys):
    # pool {1, 2, 3, 10} with labeled {0}: picks 10 (farthest), then 3
    fpath, mpath = write_pool(tmp_path, [[0.0], [1.0], [2.0], [3.0], [10.0]], [1, 0, 0, 0, 0])
    out = tmp_path / "picked.csv"
    rc = main([
        "acquire", "--features", str(fpath), "--labeled-mask", str(mpath),
        "--method", "coreset", "--budget", "2", "--out", str(out),
    ])
    assert rc == 0
    indices, bits = dataio.read_selection_csv(out)
    assert indices.tolist() == [1, 2, 3, 4]
    assert indices[bits].tolist() == [3, 4]
    assert "acquired 2 of 4" in capsys.readouterr().out


def test_acquire_doubt_methods_require_probs(tmp_path, capsys):
    fpath, mpath = write_pool(tmp_path, [[0.0], [1.0], [2.0]], [1, 0, 0])
    out = tmp_path / "picked.csv"
    for method in ("doubt-coreset", "beam-coreset", "least-confidence", "max-entropy"):
        rc = main([
            "acquire", "--features", str(fpath), "--labeled-mask", str(mpath),
            "--method", method, "--budget", "1", "--out", str(out),
        ])
        assert rc == 2
        assert "requires --probs" in capsys.readouterr().err


def prob_row_for_doubt(d, classes=11):
    """A valid probability row whose doubt (1 - max entry) equals ``d``."""
    top = 1.0 - d
    row = np.full(classes, d / (classes - 1))
    row[0] = top
    assert top > row[1] or d == 0.0  # top really is the max for the doubts used
    return row


def test_acquire_doubt_coreset_with_probs(tmp_path):
    # pool features 1, 2, 9 with doubts 0.9, 0.5, 0.1 and one labeled row at
    # 0: budget 2 under acquired-point scaling picks the rows at 2 then 9
    fpath, mpath = write_pool(tmp_path, [[0.0], [1.0], [2.0], [9.0]], [1, 0, 0, 0])
    probs = np.stack([
        prob_row_for_doubt(0.0),   # labeled row, unused
        prob_row_for_doubt(0.9),
        prob_row_for_doubt(0.5),
        prob_row_for_doubt(0.1),
    ])
    ppath = tmp_path / "probs.csv"
    dataio.write_feature_csv(ppath, probs)
    out = tmp_path / "picked.csv"
    rc = main([
        "acquire", "--features", str(fpath), "--labeled-mask", str(mpath),
        "--probs", str(ppath), "--method", "doubt-coreset", "--budget", "2",
        "--out", str(out),
    ])
    assert rc == 0
    indices, bits = dataio.read_selection_csv(out)
    assert indices[bits].tolist() == [2, 3]


def test_acquire_beam_writes_ranked_csv(tmp_path):
    rng = np.random.default_rng(3)
    features = rng.normal(size=(12, 2))
    bits = np.zeros(12, dtype=bool)
    bits[:2] = True
    fpath, mpath = write_pool(tmp_path, features, bits)
    probs = np.full((12, 4), 0.25)
    probs[:, 0] = np.linspace(0.3, 0.9, 12)
    probs[:, 1:] = ((1.0 - probs[:, 0]) / 3.0)[:, None]
    ppath = tmp_path / "probs.csv"
    dataio.write_feature_csv(ppath, probs)
    out = tmp_path / "picked.csv"
    beam_out = tmp_path / "beam.csv"
    rc = main([
        "acquire", "--features", str(fpath), "--labeled-mask", str(mpath),
        "--probs", str(ppath), "--method", "beam-coreset", "--budget", "3",
        "--beam", "4", "--out", str(out), "--beam-out", str(beam_out),
    ])
    assert rc == 0
    lines = beam_out.read_text().splitlines()
    assert lines[0] == "rank,uncertainty_score,indices"
    assert len(lines) >= 2
    first = lines[1].split(",")
    assert first[0] == "1"
    # rank-1 configuration ids match the selection CSV
    indices, mask = dataio.read_selection_csv(out)
    assert first[2] == ";".join(str(i) for i in sorted(indices[mask].tolist()))


def test_acquire_beam_out_needs_beam_method(tmp_path, capsys):
    fpath, mpath = write_pool(tmp_path, [[0.0], [1.0], [2.0]], [1, 0, 0])
    rc = main([
        "acquire", "--features", str(fpath), "--labeled-mask", str(mpath),
        "--method", "coreset", "--budget", "1",
        "--out", str(tmp_path / "picked.csv"),
        "--beam-out", str(tmp_path / "beam.csv"),
    ])
    assert rc == 2
    assert "beam-coreset" in capsys.readouterr().err


def test_acquire_mask_must_cover_all_rows(tmp_path, capsys):
    features = np.array([[0.0], [1.0], [2.0]])
    fpath = tmp_path / "features.csv"
    dataio.write_feature_csv(fpath, features)
    mpath = tmp_path / "mask.csv"
    dataio.write_selection_csv(mpath, np.array([0, 1]), np.array([True, False]))
    rc = main([
        "acquire", "--features", str(fpath), "--labeled-mask", str(mpath),
        "--method", "coreset", "--budget", "1", "--out", str(tmp_path / "o.csv"),
    ])
    assert rc == 2
    assert "every feature row" in capsys.readouterr().err


def test_acquire_random_is_deterministic(tmp_path):
    rng = np.random.default_rng(0)
    fpath, mpath = write_pool(tmp_path, rng.normal(size=(30, 3)), np.zeros(30, bool))
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    for out in (out_a, out_b):
        rc = main([
            "acquire", "--features", str(fpath), "--labeled-mask", str(mpath),
            "--method", "random", "--budget", "7", "--seed", "42", "--out", str(out),
        ])
        assert rc == 0
    assert out_a.read_bytes() == out_b.read_bytes()


# ----- bounds -------------------------------------------------------------------


def test_bounds_writes_grid_and_figure(tmp_path, capsys):
    out = tmp_path / "curves.csv"
    rc = main([
        "bounds", "--z", "0.25,0.5", "--delta-min", "0.1", "--delta-max", "2.0",
        "--steps", "40", "--out", str(out),
    ])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "z,delta,beta_lower,beta_lower_clamped,delta_star,quadratic_regime"
    assert len(lines) == 1 + 2 * 40
    assert (tmp_path / "curves.png").exists()
    assert "80 grid rows" in capsys.readouterr().out


def test_bounds_is_byte_deterministic(tmp_path):
    args = ["bounds", "--z", "0.5", "--steps", "25"]
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    assert main(args + ["--out", str(out_a)]) == 0
    assert main(args + ["--out", str(out_b)]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()


def test_bounds_flag_validation(tmp_path, capsys):
    out = str(tmp_path / "c.csv")
    assert main(["bounds", "--delta-min", "0", "--out", out]) == 2
    assert "--delta-min" in capsys.readouterr().err
    assert main(["bounds", "--delta-min", "2", "--delta-max", "1", "--out", out]) == 2
    assert "--delta-max" in capsys.readouterr().err
    assert main(["bounds", "--steps", "0", "--out", out]) == 2
    assert "--steps" in capsys.readouterr().err
    assert main(["bounds", "--z", " , ", "--out", out]) == 2
    assert "--z" in capsys.readouterr().err


# ----- verify -------------------------------------------------------------------


def test_verify_passes_and_prints_report(capsys):
    rc = main(["verify"])
    out = capsys.readouterr().out
    assert rc == 0
    lines = [line for line in out.splitlines() if line.strip()]
    assert len(lines) == 3
    assert all("PASS" in line for line in lines)
    assert "product-integral" in out
    assert "quadrature-antiderivative" in out
    assert "radius-scaling-identity" in out


def test_verify_fails_under_impossible_tolerance(capsys):
    rc = main(["verify", "--tol-quadrature", "1e-18"])
    assert rc == 1
    assert "FAIL" in capsys.readouterr().out


# ----- experiment ---------------------------------------------------------------


EXPERIMENT_CFG = (
    "dataset = quadrants\n"
    "n = 60\n"
    "initial_labeled = 6\n"
    "test_fraction = 0.25\n"
    "budget = 4\n"
    "iterations = 2\n"
    "strategy = coreset\n"
    "trials = 1\n"
    "base_seed = 3\n"
    "epochs = 15\n"
)


def test_experiment_writes_expected_files(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(EXPERIMENT_CFG)
    out_dir = tmp_path / "run"
    rc = main(["experiment", "--config", str(cfg), "--out-dir", str(out_dir)])
    assert rc == 0

    metrics = (out_dir / "metrics.csv").read_text().splitlines()
    assert metrics[0] == (
        "strategy,trial,iteration,labeled_count,test_accuracy,coreset_radius,"
        "empirical_coreset_loss,acquisition_uncertainty,early_stop"
    )
    assert len(metrics) == 1 + 3  # iterations 0..2, one trial, one strategy

    summary = (out_dir / "summary.csv").read_text().splitlines()
    assert len(summary) == 1 + 3

    assert (out_dir / "split_trial00.csv").exists()
    assert (out_dir / "mask_coreset_trial00_iter01.csv").exists()
    assert (out_dir / "mask_coreset_trial00_iter02.csv").exists()
    assert (out_dir / "accuracy.png").exists()
    assert (out_dir / "radius.png").exists()

    printed = capsys.readouterr().out
    assert "coreset: final mean test accuracy" in printed


def test_experiment_csvs_are_byte_deterministic(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(EXPERIMENT_CFG)
    dir_a = tmp_path / "a"
    dir_b = tmp_path / "b"
    assert main(["experiment", "--config", str(cfg), "--out-dir", str(dir_a)]) == 0
    assert main(["experiment", "--config", str(cfg), "--out-dir", str(dir_b)]) == 0
    for name in ("metrics.csv", "summary.csv", "split_trial00.csv",
                 "mask_coreset_trial00_iter01.csv"):
        assert (dir_a / name).read_bytes() == (dir_b / name).read_bytes(), name


def test_experiment_rejects_bad_config(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("dataset = quadrants\nn = 10\ninitial_labeled = 50\n")
    rc = main(["experiment", "--config", str(cfg), "--out-dir", str(tmp_path / "x")])
    assert rc == 2
    assert "error:" in capsys.readouterr().err
