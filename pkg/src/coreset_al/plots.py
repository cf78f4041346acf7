"""Figure rendering for experiment and bound reports.

Each function draws one figure and writes it straight to a file; nothing
is shown interactively. PNG metadata that would vary between runs (the
creation date) is suppressed.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_SAVE_KWARGS = {"dpi": 150, "metadata": {"Date": None}}

_METRICS = {
    "test_accuracy": ("mean_test_accuracy", "std_test_accuracy", "test accuracy"),
    "coreset_radius": ("mean_coreset_radius", "std_coreset_radius", "covering radius"),
    "coreset_loss": ("mean_coreset_loss", "std_coreset_loss", "pool cross-entropy"),
    "uncertainty": ("mean_uncertainty", "std_uncertainty", "acquisition uncertainty"),
}


def plot_learning_curves(summary_rows, metric: str, path) -> None:
    """One line per strategy over labeled-pool size, with a std band.

    Args:
        summary_rows: ``SummaryRecord`` objects from the harness.
        metric: One of ``test_accuracy``, ``coreset_radius``,
            ``coreset_loss``, ``uncertainty``.
        path: Output image file.
    """
    if metric not in _METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {sorted(_METRICS)}")
    mean_attr, std_attr, ylabel = _METRICS[metric]

    by_strategy: dict[str, list] = {}
    for row in summary_rows:
        by_strategy.setdefault(row.strategy, []).append(row)

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for strategy, rows in by_strategy.items():
        rows = sorted(rows, key=lambda r: r.iteration)
        xs = [r.labeled_count for r in rows]
        ys = [getattr(r, mean_attr) for r in rows]
        errs = [getattr(r, std_attr) for r in rows]
        ax.plot(xs, ys, marker="o", linewidth=1.6, label=strategy)
        ax.fill_between(
            xs,
            [y - e for y, e in zip(ys, errs)],
            [y + e for y, e in zip(ys, errs)],
            alpha=0.15,
        )
    ax.set_xlabel("labeled pool size")
    ax.set_ylabel(ylabel)
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def plot_bound_curves(rows, path) -> None:
    """Survival bound against radius, one curve per z slice.

    Solid lines show the bound clamped at zero, dashed its raw value, and
    a dotted vertical marks each slice's vacuity crossing.
    """
    by_z: dict[float, list] = {}
    for row in rows:
        by_z.setdefault(row.z, []).append(row)

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for z, slice_rows in sorted(by_z.items()):
        slice_rows = sorted(slice_rows, key=lambda r: r.delta)
        deltas = [r.delta for r in slice_rows]
        line, = ax.plot(
            deltas,
            [r.beta_lower_clamped for r in slice_rows],
            linewidth=1.8,
            label=f"z = {z:g}",
        )
        ax.plot(
            deltas,
            [r.beta_lower for r in slice_rows],
            linewidth=0.9,
            linestyle="--",
            color=line.get_color(),
            alpha=0.6,
        )
        ax.axvline(
            slice_rows[0].delta_star, linestyle=":", color=line.get_color(), alpha=0.7
        )
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel("covering radius")
    ax.set_ylabel("survival lower bound")
    ax.set_ylim(-1.05, 1.05)
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
