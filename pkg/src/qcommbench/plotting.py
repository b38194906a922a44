"""Figure rendering for report rows: one PNG next to every CSV.

All rendering goes through the Agg backend with fixed fonts, sizes, and PNG
metadata, so a rerun with identical rows produces identical bytes.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .reporting import ReportRow

_AXIS_LABELS = {
    "swaps": "SWAP count",
    "delay_us": "storage time (us)",
}

_METRIC_LABELS = {
    "mutual_information": "I(A;B) (bits)",
    "qber_mean": "QBER",
    "secret_key_per_bit": "secret key per sifted bit",
    "secret_key_bits": "secret key (bits)",
}

_PNG_METADATA = {"Software": "qcommbench"}


def _style(ax) -> None:
    ax.grid(True, alpha=0.3, linewidth=0.6)
    ax.tick_params(labelsize=9)


def _series(rows: list[ReportRow], metric: str) -> tuple[list[float], list[float]]:
    pts = sorted((r.x, r.value) for r in rows if r.metric == metric)
    return [p[0] for p in pts], [p[1] for p in pts]


def render_rows(
    rows: list[ReportRow],
    dest: str | Path,
    axis_name: str = "swaps",
    title: str = "",
) -> Path:
    """Render report rows to a PNG.

    Mutual-information rows get a single panel with the I = 1 threshold
    marked; QBER/key rows get stacked panels (per-cell error rates above,
    key per sifted bit with its zero line below).  Returns the path written.
    """
    path = Path(dest)
    path.parent.mkdir(parents=True, exist_ok=True)
    metrics = {r.metric for r in rows}
    xlabel = _AXIS_LABELS.get(axis_name, axis_name)

    if "mutual_information" in metrics:
        fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=120)
        xs, ys = _series(rows, "mutual_information")
        ax.plot(xs, ys, marker="o", color="#1f77b4")
        ax.axhline(1.0, color="#888888", linewidth=0.8, linestyle="--")
        ax.set_xlabel(xlabel, fontsize=10)
        ax.set_ylabel(_METRIC_LABELS["mutual_information"], fontsize=10)
        _style(ax)
    else:
        fig, (top, bottom) = plt.subplots(2, 1, figsize=(6.0, 6.4), dpi=120, sharex=True)
        for metric in sorted(m for m in metrics if m.startswith("qber_") and m != "qber_mean"):
            xs, ys = _series(rows, metric)
            top.plot(xs, ys, marker=".", linewidth=0.9, label=metric[5:])
        if "qber_mean" in metrics:
            xs, ys = _series(rows, "qber_mean")
            top.plot(xs, ys, marker="o", color="black", linewidth=1.6, label="mean")
        top.set_ylabel(_METRIC_LABELS["qber_mean"], fontsize=10)
        top.legend(fontsize=8, ncol=2)
        _style(top)
        if "secret_key_per_bit" in metrics:
            xs, ys = _series(rows, "secret_key_per_bit")
            bottom.plot(xs, ys, marker="s", color="#2ca02c")
            bottom.axhline(0.0, color="#888888", linewidth=0.8, linestyle="--")
            bottom.set_ylabel(_METRIC_LABELS["secret_key_per_bit"], fontsize=10)
        bottom.set_xlabel(xlabel, fontsize=10)
        _style(bottom)

    if title:
        fig.suptitle(title, fontsize=11)
    fig.tight_layout()
    fig.savefig(path, format="png", metadata=dict(_PNG_METADATA))
    plt.close(fig)
    return path
