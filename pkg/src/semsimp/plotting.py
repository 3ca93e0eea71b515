"""Figures for evaluation reports (written to files, never shown)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_report(rows, path, title: str | None = None) -> None:
    """Bar panels of the main metrics, one bar per report row."""
    names = [name for name, _ in rows]
    panels = [
        ("ld_complex_system", "LD complex to system"),
        ("ld_system_simple", "LD system to simple"),
        ("bleu_simple", "BLEU w.r.t. simple"),
        ("split_sentences", "Sentences with splits"),
    ]
    fig, axes = plt.subplots(1, len(panels), figsize=(3.2 * len(panels), 3.6), squeeze=False)
    x = range(len(names))
    for ax, (key, label) in zip(axes[0], panels):
        vals = [getattr(rep, key) for _, rep in rows]
        ax.bar(x, vals, color="0.45", edgecolor="black", linewidth=0.6)
        ax.set_title(label, fontsize=9)
        ax.set_xticks(list(x))
        ax.set_xticklabels(names, rotation=60, ha="right", fontsize=7)
        ax.tick_params(axis="y", labelsize=7)
        for side in ("top", "right"):
            ax.spines[side].set_visible(False)
    if title:
        fig.suptitle(title, fontsize=10)
    fig.tight_layout()
    # fixed metadata keeps repeated renders byte-identical
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)
