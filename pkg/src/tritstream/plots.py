"""Figure rendering for the CLI report paths.

Kept apart from the harness (which stays CSV-only) so batch evaluation
never drags in a GUI toolkit; the Agg backend writes straight to files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .harness import EvalRecord  # noqa: E402

__all__ = ["render_rd_curves"]


def render_rd_curves(rows: list[EvalRecord], path: str, title: str = "Rate-distortion") -> None:
    """One MSE-vs-bpp curve per strategy, averaged over seeds at each rate.

    Curves are grouped by strategy, rates averaged per sweep index so
    multi-seed runs plot their mean curve.
    """
    by_strategy: dict[str, dict[int, list[tuple[float, float]]]] = {}
    seed_counters: dict[tuple[str, int], int] = {}
    for r in rows:
        idx = seed_counters.get((r.strategy, r.seed), 0)
        seed_counters[(r.strategy, r.seed)] = idx + 1
        by_strategy.setdefault(r.strategy, {}).setdefault(idx, []).append((r.bpp, r.mse))

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for strategy in sorted(by_strategy):
        points = by_strategy[strategy]
        bpps, mses = [], []
        for idx in sorted(points):
            pairs = points[idx]
            bpps.append(sum(p[0] for p in pairs) / len(pairs))
            mses.append(sum(p[1] for p in pairs) / len(pairs))
        ax.plot(bpps, mses, marker="o", markersize=3, linewidth=1.2, label=strategy)
    ax.set_xlabel("bits per pixel")
    ax.set_ylabel("latent MSE")
    ax.set_yscale("log")
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
