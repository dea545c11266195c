"""Render monogamy datasets to SVG scatter plots.

Output is byte-deterministic for a given dataset: the SVG hash salt is
pinned and the date metadata stripped, so re-rendering the same CSV
yields an identical file.
"""

from __future__ import annotations

from typing import Sequence

from .monogamy import MonogamyRecord

_SVG_HASHSALT = "entneg"


def render_scatter(
    records: Sequence[MonogamyRecord],
    out_path,
    title: str | None = None,
) -> None:
    """Scatter sum-of-pair squared negativities against the joint one.

    Each record contributes a green point at
    (n_abc_sq, n_ab_sq + n_ac_sq); the blue diagonal marks saturation
    of the squared inequality, so every point on or below it satisfies
    the bound.  An empty dataset still renders (axes and diagonal only).
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with plt.rc_context({"svg.hashsalt": _SVG_HASHSALT}):
        fig, ax = plt.subplots(figsize=(5.0, 5.0))
        try:
            xs = [r.n_abc_sq for r in records]
            ys = [r.n_ab_sq + r.n_ac_sq for r in records]
            hi = max(xs + ys + [1e-3]) * 1.05 if records else 1.0
            ax.plot([0, hi], [0, hi], color="tab:blue", linewidth=1.0, zorder=1)
            if records:
                ax.scatter(xs, ys, s=9, color="tab:green", alpha=0.6, zorder=2)
            ax.set_xlim(0, hi)
            ax.set_ylim(0, hi)
            ax.set_xlabel(r"$N^2_{A|BC}$")
            ax.set_ylabel(r"$N^2_{A|B} + N^2_{A|C}$")
            if title:
                ax.set_title(title)
            ax.set_aspect("equal")
            fig.savefig(out_path, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
