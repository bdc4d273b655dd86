"""Deterministic SVG line charts of the simulation grid.

One panel per distribution (plus one for Kendall's tau), one curve per
copula family; solid lines for standardized laws and dashed for optimally
shifted ones.  Matplotlib is configured so the emitted SVG is
byte-reproducible for identical inputs.
"""

from __future__ import annotations

from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .simulation import SimulationRecord  # noqa: E402

__all__ = ["write_figure"]

_FAMILY_COLORS = {"gauss": "#d62728", "t": "#1f77b4", "clayton": "#2ca02c"}


def write_figure(records: list[SimulationRecord], path: str) -> None:
    """Render sigma2_hat against rho and write an SVG to `path`."""
    panels: dict[str, list[SimulationRecord]] = defaultdict(list)
    for rec in records:
        if rec.estimator in ("kappa", "tau"):
            panels[rec.dist].append(rec)
    names = sorted(panels, key=lambda d: (d == "tau", d))
    if not names:
        raise ValueError("no plottable records")

    ncols = 3
    nrows = (len(names) + ncols - 1) // ncols
    with plt.rc_context({"svg.hashsalt": "rankvar"}):
        fig, axes = plt.subplots(nrows, ncols, figsize=(4.0 * ncols, 3.0 * nrows),
                                 squeeze=False)
        for ax in axes.ravel():
            ax.set_visible(False)
        for idx, dist in enumerate(names):
            ax = axes[idx // ncols][idx % ncols]
            ax.set_visible(True)
            recs = panels[dist]
            curves: dict[tuple[str, bool], list[SimulationRecord]] = defaultdict(list)
            for rec in recs:
                curves[(rec.family, rec.shifted)].append(rec)
            for (family, shifted_flag), pts in sorted(curves.items()):
                pts = sorted(pts, key=lambda r: r.k)
                ax.plot([r.rho for r in pts], [r.sigma2_hat for r in pts],
                        color=_FAMILY_COLORS.get(family, "#555555"),
                        linestyle="--" if shifted_flag else "-",
                        linewidth=1.1,
                        label=f"{family}{' (shifted)' if shifted_flag else ''}")
            ax.set_title(dist, fontsize=10)
            ax.set_xlabel("rho")
            ax.set_ylabel("estimated asymptotic variance")
            ax.grid(True, alpha=0.3)
        handles, labels = axes[0][0].get_legend_handles_labels()
        fig.legend(handles, labels, loc="lower center", ncol=3, fontsize=8,
                   frameon=False)
        fig.tight_layout(rect=(0.0, 0.06, 1.0, 1.0))
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
