"""Render a scan result as a PNG figure."""

from __future__ import annotations

from fractions import Fraction

from .scan import ScanResult

STYLE = {
    "figure.figsize": (6.4, 4.0),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 10,
    "savefig.bbox": "tight",
}


def plot_scan(result: ScanResult, path: str, title: str | None = None) -> int:
    """Plot the invariant against the row index; returns the number of plotted points.

    Values are converted to floats only for drawing.  Rows without a rational
    value (errors, refusals, booleans) are skipped and marked on the x axis.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    names = sorted(result.recipe.params)
    xs, ys, missing = [], [], []
    for k, row in enumerate(result.rows):
        if row.status == "value" and isinstance(row.value, Fraction):
            xs.append(k)
            ys.append(float(row.value))
        else:
            missing.append(k)
    labels = [",".join(str(r.params[n]) for n in names) for r in result.rows]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot(xs, ys, marker="o", linestyle="-", linewidth=1)
        if missing:
            ax.scatter(missing, [min(ys, default=0.0)] * len(missing), marker="x", color="tab:red",
                       label="no value")
            ax.legend()
        ax.set_xticks(range(len(labels)))
        ax.set_xticklabels(labels, rotation=90 if len(labels) > 20 else 0)
        ax.set_xlabel(",".join(names))
        ax.set_ylabel(result.recipe.invariant)
        ax.set_title(title or f"{result.recipe.invariant} across the family")
        fig.savefig(path)
        plt.close(fig)
    return len(xs)
