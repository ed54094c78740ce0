"""Render sweep summary curves to a figure file.

One chart: standard error on the x axis, mean normalized expected loss
increase on the y axis, one curve per error scenario in the
conventional colors (green for cost-only, red for prob-only, black for
both). When Monte Carlo summaries are present they are drawn solid with
the analytic values dashed on top; analytic-only sweeps get solid
analytic curves.

Rendering goes through matplotlib with the Agg backend, so it works
headless; the output format follows the file extension and defaults to
SVG.
"""

from __future__ import annotations

import warnings
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.figure import Figure

from .experiments import SCENARIO_TAGS, SweepRow

__all__ = ["SCENARIO_COLORS", "build_summary_figure", "emit_plot"]

SCENARIO_COLORS = {"cost-only": "green", "prob-only": "red", "both": "black"}


def _curve(rows: list[SweepRow], field: str) -> tuple[list[float], list[float]]:
    points = sorted(
        (r.scenario_sigma, getattr(r, field))
        for r in rows
        if getattr(r, field) is not None
    )
    return [p[0] for p in points], [p[1] for p in points]


def build_summary_figure(
    summary_rows: Sequence[SweepRow],
    overlay_analytic: bool | None = None,
) -> Figure:
    """Assemble the summary chart; the caller owns (and closes) the figure.

    ``overlay_analytic`` forces (True) or suppresses (False) the dashed
    analytic overlay; None overlays exactly when Monte Carlo values are
    present. Forcing the overlay without Monte Carlo data falls back to
    plain analytic curves with a warning.
    """
    summaries = [r for r in summary_rows if r.is_summary]
    if not summaries:
        raise ValueError("no summary rows to plot")
    has_mc = any(r.norm_inc_mc is not None for r in summaries)
    if overlay_analytic and not has_mc:
        warnings.warn(
            "analytic overlay requested but no Monte Carlo summary values "
            "are present; plotting analytic curves only",
            stacklevel=2,
        )
    overlay = has_mc if overlay_analytic is None else (overlay_analytic and has_mc)

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for tag in SCENARIO_TAGS:
        rows = [r for r in summaries if r.scenario_tag == tag]
        if not rows:
            continue
        color = SCENARIO_COLORS[tag]
        solid_field = "norm_inc_mc" if has_mc else "norm_inc_analytic"
        xs, ys = _curve(rows, solid_field)
        label = f"{tag} (simulated)" if has_mc else tag
        ax.plot(xs, ys, color=color, linestyle="-", marker="o", markersize=3, label=label)
        if overlay:
            xs, ys = _curve(rows, "norm_inc_analytic")
            ax.plot(xs, ys, color=color, linestyle="--", label=f"{tag} (analytic)")
    ax.set_xlabel("standard error of the estimators")
    ax.set_ylabel("mean normalized expected loss increase")
    ax.legend()
    fig.tight_layout()
    return fig


def emit_plot(
    summary_rows: Sequence[SweepRow],
    path: str | Path,
    overlay_analytic: bool | None = None,
) -> None:
    """Build the summary chart and write it to ``path``.

    The format follows the extension; a path without one is written as
    SVG.
    """
    path = Path(path)
    fig = build_summary_figure(summary_rows, overlay_analytic=overlay_analytic)
    try:
        if path.suffix:
            fig.savefig(path)
        else:
            fig.savefig(path, format="svg")
    finally:
        plt.close(fig)
