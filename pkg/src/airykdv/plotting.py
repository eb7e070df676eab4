"""Matplotlib figures for reports, scans and solver traces.

Figures are drawn on explicit :class:`~matplotlib.figure.Figure` objects with
the Agg canvas (no pyplot state, safe off the main thread) and saved as PNG
without timestamp metadata, so identical inputs give identical files.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .spectral import spatial_samples

__all__ = [
    "plot_estimate_report",
    "plot_experiment",
    "plot_region_scan",
    "plot_resolution_series",
    "plot_trace",
    "save_figure",
]

_METADATA = {"Software": None}


def _figure(ncols: int = 1, width: float = 6.0, height: float = 4.0):
    fig = Figure(figsize=(width * ncols, height), dpi=100)
    FigureCanvasAgg(fig)
    axes = [fig.add_subplot(1, ncols, i + 1) for i in range(ncols)]
    return fig, axes


def save_figure(fig: Figure, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, format="png", metadata=_METADATA)
    return path


def plot_estimate_report(report, path) -> Path:
    """Ratio histogram with quantile markers; bilinear reports add the residual-vs-T panel."""
    residual = report.extras.get("identity_residual_mean")
    fig, axes = _figure(2 if residual else 1)
    ax = axes[0]
    if report.ratios:
        ax.hist(report.ratios, bins=min(40, max(5, len(report.ratios) // 5)), color="0.6")
        for key, q in report.quantiles().items():
            ax.axvline(q, ls="--", lw=1, label=f"{key} = {q:.4g}")
        ax.axvline(report.max_ratio, color="k", lw=1.5, label=f"max = {report.max_ratio:.4g}")
        ax.legend(fontsize=8)
    ax.set_xlabel("ratio")
    ax.set_ylabel("samples")
    ax.set_title(f"{report.name}  (n={report.grid.get('n')}, {len(report.ratios)} samples)")
    if residual:
        t_ladder = report.extras.get("t_ladder", list(range(len(residual))))
        axes[1].loglog(t_ladder, residual, "o-", label="mean")
        if report.extras.get("identity_residual_max"):
            axes[1].loglog(t_ladder, report.extras["identity_residual_max"], "s--", label="max")
        axes[1].set_xlabel("window length T")
        axes[1].set_ylabel("relative identity residual")
        axes[1].legend(fontsize=8)
    return save_figure(fig, path)


def plot_resolution_series(series: dict, path, title: str = "", ylabel: str = "max ratio") -> Path:
    fig, (ax,) = _figure()
    ns = sorted(series, key=float)
    ax.plot([float(n) for n in ns], [series[n] for n in ns], "o-")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("n")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    return save_figure(fig, path)


def plot_region_scan(scan, path) -> Path:
    """Per-shell minima: region-B margin and region-C resonance ratio."""
    fig, (ax,) = _figure()
    for region, marker, label in (("B", "o", "B: best permutation margin"),
                                  ("C", "s", "C: cq / sum <xi_i>^3")):
        rows = [r for r in scan.shells if r[1] == region and np.isfinite(r[-1])]
        if rows:
            ax.plot([r[0] for r in rows], [r[-1] for r in rows], marker, ls="-", label=label)
    ax.set_xlabel("shell max |xi_i| / step")
    ax.set_ylabel("minimum over shell")
    if ax.get_lines():
        ax.set_yscale("log")
    ax.set_title(f"region scan, radius {scan.radius:g}, s = {scan.s:g}")
    if ax.get_lines():
        ax.legend(fontsize=8)
    else:
        ax.text(0.5, 0.5, "no B or C points", transform=ax.transAxes, ha="center")
    return save_figure(fig, path)


def plot_trace(trace, path, max_curves: int = 6) -> Path:
    """Profiles at a few snapshot times and the relative L^2 drift."""
    fig, (ax, bx) = _figure(2)
    grid = trace.config.grid
    picks = np.unique(np.linspace(0, len(trace.fields) - 1, min(max_curves, len(trace.fields))).astype(int))
    for i in picks:
        ax.plot(grid.points, spatial_samples(trace.fields[i]).real, lw=1, label=f"t = {trace.times[i]:.4g}")
    ax.set_xlabel("x")
    ax.set_ylabel("u")
    ax.legend(fontsize=8)
    ref = trace.l2[0] if trace.l2[0] > 0 else 1.0
    drift = np.abs(trace.l2 - trace.l2[0]) / ref
    bx.plot(trace.times, drift, "-")
    bx.set_xlabel("t")
    bx.set_ylabel("|‖u(t)‖ − ‖u(0)‖| / ‖u(0)‖")
    bx.ticklabel_format(axis="y", style="sci", scilimits=(0, 0))
    return save_figure(fig, path)


def plot_experiment(report, path) -> Path:
    """First series column against the remaining numeric columns (log axes when positive)."""
    fig, (ax,) = _figure()
    rows = report.series
    if rows:
        keys = list(rows[0])
        x = np.array([float(r[keys[0]]) for r in rows])
        for key in keys[1:]:
            y = np.array([float(r[key]) for r in rows])
            ax.plot(x, y, "o-", label=key)
        positive = all(float(r[k]) > 0 for r in rows for k in keys)
        if positive and len(rows) > 1:
            ax.set_xscale("log")
            ax.set_yscale("log")
        ax.set_xlabel(keys[0])
        ax.legend(fontsize=8)
    ax.set_title(report.name)
    return save_figure(fig, path)
