"""Matplotlib renderers for the report path (epicurve, R(t), projection fan).

Files only, Agg backend; the interactive charts live in the dashboard UI.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.dates as mdates  # noqa: E402
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .estimators import RtSeries  # noqa: E402
from .projector import ProjectionResult  # noqa: E402
from .series import IncidenceSeries, day_to_iso, moving_average  # noqa: E402

DPI = 120

_BAR = "#9ecae1"
_LINE = "#de2d26"
_BAND = "#fc9272"


def _dates(start_day: int, n: int):
    start = np.datetime64(day_to_iso(start_day))
    return start + np.arange(n)


def _finish(fig, ax, path: Path | str):
    ax.xaxis.set_major_locator(mdates.AutoDateLocator())
    ax.xaxis.set_major_formatter(mdates.ConciseDateFormatter(ax.xaxis.get_major_locator()))
    fig.autofmt_xdate()
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def save_epicurve(series: IncidenceSeries, path: Path | str,
                  smooth_window: int = 14, log_scale: bool = False) -> None:
    """Daily bars with the trailing moving average drawn over them."""
    fig, ax = plt.subplots(figsize=(9, 4))
    days = _dates(series.start_day, len(series))
    ax.bar(days, series.confirmed, width=1.0, color=_BAR, label="daily cases")
    ax.plot(days, moving_average(series.confirmed, smooth_window), color=_LINE,
            lw=1.8, label=f"{smooth_window}-day average")
    if log_scale:
        ax.set_yscale("log")
    ax.set_ylabel("daily confirmed cases")
    ax.set_title(f"{series.region.name}: epidemic curve")
    ax.legend(frameon=False)
    _finish(fig, ax, path)


def save_rt(rt: RtSeries, path: Path | str) -> None:
    """R(t) line with the epidemic threshold at one."""
    fig, ax = plt.subplots(figsize=(9, 3.5))
    days = _dates(rt.start_day, len(rt))
    ax.plot(days, rt.rt, color="#3182bd", lw=1.5,
            label="corrected R(t)" if rt.corrected else "R(t)")
    unreliable = ~rt.reliable & rt.defined()
    if unreliable.any():
        ax.plot(days[unreliable], rt.rt[unreliable], ls="none", marker="o",
                ms=3, color="#bdbdbd", label="unreliable tail")
    ax.axhline(1.0, color="black", lw=0.8, ls="--")
    ax.set_ylabel("effective reproduction number")
    ax.set_ylim(bottom=0)
    title = rt.region.name if rt.region is not None else "R(t)"
    ax.set_title(f"{title}: time-dependent reproduction number")
    ax.legend(frameon=False)
    _finish(fig, ax, path)


def save_projection(series: IncidenceSeries, result: ProjectionResult,
                    path: Path | str, history_days: int = 60) -> None:
    """History bars, projected median line, and the 5-95% shaded fan."""
    fig, ax = plt.subplots(figsize=(9, 4))
    tail = min(history_days, len(series))
    hist_days = _dates(series.end_day - tail + 1, tail)
    ax.bar(hist_days, series.confirmed[-tail:], width=1.0, color=_BAR,
           label="observed cases")
    proj_days = _dates(result.start_day, result.horizon)
    ax.fill_between(proj_days, result.quantiles["q5"], result.quantiles["q95"],
                    color=_BAND, alpha=0.45, label="5-95% band")
    ax.plot(proj_days, result.quantiles["q50"], color=_LINE, lw=2.0,
            label="projected median")
    ax.set_ylabel("daily confirmed cases")
    ax.set_title(f"{series.region.name}: {result.horizon}-day projection "
                 f"(R={result.rt_used:.2f})")
    ax.legend(frameon=False)
    _finish(fig, ax, path)
