"""Poisson branching-process projection of daily incidence.

Each trajectory draws day t from Poisson(rt * sum_s w_s I_{t-s}) where the
recent history is the trajectory's own simulated past once inside the
projection window. Trajectories get independent Philox sub-streams spawned
from the seed by trajectory index, so runs are reproducible and could be
fanned out in parallel without changing the result.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import InsufficientData, InvalidParameter, UnknownRegion
from .estimators import estimate_rt_series, estimate_rt_wt, right_truncation_correction
from .ingest import Snapshot
from .serial import (
    DEFAULT_SHAPE,
    DEFAULT_SCALE,
    SerialInterval,
    discretize_serial_interval,
)
from .series import DayLike, RegionKey, as_day, moving_average

DEFAULT_HORIZON = 15
DEFAULT_SIMS = 1000

QUANTILE_LEVELS = (0.05, 0.25, 0.50, 0.75, 0.95)
QUANTILE_KEYS = ("q5", "q25", "q50", "q75", "q95")


def infection_pressure(past: np.ndarray, mass: np.ndarray) -> float:
    """sum_s w_s I_{t-s}: the renewal-equation weight of the recent past."""
    support = mass.size
    return float(np.dot(mass, past[-1:-support - 1:-1]))


def expected_projection(history: Sequence, si: SerialInterval, rt: float,
                        horizon: int) -> np.ndarray:
    """Noise-free renewal recursion: each projected day feeds the next."""
    buf = np.asarray(history, dtype=float).copy()
    out = np.empty(horizon)
    for t in range(horizon):
        lam = rt * infection_pressure(buf, si.mass)
        out[t] = lam
        buf = np.append(buf, lam)
    return out


def nearest_rank_quantile(sorted_values: np.ndarray, level: float) -> np.ndarray:
    """Nearest-rank quantile per column of an already-sorted (n, T) array."""
    n = sorted_values.shape[0]
    rank = max(int(np.ceil(level * n)), 1) - 1
    return sorted_values[rank]


def _quantile_bands(trajectories: np.ndarray) -> dict[str, np.ndarray]:
    ordered = np.sort(trajectories, axis=0)
    return {key: nearest_rank_quantile(ordered, level).astype(float)
            for key, level in zip(QUANTILE_KEYS, QUANTILE_LEVELS)}


@dataclass(frozen=True)
class ProjectionResult:
    """Simulated future daily incidence plus its quantile fan."""

    start_day: int
    horizon: int
    trajectories: np.ndarray
    quantiles: Mapping[str, np.ndarray]
    expected: np.ndarray
    rt_used: float
    seed: int
    region: Optional[RegionKey] = None


def project(history: Sequence, si: SerialInterval, rt: float,
            horizon: int = DEFAULT_HORIZON, n_sims: int = DEFAULT_SIMS,
            seed: int = 0, *, start_day: int | None = None,
            region: Optional[RegionKey] = None,
            seed_smooth_window: int = 0) -> ProjectionResult:
    """Simulate n_sims Poisson branching trajectories over the horizon.

    The recursion is seeded from raw history counts by default, preserving
    count semantics; pass seed_smooth_window to seed from the trailing moving
    average instead.
    """
    hist = np.asarray(history, dtype=float)
    if hist.size < si.support:
        raise InsufficientData(
            f"history length {hist.size} shorter than serial-interval support {si.support}")
    if rt < 0:
        raise InvalidParameter(f"reproduction number must be >= 0, got {rt}")
    if horizon < 1:
        raise InvalidParameter("horizon must be >= 1")
    if n_sims < 1:
        raise InvalidParameter("n_sims must be >= 1")
    if seed_smooth_window:
        hist = moving_average(hist, seed_smooth_window)

    expected = expected_projection(hist, si, rt, horizon)

    mass = si.mass
    support = si.support
    trajectories = np.empty((n_sims, horizon), dtype=np.int64)
    children = np.random.SeedSequence(seed).spawn(n_sims)
    window0 = hist[-support:]
    for i in range(n_sims):
        rng = np.random.Generator(np.random.Philox(children[i]))
        window = window0.copy()
        row = trajectories[i]
        for t in range(horizon):
            lam = rt * infection_pressure(window, mass)
            draw = rng.poisson(lam) if lam > 0 else 0
            row[t] = draw
            window = np.append(window[1:], float(draw))
    trajectories.setflags(write=False)

    if start_day is None:
        start_day = hist.size
    return ProjectionResult(
        start_day=start_day, horizon=horizon, trajectories=trajectories,
        quantiles=_quantile_bands(trajectories), expected=expected,
        rt_used=float(rt), seed=int(seed), region=region,
    )


def project_region(snapshot: Snapshot, region_code: str,
                   si: SerialInterval | None = None,
                   horizon: int = DEFAULT_HORIZON, n_sims: int = DEFAULT_SIMS,
                   seed: int = 0, rt_override: float | None = None,
                   seed_smooth_window: int = 0) -> ProjectionResult:
    """Project a region forward from its snapshot history.

    When rt_override is absent, the hyperparameter is the last reliable value
    of the truncation-corrected Wallinga-Teunis series.
    """
    if region_code not in snapshot.regions:
        raise UnknownRegion(f"unknown region {region_code!r}")
    series = snapshot.series.get(region_code)
    if series is None:
        raise InsufficientData(f"region {region_code} has no case series")
    if si is None:
        si = discretize_serial_interval(DEFAULT_SHAPE, DEFAULT_SCALE)
    if rt_override is not None:
        if rt_override < 0:
            raise InvalidParameter("rt_override must be >= 0")
        rt_used = float(rt_override)
    else:
        _, rt_used = estimate_rt_series(series, si, correction=True).last_reliable()
    return project(series.confirmed, si, rt_used, horizon=horizon, n_sims=n_sims,
                   seed=seed, start_day=series.end_day + 1, region=series.region,
                   seed_smooth_window=seed_smooth_window)


@dataclass(frozen=True)
class BacktestReport:
    """Hold-out comparison of a projection against observed incidence."""

    split_day: int
    horizon: int
    observed_ma: np.ndarray
    projected_median: np.ndarray
    mape: Optional[float]
    coverage_90: float
    comparable_days: int
    rt_used: float
    result: ProjectionResult


def backtest(counts: Sequence, si: SerialInterval, split: DayLike,
             horizon: int = DEFAULT_HORIZON, n_sims: int = DEFAULT_SIMS,
             seed: int = 0, *, start_day: int = 0,
             ma_window: int = 14) -> BacktestReport:
    """Train on days <= split, project the next horizon days, score both
    the projected median against the observed moving average (MAPE over days
    with positive MA) and the raw held-out counts against the 5-95% band.
    """
    x = np.asarray(counts, dtype=float)
    split_day = as_day(split)
    k = split_day - start_day
    if k < 0 or k >= x.size:
        raise InvalidParameter("split date outside the series")
    if x.size - (k + 1) < horizon:
        raise InsufficientData(
            f"need {horizon} held-out days after the split, have {x.size - k - 1}")
    training = x[:k + 1]
    if training.size <= si.support:
        raise InsufficientData("pre-split series too short for rt estimation")
    raw = estimate_rt_wt(training, si, start_day=start_day)
    corrected = right_truncation_correction(raw, si, last_observed=split_day)
    _, rt_used = corrected.last_reliable()

    result = project(training, si, rt_used, horizon=horizon, n_sims=n_sims,
                     seed=seed, start_day=split_day + 1)
    observed = x[k + 1:k + 1 + horizon]
    observed_ma = moving_average(x, ma_window)[k + 1:k + 1 + horizon]
    median = result.quantiles["q50"]

    comparable = observed_ma > 0
    n_comp = int(comparable.sum())
    mape = None
    if n_comp:
        mape = float(np.mean(np.abs(median[comparable] - observed_ma[comparable])
                             / observed_ma[comparable]))
    inside = (result.quantiles["q5"] <= observed) & (observed <= result.quantiles["q95"])
    return BacktestReport(
        split_day=split_day, horizon=horizon, observed_ma=observed_ma,
        projected_median=median, mape=mape, coverage_90=float(inside.mean()),
        comparable_days=n_comp, rt_used=rt_used, result=result,
    )


@dataclass(frozen=True)
class CumulativeBands:
    """Quantile bands of cumulative incidence, offset by the historical total."""

    start_day: int
    offset: int
    quantiles: Mapping[str, np.ndarray]


def cumulative_projection(result: ProjectionResult, history: Sequence) -> CumulativeBands:
    """Quantiles of per-trajectory cumulative sums (never sums of quantiles)."""
    offset = int(np.asarray(history).sum())
    cum = np.cumsum(result.trajectories, axis=1) + offset
    return CumulativeBands(start_day=result.start_day, offset=offset,
                           quantiles=_quantile_bands(cum))
