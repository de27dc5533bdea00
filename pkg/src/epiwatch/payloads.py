"""Canonical JSON/CSV serialization shared by the HTTP service and the CLI.

One source of truth for wire formats: reals carry at most six fractional
digits, counts stay integers, undefined values are null, and object keys are
sorted, so identical inputs always produce identical bytes.
"""

from __future__ import annotations

import io
import json
import math
from typing import Optional

import numpy as np

from .estimators import GrowthFit, IndicatorSet, RtSeries, WaveMarkers
from .ingest import Snapshot
from .projector import BacktestReport, ProjectionResult, QUANTILE_KEYS
from .series import IncidenceSeries, cumulative, day_to_iso, moving_average


def round_real(value) -> Optional[float]:
    """Clamp a real to <= 6 fractional digits; NaN becomes null."""
    if value is None:
        return None
    v = float(value)
    if math.isnan(v):
        return None
    return round(v, 6) + 0.0  # drop negative zero


def real_list(values) -> list:
    return [round_real(v) for v in values]


def count_list(values) -> list[int]:
    return [int(v) for v in values]


def dumps_canonical(payload) -> bytes:
    return json.dumps(payload, separators=(",", ":"), sort_keys=True,
                      allow_nan=False).encode("utf-8")


def regions_payload(snapshot: Snapshot) -> list[dict]:
    return [
        {
            "code": r.code,
            "name": r.name,
            "level": r.level.value,
            "parent_code": r.parent,
        }
        for r in sorted(snapshot.regions.values(), key=lambda r: r.code)
    ]


def series_payload(series: IncidenceSeries, smooth: int = 0,
                   with_cumulative: bool = False) -> dict:
    payload = {
        "dates": series.iso_dates(),
        "confirmed": count_list(series.confirmed),
        "recovered": count_list(series.recovered),
        "deceased": count_list(series.deceased),
    }
    if series.tested is not None:
        payload["tested"] = count_list(series.tested)
    if smooth > 0:
        payload["smoothed"] = real_list(moving_average(series.confirmed, smooth))
    if with_cumulative:
        payload["cumulative_confirmed"] = count_list(cumulative(series.confirmed))
        payload["cumulative_deceased"] = count_list(cumulative(series.deceased))
    return payload


def rt_payload(rt: RtSeries) -> dict:
    return {
        "dates": [day_to_iso(d) for d in rt.days],
        "rt": real_list(rt.rt),
        "corrected": rt.corrected,
    }


def projection_payload(result: ProjectionResult) -> dict:
    return {
        "start": day_to_iso(result.start_day),
        "horizon": result.horizon,
        "rt_used": round_real(result.rt_used),
        "seed": result.seed,
        "quantiles": {key: real_list(result.quantiles[key]) for key in QUANTILE_KEYS},
        "expected": real_list(result.expected),
    }


def growth_payload(fit: GrowthFit) -> dict:
    return {
        "r": round_real(fit.r),
        "b": round_real(fit.b),
        "r_ci": [round_real(fit.r_ci[0]), round_real(fit.r_ci[1])],
        "doubling_time": round_real(fit.doubling_time),
        "window": [day_to_iso(fit.window[0]), day_to_iso(fit.window[1])],
        "n_points": fit.n_points,
    }


def waves_payload(markers: WaveMarkers) -> dict:
    return {
        "first_peak": day_to_iso(markers.first_peak),
        "first_peak_ci": [day_to_iso(markers.first_peak_ci[0]),
                          day_to_iso(markers.first_peak_ci[1])],
        "valley": day_to_iso(markers.valley),
    }


def indicators_payload(ind: IndicatorSet) -> dict:
    return {
        "cases_per_million": round_real(ind.cases_per_million),
        "deaths_per_million": round_real(ind.deaths_per_million),
        "cfr": round_real(ind.cfr),
        "test_positivity": round_real(ind.test_positivity),
        "tests_per_million": round_real(ind.tests_per_million),
    }


def backtest_payload(report: BacktestReport) -> dict:
    return {
        "split_date": day_to_iso(report.split_day),
        "horizon": report.horizon,
        "rt_used": round_real(report.rt_used),
        "observed_ma": real_list(report.observed_ma),
        "projected_median": real_list(report.projected_median),
        "mape": round_real(report.mape),
        "coverage_90": round_real(report.coverage_90),
        "comparable_days": report.comparable_days,
    }


def _fmt(value) -> str:
    """CSV cell with the JSON rounding rules; empty cell for undefined."""
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    r = round_real(value)
    return "" if r is None else repr(r)


def projection_csv(result: ProjectionResult) -> str:
    """Wide CSV: day,q5,q25,q50,q75,q95,expected."""
    out = io.StringIO()
    out.write("day,q5,q25,q50,q75,q95,expected\n")
    for t in range(result.horizon):
        cells = [day_to_iso(result.start_day + t)]
        cells += [_fmt(result.quantiles[key][t]) for key in QUANTILE_KEYS]
        cells.append(_fmt(result.expected[t]))
        out.write(",".join(cells) + "\n")
    return out.getvalue()


def rt_csv(rt: RtSeries) -> str:
    out = io.StringIO()
    out.write("date,cases,rt\n")
    for t, day in enumerate(rt.days):
        value = rt.rt[t]
        out.write(f"{day_to_iso(day)},{int(rt.cases[t])},{_fmt(None if math.isnan(value) else value)}\n")
    return out.getvalue()


def waves_csv(markers: WaveMarkers) -> str:
    header = "first_peak,first_peak_ci_low,first_peak_ci_high,valley\n"
    return header + (
        f"{day_to_iso(markers.first_peak)},{day_to_iso(markers.first_peak_ci[0])},"
        f"{day_to_iso(markers.first_peak_ci[1])},{day_to_iso(markers.valley)}\n"
    )


def backtest_csv(report: BacktestReport) -> str:
    out = io.StringIO()
    out.write("day,observed_ma,projected_median,q5,q95\n")
    q5, q95 = report.result.quantiles["q5"], report.result.quantiles["q95"]
    for t in range(report.horizon):
        out.write(",".join([
            day_to_iso(report.split_day + 1 + t),
            _fmt(report.observed_ma[t]),
            _fmt(report.projected_median[t]),
            _fmt(q5[t]),
            _fmt(q95[t]),
        ]) + "\n")
    return out.getvalue()
