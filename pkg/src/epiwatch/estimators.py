"""Epidemiological parameter estimation.

Log-linear growth fitting with doubling/halving times, the time-dependent
(case) reproduction number computed day-wise from the Wallinga-Teunis
attribution scheme, a deterministic right-truncation correction, wave
peak/valley detection with a multinomial bootstrap CI, and per-capita
indicator arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    InsufficientData,
    InvalidParameter,
    NoWaveStructure,
    UndefinedDoubling,
)
from .ingest import PopulationRecord
from .serial import SerialInterval
from .series import (
    DEFAULT_SMOOTH_WINDOW,
    DayLike,
    IncidenceSeries,
    RegionKey,
    as_day,
    moving_average,
)

LN2 = math.log(2.0)

# correction factors below this observed-mass threshold amplify noise more
# than they remove bias, so such days are flagged unreliable instead
MIN_OBSERVED_MASS = 0.2

_Z95 = 1.959963984540054


def doubling_time(r: float) -> float:
    """ln(2)/r days; negative for decay, where |d| is the halving time."""
    if r == 0:
        raise UndefinedDoubling("growth rate is exactly zero")
    return LN2 / r


@dataclass(frozen=True)
class GrowthFit:
    """Least-squares exponential fit log(y) = r*t + b over a date window.

    The regressor t counts days from the window's first day, so b is the
    log-count level at the window start.
    """

    r: float
    b: float
    r_ci: tuple[float, float]
    doubling_time: Optional[float]
    window: tuple[int, int]
    n_points: int


def fit_growth(counts: Sequence, start_day: int = 0,
               window: tuple[DayLike, DayLike] | None = None) -> GrowthFit:
    """OLS of ln(count) on day index over positive-count days in the window.

    Zero-count days are excluded (their logs are undefined); fewer than three
    positive days is an error rather than a degenerate fit. The 95% CI uses
    the normal approximation on the regression standard error.
    """
    y = np.asarray(counts, dtype=float)
    lo, hi = 0, y.size - 1
    if window is not None:
        lo = max(lo, as_day(window[0]) - start_day)
        hi = min(hi, as_day(window[1]) - start_day)
    if lo > hi:
        raise InsufficientData("growth window does not overlap the series")
    y = y[lo:hi + 1]
    t_all = np.arange(y.size, dtype=float)  # days since window start
    mask = y > 0
    n = int(mask.sum())
    if n < 3:
        raise InsufficientData(f"need >= 3 positive-count days in the window, found {n}")
    t, logy = t_all[mask], np.log(y[mask])

    t_bar, y_bar = t.mean(), logy.mean()
    sxx = float(np.sum((t - t_bar) ** 2))
    r = float(np.sum((t - t_bar) * (logy - y_bar)) / sxx)
    b = float(y_bar - r * t_bar)
    residuals = logy - (r * t + b)
    sigma2 = float(np.sum(residuals ** 2)) / (n - 2)
    se = math.sqrt(sigma2 / sxx)
    d = doubling_time(r) if r != 0 else None
    return GrowthFit(
        r=r, b=b, r_ci=(r - _Z95 * se, r + _Z95 * se), doubling_time=d,
        window=(start_day + lo, start_day + hi), n_points=n,
    )


@dataclass(frozen=True)
class RtSeries:
    """Per-day effective reproduction number with its case-count context.

    rt is NaN on days where no estimate is defined. ``reliable`` is False on
    undefined days and, after truncation correction, on days where too little
    of the serial-interval mass has been observed to correct honestly.
    """

    rt: np.ndarray
    cases: np.ndarray
    start_day: int = 0
    region: Optional[RegionKey] = None
    corrected: bool = False
    reliable: np.ndarray | None = None

    def __post_init__(self):
        rt = np.asarray(self.rt, dtype=float)
        cases = np.asarray(self.cases, dtype=float)
        if rt.shape != cases.shape:
            raise InvalidParameter("rt and cases must be aligned")
        reliable = self.reliable if self.reliable is not None else ~np.isnan(rt)
        reliable = np.asarray(reliable, dtype=bool)
        for arr in (rt, cases, reliable):
            arr.setflags(write=False)
        object.__setattr__(self, "rt", rt)
        object.__setattr__(self, "cases", cases)
        object.__setattr__(self, "reliable", reliable)

    def __len__(self) -> int:
        return int(self.rt.size)

    @property
    def days(self) -> np.ndarray:
        return self.start_day + np.arange(len(self))

    def defined(self) -> np.ndarray:
        return ~np.isnan(self.rt)

    def last_reliable(self) -> tuple[int, float]:
        """(day, value) of the most recent defined and reliable estimate."""
        idx = np.flatnonzero(self.defined() & self.reliable)
        if idx.size == 0:
            raise InsufficientData("no reliable reproduction-number estimate in the series")
        j = int(idx[-1])
        return self.start_day + j, float(self.rt[j])


def estimate_rt_wt(counts: Sequence, si: SerialInterval, *,
                   start_day: int = 0, region: Optional[RegionKey] = None,
                   smooth_window: int = 0) -> RtSeries:
    """Day-level time-dependent reproduction number.

    Each case on day t is attributed to potential infector days j < t with
    weight w(t-j) N_j / sum_s w(t-s) N_s; collecting attributions gives

        rt[j] = sum_{t > j} N_t w(t-j) / D_t,   D_t = sum_s w_s N_{t-s}.

    Computing at day level is O(T*S) and equals the per-case enumeration
    exactly, because all cases of a day share the same attribution weights.
    Days t whose D_t is zero contribute nothing (those cases have no possible
    infector); rt[j] is NaN when no later day inside the support could have
    observed offspring at all.
    """
    w = np.asarray(si.mass, dtype=float)
    if abs(w.sum() - 1.0) > 1e-9 or w.size == 0:
        # unreachable through SerialInterval, kept for duck-typed callers
        from .errors import InvalidSerialInterval
        raise InvalidSerialInterval("serial-interval mass must sum to 1")
    n = np.asarray(counts, dtype=float)
    if (n < 0).any():
        raise InvalidParameter("case counts must be non-negative")
    if smooth_window:
        n = moving_average(n, smooth_window)
    support = w.size
    T = n.size
    if T <= support:
        raise InsufficientData(f"series length {T} must exceed the serial-interval support {support}")

    pressure = np.convolve(n, w)[:T]          # pressure[t] = D_{t+1}
    D = np.concatenate(([0.0], pressure[:-1]))
    ratio = np.divide(n, D, out=np.zeros_like(n), where=D > 0)

    numerator = np.zeros(T)
    observable = np.zeros(T, dtype=bool)
    for s in range(1, support + 1):
        ws = w[s - 1]
        if ws == 0:
            continue
        numerator[:T - s] += ws * ratio[s:]
        observable[:T - s] |= D[s:] > 0
    rt = np.where(observable, numerator, np.nan)
    return RtSeries(rt=rt, cases=np.asarray(counts, dtype=float), start_day=start_day,
                    region=region, corrected=False)


def right_truncation_correction(rt: RtSeries, si: SerialInterval,
                                last_observed: DayLike | None = None) -> RtSeries:
    """Rescale recent estimates by the serial-interval mass already observable.

    rt[j] / F_w(T - j) undoes the downward bias of days whose secondary cases
    have partly not happened yet. Days with F_w < 0.2 keep their raw value and
    are flagged unreliable instead of being blown up by a tiny divisor.
    """
    T = as_day(last_observed) if last_observed is not None else rt.start_day + len(rt) - 1
    values = rt.rt.copy()
    reliable = rt.defined()
    for j in range(len(rt)):
        if not reliable[j]:
            continue
        f = si.cumulative_mass(T - (rt.start_day + j))
        if f >= MIN_OBSERVED_MASS:
            values[j] = values[j] / f
        else:
            reliable[j] = False
    return RtSeries(rt=values, cases=rt.cases, start_day=rt.start_day,
                    region=rt.region, corrected=True, reliable=reliable)


def estimate_rt_series(series: IncidenceSeries, si: SerialInterval, *,
                       correction: bool = True, smooth_window: int = 0) -> RtSeries:
    """Wallinga-Teunis on a region's confirmed counts, optionally corrected."""
    raw = estimate_rt_wt(series.confirmed, si, start_day=series.start_day,
                         region=series.region, smooth_window=smooth_window)
    if not correction:
        return raw
    return right_truncation_correction(raw, si, last_observed=series.end_day)


@dataclass(frozen=True)
class WaveMarkers:
    """First-wave peak (with bootstrap CI) and the valley that ends the wave."""

    first_peak: int
    first_peak_ci: tuple[int, int]
    valley: int


def _first_peak_index(y: np.ndarray, min_drop: float) -> Optional[int]:
    """Earliest prefix-maximum day whose forward minimum, before the curve
    re-exceeds it, drops by at least min_drop of the peak height.

    Falls back to the global argmax when no candidate qualifies (single wave
    still descending less than min_drop). Returns None when the curve has no
    usable interior peak.
    """
    n = y.size
    cand = 0
    min_after = math.inf
    for t in range(1, n):
        if y[t] > y[cand]:
            cand = t
            min_after = math.inf
        else:
            if y[t] < min_after:
                min_after = y[t]
            if 0 < cand and y[cand] > 0 and min_after <= (1.0 - min_drop) * y[cand]:
                return cand
    g = int(np.argmax(y))
    if 0 < g < n - 1 and y[g] > 0:
        return g
    return None


def detect_waves(counts: Sequence, smooth_window: int = DEFAULT_SMOOTH_WINDOW, *,
                 start_day: int = 0, min_drop: float = 0.5,
                 n_bootstrap: int = 500, seed: int = 0) -> WaveMarkers:
    """Locate the first-wave peak and the valley separating it from the next.

    The peak is the argmax of the smoothed curve within its first wave regime
    (see _first_peak_index); the valley is the day of minimum smoothed
    incidence strictly after the peak, earliest date on ties. The peak CI is
    a multinomial bootstrap: case-days are resampled with observed
    proportions, the peak re-estimated, and the 2.5/97.5 percentiles taken.
    """
    x = np.asarray(counts, dtype=float)
    if smooth_window < 1:
        raise InvalidParameter("smooth_window must be >= 1")
    if x.size < 2 * smooth_window:
        raise InsufficientData(f"need at least {2 * smooth_window} days, got {x.size}")
    if not 0 < min_drop <= 1:
        raise InvalidParameter("min_drop must lie in (0, 1]")
    y = moving_average(x, smooth_window)
    peak = _first_peak_index(y, min_drop)
    if peak is None:
        raise NoWaveStructure("series has no interior peak")
    after = y[peak + 1:]
    valley = peak + 1 + int(np.argmin(after))

    total = x.sum()
    if total <= 0:
        raise NoWaveStructure("series has no cases")
    probs = x / total
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    peaks = []
    for _ in range(n_bootstrap):
        resampled = rng.multinomial(int(total), probs)
        p = _first_peak_index(moving_average(resampled, smooth_window), min_drop)
        if p is not None:
            peaks.append(p)
    if peaks:
        lo, hi = np.percentile(np.asarray(peaks), [2.5, 97.5], method="nearest")
        ci = (start_day + int(lo), start_day + int(hi))
    else:
        ci = (start_day + peak, start_day + peak)
    return WaveMarkers(first_peak=start_day + peak, first_peak_ci=ci,
                       valley=start_day + valley)


def wave_windows(counts: Sequence, markers: WaveMarkers, *, start_day: int = 0,
                 smooth_window: int = DEFAULT_SMOOTH_WINDOW, min_drop: float = 0.5,
                 min_cumulative: int = 10) -> tuple[tuple[int, int], tuple[int, int]]:
    """Growth-fit windows for the two waves, in absolute days.

    Wave one runs from the first day with >= min_cumulative cumulative cases
    (early noise would dominate the log fit) to the first peak; wave two from
    the valley to the second peak when one is detectable, else to series end.
    """
    x = np.asarray(counts, dtype=float)
    csum = np.cumsum(x)
    onset = int(np.argmax(csum >= min_cumulative))
    if csum[onset] < min_cumulative:
        onset = 0
    w1 = (start_day + onset, markers.first_peak)

    v = markers.valley - start_day
    tail = x[v:]
    end = start_day + x.size - 1
    if tail.size >= 2:
        p2 = _first_peak_index(moving_average(tail, min(smooth_window, tail.size)), min_drop)
        if p2 is not None:
            end = markers.valley + p2
    return w1, (markers.valley, end)


@dataclass(frozen=True)
class IndicatorSet:
    """Cumulative per-capita indicators for one region."""

    cases_per_million: float
    deaths_per_million: float
    cfr: float
    test_positivity: Optional[float] = None
    tests_per_million: Optional[float] = None


def indicators(series: IncidenceSeries, population: PopulationRecord) -> IndicatorSet:
    """Per-million and fatality indicators from cumulative totals."""
    if population.population < 1:
        raise InvalidParameter("population must be >= 1")
    pop = float(population.population)
    confirmed = float(series.confirmed.sum())
    deceased = float(series.deceased.sum())
    cfr = deceased / confirmed if confirmed > 0 else 0.0
    positivity = None
    tests_pm = None
    if series.tested is not None:
        tested = float(series.tested.sum())
        tests_pm = tested * 1e6 / pop
        if tested > 0:
            positivity = confirmed / tested
    return IndicatorSet(
        cases_per_million=confirmed * 1e6 / pop,
        deaths_per_million=deceased * 1e6 / pop,
        cfr=cfr,
        test_positivity=positivity,
        tests_per_million=tests_pm,
    )
