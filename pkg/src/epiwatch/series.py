"""Date-indexed daily count series and the windowed transforms built on them.

Dates are handled as proleptic-Gregorian ordinals (``datetime.date.toordinal``)
internally; ISO-8601 strings only appear at parse/serialize boundaries. Counts
are int64, smoothed values float64. All containers are immutable after
construction so they can be shared freely across threads.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np

from .errors import EmptyInput, InvalidParameter, OutOfRange

DEFAULT_SMOOTH_WINDOW = 14

DayLike = Union[int, str, dt.date]


def as_day(value: DayLike) -> int:
    """Coerce an ISO string / date / ordinal int to a day ordinal."""
    if isinstance(value, bool):
        raise InvalidParameter(f"not a date: {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, dt.date):
        return value.toordinal()
    if isinstance(value, str):
        try:
            return dt.date.fromisoformat(value).toordinal()
        except ValueError as exc:
            raise InvalidParameter(f"not an ISO-8601 date: {value!r}") from exc
    raise InvalidParameter(f"not a date: {value!r}")


def day_to_iso(day: int) -> str:
    return dt.date.fromordinal(day).isoformat()


class RegionLevel(str, Enum):
    NATION = "nation"
    STATE = "state"
    DISTRICT = "district"


_LEVEL_BY_DEPTH = {1: RegionLevel.NATION, 2: RegionLevel.STATE, 3: RegionLevel.DISTRICT}


@dataclass(frozen=True)
class RegionKey:
    """One node of the nation > state > district hierarchy.

    Codes are dash-separated and hierarchical ("IN", "IN-MH", "IN-MH-Pune");
    the level is always derivable from the number of segments.
    """

    code: str
    name: str
    level: RegionLevel
    parent: Optional[str] = None

    @staticmethod
    def level_for_code(code: str) -> RegionLevel:
        depth = len(code.split("-"))
        if depth not in _LEVEL_BY_DEPTH:
            raise InvalidParameter(f"region code {code!r} has {depth} segments (expected 1-3)")
        return _LEVEL_BY_DEPTH[depth]

    @classmethod
    def from_code(cls, code: str, name: str) -> "RegionKey":
        level = cls.level_for_code(code)
        parent = code.rsplit("-", 1)[0] if level is not RegionLevel.NATION else None
        return cls(code=code, name=name, level=level, parent=parent)


def _as_count_array(values: Sequence, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.int64)
    if arr.ndim != 1:
        raise InvalidParameter(f"{what} must be one-dimensional")
    if arr.size == 0:
        raise EmptyInput(f"{what} is empty")
    if (arr < 0).any():
        raise InvalidParameter(f"{what} contains negative counts")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class IncidenceSeries:
    """Gap-free daily counts for one region, indexed from start_day.

    Index t maps to day ``start_day + t``; all columns share one length.
    """

    region: RegionKey
    start_day: int
    confirmed: np.ndarray
    recovered: np.ndarray
    deceased: np.ndarray
    tested: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "start_day", as_day(self.start_day))
        object.__setattr__(self, "confirmed", _as_count_array(self.confirmed, "confirmed"))
        for name in ("recovered", "deceased"):
            col = _as_count_array(getattr(self, name), name)
            if col.size != self.confirmed.size:
                raise InvalidParameter(f"{name} length {col.size} != confirmed length {self.confirmed.size}")
            object.__setattr__(self, name, col)
        if self.tested is not None:
            col = _as_count_array(self.tested, "tested")
            if col.size != self.confirmed.size:
                raise InvalidParameter("tested length differs from confirmed length")
            object.__setattr__(self, "tested", col)

    def __len__(self) -> int:
        return int(self.confirmed.size)

    @property
    def end_day(self) -> int:
        return self.start_day + len(self) - 1

    @property
    def days(self) -> np.ndarray:
        return self.start_day + np.arange(len(self))

    def iso_dates(self) -> list[str]:
        return [day_to_iso(d) for d in self.days]

    def column(self, name: str) -> Optional[np.ndarray]:
        if name not in ("confirmed", "recovered", "deceased", "tested"):
            raise InvalidParameter(f"unknown column {name!r}")
        return getattr(self, name)


@dataclass(frozen=True)
class SmoothedSeries:
    """Trailing moving average of one column of an IncidenceSeries."""

    source: IncidenceSeries
    window: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


def moving_average(values: Sequence, window: int = DEFAULT_SMOOTH_WINDOW) -> np.ndarray:
    """Trailing moving average; head entries average the days available so far.

    out[t] = mean(values[max(0, t-window+1) .. t]); output length equals input
    length, which keeps smoothed series aligned with their source for joins.
    """
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        raise EmptyInput("cannot smooth an empty series")
    if not isinstance(window, (int, np.integer)) or window < 1:
        raise InvalidParameter(f"window must be a positive integer, got {window!r}")
    csum = np.cumsum(x)
    out = csum.copy()
    if x.size > window:
        out[window:] = csum[window:] - csum[:-window]
    denom = np.minimum(np.arange(1, x.size + 1), window)
    return out / denom


def smooth(series: IncidenceSeries, window: int = DEFAULT_SMOOTH_WINDOW,
           column: str = "confirmed") -> SmoothedSeries:
    col = series.column(column)
    if col is None:
        raise EmptyInput(f"series has no {column!r} column")
    return SmoothedSeries(source=series, window=window, values=moving_average(col, window))


def cumulative(values: Sequence) -> np.ndarray:
    """Prefix sums of a daily count series (monotone non-decreasing)."""
    x = np.asarray(values, dtype=np.int64)
    if x.size == 0:
        raise EmptyInput("cannot accumulate an empty series")
    return np.cumsum(x)


def align_and_clip(series: IncidenceSeries, from_day: DayLike, to_day: DayLike) -> IncidenceSeries:
    """Restrict a series to the intersection of [from_day, to_day] with its range."""
    lo, hi = as_day(from_day), as_day(to_day)
    if lo > hi:
        raise InvalidParameter(f"from {day_to_iso(lo)} is after to {day_to_iso(hi)}")
    lo = max(lo, series.start_day)
    hi = min(hi, series.end_day)
    if lo > hi:
        raise OutOfRange(
            f"[{day_to_iso(as_day(from_day))}, {day_to_iso(as_day(to_day))}] does not overlap "
            f"series range [{day_to_iso(series.start_day)}, {day_to_iso(series.end_day)}]"
        )
    i, j = lo - series.start_day, hi - series.start_day + 1
    return IncidenceSeries(
        region=series.region,
        start_day=lo,
        confirmed=series.confirmed[i:j],
        recovered=series.recovered[i:j],
        deceased=series.deceased[i:j],
        tested=None if series.tested is None else series.tested[i:j],
    )
