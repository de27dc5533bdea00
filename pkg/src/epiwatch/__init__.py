"""Epidemic surveillance analytics: ingestion, estimation, projection, serving."""

from .errors import (
    AmbiguousRegion,
    EmptyInput,
    EpiwatchError,
    InsufficientData,
    InvalidParameter,
    InvalidSerialInterval,
    NoWaveStructure,
    OutOfRange,
    RowError,
    SchemaError,
    UndefinedDoubling,
    UnknownRegion,
)
from .series import (
    IncidenceSeries,
    RegionKey,
    RegionLevel,
    SmoothedSeries,
    align_and_clip,
    as_day,
    cumulative,
    day_to_iso,
    moving_average,
    smooth,
)
from .ingest import (
    CaseRow,
    PopulationRecord,
    Snapshot,
    build_snapshot,
    load_snapshot,
    match_region_name,
    parse_daily_csv,
    serialize_daily_csv,
)
from .serial import SerialInterval, discretize_serial_interval
from .estimators import (
    GrowthFit,
    IndicatorSet,
    RtSeries,
    WaveMarkers,
    detect_waves,
    doubling_time,
    estimate_rt_series,
    estimate_rt_wt,
    fit_growth,
    indicators,
    right_truncation_correction,
)
from .projector import (
    BacktestReport,
    CumulativeBands,
    ProjectionResult,
    backtest,
    cumulative_projection,
    expected_projection,
    project,
    project_region,
)
from .synthgen import Scenario, generate, load_scenario

__version__ = "0.1.0"

__all__ = [
    "AmbiguousRegion", "EmptyInput", "EpiwatchError", "InsufficientData",
    "InvalidParameter", "InvalidSerialInterval", "NoWaveStructure", "OutOfRange",
    "RowError", "SchemaError", "UndefinedDoubling", "UnknownRegion",
    "IncidenceSeries", "RegionKey", "RegionLevel", "SmoothedSeries",
    "align_and_clip", "as_day", "cumulative", "day_to_iso", "moving_average", "smooth",
    "CaseRow", "PopulationRecord", "Snapshot", "build_snapshot", "load_snapshot",
    "match_region_name", "parse_daily_csv", "serialize_daily_csv",
    "SerialInterval", "discretize_serial_interval",
    "GrowthFit", "IndicatorSet", "RtSeries", "WaveMarkers", "detect_waves",
    "doubling_time", "estimate_rt_series", "estimate_rt_wt", "fit_growth",
    "indicators", "right_truncation_correction",
    "BacktestReport", "CumulativeBands", "ProjectionResult", "backtest",
    "cumulative_projection", "expected_projection", "project", "project_region",
    "Scenario", "generate", "load_scenario",
    "__version__",
]
