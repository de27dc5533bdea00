"""Read-only HTTP API over an immutable snapshot.

Handlers read the current snapshot reference exactly once, so a concurrent
refresh can never show a request a mix of old and new data; refresh builds
the new snapshot off to the side and publishes it with a single reference
swap. Failed refreshes are logged and leave the old snapshot live.

Error taxonomy: 404 unknown region, 400 malformed parameter, 422 valid but
data-insufficient, 503 before the first snapshot.
"""

from __future__ import annotations

import logging
import sys
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Optional

from fastapi import Depends, FastAPI, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware

from . import payloads
from .errors import (
    EpiwatchError,
    InsufficientData,
    InvalidParameter,
    NoWaveStructure,
    OutOfRange,
    UnknownRegion,
)
from .estimators import detect_waves, estimate_rt_series, fit_growth, indicators, WaveMarkers
from .ingest import CANONICAL_FILES, Snapshot, load_snapshot
from .projector import project_region
from .serial import DEFAULT_SHAPE, DEFAULT_SCALE, SerialInterval, discretize_serial_interval
from .series import as_day, moving_average

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger("epiwatch.service")

API_PREFIX = "/api/v1"
_MEMO_SIZE = 512

ENV_DATA_DIR = "EPIWATCH_DATA_DIR"
ENV_BIND = "EPIWATCH_BIND"


@dataclass
class ApiConfig:
    data_dir: Path
    bind_address: str = "127.0.0.1:8000"
    refresh_interval: float = 0.0
    default_si: tuple[float, float] = (DEFAULT_SHAPE, DEFAULT_SCALE)
    cors_allowed_origins: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.data_dir = Path(self.data_dir)
        if self.refresh_interval < 0:
            raise InvalidParameter("refresh_interval must be >= 0")

    @classmethod
    def from_file(cls, path: str | Path) -> "ApiConfig":
        raw = tomllib.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            data_dir=Path(raw.get("data_dir", ".")),
            bind_address=raw.get("bind", "127.0.0.1:8000"),
            refresh_interval=float(raw.get("refresh_interval", 0.0)),
            default_si=(float(raw.get("si_shape", DEFAULT_SHAPE)),
                        float(raw.get("si_scale", DEFAULT_SCALE))),
            cors_allowed_origins=list(raw.get("cors_allowed_origins", [])),
        )

    def apply_env(self, env: dict[str, str]) -> "ApiConfig":
        """Environment overrides win over file values."""
        if ENV_DATA_DIR in env:
            self.data_dir = Path(env[ENV_DATA_DIR])
        if ENV_BIND in env:
            self.bind_address = env[ENV_BIND]
        return self

    def check_data_dir(self) -> None:
        missing = [n for n in CANONICAL_FILES if not (self.data_dir / n).is_file()]
        if missing:
            raise InvalidParameter(
                f"data_dir {self.data_dir} is missing canonical files: {', '.join(missing)}")


class ServiceUnavailable(EpiwatchError):
    pass


class AppState:
    """Mutable holder for the current snapshot plus a projection byte-memo.

    Swapping ``self.snapshot`` is a single reference assignment; readers that
    captured the old reference keep a fully consistent view.
    """

    def __init__(self, config: ApiConfig):
        self.config = config
        self.si: SerialInterval = discretize_serial_interval(*config.default_si)
        self.snapshot: Optional[Snapshot] = None
        self._memo: OrderedDict[tuple, bytes] = OrderedDict()
        self._memo_lock = threading.Lock()

    def refresh(self) -> bool:
        """Load a fresh snapshot; on any failure keep serving the old one."""
        try:
            self.config.check_data_dir()
            snapshot = load_snapshot(self.config.data_dir)
        except (EpiwatchError, OSError, ValueError) as exc:
            log.warning("snapshot refresh failed, keeping previous snapshot: %s", exc)
            return False
        self.snapshot = snapshot
        return True

    def current(self) -> Snapshot:
        snapshot = self.snapshot
        if snapshot is None:
            raise ServiceUnavailable("no snapshot loaded yet")
        return snapshot

    def memo_get(self, key: tuple) -> Optional[bytes]:
        with self._memo_lock:
            body = self._memo.get(key)
            if body is not None:
                self._memo.move_to_end(key)
            return body

    def memo_put(self, key: tuple, body: bytes) -> None:
        with self._memo_lock:
            self._memo[key] = body
            self._memo.move_to_end(key)
            while len(self._memo) > _MEMO_SIZE:
                self._memo.popitem(last=False)


def _json_response(payload, status_code: int = 200) -> Response:
    return Response(content=payloads.dumps_canonical(payload), status_code=status_code,
                    media_type="application/json")


def _json_bytes_response(body: bytes) -> Response:
    return Response(content=body, media_type="application/json")


def _error_status(exc: EpiwatchError) -> int:
    if isinstance(exc, ServiceUnavailable):
        return 503
    if isinstance(exc, UnknownRegion):
        return 404
    if isinstance(exc, (InsufficientData, NoWaveStructure)):
        return 422
    return 400  # InvalidParameter, OutOfRange, schema/row problems


def create_app(config: ApiConfig, *, preload: bool = True,
               state: AppState | None = None) -> FastAPI:
    state = state or AppState(config)
    if preload:
        config.check_data_dir()
        state.snapshot = load_snapshot(config.data_dir)
    app = FastAPI(title="epiwatch", openapi_url=None)
    app.state.epiwatch = state

    if config.cors_allowed_origins:
        app.add_middleware(CORSMiddleware, allow_origins=config.cors_allowed_origins,
                           allow_methods=["GET"], allow_headers=["*"])

    @app.exception_handler(EpiwatchError)
    async def _domain_error(request: Request, exc: EpiwatchError):
        return _json_response({"error": type(exc).__name__, "detail": str(exc)},
                              status_code=_error_status(exc))

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        # malformed query parameters are client errors, not semantic 422s
        return _json_response({"error": "InvalidParameter", "detail": str(exc.errors())},
                              status_code=400)

    def snapshot_dep() -> Snapshot:
        return state.current()

    def _series_for(snapshot: Snapshot, code: str):
        if code not in snapshot.regions:
            raise UnknownRegion(f"unknown region {code!r}")
        series = snapshot.series.get(code)
        if series is None:
            raise InsufficientData(f"region {code} has no case series")
        return series

    @app.get("/healthz")
    def healthz():
        snapshot = state.snapshot
        return _json_response({
            "status": "ok" if snapshot is not None else "loading",
            "snapshot_as_of": None if snapshot is None else snapshot.as_of,
        })

    @app.get(f"{API_PREFIX}/regions")
    def regions(snapshot: Snapshot = Depends(snapshot_dep)):
        return _json_response(payloads.regions_payload(snapshot))

    @app.get(f"{API_PREFIX}/regions/{{code}}/series")
    def series_endpoint(code: str, smooth: int = Query(0, ge=0),
                        cumulative: int = Query(0, ge=0, le=1),
                        snapshot: Snapshot = Depends(snapshot_dep)):
        series = _series_for(snapshot, code)
        return _json_response(payloads.series_payload(
            series, smooth=smooth, with_cumulative=bool(cumulative)))

    @app.get(f"{API_PREFIX}/regions/{{code}}/rt")
    def rt_endpoint(code: str,
                    correction: Literal["none", "truncation"] = Query("truncation"),
                    snapshot: Snapshot = Depends(snapshot_dep)):
        series = _series_for(snapshot, code)
        rt = estimate_rt_series(series, state.si, correction=correction == "truncation")
        return _json_response(payloads.rt_payload(rt))

    @app.get(f"{API_PREFIX}/regions/{{code}}/projection")
    def projection_endpoint(code: str,
                            horizon: int = Query(15, ge=1, le=60),
                            sims: int = Query(1000, ge=1, le=100_000),
                            seed: int = Query(0),
                            rt_override: str = Query(""),
                            snapshot: Snapshot = Depends(snapshot_dep)):
        override: Optional[float] = None
        if rt_override != "":
            try:
                override = float(rt_override)
            except ValueError:
                raise InvalidParameter(f"rt_override must be a number, got {rt_override!r}")
            if override < 0:
                raise InvalidParameter("rt_override must be >= 0")
        key = (code, horizon, sims, seed, override, state.si.shape, state.si.scale,
               snapshot.as_of)
        body = state.memo_get(key)
        if body is None:
            result = project_region(snapshot, code, si=state.si, horizon=horizon,
                                    n_sims=sims, seed=seed, rt_override=override)
            body = payloads.dumps_canonical(payloads.projection_payload(result))
            state.memo_put(key, body)
        return _json_bytes_response(body)

    @app.get(f"{API_PREFIX}/regions/{{code}}/waves")
    def waves_endpoint(code: str, smooth: int = Query(14, ge=1), seed: int = Query(0),
                       snapshot: Snapshot = Depends(snapshot_dep)):
        series = _series_for(snapshot, code)
        markers: WaveMarkers = detect_waves(series.confirmed, smooth,
                                            start_day=series.start_day, seed=seed)
        return _json_response(payloads.waves_payload(markers))

    @app.get(f"{API_PREFIX}/regions/{{code}}/growth")
    def growth_endpoint(code: str,
                        from_date: Optional[str] = Query(None, alias="from"),
                        to_date: Optional[str] = Query(None, alias="to"),
                        snapshot: Snapshot = Depends(snapshot_dep)):
        series = _series_for(snapshot, code)
        window = None
        if from_date is not None or to_date is not None:
            lo = as_day(from_date) if from_date is not None else series.start_day
            hi = as_day(to_date) if to_date is not None else series.end_day
            if lo > hi:
                raise InvalidParameter("from is after to")
            if hi < series.start_day or lo > series.end_day:
                raise OutOfRange("window does not overlap the series")
            window = (lo, hi)
        fit = fit_growth(series.confirmed, start_day=series.start_day, window=window)
        return _json_response(payloads.growth_payload(fit))

    @app.get(f"{API_PREFIX}/regions/{{code}}/indicators")
    def indicators_endpoint(code: str, snapshot: Snapshot = Depends(snapshot_dep)):
        series = _series_for(snapshot, code)
        population = snapshot.populations.get(code)
        if population is None:
            raise InsufficientData(f"no population record for {code}")
        return _json_response(payloads.indicators_payload(indicators(series, population)))

    return app


def serve(config: ApiConfig) -> None:
    """Blocking entry point: build the app, start refresh loop, run uvicorn."""
    import uvicorn

    app = create_app(config, preload=True)
    state: AppState = app.state.epiwatch
    if config.refresh_interval > 0:
        def _loop():
            import time
            while True:
                time.sleep(config.refresh_interval)
                state.refresh()
        threading.Thread(target=_loop, daemon=True, name="epiwatch-refresh").start()
    host, _, port = config.bind_address.rpartition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
