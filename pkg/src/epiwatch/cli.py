"""Operator command line: validation, offline estimation, projection,
backtesting, synthetic generation, report emission, and serving the API.

Exit codes: 0 success, 1 data error, 2 usage error. JSON outputs reuse the
service payload builders, so `--format json` is schema-identical to the API.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import payloads
from .errors import EpiwatchError, InsufficientData, NoWaveStructure, UnknownRegion
from .estimators import (
    detect_waves,
    estimate_rt_series,
    fit_growth,
    wave_windows,
)
from .ingest import Snapshot, load_aliases, load_snapshot, nearest_region_names, match_region_name
from .projector import backtest, project_region
from .serial import DEFAULT_SHAPE, DEFAULT_SCALE, discretize_serial_interval
from .series import DEFAULT_SMOOTH_WINDOW, as_day, day_to_iso
from .service import ApiConfig, serve as serve_app
from .synthgen import generate, load_scenario


def _add_common(p: argparse.ArgumentParser, *, region: bool = True) -> None:
    p.add_argument("--data-dir", required=True, type=Path,
                   help="directory holding the canonical CSV files")
    if region:
        p.add_argument("--region", required=True,
                       help="region code or name (aliases and close spellings resolve)")
    p.add_argument("--output", type=Path, default=None,
                   help="output file (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def _add_si(p: argparse.ArgumentParser) -> None:
    p.add_argument("--si-shape", type=float, default=DEFAULT_SHAPE)
    p.add_argument("--si-scale", type=float, default=DEFAULT_SCALE)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="epiwatch",
                                     description="epidemic surveillance analytics")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse the data directory and report problems")
    p.add_argument("--data-dir", required=True, type=Path)

    p = sub.add_parser("estimate", help="growth fit and R(t) series for one region")
    _add_common(p)
    _add_si(p)
    p.add_argument("--from", dest="from_date", default=None, help="growth window start (ISO)")
    p.add_argument("--to", dest="to_date", default=None, help="growth window end (ISO)")

    p = sub.add_parser("project", help="branching-process projection for one region")
    _add_common(p)
    _add_si(p)
    p.add_argument("--horizon", type=int, default=15)
    p.add_argument("--sims", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rt-override", type=float, default=None)

    p = sub.add_parser("waves", help="first-wave peak/valley markers for one region")
    _add_common(p)
    p.add_argument("--smooth", type=int, default=DEFAULT_SMOOTH_WINDOW)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("backtest", help="split, project, and score against held-out days")
    _add_common(p)
    _add_si(p)
    p.add_argument("--split", required=True, help="training cut-off date (ISO)")
    p.add_argument("--horizon", type=int, default=15)
    p.add_argument("--sims", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("synth", help="generate a synthetic epidemic from a scenario file")
    p.add_argument("scenario", type=Path, help="scenario JSON")
    p.add_argument("--output", type=Path, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="csv")

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--data-dir", type=Path, default=None)
    p.add_argument("--config", type=Path, default=None, help="TOML config file")
    p.add_argument("--bind", default=None, help="host:port")
    p.add_argument("--refresh-interval", type=float, default=None, help="seconds, 0 = never")

    p = sub.add_parser("report", help="per-region wave/growth table plus figures")
    p.add_argument("--data-dir", required=True, type=Path)
    p.add_argument("--output", type=Path, required=True, help="output directory")
    p.add_argument("--smooth", type=int, default=DEFAULT_SMOOTH_WINDOW)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--horizon", type=int, default=15)
    p.add_argument("--sims", type=int, default=1000)
    _add_si(p)
    p.add_argument("--no-figures", action="store_true",
                   help="skip PNG rendering, write only the CSV")

    return parser


def _emit(text: str, output: Optional[Path]) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text, encoding="utf-8")


def _emit_json(payload, output: Optional[Path]) -> None:
    _emit(payloads.dumps_canonical(payload).decode("utf-8") + "\n", output)


def _resolve_region(raw: str, snapshot: Snapshot, data_dir: Path) -> str:
    regions = list(snapshot.regions.values())
    try:
        return match_region_name(raw, regions, load_aliases(data_dir))
    except UnknownRegion:
        nearest = nearest_region_names(raw, regions)
        raise UnknownRegion(
            f"unknown region {raw!r}; nearest names: {', '.join(nearest)}") from None


def _cmd_validate(args) -> int:
    from .ingest import parse_daily_csv

    snapshot = load_snapshot(args.data_dir)
    _, warnings = parse_daily_csv((args.data_dir / "daily_cases.csv").read_text(encoding="utf-8"))
    total_days = sum(len(s) for s in snapshot.series.values())
    print(f"regions: {len(snapshot.regions)}")
    print(f"series: {len(snapshot.series)} ({len(snapshot.synthesized)} synthesized parents)")
    print(f"series-days: {total_days}")
    print(f"population records: {len(snapshot.populations)}")
    print(f"warnings: {len(warnings)}")
    for w in warnings:
        print(f"  {w}")
    return 0


def _cmd_estimate(args) -> int:
    snapshot = load_snapshot(args.data_dir)
    code = _resolve_region(args.region, snapshot, args.data_dir)
    series = snapshot.series.get(code)
    if series is None:
        raise InsufficientData(f"region {code} has no case series")
    si = discretize_serial_interval(args.si_shape, args.si_scale)
    window = None
    if args.from_date or args.to_date:
        lo = as_day(args.from_date) if args.from_date else series.start_day
        hi = as_day(args.to_date) if args.to_date else series.end_day
        window = (lo, hi)
    fit = fit_growth(series.confirmed, start_day=series.start_day, window=window)
    rt = estimate_rt_series(series, si, correction=True)
    if args.format == "json":
        _emit_json({"growth": payloads.growth_payload(fit),
                    "rt": payloads.rt_payload(rt)}, args.output)
    else:
        _emit(payloads.rt_csv(rt), args.output)
        d = fit.doubling_time
        print(f"growth: r={fit.r:.4f} doubling_time="
              f"{'n/a' if d is None else f'{d:.2f}'} n={fit.n_points}", file=sys.stderr)
    return 0


def _cmd_project(args) -> int:
    snapshot = load_snapshot(args.data_dir)
    code = _resolve_region(args.region, snapshot, args.data_dir)
    si = discretize_serial_interval(args.si_shape, args.si_scale)
    result = project_region(snapshot, code, si=si, horizon=args.horizon,
                            n_sims=args.sims, seed=args.seed,
                            rt_override=args.rt_override)
    if args.format == "json":
        _emit_json(payloads.projection_payload(result), args.output)
    else:
        _emit(payloads.projection_csv(result), args.output)
    return 0


def _cmd_waves(args) -> int:
    snapshot = load_snapshot(args.data_dir)
    code = _resolve_region(args.region, snapshot, args.data_dir)
    series = snapshot.series.get(code)
    if series is None:
        raise InsufficientData(f"region {code} has no case series")
    markers = detect_waves(series.confirmed, args.smooth, start_day=series.start_day,
                           seed=args.seed)
    if args.format == "json":
        _emit_json(payloads.waves_payload(markers), args.output)
    else:
        _emit(payloads.waves_csv(markers), args.output)
    return 0


def _cmd_backtest(args) -> int:
    snapshot = load_snapshot(args.data_dir)
    code = _resolve_region(args.region, snapshot, args.data_dir)
    series = snapshot.series.get(code)
    if series is None:
        raise InsufficientData(f"region {code} has no case series")
    si = discretize_serial_interval(args.si_shape, args.si_scale)
    report = backtest(series.confirmed, si, args.split, horizon=args.horizon,
                      n_sims=args.sims, seed=args.seed, start_day=series.start_day)
    if args.format == "json":
        _emit_json(payloads.backtest_payload(report), args.output)
    else:
        _emit(payloads.backtest_csv(report), args.output)
        mape = "n/a" if report.mape is None else f"{report.mape:.4f}"
        print(f"backtest: rt_used={report.rt_used:.4f} mape={mape} "
              f"coverage_90={report.coverage_90:.3f} "
              f"comparable_days={report.comparable_days}", file=sys.stderr)
    return 0


def _cmd_synth(args) -> int:
    scenario = load_scenario(args.scenario)
    series = generate(scenario)
    if args.format == "json":
        _emit_json(payloads.series_payload(series), args.output)
    else:
        lines = ["date,region_code,confirmed,recovered,deceased,tested"]
        for t in range(len(series)):
            lines.append(f"{day_to_iso(series.start_day + t)},{series.region.code},"
                         f"{int(series.confirmed[t])},0,0,")
        _emit("\n".join(lines) + "\n", args.output)
    return 0


def _cmd_serve(args) -> int:
    if args.config is not None:
        config = ApiConfig.from_file(args.config)
    else:
        config = ApiConfig(data_dir=args.data_dir or Path("."))
    if args.data_dir is not None:
        config.data_dir = args.data_dir
    if args.bind is not None:
        config.bind_address = args.bind
    if args.refresh_interval is not None:
        config.refresh_interval = args.refresh_interval
    import os
    config.apply_env(dict(os.environ))
    serve_app(config)
    return 0


def _cmd_report(args) -> int:
    snapshot = load_snapshot(args.data_dir)
    si = discretize_serial_interval(args.si_shape, args.si_scale)
    out_dir: Path = args.output
    out_dir.mkdir(parents=True, exist_ok=True)
    fig_dir = out_dir / "figures"
    render = not args.no_figures
    if render:
        fig_dir.mkdir(exist_ok=True)

    rows = []
    for code in sorted(snapshot.series):
        series = snapshot.series[code]
        row = {"region_code": code, "region_name": snapshot.regions[code].name,
               "first_wave_peak": "", "second_wave_start": "",
               "growth_rate_wave1": "", "growth_rate_wave2": "",
               "doubling_time_wave1": "", "doubling_time_wave2": ""}
        try:
            markers = detect_waves(series.confirmed, args.smooth,
                                   start_day=series.start_day, seed=args.seed)
            row["first_wave_peak"] = day_to_iso(markers.first_peak)
            row["second_wave_start"] = day_to_iso(markers.valley)
            w1, w2 = wave_windows(series.confirmed, markers,
                                  start_day=series.start_day, smooth_window=args.smooth)
            for wave, window in (("wave1", w1), ("wave2", w2)):
                try:
                    fit = fit_growth(series.confirmed, start_day=series.start_day,
                                     window=window)
                    row[f"growth_rate_{wave}"] = f"{fit.r:.4f}"
                    if fit.doubling_time is not None:
                        row[f"doubling_time_{wave}"] = f"{fit.doubling_time:.2f}"
                except InsufficientData:
                    pass
        except (NoWaveStructure, InsufficientData):
            pass
        rows.append(row)

        if render:
            from . import figures

            figures.save_epicurve(series, fig_dir / f"{code}_epicurve.png", args.smooth)
            try:
                rt = estimate_rt_series(series, si, correction=True)
                figures.save_rt(rt, fig_dir / f"{code}_rt.png")
                result = project_region(snapshot, code, si=si, horizon=args.horizon,
                                        n_sims=args.sims, seed=args.seed)
                figures.save_projection(series, result, fig_dir / f"{code}_projection.png")
            except EpiwatchError:
                pass

    report_path = out_dir / "report.csv"
    with report_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {report_path}" + (f" and {fig_dir}" if render else ""))
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "estimate": _cmd_estimate,
    "project": _cmd_project,
    "waves": _cmd_waves,
    "backtest": _cmd_backtest,
    "synth": _cmd_synth,
    "serve": _cmd_serve,
    "report": _cmd_report,
}


def run(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except EpiwatchError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
