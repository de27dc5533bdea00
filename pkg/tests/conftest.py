"""Shared fixtures: the paper serial interval and a small deterministic
four-file data directory with nation/state/district structure."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

from epiwatch.ingest import load_snapshot
from epiwatch.serial import SerialInterval, discretize_serial_interval
from epiwatch.series import as_day, day_to_iso

FIXTURE_START = as_day("2021-01-01")
FIXTURE_DAYS = 80


@pytest.fixture(scope="session")
def paper_si() -> SerialInterval:
    return discretize_serial_interval(2.15, 2.04)


@pytest.fixture
def lag1_si() -> SerialInterval:
    return SerialInterval(mass=[1.0])


def two_bump(t: int) -> int:
    first = 300.0 * math.exp(-((t - 20) ** 2) / (2 * 36.0))
    second = 600.0 * math.exp(-((t - 60) ** 2) / (2 * 49.0))
    return int(round(first + second))


def fixture_columns() -> dict[str, dict[str, list]]:
    """Deterministic per-region columns for the standard fixture."""
    t = np.arange(FIXTURE_DAYS)
    pune = {
        "confirmed": [two_bump(int(x)) for x in t],
        "recovered": [int(x) // 2 for x in t],
        "deceased": [int(x) // 9 for x in t],
        "tested": None,
    }
    mumbai = {
        "confirmed": [int(round(30 * math.exp(0.04 * int(x)))) for x in t],
        "recovered": [int(x) for x in t],
        "deceased": [int(x) // 6 for x in t],
        "tested": None,
    }
    ekm = {
        "confirmed": [15 + int(x) + 5 * (int(x) % 2) for x in t],
        "recovered": [10 + int(x) for x in t],
        "deceased": [int(x) // 10 for x in t],
        "tested": [500 + 10 * int(x) for x in t],
    }
    kerala = {
        "confirmed": [c + 20 + int(x) for c, x in zip(ekm["confirmed"], t)],
        "recovered": [r + 5 for r in ekm["recovered"]],
        "deceased": [d + 1 for d in ekm["deceased"]],
        "tested": [v + 400 for v in ekm["tested"]],
    }
    pondy = {
        "confirmed": [10 + int(x) % 4 for x in t],
        "recovered": [5] * FIXTURE_DAYS,
        "deceased": [0] * FIXTURE_DAYS,
        "tested": None,
    }
    return {
        "IN-MH-Pune": pune,
        "IN-MH-Mumbai": mumbai,
        "IN-KL-Ernakulam": ekm,
        "IN-KL": kerala,
        "IN-PY": pondy,
    }


FIXTURE_REGISTRY = [
    ("IN", "India", "nation", ""),
    ("IN-MH", "Maharashtra", "state", "IN"),
    ("IN-KL", "Kerala", "state", "IN"),
    ("IN-PY", "Puducherry", "state", "IN"),
    ("IN-MH-Pune", "Pune", "district", "IN-MH"),
    ("IN-MH-Mumbai", "Mumbai", "district", "IN-MH"),
    ("IN-KL-Ernakulam", "Ernakulam", "district", "IN-KL"),
]

FIXTURE_POPULATIONS = [
    ("IN", "India", 1_380_000_000),
    ("IN-MH", "Maharashtra", 123_000_000),
    ("IN-KL", "Kerala", 35_000_000),
    ("IN-PY", "Puducherry", 1_500_000),
    ("IN-MH-Pune", "Pune", 9_400_000),
    ("IN-MH-Mumbai", "Mumbai", 20_400_000),
    ("IN-KL-Ernakulam", "Ernakulam", 3_300_000),
]

FIXTURE_ALIASES = [
    ("Pondicherry", "IN-PY"),
    ("Bombay", "IN-MH-Mumbai"),
]


def write_data_dir(root: Path,
                   columns: dict[str, dict[str, list]] | None = None,
                   registry=FIXTURE_REGISTRY,
                   populations=FIXTURE_POPULATIONS,
                   aliases=FIXTURE_ALIASES,
                   start_day: int = FIXTURE_START) -> Path:
    """Write the four canonical CSVs into root and return it."""
    root.mkdir(parents=True, exist_ok=True)
    columns = fixture_columns() if columns is None else columns

    lines = ["date,region_code,confirmed,recovered,deceased,tested"]
    for code in sorted(columns):
        cols = columns[code]
        tested = cols.get("tested")
        for t in range(len(cols["confirmed"])):
            tested_text = "" if tested is None else str(tested[t])
            lines.append(
                f"{day_to_iso(start_day + t)},{code},{cols['confirmed'][t]},"
                f"{cols['recovered'][t]},{cols['deceased'][t]},{tested_text}"
            )
    (root / "daily_cases.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    reg_lines = ["region_code,name,level,parent_code"]
    reg_lines += [f"{c},{n},{lv},{p}" for c, n, lv, p in registry]
    (root / "region_registry.csv").write_text("\n".join(reg_lines) + "\n", encoding="utf-8")

    pop_lines = ["region_code,name,population"]
    pop_lines += [f"{c},{n},{p}" for c, n, p in populations]
    (root / "population.csv").write_text("\n".join(pop_lines) + "\n", encoding="utf-8")

    alias_lines = ["alias,region_code"]
    alias_lines += [f"{a},{c}" for a, c in aliases]
    (root / "aliases.csv").write_text("\n".join(alias_lines) + "\n", encoding="utf-8")
    return root


@pytest.fixture
def data_dir(tmp_path) -> Path:
    return write_data_dir(tmp_path / "data")


@pytest.fixture
def snapshot(data_dir):
    return load_snapshot(data_dir, as_of="2021-03-22T00:00:00+00:00")
