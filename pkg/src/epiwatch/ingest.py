"""Canonical CSV parsing, region-name matching, and snapshot assembly.

The live crowdsourced API the original pipeline consumed is defunct, so four
local CSV files are the system of record:

    daily_cases.csv     date,region_code,confirmed,recovered,deceased,tested
    population.csv      region_code,name,population
    aliases.csv         alias,region_code
    region_registry.csv region_code,name,level,parent_code

Negative daily revisions are clamped to zero with a warning (bulk corrections
in source bulletins carry no redistribution rule), duplicate (date, region)
rows are summed with a warning, and per-region series are gap-filled with
zero-count days so every series is dense.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import re
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import (
    AmbiguousRegion,
    EmptyInput,
    RowError,
    SchemaError,
    UnknownRegion,
)
from .series import IncidenceSeries, RegionKey, RegionLevel, as_day, day_to_iso

CASES_HEADER = ("date", "region_code", "confirmed", "recovered", "deceased", "tested")
POPULATION_HEADER = ("region_code", "name", "population")
ALIASES_HEADER = ("alias", "region_code")
REGISTRY_HEADER = ("region_code", "name", "level", "parent_code")

CANONICAL_FILES = ("daily_cases.csv", "population.csv", "aliases.csv", "region_registry.csv")


@dataclass(frozen=True)
class CaseRow:
    day: int
    region_code: str
    confirmed: int
    recovered: int
    deceased: int
    tested: Optional[int] = None


@dataclass(frozen=True)
class PopulationRecord:
    region_code: str
    population: int


def _check_header(row: Sequence[str] | None, expected: Sequence[str], what: str) -> None:
    if row is None:
        raise SchemaError(f"{what}: file is empty, expected header {','.join(expected)}")
    got = [c.strip() for c in row]
    for i, want in enumerate(expected):
        if i >= len(got) or got[i] != want:
            found = got[i] if i < len(got) else "<missing>"
            raise SchemaError(
                f"{what}: expected column {i + 1} to be {want!r}, found {found!r}",
                column=want,
            )
    if len(got) > len(expected):
        raise SchemaError(f"{what}: unexpected extra column {got[len(expected)]!r}",
                          column=got[len(expected)])


def _parse_count(text: str, column: str, line: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise RowError(f"unparseable {column} count {text!r}", line) from None


def parse_daily_csv(text: str) -> tuple[list[CaseRow], list[str]]:
    """Parse the canonical daily-cases CSV into per-(date, region) records.

    Returns (records, warnings). Negative counts are clamped to 0 and
    duplicate (date, region) rows are summed; both leave a warning behind.
    """
    reader = csv.reader(io.StringIO(text))
    rows = iter(reader)
    _check_header(next(rows, None), CASES_HEADER, "daily_cases")

    warnings: list[str] = []
    merged: dict[tuple[int, str], list] = {}
    order: list[tuple[int, str]] = []
    for line, row in enumerate(rows, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(CASES_HEADER):
            raise RowError(f"expected {len(CASES_HEADER)} fields, found {len(row)}", line)
        date_text, code = row[0].strip(), row[1].strip()
        try:
            day = dt.date.fromisoformat(date_text).toordinal()
        except ValueError:
            raise RowError(f"unparseable date {date_text!r}", line) from None
        if not code:
            raise RowError("empty region_code", line)
        counts = []
        for column, text_val in zip(("confirmed", "recovered", "deceased"), row[2:5]):
            value = _parse_count(text_val.strip(), column, line)
            if value < 0:
                warnings.append(f"line {line}: {column}={value} clamped to 0 for {code}")
                value = 0
            counts.append(value)
        tested_text = row[5].strip()
        tested: Optional[int] = None
        if tested_text:
            tested = _parse_count(tested_text, "tested", line)
            if tested < 0:
                warnings.append(f"line {line}: tested={tested} clamped to 0 for {code}")
                tested = 0

        key = (day, code)
        if key in merged:
            acc = merged[key]
            for i in range(3):
                acc[i] += counts[i]
            if tested is not None:
                acc[3] = tested if acc[3] is None else acc[3] + tested
            warnings.append(
                f"line {line}: duplicate row for ({date_text}, {code}) summed into earlier row"
            )
        else:
            merged[key] = [*counts, tested]
            order.append(key)

    records = [
        CaseRow(day=day, region_code=code, confirmed=acc[0], recovered=acc[1],
                deceased=acc[2], tested=acc[3])
        for (day, code), acc in ((k, merged[k]) for k in sorted(order))
    ]
    return records, warnings


def parse_population_csv(text: str) -> dict[str, PopulationRecord]:
    reader = csv.reader(io.StringIO(text))
    rows = iter(reader)
    _check_header(next(rows, None), POPULATION_HEADER, "population")
    out: dict[str, PopulationRecord] = {}
    for line, row in enumerate(rows, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(POPULATION_HEADER):
            raise RowError(f"expected {len(POPULATION_HEADER)} fields, found {len(row)}", line)
        code = row[0].strip()
        pop = _parse_count(row[2].strip(), "population", line)
        if pop < 1:
            raise RowError(f"population must be >= 1, got {pop}", line)
        if code in out:
            raise RowError(f"duplicate population record for {code}", line)
        out[code] = PopulationRecord(region_code=code, population=pop)
    return out


def parse_registry_csv(text: str) -> list[RegionKey]:
    reader = csv.reader(io.StringIO(text))
    rows = iter(reader)
    _check_header(next(rows, None), REGISTRY_HEADER, "region_registry")
    regions: list[RegionKey] = []
    seen: set[str] = set()
    for line, row in enumerate(rows, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(REGISTRY_HEADER):
            raise RowError(f"expected {len(REGISTRY_HEADER)} fields, found {len(row)}", line)
        code, name, level_text, parent = (c.strip() for c in row)
        if code in seen:
            raise RowError(f"duplicate region code {code}", line)
        seen.add(code)
        try:
            level = RegionLevel(level_text)
        except ValueError:
            raise RowError(f"unknown level {level_text!r}", line) from None
        if RegionKey.level_for_code(code) is not level:
            raise RowError(f"level {level.value!r} does not match code {code!r}", line)
        regions.append(RegionKey(code=code, name=name, level=level, parent=parent or None))
    _validate_hierarchy(regions)
    return regions


def _validate_hierarchy(regions: Sequence[RegionKey]) -> None:
    by_code = {r.code: r for r in regions}
    for r in regions:
        if r.level is RegionLevel.NATION:
            if r.parent is not None:
                raise SchemaError(f"nation {r.code} must not declare a parent")
            continue
        if r.parent is None or r.parent not in by_code:
            raise UnknownRegion(f"{r.code} declares unknown parent {r.parent!r}")
        want = RegionLevel.STATE if r.level is RegionLevel.DISTRICT else RegionLevel.NATION
        if by_code[r.parent].level is not want:
            raise SchemaError(f"{r.code} parent {r.parent} is not a {want.value}")


def parse_aliases_csv(text: str) -> dict[str, str]:
    reader = csv.reader(io.StringIO(text))
    rows = iter(reader)
    _check_header(next(rows, None), ALIASES_HEADER, "aliases")
    out: dict[str, str] = {}
    for line, row in enumerate(rows, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(ALIASES_HEADER):
            raise RowError(f"expected {len(ALIASES_HEADER)} fields, found {len(row)}", line)
        out[row[0].strip()] = row[1].strip()
    return out


_NON_ALNUM = re.compile(r"[^0-9a-z]+")


def normalize_name(raw: str) -> str:
    """Casefold and collapse punctuation/whitespace runs to single spaces."""
    return _NON_ALNUM.sub(" ", raw.casefold()).strip()


def levenshtein(a: str, b: str) -> int:
    """Iterative two-row edit distance (insert/delete/substitute, unit costs)."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (ca != cb),
            ))
        previous = current
    return previous[-1]


def match_region_name(raw: str, regions: Sequence[RegionKey],
                      aliases: Mapping[str, str] | None = None,
                      max_distance: int = 2) -> str:
    """Resolve a free-form region name to a registry code.

    Resolution order: normalized exact name (or code), alias table, then the
    unique registry name within Levenshtein distance <= max_distance. A tie at
    minimal distance is a hard error: silent mis-joins corrupt surveillance
    data, so ambiguity is never guessed away.
    """
    if not regions:
        raise UnknownRegion("region registry is empty")
    query = normalize_name(raw)
    by_norm_code = {normalize_name(r.code): r.code for r in regions}
    if query in by_norm_code:
        return by_norm_code[query]
    by_norm_name: dict[str, str] = {}
    for r in regions:
        by_norm_name.setdefault(normalize_name(r.name), r.code)
    if query in by_norm_name:
        return by_norm_name[query]
    if aliases:
        for alias, code in aliases.items():
            if normalize_name(alias) == query:
                return code
    best: list[str] = []
    best_distance = max_distance + 1
    for norm, code in by_norm_name.items():
        d = levenshtein(query, norm)
        if d < best_distance:
            best, best_distance = [code], d
        elif d == best_distance:
            best.append(code)
    if best_distance > max_distance:
        raise UnknownRegion(f"no region matches {raw!r}")
    if len(best) > 1:
        raise AmbiguousRegion(raw, best)
    return best[0]


def nearest_region_names(raw: str, regions: Sequence[RegionKey], k: int = 3) -> list[str]:
    """Closest registry names by edit distance, for error messages."""
    query = normalize_name(raw)
    ranked = sorted(regions, key=lambda r: (levenshtein(query, normalize_name(r.name)), r.code))
    return [r.name for r in ranked[:k]]


@dataclass(frozen=True)
class Snapshot:
    """Immutable, validated image of all ingested series and metadata."""

    as_of: str
    regions: Mapping[str, RegionKey]
    series: Mapping[str, IncidenceSeries]
    populations: Mapping[str, PopulationRecord]
    synthesized: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "regions", MappingProxyType(dict(self.regions)))
        object.__setattr__(self, "series", MappingProxyType(dict(self.series)))
        object.__setattr__(self, "populations", MappingProxyType(dict(self.populations)))
        object.__setattr__(self, "synthesized", frozenset(self.synthesized))


def _dense_series(region: RegionKey, rows: list[CaseRow]) -> IncidenceSeries:
    lo = min(r.day for r in rows)
    hi = max(r.day for r in rows)
    n = hi - lo + 1
    confirmed = np.zeros(n, dtype=np.int64)
    recovered = np.zeros(n, dtype=np.int64)
    deceased = np.zeros(n, dtype=np.int64)
    tested = np.zeros(n, dtype=np.int64)
    # days and rows without a tested figure count as 0, same as gap-filling
    has_tested = any(r.tested is not None for r in rows)
    for r in rows:
        t = r.day - lo
        confirmed[t] = r.confirmed
        recovered[t] = r.recovered
        deceased[t] = r.deceased
        if r.tested is not None:
            tested[t] = r.tested
    return IncidenceSeries(
        region=region, start_day=lo, confirmed=confirmed, recovered=recovered,
        deceased=deceased, tested=tested if has_tested else None,
    )


def _sum_children(region: RegionKey, children: list[IncidenceSeries]) -> IncidenceSeries:
    lo = min(s.start_day for s in children)
    hi = max(s.end_day for s in children)
    n = hi - lo + 1
    cols = {name: np.zeros(n, dtype=np.int64) for name in ("confirmed", "recovered", "deceased")}
    has_tested = all(s.tested is not None for s in children)
    tested = np.zeros(n, dtype=np.int64) if has_tested else None
    for s in children:
        i = s.start_day - lo
        j = i + len(s)
        for name in cols:
            cols[name][i:j] += s.column(name)
        if has_tested:
            tested[i:j] += s.tested  # type: ignore[index]
    return IncidenceSeries(region=region, start_day=lo, tested=tested, **cols)


def build_snapshot(case_records: Iterable[CaseRow],
                   population_records: Mapping[str, PopulationRecord],
                   registry: Sequence[RegionKey],
                   as_of: str | None = None) -> Snapshot:
    """Assemble an immutable snapshot from parsed records.

    Per-region series are gap-filled with zero days; state and national
    series missing from the input are synthesized as day-wise child sums and
    flagged in ``synthesized``.
    """
    regions = {r.code: r for r in registry}
    _validate_hierarchy(registry)
    grouped: dict[str, list[CaseRow]] = {}
    for row in case_records:
        if row.region_code not in regions:
            raise UnknownRegion(f"case row references unregistered region {row.region_code!r}")
        grouped.setdefault(row.region_code, []).append(row)
    if not grouped:
        raise EmptyInput("no case records")

    series: dict[str, IncidenceSeries] = {
        code: _dense_series(regions[code], rows) for code, rows in grouped.items()
    }
    synthesized: set[str] = set()
    for level in (RegionLevel.STATE, RegionLevel.NATION):
        for code, region in regions.items():
            if region.level is not level or code in series:
                continue
            children = [s for child, s in series.items() if regions[child].parent == code]
            if children:
                series[code] = _sum_children(region, children)
                synthesized.add(code)

    if as_of is None:
        as_of = dt.datetime.now(dt.timezone.utc).isoformat(timespec="microseconds")
    return Snapshot(
        as_of=as_of,
        regions=regions,
        series=series,
        populations=dict(population_records),
        synthesized=frozenset(synthesized),
    )


def serialize_daily_csv(snapshot: Snapshot) -> str:
    """Render non-synthesized series back to the canonical daily-cases CSV.

    Round-trips: parsing the output and rebuilding yields an identical
    snapshot (synthesized parents are re-derived, not serialized).
    """
    lines = [",".join(CASES_HEADER)]
    for code in sorted(snapshot.series):
        if code in snapshot.synthesized:
            continue
        s = snapshot.series[code]
        tested = s.tested
        for t in range(len(s)):
            tested_text = "" if tested is None else str(int(tested[t]))
            lines.append(
                f"{day_to_iso(s.start_day + t)},{code},{int(s.confirmed[t])},"
                f"{int(s.recovered[t])},{int(s.deceased[t])},{tested_text}"
            )
    return "\n".join(lines) + "\n"


def load_snapshot(data_dir: str | Path, as_of: str | None = None) -> Snapshot:
    """Read the canonical files from a directory and build a snapshot."""
    root = Path(data_dir)
    for name in CANONICAL_FILES:
        if not (root / name).is_file():
            raise SchemaError(f"missing canonical file {name} in {root}")
    records, _ = parse_daily_csv((root / "daily_cases.csv").read_text(encoding="utf-8"))
    populations = parse_population_csv((root / "population.csv").read_text(encoding="utf-8"))
    registry = parse_registry_csv((root / "region_registry.csv").read_text(encoding="utf-8"))
    return build_snapshot(records, populations, registry, as_of=as_of)


def load_aliases(data_dir: str | Path) -> dict[str, str]:
    path = Path(data_dir) / "aliases.csv"
    if not path.is_file():
        return {}
    return parse_aliases_csv(path.read_text(encoding="utf-8"))
