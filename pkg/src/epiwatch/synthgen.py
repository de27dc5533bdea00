"""Ground-truth synthetic epidemics from a renewal process with scripted R(t).

Used as the independent oracle for estimator-recovery and backtest tests:
generated counts follow I_t ~ Poisson(R(t) * sum_s w_s I_{t-s}) beyond the
seeded prefix, so any estimator should recover the scripted step values.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InvalidParameter
from .projector import infection_pressure
from .serial import SerialInterval, discretize_serial_interval
from .series import IncidenceSeries, RegionKey, RegionLevel, as_day

SYNTHETIC_REGION = RegionKey(code="ZZ", name="Synthetic", level=RegionLevel.NATION)

DEFAULT_START_DAY = as_day("2020-01-01")


@dataclass(frozen=True)
class Scenario:
    """A scripted epidemic: seeded prefix, step-function R(t), one RNG seed."""

    days: int
    seed_cases: tuple[int, ...]
    rt_steps: tuple[tuple[int, float], ...]
    si: SerialInterval
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "seed_cases", tuple(int(c) for c in self.seed_cases))
        steps = tuple((int(d), float(r)) for d, r in self.rt_steps)
        object.__setattr__(self, "rt_steps", steps)
        if len(self.seed_cases) < self.si.support:
            raise InvalidParameter(
                f"need >= {self.si.support} seed days (serial-interval support), "
                f"got {len(self.seed_cases)}")
        if any(c < 0 for c in self.seed_cases):
            raise InvalidParameter("seed cases must be non-negative")
        if self.days < len(self.seed_cases):
            raise InvalidParameter("days must cover the seeded prefix")
        if not steps:
            raise InvalidParameter("rt_steps must not be empty")
        if any(r < 0 for _, r in steps):
            raise InvalidParameter("all R values must be >= 0")
        if list(steps) != sorted(steps, key=lambda s: s[0]):
            raise InvalidParameter("rt_steps must be sorted by from_day")

    def rt_at(self, day: int) -> float:
        """Step-function lookup; days before the first step use its value."""
        starts = [d for d, _ in self.rt_steps]
        idx = max(bisect_right(starts, day) - 1, 0)
        return self.rt_steps[idx][1]


def load_scenario(source: str | Path | dict) -> Scenario:
    """Build a Scenario from a JSON file or an already-decoded dict."""
    if isinstance(source, (str, Path)):
        payload = json.loads(Path(source).read_text(encoding="utf-8"))
    else:
        payload = source
    si_spec = payload["si"]
    si = discretize_serial_interval(float(si_spec["shape"]), float(si_spec["scale"]))
    return Scenario(
        days=int(payload["days"]),
        seed_cases=tuple(payload["seed_cases"]),
        rt_steps=tuple((step["from_day"], step["r"]) for step in payload["rt_steps"]),
        si=si,
        seed=int(payload.get("seed", 0)),
    )


def generate(scenario: Scenario, start_day: int = DEFAULT_START_DAY) -> IncidenceSeries:
    """Simulate one epidemic; deterministic given the scenario seed."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(scenario.seed)))
    counts = np.zeros(scenario.days, dtype=np.int64)
    k = len(scenario.seed_cases)
    counts[:k] = scenario.seed_cases
    buf = counts.astype(float)
    mass = scenario.si.mass
    for t in range(k, scenario.days):
        lam = scenario.rt_at(t) * infection_pressure(buf[:t], mass)
        counts[t] = rng.poisson(lam) if lam > 0 else 0
        buf[t] = counts[t]
    zeros = np.zeros_like(counts)
    return IncidenceSeries(region=SYNTHETIC_REGION, start_day=start_day,
                           confirmed=counts, recovered=zeros, deceased=zeros)


def expected_series(scenario: Scenario) -> np.ndarray:
    """Noise-free renewal recursion for the scenario (matches the generator's
    conditional means; constant-R tails coincide with expected_projection)."""
    k = len(scenario.seed_cases)
    out = np.zeros(scenario.days, dtype=float)
    out[:k] = scenario.seed_cases
    mass = scenario.si.mass
    for t in range(k, scenario.days):
        out[t] = scenario.rt_at(t) * infection_pressure(out[:t], mass)
    return out


def constant_rt_scenario(r: float, days: int, seed_level: int, si: SerialInterval,
                         seed: int = 0) -> Scenario:
    """Convenience scenario: flat seeding at seed_level, a single R step."""
    return Scenario(days=days, seed_cases=(seed_level,) * si.support,
                    rt_steps=((0, r),), si=si, seed=seed)


def stepped_rt_scenario(steps: Sequence[tuple[int, float]], days: int,
                        seed_level: int, si: SerialInterval, seed: int = 0) -> Scenario:
    return Scenario(days=days, seed_cases=(seed_level,) * si.support,
                    rt_steps=tuple(steps), si=si, seed=seed)
