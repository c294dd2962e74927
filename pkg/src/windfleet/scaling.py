"""Normalize metered series to a reference wind fleet and extrapolate.

Metered wind undercounts the embedded (behind-the-meter) component, so it is
multiplied up and then rescaled so the year hits the target capacity factor
at the reference fleet size. Larger hypothetical fleets are pure linear
extrapolations of the reference trace.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from .ingest import GridSeries, WeekSeries, WEEKS_PER_YEAR, segment_weeks

DEFAULT_REFERENCE_CAPACITY_GWC = 20.0


@dataclass(frozen=True)
class ScalingSpec:
    """How to turn metered wind/solar into the model's normalized traces.

    embedded_multiplier corrects for unmetered embedded wind (metered is
    roughly two thirds of the total). solar_scale is 1.0 when reproducing
    weekly traces and is set to 2.0 for annual characteristic-curve runs.
    """

    embedded_multiplier: float = 1.5
    reference_capacity_gwc: float = DEFAULT_REFERENCE_CAPACITY_GWC
    target_capacity_factor: float = 0.30
    solar_scale: float = 1.0

    def __post_init__(self):
        if self.embedded_multiplier <= 0 or self.reference_capacity_gwc <= 0:
            raise ValueError("embedded_multiplier and reference_capacity must be > 0")
        if not 0 < self.target_capacity_factor <= 1:
            raise ValueError("target_capacity_factor must be in (0, 1]")
        if self.solar_scale <= 0:
            raise ValueError("solar_scale must be > 0")


@dataclass(frozen=True)
class NormalizedYear:
    """52 weeks whose wind is total generation at the reference fleet size."""

    weeks: tuple[WeekSeries, ...]
    reference_capacity_gwc: float
    target_capacity_factor: float
    solar_scale: float

    def __post_init__(self):
        object.__setattr__(self, "weeks", tuple(self.weeks))
        if len(self.weeks) != WEEKS_PER_YEAR:
            raise ValueError(f"a year holds {WEEKS_PER_YEAR} weeks, got {len(self.weeks)}")
        target = self.target_capacity_factor * self.reference_capacity_gwc
        mean = float(np.mean([w.wind.mean() for w in self.weeks]))
        if abs(mean - target) > 1e-9 * max(1.0, abs(target)):
            raise ValueError(
                f"annual mean wind {mean} GW does not meet target {target} GW"
            )

    @cached_property
    def demand(self) -> np.ndarray:
        return np.concatenate([w.demand for w in self.weeks])

    @cached_property
    def wind(self) -> np.ndarray:
        return np.concatenate([w.wind for w in self.weeks])

    @cached_property
    def solar(self) -> np.ndarray:
        return np.concatenate([w.solar for w in self.weeks])

    @property
    def mean_demand_gwe(self) -> float:
        return float(self.demand.mean())

    @property
    def mean_wind_gwe(self) -> float:
        return float(self.wind.mean())


@dataclass(frozen=True)
class WindHistogram:
    """Share of time spent in fixed-width generation bands.

    bin_lower_gwe[i] is the lower edge of bin i; a sample x lands in
    floor(x / bin_width), so values exactly on an edge go to the upper bin.
    """

    bin_width_gwe: float
    bin_lower_gwe: np.ndarray
    percent: np.ndarray
    capacity_gwc: float | None = None

    def __post_init__(self):
        lower = np.array(self.bin_lower_gwe, dtype=float)
        pct = np.array(self.percent, dtype=float)
        lower.setflags(write=False)
        pct.setflags(write=False)
        object.__setattr__(self, "bin_lower_gwe", lower)
        object.__setattr__(self, "percent", pct)
        if self.bin_width_gwe <= 0:
            raise ValueError("bin_width must be > 0")
        if np.any(pct < 0):
            raise ValueError("percentages must be >= 0")
        if abs(pct.sum() - 100.0) > 1e-6:
            raise ValueError(f"percentages sum to {pct.sum()}, expected 100")

    @property
    def bin_centers_gwe(self) -> np.ndarray:
        return self.bin_lower_gwe + 0.5 * self.bin_width_gwe


def normalize(
    source: GridSeries | Sequence[WeekSeries], spec: ScalingSpec
) -> NormalizedYear:
    """Scale a year of records to the reference fleet at the target capacity factor.

    wind(t) = wind_metered(t) * embedded_multiplier * k with k chosen so the
    annual mean equals target_capacity_factor * reference_capacity; one k for
    the whole year. Solar is multiplied by solar_scale; demand is untouched.
    """
    weeks = segment_weeks(source) if isinstance(source, GridSeries) else list(source)
    if len(weeks) != WEEKS_PER_YEAR:
        raise ValueError(f"normalize needs {WEEKS_PER_YEAR} weeks, got {len(weeks)}")

    metered_mean = float(np.mean([w.wind.mean() for w in weeks]))
    pre_mean = metered_mean * spec.embedded_multiplier
    if pre_mean <= 0:
        raise ValueError("annual mean of metered wind is zero; cannot normalize")
    k = (spec.target_capacity_factor * spec.reference_capacity_gwc) / pre_mean

    scaled = tuple(
        replace(
            w,
            wind=w.wind * (spec.embedded_multiplier * k),
            solar=w.solar * spec.solar_scale,
        )
        for w in weeks
    )
    return NormalizedYear(
        weeks=scaled,
        reference_capacity_gwc=spec.reference_capacity_gwc,
        target_capacity_factor=spec.target_capacity_factor,
        solar_scale=spec.solar_scale,
    )


def extrapolate_wind(year: NormalizedYear, capacity_gwc: float) -> np.ndarray:
    """Full-year wind trace of a fleet of the given size (no curtailment)."""
    if capacity_gwc <= 0:
        raise ValueError("capacity must be > 0")
    return year.wind * (capacity_gwc / year.reference_capacity_gwc)


def wind_histogram(
    trace: np.ndarray, bin_width_gwe: float = 1.0, capacity_gwc: float | None = None
) -> WindHistogram:
    """Histogram a generation trace into bands of bin_width_gwe."""
    trace = np.asarray(trace, dtype=float)
    if trace.size == 0:
        raise ValueError("trace is empty")
    if bin_width_gwe <= 0:
        raise ValueError("bin_width must be > 0")
    if np.any(trace < 0):
        raise ValueError("generation trace must be >= 0")

    indices = np.floor(trace / bin_width_gwe).astype(np.int64)
    counts = np.bincount(indices)
    first = int(np.argmax(counts > 0))  # bins listed from first to last occupied
    percent = 100.0 * counts[first:] / trace.size
    lower = np.arange(first, counts.size) * bin_width_gwe
    return WindHistogram(
        bin_width_gwe=bin_width_gwe,
        bin_lower_gwe=lower,
        percent=percent,
        capacity_gwc=capacity_gwc,
    )


def write_histogram_csv(hist: WindHistogram, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_lower_gwe", "percent"])
        for lower, pct in zip(hist.bin_lower_gwe, hist.percent):
            writer.writerow([repr(float(lower)), repr(float(pct))])
