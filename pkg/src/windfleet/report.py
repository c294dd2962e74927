"""Scenario studies assembled into machine-readable tables and plot data.

Fleet-sizing rows couple exact arithmetic identities (power, storage,
emissions, battery cost scale linearly with fleet size) with the one
simulated column: the wind fleet capacity needed to supply the baseline
output plus the BEV fleet's mean demand. Wind-lull reports summarize a
leveled dispatch of one stressed week. Numbers are stored at full precision;
rounding happens only at display time.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

import numpy as np

from .bev import BevFleetSpec, fleet_aggregates
from .curves import (
    DEFAULT_CAPACITY_GRID_GWC,
    CurveRequest,
    annual_curve,
    refine_and_invert,
)
from .dispatch import CapMode, DispatchConfig, dispatch_week
from .ingest import WeekSeries
from .scaling import DEFAULT_REFERENCE_CAPACITY_GWC, NormalizedYear

DEFAULT_LULL_BASE_GENERATION_GWE = 7.0  # reduced nuclear, no imports

# UK carbon emissions by sector, MT per annum (government records); static
# reference context for the emissions columns, never computed.
UK_EMISSIONS_MTPA = {
    "energy_supply": {1990: 242.1, 2017: 105.0},
    "business": {1990: 111.9, 2017: 65.8},
    "transport": {1990: 125.3, 2017: 124.4},
    "residential": {1990: 78.4, 2017: 64.1},
    "other": {1990: 36.4, 2017: 7.4},
    "total": {1990: 594.1, 2017: 366.7},
}


@dataclass(frozen=True)
class ScenarioConstants:
    """Overridable constants for emissions and cost columns."""

    gas_carbon_intensity_mtpa_per_gwe: float = 4.8
    baseline_fleet_emissions_mtpa: float = 66.3
    baseline_fleet_size_millions: float = 35.0
    battery_unit_cost_eur_per_kwh: float = 255.0  # 155 cell + 100 V2G charger
    baseline_wind_gwe: float = 6.0  # output of the existing reference fleet

    def __post_init__(self):
        for name in (
            "gas_carbon_intensity_mtpa_per_gwe",
            "baseline_fleet_emissions_mtpa",
            "baseline_fleet_size_millions",
            "battery_unit_cost_eur_per_kwh",
            "baseline_wind_gwe",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")


@dataclass(frozen=True)
class FleetSizingRow:
    fleet_size_millions: float
    mean_power_gwe: float
    required_wind_gwc: float
    storage_gwh: float
    emissions_reduction_mtpa: float
    battery_cost_eur_bn: float


@dataclass(frozen=True)
class LullReport:
    """Leveled dispatch of one stressed week, summarized at the largest fleet."""

    week_index: int
    level_gwe: float
    peak_gt_gwe: float
    mean_gt_gwe: float
    gt_energy_gwh: float
    min_wind_gwe: float
    wind_means_gwe: dict[float, float]


def build_table2(
    year: NormalizedYear,
    fleet_sizes_millions: Sequence[float],
    consts: ScenarioConstants = ScenarioConstants(),
    capacities_gwc: tuple[float, ...] | None = None,
    base_generation_gwe: float = 13.0,
    solar_scale: float = 2.0,
    workers: int = 1,
) -> list[FleetSizingRow]:
    """Wind fleet sizes needed to power BEV fleets, plus the linear columns.

    For each fleet size, a BEV-adjusted characteristic curve is built and
    inverted at (baseline wind output + fleet mean power); the inversion is
    refined below the native capacity grid for sub-grid precision. Raises
    TargetUnreachableError when a fleet is too large for the capacity grid.
    """
    rows = []
    for size in fleet_sizes_millions:
        spec = BevFleetSpec(fleet_size_millions=size)
        agg = fleet_aggregates(spec)
        req = CurveRequest(
            year=year,
            capacities_gwc=capacities_gwc or DEFAULT_CAPACITY_GRID_GWC,
            bev=spec,
            base_generation_gwe=base_generation_gwe,
            solar_scale=solar_scale,
        )
        curve = annual_curve(req, workers=workers)
        target = consts.baseline_wind_gwe + agg.mean_power_gw
        required, _ = refine_and_invert(req, curve, target, workers=workers)
        rows.append(
            FleetSizingRow(
                fleet_size_millions=float(size),
                mean_power_gwe=agg.mean_power_gw,
                required_wind_gwc=required,
                storage_gwh=agg.storage_capacity_gwh,
                emissions_reduction_mtpa=consts.baseline_fleet_emissions_mtpa
                * size
                / consts.baseline_fleet_size_millions,
                battery_cost_eur_bn=agg.storage_capacity_gwh
                * consts.battery_unit_cost_eur_per_kwh
                / 1000.0,
            )
        )
    return rows


def lull_report(
    week: WeekSeries,
    spec: BevFleetSpec,
    base_generation_gwe: float,
    capacities_gwc: Sequence[float],
    reference_capacity_gwc: float = DEFAULT_REFERENCE_CAPACITY_GWC,
) -> LullReport:
    """Leveled dispatch of one week at each capacity; GT stats at the largest.

    The level is the weekly mean demand plus the fleet's mean power. GT energy
    always equals mean GT x 168 h; any externally quoted deficit that breaks
    that identity is not reproducible from the dispatch itself.
    """
    agg = fleet_aggregates(spec)
    level = float(week.demand.mean()) + agg.mean_power_gw
    cfg = DispatchConfig(
        base_generation_gwe=base_generation_gwe,
        cap_mode=CapMode.LEVELED,
        level_gwe=level,
    )
    wind_means = {}
    largest = max(capacities_gwc)
    summary = None
    for cap in capacities_gwc:
        result = dispatch_week(week, cap, cfg, reference_capacity_gwc)
        wind_means[float(cap)] = result.mean_wind_used_gwe
        if cap == largest:
            summary = result
    min_wind = float(week.wind.min() * largest / reference_capacity_gwc)
    return LullReport(
        week_index=week.index,
        level_gwe=level,
        peak_gt_gwe=summary.peak_gas_turbine_gwe,
        mean_gt_gwe=summary.mean_gas_turbine_gwe,
        gt_energy_gwh=summary.gt_energy_gwh,
        min_wind_gwe=min_wind,
        wind_means_gwe=wind_means,
    )


def annual_leveled_gt(
    year: NormalizedYear,
    spec: BevFleetSpec,
    base_generation_gwe: float,
    capacity_gwc: float,
    reference_capacity_gwc: float | None = None,
) -> tuple[float, float]:
    """Annual mean and peak gas-turbine requirement under V2G leveling.

    Each week is dispatched at its own level (weekly mean demand plus the
    fleet's mean power); the turbines cover whatever the wind fleet of
    capacity_gwc cannot. Feed the mean into gt_utilization against the peak
    to size the shadow fleet.
    """
    ref = reference_capacity_gwc or year.reference_capacity_gwc
    agg = fleet_aggregates(spec)
    means = []
    peak = 0.0
    for week in year.weeks:
        cfg = DispatchConfig(
            base_generation_gwe=base_generation_gwe,
            cap_mode=CapMode.LEVELED,
            level_gwe=float(week.demand.mean()) + agg.mean_power_gw,
        )
        result = dispatch_week(week, capacity_gwc, cfg, ref)
        means.append(result.mean_gas_turbine_gwe)
        peak = max(peak, result.peak_gas_turbine_gwe)
    return float(np.mean(means)), peak


def gt_utilization(mean_gt_gwe: float, capacity_gwe: float) -> float:
    """Fraction of the gas-turbine fleet's capacity actually generating."""
    if capacity_gwe <= 0:
        raise ValueError("capacity must be > 0")
    return mean_gt_gwe / capacity_gwe


def write_table2_csv(rows: Sequence[FleetSizingRow], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "fleet_size_millions",
                "mean_power_gwe",
                "required_wind_gwc",
                "storage_gwh",
                "emissions_reduction_mtpa",
                "battery_cost_eur_bn",
            ]
        )
        for row in rows:
            writer.writerow(
                [
                    repr(row.fleet_size_millions),
                    repr(row.mean_power_gwe),
                    repr(row.required_wind_gwc),
                    repr(row.storage_gwh),
                    repr(row.emissions_reduction_mtpa),
                    repr(row.battery_cost_eur_bn),
                ]
            )


def format_table2(rows: Sequence[FleetSizingRow]) -> str:
    """Display table with conventional rounding (0.1 GWe/GWc, whole GWh and EUR Bn)."""
    lines = [
        "fleet (M)  power (GWe)  wind fleet (GWc)  storage (GWh)  "
        "emissions saved (MT p.a.)  battery cost (EUR Bn)"
    ]
    for r in rows:
        lines.append(
            f"{r.fleet_size_millions:9g}  {r.mean_power_gwe:11.1f}  "
            f"{r.required_wind_gwc:16.1f}  {r.storage_gwh:13.0f}  "
            f"{r.emissions_reduction_mtpa:25.1f}  {r.battery_cost_eur_bn:21.0f}"
        )
    return "\n".join(lines)


def write_lull_csv(report: LullReport, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "week_index",
                "level_gwe",
                "peak_gt_gwe",
                "mean_gt_gwe",
                "gt_energy_gwh",
                "min_wind_gwe",
            ]
        )
        writer.writerow(
            [
                report.week_index,
                repr(report.level_gwe),
                repr(report.peak_gt_gwe),
                repr(report.mean_gt_gwe),
                repr(report.gt_energy_gwh),
                repr(report.min_wind_gwe),
            ]
        )
        writer.writerow([])
        writer.writerow(["capacity_gwc", "mean_wind_gwe"])
        for cap in sorted(report.wind_means_gwe):
            writer.writerow([repr(cap), repr(report.wind_means_gwe[cap])])


def sha256_of(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_run_manifest(
    path: str | Path,
    command: str,
    input_path: str | Path | None,
    config_items: dict[str, object],
    version: str,
) -> None:
    """Reproducibility record: config, input hash, software version.

    The created_utc line is the only run-varying field; all result files are
    byte-identical across reruns of the same config and input.
    """
    lines = [f"version = {version}", f"command = {command}"]
    if input_path is not None:
        lines.append(f"input = {input_path}")
        lines.append(f"input_sha256 = {sha256_of(input_path)}")
    for key in sorted(config_items):
        lines.append(f"{key} = {config_items[key]}")
    lines.append(
        f"created_utc = {datetime.now(timezone.utc).strftime('%Y-%m-%dT%H:%M:%SZ')}"
    )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
