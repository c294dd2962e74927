"""Batch command line: one subcommand per reproducible artifact.

Subcommands: ingest (validation only), histogram, curves, bev, lull, table2.
Settings resolve flag > config file > built-in default. Config files are
plain ``key = value`` text; lists are comma-separated and capacity lists also
accept ``start:stop:step``. Exit codes: 0 ok, 1 simulation error, 2 input
error, 3 configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .bev import (
    BevFleetSpec,
    consumption_profile,
    fleet_aggregates,
    leveling_schedule,
    soc_trajectory,
    write_bev_csv,
)
from .curves import (
    DEFAULT_CAPACITY_GRID_GWC,
    CurveRequest,
    annual_curve,
    write_curves_csv,
)
from .dispatch import CapMode, DispatchConfig, dispatch_week, write_dispatch_csv
from .ingest import IngestError, parse_csv, canonicalize, segment_weeks
from .report import (
    DEFAULT_LULL_BASE_GENERATION_GWE,
    ScenarioConstants,
    build_table2,
    format_table2,
    lull_report,
    write_lull_csv,
    write_run_manifest,
    write_table2_csv,
)
from .scaling import (
    ScalingSpec,
    extrapolate_wind,
    normalize,
    wind_histogram,
    write_histogram_csv,
)

log = logging.getLogger(__name__)

DEFAULT_HEADROOMS_GWE = (20.0, 25.0, 30.0, 35.0)
DEFAULT_FLEET_SIZES_M = (15.0, 20.0, 25.0, 30.0, 35.0)
DEFAULT_CURVE_FAMILY_FLEETS_M = (0.0, 15.0, 20.0, 25.0, 30.0, 35.0)

_KNOWN_CONFIG_KEYS = {
    "input",
    "out_dir",
    "columns",
    "embedded_multiplier",
    "reference_capacity_gwc",
    "target_capacity_factor",
    "solar_scale",
    "base_generation_gwe",
    "capacities_gwc",
    "headrooms_gwe",
    "fleet_sizes_millions",
    "weeks",
    "workers",
    "fleet_size_millions",
    "daily_energy_per_vehicle_kwh",
    "battery_per_vehicle_kwh",
    "night_fraction",
    "day_start_hour",
    "day_end_hour",
    "initial_soc_fraction",
    "v2g_power_limit_gw",
    "round_trip_efficiency",
    "baseline_wind_gwe",
    "battery_unit_cost_eur_per_kwh",
    "baseline_fleet_emissions_mtpa",
    "baseline_fleet_size_millions",
    "gas_carbon_intensity_mtpa_per_gwe",
}


class ConfigError(Exception):
    """Bad flag, bad config file, or inconsistent settings."""


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):  # noqa: A003 - argparse hook
        raise ConfigError(message)


def load_config_file(path: str | Path) -> dict[str, str]:
    """Parse a plain key = value config file; unknown keys are fatal."""
    values: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KNOWN_CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value
    return values


def _parse_float_list(text: str, key: str) -> list[float]:
    text = text.strip()
    if not text:
        return []
    try:
        if ":" in text:
            start, stop, step = (float(p) for p in text.split(":"))
            if step <= 0:
                raise ValueError("step must be > 0")
            return [float(v) for v in np.arange(start, stop + step / 2, step)]
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse {key} from {text!r}: {exc}") from exc


def _parse_columns(text: str) -> dict[str, str]:
    mapping = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ConfigError(f"column mapping entries look like logical=file, got {part!r}")
        logical, actual = (p.strip() for p in part.split("=", 1))
        if logical not in ("timestamp", "demand", "wind", "solar"):
            raise ConfigError(f"unknown logical column {logical!r}")
        mapping[logical] = actual
    return mapping


class Settings:
    """Merged flag/config values with typed accessors."""

    def __init__(self, flags: dict[str, object], config: dict[str, str]):
        self._flags = flags
        self._config = config

    def _raw(self, key: str) -> object | None:
        flag = self._flags.get(key)
        if flag is not None:
            return flag
        return self._config.get(key)

    def get_str(self, key: str, default: str | None = None) -> str | None:
        raw = self._raw(key)
        return default if raw is None else str(raw)

    def get_float(self, key: str, default: float | None = None) -> float | None:
        raw = self._raw(key)
        if raw is None:
            return default
        try:
            return float(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"cannot parse {key} from {raw!r}") from exc

    def get_int(self, key: str, default: int) -> int:
        raw = self._raw(key)
        if raw is None:
            return default
        try:
            return int(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"cannot parse {key} from {raw!r}") from exc

    def get_float_list(self, key: str, default: Sequence[float]) -> list[float]:
        raw = self._raw(key)
        if raw is None:
            return list(default)
        if isinstance(raw, str):
            return _parse_float_list(raw, key)
        return [float(v) for v in raw]

    def get_columns(self) -> dict[str, str]:
        raw = self._raw("columns")
        if raw is None:
            return {}
        if isinstance(raw, str):
            return _parse_columns(raw)
        return dict(raw)


def _build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(
        prog="windfleet",
        description="Grid + wind fleet + V2G BEV fleet scenario simulator",
    )
    parser.add_argument("--version", action="version", version=f"windfleet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--input", help="5-minute records CSV (MW)")
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--out-dir", dest="out_dir", help="output directory (default: out)")
        p.add_argument("--columns", help="column remap, e.g. timestamp=ts,demand=d")
        p.add_argument("--solar-scale", dest="solar_scale", type=float)
        p.add_argument("--base-gen", dest="base_generation_gwe", type=float)
        p.add_argument(
            "--seedless",
            action="store_true",
            help="reserved; the model is deterministic and accepts no seed",
        )

    p_ingest = sub.add_parser("ingest", help="validate an input file, write nothing")
    common(p_ingest)
    p_ingest.add_argument("--check", action="store_true", help="validation only (default)")

    p_hist = sub.add_parser("histogram", help="wind generation-band histogram")
    common(p_hist)

    p_curves = sub.add_parser("curves", help="annual characteristic-curve families")
    common(p_curves)
    p_curves.add_argument("--capacities", dest="capacities_gwc")
    p_curves.add_argument("--headrooms", dest="headrooms_gwe")
    p_curves.add_argument("--fleet-sizes", dest="fleet_sizes_millions")
    p_curves.add_argument("--workers", type=int)

    p_bev = sub.add_parser("bev", help="weekly leveling schedule and SOC trajectory")
    common(p_bev)
    p_bev.add_argument("--weeks")
    p_bev.add_argument("--fleet-size", dest="fleet_size_millions", type=float)

    p_lull = sub.add_parser("lull", help="stressed-week leveled dispatch report")
    common(p_lull)
    p_lull.add_argument("--weeks")
    p_lull.add_argument("--capacities", dest="capacities_gwc")
    p_lull.add_argument("--fleet-size", dest="fleet_size_millions", type=float)

    p_table = sub.add_parser("table2", help="wind fleet sizes needed per BEV fleet size")
    common(p_table)
    p_table.add_argument("--capacities", dest="capacities_gwc")
    p_table.add_argument("--fleet-sizes", dest="fleet_sizes_millions")
    p_table.add_argument("--workers", type=int)

    return parser


def _settings_from_args(args: argparse.Namespace) -> Settings:
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "seedless", "check")}
    config = load_config_file(args.config) if args.config else {}
    return Settings(flags, config)


def _scaling_spec(s: Settings, default_solar_scale: float) -> ScalingSpec:
    return ScalingSpec(
        embedded_multiplier=s.get_float("embedded_multiplier", 1.5),
        reference_capacity_gwc=s.get_float("reference_capacity_gwc", 20.0),
        target_capacity_factor=s.get_float("target_capacity_factor", 0.30),
        solar_scale=s.get_float("solar_scale", default_solar_scale),
    )


def _bev_spec(s: Settings, default_fleet: float = 35.0) -> BevFleetSpec:
    return BevFleetSpec(
        fleet_size_millions=s.get_float("fleet_size_millions", default_fleet),
        daily_energy_per_vehicle_kwh=s.get_float("daily_energy_per_vehicle_kwh", 10.0),
        battery_per_vehicle_kwh=s.get_float("battery_per_vehicle_kwh", 30.0),
        night_fraction=s.get_float("night_fraction", 0.2),
        day_start_hour=s.get_float("day_start_hour", 6.0),
        day_end_hour=s.get_float("day_end_hour", 21.0),
        initial_soc_fraction=s.get_float("initial_soc_fraction", 0.8),
        v2g_power_limit_gw=s.get_float("v2g_power_limit_gw", None),
        round_trip_efficiency=s.get_float("round_trip_efficiency", 1.0),
    )


def _constants(s: Settings) -> ScenarioConstants:
    return ScenarioConstants(
        gas_carbon_intensity_mtpa_per_gwe=s.get_float("gas_carbon_intensity_mtpa_per_gwe", 4.8),
        baseline_fleet_emissions_mtpa=s.get_float("baseline_fleet_emissions_mtpa", 66.3),
        baseline_fleet_size_millions=s.get_float("baseline_fleet_size_millions", 35.0),
        battery_unit_cost_eur_per_kwh=s.get_float("battery_unit_cost_eur_per_kwh", 255.0),
        baseline_wind_gwe=s.get_float("baseline_wind_gwe", 6.0),
    )


def _load_series(s: Settings):
    input_path = s.get_str("input")
    if not input_path:
        raise ConfigError("no input file given (use --input or the config file)")
    if not Path(input_path).exists():
        raise IngestError(f"input file not found: {input_path}")
    records = parse_csv(input_path, s.get_columns())
    return input_path, canonicalize(records, source=str(input_path))


def _load_year(s: Settings, default_solar_scale: float):
    input_path, series = _load_series(s)
    spec = _scaling_spec(s, default_solar_scale)
    return input_path, normalize(series, spec), spec


def _out_dir(s: Settings) -> Path:
    out = Path(s.get_str("out_dir", "out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _capacities(s: Settings) -> tuple[float, ...]:
    capacities = tuple(s.get_float_list("capacities_gwc", DEFAULT_CAPACITY_GRID_GWC))
    if not capacities:
        raise ConfigError("capacities list is empty")
    return capacities


def _weeks(s: Settings, default: Sequence[int]) -> list[int]:
    raw = s.get_float_list("weeks", list(default))
    weeks = [int(w) for w in raw]
    if not weeks:
        raise ConfigError("weeks list is empty")
    for w in weeks:
        if not 1 <= w <= 52:
            raise ConfigError(f"week index {w} out of range 1..52")
    return weeks


def _manifest(out: Path, command: str, input_path, s: Settings, resolved: dict) -> None:
    write_run_manifest(
        out / f"run_manifest_{command}.txt",
        command=command,
        input_path=input_path,
        config_items=resolved,
        version=__version__,
    )


def cmd_ingest(s: Settings) -> int:
    input_path, series = _load_series(s)
    weeks = segment_weeks(series)
    print(f"input: {input_path}")
    print(f"samples: {series.n_samples} ({series.n_samples / 2016:.2f} weeks of data)")
    print(f"weeks usable: {len(weeks)}")
    for note in series.provenance:
        print(f"provenance: {note}")
    print(f"mean demand: {series.demand.mean():.2f} GW")
    print(f"mean metered wind: {series.wind_metered.mean():.2f} GW")
    print(f"mean solar: {series.solar.mean():.2f} GW")
    return 0


def cmd_histogram(s: Settings) -> int:
    input_path, year, spec = _load_year(s, default_solar_scale=1.0)
    trace = extrapolate_wind(year, spec.reference_capacity_gwc)
    hist = wind_histogram(trace, 1.0, capacity_gwc=spec.reference_capacity_gwc)
    out = _out_dir(s)
    write_histogram_csv(hist, out / "fig1_histogram.csv")
    _manifest(out, "histogram", input_path, s, {
        "reference_capacity_gwc": spec.reference_capacity_gwc,
        "bin_width_gwe": 1.0,
    })
    in_first_band = hist.bin_lower_gwe < 1.0
    low_band = float(hist.percent[in_first_band].sum())
    print(f"wrote {out / 'fig1_histogram.csv'}")
    print(f"share of year in the 0-1 GWe band: {low_band:.2f}%")
    return 0


def cmd_curves(s: Settings) -> int:
    headrooms = s.get_float_list("headrooms_gwe", DEFAULT_HEADROOMS_GWE)
    if not headrooms:
        raise ConfigError("headrooms list is empty")
    capacities = _capacities(s)
    fleet_sizes = s.get_float_list("fleet_sizes_millions", DEFAULT_CURVE_FAMILY_FLEETS_M)
    workers = s.get_int("workers", 1)
    base = s.get_float("base_generation_gwe", 13.0)

    input_path, year, spec = _load_year(s, default_solar_scale=2.0)
    out = _out_dir(s)

    headroom_curves = [
        annual_curve(
            CurveRequest(
                year=year,
                capacities_gwc=capacities,
                headroom_gwe=h,
                solar_scale=spec.solar_scale,
            ),
            workers=workers,
        )
        for h in headrooms
    ]
    write_curves_csv(headroom_curves[:1], out / "fig5_curve.csv")
    write_curves_csv(headroom_curves, out / "fig7_families.csv")

    if fleet_sizes:
        bev_curves = [
            annual_curve(
                CurveRequest(
                    year=year,
                    capacities_gwc=capacities,
                    bev=_bev_spec_with_size(s, size),
                    base_generation_gwe=base,
                    solar_scale=spec.solar_scale,
                ),
                workers=workers,
            )
            for size in fleet_sizes
        ]
        write_curves_csv(bev_curves, out / "fig12_families.csv")

    _manifest(out, "curves", input_path, s, {
        "capacities_gwc": capacities,
        "headrooms_gwe": headrooms,
        "fleet_sizes_millions": fleet_sizes,
        "base_generation_gwe": base,
        "solar_scale": spec.solar_scale,
        "workers": workers,
    })
    print(f"wrote {out / 'fig5_curve.csv'}, {out / 'fig7_families.csv'}"
          + (f", {out / 'fig12_families.csv'}" if fleet_sizes else ""))
    return 0


def _bev_spec_with_size(s: Settings, size: float) -> BevFleetSpec:
    return replace(_bev_spec(s), fleet_size_millions=size)


def cmd_bev(s: Settings) -> int:
    weeks = _weeks(s, default=[17])
    spec = _bev_spec(s)
    input_path, year, scale = _load_year(s, default_solar_scale=1.0)
    out = _out_dir(s)

    for n, wk in enumerate(weeks):
        week = year.weeks[wk - 1]
        schedule = leveling_schedule(week, spec)
        consumption = consumption_profile(spec, week)
        trajectory = soc_trajectory(schedule, consumption, spec)
        suffix = "" if n == 0 else f"_w{wk}"
        write_bev_csv(week, schedule, consumption, trajectory,
                      out / f"fig9_schedule{suffix}.csv")
        _write_soc_csv(week, trajectory, out / f"fig11_soc{suffix}.csv")
        status = "feasible" if trajectory.feasible else "INFEASIBLE"
        print(
            f"week {wk}: level {schedule.level_gwe:.1f} GWe, "
            f"stored energy range [{trajectory.min_energy_gwh:.1f}, "
            f"{trajectory.max_energy_gwh:.1f}] of {trajectory.storage_capacity_gwh:.0f} GWh "
            f"({status})"
        )

    agg = fleet_aggregates(spec)
    _manifest(out, "bev", input_path, s, {
        "weeks": weeks,
        "fleet_size_millions": spec.fleet_size_millions,
        "mean_power_gw": agg.mean_power_gw,
        "storage_capacity_gwh": agg.storage_capacity_gwh,
        "solar_scale": scale.solar_scale,
    })
    return 0


def _write_soc_csv(week, trajectory, path: Path) -> None:
    import csv as _csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = _csv.writer(fh)
        writer.writerow(["timestamp", "soc_gwh"])
        for i in range(week.n_samples):
            writer.writerow(
                [
                    week.timestamp(i).strftime("%Y-%m-%dT%H:%M:%SZ"),
                    repr(float(trajectory.energy_gwh[i])),
                ]
            )


def cmd_lull(s: Settings) -> int:
    weeks = _weeks(s, default=[3])
    capacities = _capacities(s)
    base = s.get_float("base_generation_gwe", DEFAULT_LULL_BASE_GENERATION_GWE)
    spec = _bev_spec(s)
    input_path, year, scale = _load_year(s, default_solar_scale=1.0)
    out = _out_dir(s)

    for n, wk in enumerate(weeks):
        week = year.weeks[wk - 1]
        rep = lull_report(week, spec, base, capacities, year.reference_capacity_gwc)
        suffix = "" if n == 0 else f"_w{wk}"
        cfg = DispatchConfig(
            base_generation_gwe=base, cap_mode=CapMode.LEVELED, level_gwe=rep.level_gwe
        )
        result = dispatch_week(week, max(capacities), cfg, year.reference_capacity_gwc)
        write_dispatch_csv(week, result, cfg, out / f"fig15_gt{suffix}.csv")
        write_lull_csv(rep, out / f"lull_report{suffix}.csv")
        print(
            f"week {wk}: level {rep.level_gwe:.1f} GWe, peak GT {rep.peak_gt_gwe:.1f} GWe, "
            f"mean GT {rep.mean_gt_gwe:.1f} GWe"
        )
        print(
            f"week {wk}: GT energy {rep.gt_energy_gwh:.0f} GWh "
            f"(identically mean GT x 168 h; quoted figures that break this "
            f"identity are not reproducible from the dispatch)"
        )

    _manifest(out, "lull", input_path, s, {
        "weeks": weeks,
        "capacities_gwc": capacities,
        "base_generation_gwe": base,
        "fleet_size_millions": spec.fleet_size_millions,
        "solar_scale": scale.solar_scale,
    })
    return 0


def cmd_table2(s: Settings) -> int:
    fleet_sizes = s.get_float_list("fleet_sizes_millions", DEFAULT_FLEET_SIZES_M)
    if not fleet_sizes:
        raise ConfigError("fleet_sizes list is empty")
    capacities = _capacities(s)
    base = s.get_float("base_generation_gwe", 13.0)
    workers = s.get_int("workers", 1)
    consts = _constants(s)

    input_path, year, spec = _load_year(s, default_solar_scale=2.0)
    out = _out_dir(s)
    rows = build_table2(
        year,
        fleet_sizes,
        consts,
        capacities_gwc=capacities,
        base_generation_gwe=base,
        solar_scale=spec.solar_scale,
        workers=workers,
    )
    write_table2_csv(rows, out / "table2.csv")
    _manifest(out, "table2", input_path, s, {
        "fleet_sizes_millions": fleet_sizes,
        "capacities_gwc": capacities,
        "base_generation_gwe": base,
        "solar_scale": spec.solar_scale,
        "baseline_wind_gwe": consts.baseline_wind_gwe,
        "workers": workers,
    })
    print(format_table2(rows))
    print(f"wrote {out / 'table2.csv'}")
    return 0


_COMMANDS = {
    "ingest": cmd_ingest,
    "histogram": cmd_histogram,
    "curves": cmd_curves,
    "bev": cmd_bev,
    "lull": cmd_lull,
    "table2": cmd_table2,
}


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "seedless", False):
            raise ConfigError(
                "--seedless is reserved: the model is fully deterministic "
                "and accepts no seed"
            )
        settings = _settings_from_args(args)
        return _COMMANDS[args.command](settings)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 3
    except IngestError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
