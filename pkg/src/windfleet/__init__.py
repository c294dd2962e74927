"""Deterministic grid / wind-fleet / V2G BEV-fleet scenario simulator."""

__version__ = "0.1.0"

from .ingest import (
    GridSeries,
    IngestError,
    RawRecord,
    WeekSeries,
    canonicalize,
    parse_csv,
    segment_weeks,
)
from .scaling import (
    NormalizedYear,
    ScalingSpec,
    WindHistogram,
    extrapolate_wind,
    normalize,
    wind_histogram,
)
from .dispatch import (
    CapMode,
    DispatchConfig,
    DispatchResult,
    dispatch_week,
    headroom_of,
    surplus_deficit,
)
from .curves import (
    CharacteristicCurve,
    CurveRequest,
    TargetUnreachableError,
    annual_curve,
    curve_from_histogram,
    invert_curve,
)
from .bev import (
    BevFleetSpec,
    ChargeSchedule,
    FleetAggregates,
    SocTrajectory,
    consumption_profile,
    fleet_aggregates,
    leveling_schedule,
    soc_trajectory,
    unmanaged_peak,
)
from .report import (
    FleetSizingRow,
    LullReport,
    ScenarioConstants,
    annual_leveled_gt,
    build_table2,
    gt_utilization,
    lull_report,
)
from .synth import synthetic_year

__all__ = [
    "__version__",
    "GridSeries",
    "IngestError",
    "RawRecord",
    "WeekSeries",
    "canonicalize",
    "parse_csv",
    "segment_weeks",
    "NormalizedYear",
    "ScalingSpec",
    "WindHistogram",
    "extrapolate_wind",
    "normalize",
    "wind_histogram",
    "CapMode",
    "DispatchConfig",
    "DispatchResult",
    "dispatch_week",
    "headroom_of",
    "surplus_deficit",
    "CharacteristicCurve",
    "CurveRequest",
    "TargetUnreachableError",
    "annual_curve",
    "curve_from_histogram",
    "invert_curve",
    "BevFleetSpec",
    "ChargeSchedule",
    "FleetAggregates",
    "SocTrajectory",
    "consumption_profile",
    "fleet_aggregates",
    "leveling_schedule",
    "soc_trajectory",
    "unmanaged_peak",
    "FleetSizingRow",
    "LullReport",
    "ScenarioConstants",
    "annual_leveled_gt",
    "build_table2",
    "gt_utilization",
    "lull_report",
    "synthetic_year",
]
