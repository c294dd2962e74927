"""Annual characteristic curves: mean delivered wind (GWe) vs fleet size (GWc).

A curve point averages 52 weekly dispatches. Families come in two flavours:
fixed headroom (base generation set to mean demand minus the headroom, cap at
real-time demand) and BEV-adjusted (cap leveled at weekly mean demand plus
mean fleet demand). A cheap histogram-based approximation and a monotone
piecewise-linear inversion for fleet sizing round out the module.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .bev import BevFleetSpec, fleet_aggregates
from .dispatch import CapMode, DispatchConfig, dispatch_week
from .scaling import NormalizedYear, WindHistogram

DEFAULT_CAPACITY_GRID_GWC = (20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0)
DEFAULT_BASE_GENERATION_GWE = 13.0
INVERSION_RESOLUTION_GWC = 0.1
REFINEMENT_STEP_GWC = 2.5

_SLOPE_TOL = 1e-7


class TargetUnreachableError(ValueError):
    """Requested mean output exceeds what the curve saturates at."""


@dataclass(frozen=True)
class CurveRequest:
    """One curve to evaluate: a capacity grid plus exactly one family parameter.

    solar_scale is the effective multiplier on metered solar for this run
    (applied relative to whatever scale the year was normalized with, so it
    never compounds); 0 disables solar entirely.
    """

    year: NormalizedYear
    capacities_gwc: tuple[float, ...] = DEFAULT_CAPACITY_GRID_GWC
    headroom_gwe: float | None = None
    bev: BevFleetSpec | None = None
    base_generation_gwe: float = DEFAULT_BASE_GENERATION_GWE
    solar_scale: float = 2.0
    label: str = ""

    def __post_init__(self):
        caps = tuple(float(c) for c in self.capacities_gwc)
        object.__setattr__(self, "capacities_gwc", caps)
        if not caps or any(c <= 0 for c in caps):
            raise ValueError("capacities must be positive")
        if any(b <= a for a, b in zip(caps, caps[1:])):
            raise ValueError("capacities must be strictly increasing")
        if (self.headroom_gwe is None) == (self.bev is None):
            raise ValueError("set exactly one of headroom_gwe or bev")
        if self.solar_scale < 0:
            raise ValueError("solar_scale must be >= 0")

    @property
    def family_label(self) -> str:
        if self.label:
            return self.label
        if self.headroom_gwe is not None:
            return f"headroom={self.headroom_gwe:g}"
        return f"bev={self.bev.fleet_size_millions:g}M"


@dataclass(frozen=True)
class CharacteristicCurve:
    """Annual mean wind output per fleet size; validated monotone and concave."""

    capacities_gwc: np.ndarray
    mean_wind_gwe: np.ndarray
    label: str = ""

    def __post_init__(self):
        caps = np.array(self.capacities_gwc, dtype=float)
        vals = np.array(self.mean_wind_gwe, dtype=float)
        caps.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "capacities_gwc", caps)
        object.__setattr__(self, "mean_wind_gwe", vals)
        if caps.size == 0 or caps.size != vals.size:
            raise ValueError("curve needs equal-length capacity and value arrays")
        if np.any(caps <= 0) or np.any(np.diff(caps) <= 0):
            raise ValueError("capacities must be positive and strictly increasing")
        if np.any(vals < 0):
            raise ValueError("curve values must be >= 0")
        value_tol = _SLOPE_TOL * max(1.0, float(np.abs(vals).max()))
        if np.any(np.diff(vals) < -value_tol):
            raise ValueError("curve must be nondecreasing in capacity")
        # concavity through the origin: successive secant slopes never increase
        slopes = np.diff(np.concatenate([[0.0], vals])) / np.diff(
            np.concatenate([[0.0], caps])
        )
        slope_tol = _SLOPE_TOL * max(1.0, float(np.abs(slopes).max()))
        if np.any(np.diff(slopes) > slope_tol):
            raise ValueError("curve must be concave (nonincreasing marginal gain)")

    def value_at(self, capacity_gwc: float) -> float:
        """Piecewise-linear interpolation, anchored through the origin."""
        caps = np.concatenate([[0.0], self.capacities_gwc])
        vals = np.concatenate([[0.0], self.mean_wind_gwe])
        return float(np.interp(capacity_gwc, caps, vals))


def _weeks_with_solar_scale(req: CurveRequest):
    factor = req.solar_scale / req.year.solar_scale
    if abs(factor - 1.0) < 1e-12:
        return req.year.weeks
    return tuple(replace(w, solar=w.solar * factor) for w in req.year.weeks)


def _week_configs(req: CurveRequest, weeks) -> list[DispatchConfig]:
    if req.headroom_gwe is not None:
        base = req.year.mean_demand_gwe - req.headroom_gwe
        cfg = DispatchConfig(base_generation_gwe=base)
        return [cfg] * len(weeks)
    power = fleet_aggregates(req.bev).mean_power_gw
    return [
        DispatchConfig(
            base_generation_gwe=req.base_generation_gwe,
            cap_mode=CapMode.LEVELED,
            level_gwe=float(w.demand.mean()) + power,
        )
        for w in weeks
    ]


def annual_curve(req: CurveRequest, workers: int = 1) -> CharacteristicCurve:
    """Average 52 weekly dispatches at each capacity on the request grid.

    Capacity points are independent; with workers > 1 they are evaluated on a
    thread pool and reassembled in grid order, so output is identical
    regardless of parallelism.
    """
    weeks = _weeks_with_solar_scale(req)
    configs = _week_configs(req, weeks)
    ref = req.year.reference_capacity_gwc

    def point(capacity: float) -> float:
        weekly = [
            dispatch_week(w, capacity, cfg, ref).mean_wind_used_gwe
            for w, cfg in zip(weeks, configs)
        ]
        return float(np.mean(weekly))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(point, req.capacities_gwc))
    else:
        values = [point(c) for c in req.capacities_gwc]

    return CharacteristicCurve(
        capacities_gwc=np.array(req.capacities_gwc),
        mean_wind_gwe=np.array(values),
        label=req.family_label,
    )


def curve_from_histogram(
    hist: WindHistogram,
    capacity_gwc: float,
    headroom_gwe: float,
    reference_capacity_gwc: float | None = None,
) -> float:
    """Histogram approximation of a curve point (solar-free by construction).

    Each band's center is scaled to the target capacity and capped at the
    headroom; the probability-weighted mean is the approximate annual output.
    Diverges from the time-series curve as solar grows, since both fleets
    share the same headroom.
    """
    ref = reference_capacity_gwc if reference_capacity_gwc is not None else hist.capacity_gwc
    if ref is None or ref <= 0:
        raise ValueError("histogram reference capacity unknown; pass reference_capacity_gwc")
    if capacity_gwc <= 0:
        raise ValueError("capacity must be > 0")
    scaled = hist.bin_centers_gwe * (capacity_gwc / ref)
    return float(np.sum(hist.percent / 100.0 * np.minimum(scaled, headroom_gwe)))


def invert_curve(
    curve: CharacteristicCurve,
    required_gwe: float,
    resolution_gwc: float = INVERSION_RESOLUTION_GWC,
) -> float:
    """Smallest fleet size whose curve value reaches required_gwe.

    Bisection on the piecewise-linear interpolation (anchored through the
    origin), then snapped up to the resolution grid so the returned capacity
    is guaranteed sufficient.
    """
    vals = curve.mean_wind_gwe
    plateau = float(vals[-1])
    if required_gwe > plateau + 1e-12:
        raise TargetUnreachableError(
            f"target unreachable; curve saturates at {plateau:.3f} GWe"
        )
    if required_gwe <= 0:
        return 0.0

    lo, hi = 0.0, float(curve.capacities_gwc[-1])
    while hi - lo > 1e-9:
        mid = 0.5 * (lo + hi)
        if curve.value_at(mid) >= required_gwe:
            hi = mid
        else:
            lo = mid
    return float(np.ceil((hi - 1e-9) / resolution_gwc) * resolution_gwc)


def refine_and_invert(
    req: CurveRequest,
    curve: CharacteristicCurve,
    required_gwe: float,
    step_gwc: float = REFINEMENT_STEP_GWC,
    workers: int = 1,
) -> tuple[float, CharacteristicCurve]:
    """Invert with extra curve points around the answer for sub-grid precision.

    A first inversion on the native grid locates the bracketing segment; that
    segment is filled in at step_gwc spacing, the densified curve is rebuilt,
    and the inversion repeated. Returns (capacity, densified curve).
    """
    coarse = invert_curve(curve, required_gwe)
    caps = curve.capacities_gwc
    if any(abs(coarse - c) < 1e-9 for c in caps):
        return coarse, curve

    left = 0.0
    right = float(caps[-1])
    for c in caps:
        if c < coarse:
            left = float(c)
        else:
            right = float(c)
            break
    extra = [
        c
        for c in np.arange(left + step_gwc, right - 1e-9, step_gwc)
        if not np.any(np.abs(caps - c) < 1e-9)
    ]
    if not extra:
        return coarse, curve

    fine = annual_curve(replace(req, capacities_gwc=tuple(extra)), workers=workers)
    merged_caps = np.concatenate([caps, fine.capacities_gwc])
    merged_vals = np.concatenate([curve.mean_wind_gwe, fine.mean_wind_gwe])
    order = np.argsort(merged_caps)
    dense = CharacteristicCurve(
        capacities_gwc=merged_caps[order],
        mean_wind_gwe=merged_vals[order],
        label=curve.label,
    )
    return invert_curve(dense, required_gwe), dense


def write_curves_csv(curves: Sequence[CharacteristicCurve], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["capacity_gwc", "mean_wind_gwe", "family_label"])
        for curve in curves:
            for cap, val in zip(curve.capacities_gwc, curve.mean_wind_gwe):
                writer.writerow([repr(float(cap)), repr(float(val)), curve.label])
