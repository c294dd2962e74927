import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from windfleet.dispatch import (
    CapMode,
    DispatchConfig,
    dispatch_week,
    headroom_of,
    surplus_deficit,
    write_dispatch_csv,
)
from windfleet.ingest import SAMPLES_PER_WEEK
from _helpers import make_week

DAY = 288  # samples in 24 h

week_arrays = arrays(
    float,
    SAMPLES_PER_WEEK,
    elements=st.floats(min_value=0.0, max_value=30.0),
)


class TestDispatchWeek:
    def test_clamp_at_demand(self):
        week = make_week(demand=20.0, wind=10.0, solar=0.0)
        result = dispatch_week(week, 20.0, DispatchConfig(13.0))
        assert result.wind_used[0] == pytest.approx(7.0)
        assert result.wind_curtailed[0] == pytest.approx(3.0)
        assert result.gas_turbine[0] == 0.0

    def test_floor_at_zero_when_solar_fills_headroom(self):
        week = make_week(demand=20.0, wind=10.0, solar=9.0)
        result = dispatch_week(week, 20.0, DispatchConfig(13.0))
        assert result.wind_used[0] == 0.0
        assert result.wind_curtailed[0] == pytest.approx(10.0)
        assert result.gas_turbine[0] == 0.0

    def test_leveled_lull_peak(self):
        # at the lull floor (wind 1.6 GWe) the turbines carry 55.6 - 7 - 1.6 = 47.0
        week = make_week(demand=50.0, wind=1.6, solar=0.0)
        cfg = DispatchConfig(7.0, CapMode.LEVELED, level_gwe=55.6)
        result = dispatch_week(week, 20.0, cfg)
        assert result.wind_used[0] == pytest.approx(1.6)
        assert result.peak_gas_turbine_gwe == pytest.approx(47.0)

    def test_leveled_weekly_mean(self):
        # at the weekly mean wind of 8.6 GWe the turbines carry 55.6 - 7 - 8.6 = 40.0
        week = make_week(demand=50.0, wind=8.6, solar=0.0)
        cfg = DispatchConfig(7.0, CapMode.LEVELED, level_gwe=55.6)
        result = dispatch_week(week, 20.0, cfg)
        assert result.mean_gas_turbine_gwe == pytest.approx(40.0)

    def test_energies_left_riemann(self):
        gas = np.zeros(SAMPLES_PER_WEEK)
        week = make_week(demand=30.0, wind=0.0, solar=0.0)
        result = dispatch_week(week, 20.0, DispatchConfig(10.0))
        gas[:] = 20.0
        assert result.gt_energy_gwh == pytest.approx(gas.sum() / 12.0)
        assert result.gt_energy_gwh == pytest.approx(20.0 * 168.0)

    def test_capacity_scaling_uses_reference(self):
        week = make_week(demand=100.0, wind=6.0, solar=0.0)
        result = dispatch_week(week, 40.0, DispatchConfig(0.0), reference_capacity_gwc=20.0)
        assert result.wind_used[0] == pytest.approx(12.0)

    def test_leveled_requires_level(self):
        with pytest.raises(ValueError, match="level"):
            DispatchConfig(7.0, CapMode.LEVELED)

    def test_level_rejected_outside_leveled_mode(self):
        with pytest.raises(ValueError, match="Leveled"):
            DispatchConfig(7.0, level_gwe=40.0)

    def test_rejects_nonpositive_capacity(self):
        with pytest.raises(ValueError):
            dispatch_week(make_week(), 0.0, DispatchConfig(13.0))

    @settings(max_examples=30, deadline=None)
    @given(demand=week_arrays, wind=week_arrays, solar=week_arrays,
           base=st.floats(min_value=-5.0, max_value=25.0))
    def test_complementarity_and_balance(self, demand, wind, solar, base):
        week = make_week(demand=demand + 1.0, wind=wind, solar=solar)
        result = dispatch_week(week, 20.0, DispatchConfig(base))
        # curtailment and gas generation never coincide
        assert np.all((result.wind_curtailed == 0.0) | (result.gas_turbine == 0.0))
        # wind splits exactly into used + curtailed
        np.testing.assert_allclose(
            result.wind_used + result.wind_curtailed, week.wind, rtol=1e-12, atol=1e-12
        )
        assert np.all(result.wind_used >= 0.0)
        assert np.all(result.gas_turbine >= 0.0)

    @settings(max_examples=30, deadline=None)
    @given(demand=week_arrays, wind=week_arrays,
           level=st.floats(min_value=5.0, max_value=60.0))
    def test_leveled_supply_identity(self, demand, wind, level):
        week = make_week(demand=demand + 1.0, wind=wind, solar=0.0)
        cfg = DispatchConfig(3.0, CapMode.LEVELED, level_gwe=level)
        result = dispatch_week(week, 20.0, cfg)
        active = (result.gas_turbine > 0.0) | (result.wind_curtailed > 0.0)
        supply = 3.0 + week.solar + result.wind_used + result.gas_turbine
        np.testing.assert_allclose(supply[active], level, rtol=1e-9)

    def test_monotone_in_capacity(self, synth_year):
        week = synth_year.weeks[10]
        cfg = DispatchConfig(13.0)
        results = [dispatch_week(week, c, cfg) for c in (20.0, 30.0, 50.0, 80.0)]
        means = [r.mean_wind_used_gwe for r in results]
        energies = [r.gt_energy_gwh for r in results]
        assert all(b >= a - 1e-12 for a, b in zip(means, means[1:]))
        assert all(b <= a + 1e-12 for a, b in zip(energies, energies[1:]))

    def test_leveled_mode_ignores_demand_shape(self, synth_year):
        # the leveled cap replaces demand outright, so only wind/solar matter
        base_week = synth_year.weeks[7]
        reshaped = make_week(
            demand=np.linspace(20.0, 45.0, SAMPLES_PER_WEEK),
            wind=base_week.wind,
            solar=base_week.solar,
            index=base_week.index,
            start=base_week.start_time,
        )
        cfg = DispatchConfig(7.0, CapMode.LEVELED, level_gwe=50.0)
        a = dispatch_week(base_week, 60.0, cfg)
        b = dispatch_week(reshaped, 60.0, cfg)
        np.testing.assert_array_equal(a.gas_turbine, b.gas_turbine)
        np.testing.assert_array_equal(a.wind_used, b.wind_used)

    @settings(max_examples=25, deadline=None)
    @given(shift=st.floats(min_value=-15.0, max_value=30.0))
    def test_flattened_translation_exact(self, synth_year, shift):
        week = synth_year.weeks[4]
        base = 13.0
        shifted = make_week(
            demand=week.demand + shift, wind=week.wind, solar=week.solar,
            index=week.index, start=week.start_time,
        )
        a = dispatch_week(week, 60.0, DispatchConfig(base, flatten_demand=True))
        b = dispatch_week(shifted, 60.0, DispatchConfig(base + shift, flatten_demand=True))
        assert b.mean_wind_used_gwe == pytest.approx(a.mean_wind_used_gwe, rel=1e-12)


class TestHeadroom:
    def test_2017_values(self):
        assert headroom_of(33.0, 13.0) == pytest.approx(20.0)

    def test_low_base(self):
        assert headroom_of(33.0, 3.0) == pytest.approx(30.0)

    def test_degenerate(self):
        assert headroom_of(28.5, 28.5) == 0.0


class TestSurplusDeficit:
    def test_constant_shortfall_rectangle(self):
        # cap - base - solar - wind = 30 - 10 - 0 - 10 = 10 GW short for 24 h
        week = make_week(demand=30.0, wind=10.0, solar=0.0)
        deficit, surplus = surplus_deficit(week, 20.0, DispatchConfig(10.0), window=(0, DAY))
        assert deficit == pytest.approx(240.0)
        assert surplus == 0.0

    def test_constant_excess_rectangle(self):
        # supply exceeds cap by 30 GW for 24 h -> 720 GWh surplus
        week = make_week(demand=20.0, wind=40.0, solar=0.0)
        deficit, surplus = surplus_deficit(week, 20.0, DispatchConfig(10.0), window=(0, DAY))
        assert surplus == pytest.approx(720.0)
        assert deficit == 0.0

    def test_balanced(self):
        week = make_week(demand=20.0, wind=0.0, solar=5.0)
        deficit, surplus = surplus_deficit(week, 20.0, DispatchConfig(15.0))
        assert (deficit, surplus) == (0.0, 0.0)

    def test_uses_uncurtailed_wind(self):
        # available wind far above cap still counts fully toward the surplus
        week = make_week(demand=20.0, wind=10.0, solar=0.0)
        _, surplus_at_20 = surplus_deficit(week, 20.0, DispatchConfig(13.0), window=(0, DAY))
        _, surplus_at_80 = surplus_deficit(week, 80.0, DispatchConfig(13.0), window=(0, DAY))
        assert surplus_at_80 == pytest.approx(surplus_at_20 + 30.0 * 24.0)

    def test_empty_window_fatal(self):
        with pytest.raises(ValueError, match="empty"):
            surplus_deficit(make_week(), 20.0, DispatchConfig(13.0), window=(5, 5))

    def test_slice_window_equivalent_to_tuple(self):
        week = make_week(demand=30.0, wind=10.0, solar=0.0)
        cfg = DispatchConfig(10.0)
        assert surplus_deficit(week, 20.0, cfg, window=slice(0, DAY)) == surplus_deficit(
            week, 20.0, cfg, window=(0, DAY)
        )


class TestDispatchCsv:
    def test_roundtrip_matches_result(self, tmp_path, synth_year):
        week = synth_year.weeks[2]
        cfg = DispatchConfig(7.0, CapMode.LEVELED, level_gwe=50.0)
        result = dispatch_week(week, 80.0, cfg)
        path = tmp_path / "dispatch.csv"
        write_dispatch_csv(week, result, cfg, path)

        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == SAMPLES_PER_WEEK
        gas = np.array([float(r["gas_turbine_gw"]) for r in rows])
        np.testing.assert_array_equal(gas, result.gas_turbine)
        assert rows[0]["timestamp"] == week.start_time.strftime("%Y-%m-%dT%H:%M:%SZ")
