from __future__ import annotations

import numpy as np
import pytest

from solardisagg.errors import (
    DegenerateGeneration,
    InsufficientData,
    NoNightIntervals,
)
from solardisagg.params import (
    approx_target_solar,
    estimate_base_load,
    fit_pv_params,
    hemisphere_of,
    orientation_grid,
)
from solardisagg.pvmodel import PvParams, synthesize_proxy
from solardisagg.scenario import DEFAULT_LOCATION
from solardisagg.solargeo import night_mask
from solardisagg.timeseries import SiteLocation
from tests.test_pvmodel import clear_sky_weather


class TestEstimateBaseLoad:
    def test_minimum_over_night(self, make_series):
        # 2 days at 30 min; craft values so the night minimum is 0.25
        vals = np.full(96, 1.0)
        night = night_mask(DEFAULT_LOCATION,
                           make_series(vals).index64())
        assert night.sum() >= 3
        night_idx = np.flatnonzero(night)[:3]
        vals[night_idx] = [0.3, 0.4, 0.25]
        base = estimate_base_load(make_series(vals), DEFAULT_LOCATION)
        assert base.value == 0.25
        assert base.night_interval_count == int(night.sum())

    def test_constant_series(self, make_series):
        base = estimate_base_load(make_series(np.full(96, 0.7)),
                                  DEFAULT_LOCATION)
        assert base.value == 0.7

    def test_all_daytime_rejected(self, make_series):
        # a midday-only window has no zenith >= 100 samples
        s = make_series([1.0, 1.0, 1.0, 1.0], start="2018-06-01T18:00:00Z")
        with pytest.raises(NoNightIntervals):
            estimate_base_load(s, DEFAULT_LOCATION)

    def test_percentile_option(self, make_series):
        vals = np.full(96, 1.0)
        base_min = estimate_base_load(make_series(vals), DEFAULT_LOCATION)
        base_p = estimate_base_load(make_series(vals), DEFAULT_LOCATION,
                                    percentile=25.0)
        assert base_p.value == base_min.value == 1.0
        with pytest.raises(ValueError):
            estimate_base_load(make_series(vals), DEFAULT_LOCATION,
                               percentile=75.0)


class TestApproxTargetSolar:
    def test_no_export_all_zero(self, make_series):
        from solardisagg.params import BaseLoad

        y = make_series([0.6, 0.8, 1.2])
        out = approx_target_solar(y, BaseLoad(0.5, 10))
        assert (out.values == 0.0).all()

    def test_hand_values(self, make_series):
        from solardisagg.params import BaseLoad

        y = make_series([0.7, -1.2, 0.5])
        out = approx_target_solar(y, BaseLoad(0.5, 10))
        assert list(out.values) == [0.0, 1.7, 0.0]

    def test_translation_invariance(self, make_series):
        from solardisagg.params import BaseLoad

        y = make_series([0.7, -1.2, 0.5])
        a = approx_target_solar(y, BaseLoad(0.5, 10))
        shifted = make_series(y.values + 2.0)
        b = approx_target_solar(shifted, BaseLoad(2.5, 10))
        assert np.allclose(a.values, b.values, atol=1e-12)


class TestOrientationGrid:
    def test_north_bounds(self):
        grid = orientation_grid("north")
        assert grid[0] == 90.0 and grid[-1] == 270.0
        assert np.all(np.diff(grid) == 5.0)

    def test_south_bounds(self):
        grid = orientation_grid("south")
        assert 180.0 not in grid
        assert 0.0 in grid and 90.0 in grid and 270.0 in grid and 355.0 in grid

    def test_hemisphere_of(self):
        assert hemisphere_of(SiteLocation(30.0, 0.0)) == "north"
        assert hemisphere_of(SiteLocation(-33.0, 0.0)) == "south"


class TestFitPvParams:
    def test_round_trip_grid_aligned(self):
        weather = clear_sky_weather(days=7)
        truth = PvParams(tilt=30.0, orientation=180.0, dc_rating=3.0)
        gen = synthesize_proxy(truth, DEFAULT_LOCATION, weather)
        est = fit_pv_params(gen, DEFAULT_LOCATION, weather.temp, "north")
        assert est.tilt == pytest.approx(truth.tilt, abs=5.0)
        assert est.orientation == pytest.approx(truth.orientation, abs=5.0)
        assert est.dc_rating == pytest.approx(truth.dc_rating, rel=0.05)

    def test_scaling_homogeneity(self):
        weather = clear_sky_weather(days=7)
        truth = PvParams(tilt=25.0, orientation=200.0, dc_rating=2.0)
        gen = synthesize_proxy(truth, DEFAULT_LOCATION, weather)
        est1 = fit_pv_params(gen, DEFAULT_LOCATION, weather.temp, "north")
        est2 = fit_pv_params(gen.with_values(3.0 * gen.values),
                             DEFAULT_LOCATION, weather.temp, "north")
        assert est2.tilt == est1.tilt
        assert est2.orientation == est1.orientation
        assert est2.dc_rating == pytest.approx(3.0 * est1.dc_rating, rel=1e-9)

    def test_all_zero_degenerate(self):
        weather = clear_sky_weather(days=7)
        zero = weather.temp.with_values(np.zeros(len(weather.temp)))
        with pytest.raises((DegenerateGeneration, InsufficientData)):
            fit_pv_params(zero, DEFAULT_LOCATION, weather.temp, "north")

    def test_too_few_days(self):
        weather = clear_sky_weather(days=3)
        truth = PvParams(tilt=30.0, orientation=180.0, dc_rating=3.0)
        gen = synthesize_proxy(truth, DEFAULT_LOCATION, weather)
        with pytest.raises(InsufficientData):
            fit_pv_params(gen, DEFAULT_LOCATION, weather.temp, "north")

    def test_deterministic(self):
        weather = clear_sky_weather(days=6)
        truth = PvParams(tilt=35.0, orientation=145.0, dc_rating=4.4)
        gen = synthesize_proxy(truth, DEFAULT_LOCATION, weather)
        a = fit_pv_params(gen, DEFAULT_LOCATION, weather.temp, "north")
        b = fit_pv_params(gen, DEFAULT_LOCATION, weather.temp, "north")
        assert (a.tilt, a.orientation, a.dc_rating) == \
            (b.tilt, b.orientation, b.dc_rating)
