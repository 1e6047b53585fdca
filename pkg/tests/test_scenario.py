from __future__ import annotations

import numpy as np
import pytest

from solardisagg.mixture import init_weights
from solardisagg.pvmodel import max_generation
from solardisagg.scenario import (
    NoiseConfig,
    generate_scenario,
    make_realizable_case,
)
from solardisagg.solargeo import night_mask_for


@pytest.fixture(scope="module")
def bundle():
    return generate_scenario(seed=11, n_homes=5, days=6, step_minutes=30)


class TestGenerateScenario:
    def test_identity_exact(self, bundle):
        for home in bundle.homes:
            assert np.array_equal(home.net.values,
                                  home.true_load.values - home.true_solar.values)

    def test_solar_nonnegative_night_zero(self, bundle):
        for home in bundle.homes:
            assert (home.true_solar.values >= 0).all()
            night = night_mask_for(bundle.location, home.true_solar)
            assert (home.true_solar.values[night] == 0.0).all()

    def test_deterministic(self):
        a = generate_scenario(seed=11, n_homes=3, days=3, step_minutes=30)
        b = generate_scenario(seed=11, n_homes=3, days=3, step_minutes=30)
        for ha, hb in zip(a.homes, b.homes):
            assert np.array_equal(ha.net.values, hb.net.values)
            assert ha.params == hb.params
        assert np.array_equal(a.weather.dni.values, b.weather.dni.values)

    def test_seed_changes_data(self):
        a = generate_scenario(seed=11, n_homes=3, days=3, step_minutes=30)
        b = generate_scenario(seed=12, n_homes=3, days=3, step_minutes=30)
        assert not np.array_equal(a.homes[0].net.values, b.homes[0].net.values)

    def test_cross_home_solar_correlation(self, bundle):
        mat = np.array([h.true_solar.values for h in bundle.homes])
        cc = np.corrcoef(mat)
        pairs = cc[np.triu_indices(bundle.n_homes, 1)]
        assert pairs.mean() >= 0.8

    def test_zeroed_noise_gives_max_generation(self):
        b = generate_scenario(seed=5, n_homes=2, days=3, step_minutes=30,
                              noise=NoiseConfig.zeroed())
        for home in b.homes:
            m = max_generation(home.params, b.location, b.weather.temp)
            assert np.allclose(home.true_solar.values, m.values,
                               rtol=0.0, atol=1e-9)

    def test_param_ranges(self, bundle):
        for home in bundle.homes:
            assert 10.0 <= home.params.tilt <= 45.0
            assert 2.0 <= home.params.dc_rating <= 8.0
            off = (home.params.orientation - 180.0 + 180.0) % 360.0 - 180.0
            assert abs(off) <= 60.0

    def test_validation(self):
        with pytest.raises(ValueError):
            generate_scenario(seed=0, n_homes=1, days=3, step_minutes=30)
        with pytest.raises(ValueError):
            generate_scenario(seed=0, n_homes=3, days=0, step_minutes=30)


class TestMakeRealizableCase:
    def test_exact_mixture(self):
        case = make_realizable_case(seed=3, days=6)
        recon = case.proxies.matrix @ case.true_weights.weights
        assert np.array_equal(case.true_solar.values, recon)
        assert np.array_equal(
            case.net.values, case.true_load.values - case.true_solar.values)

    def test_weights_nonnegative(self):
        case = make_realizable_case(seed=3, days=6)
        assert (case.true_weights.weights >= 0.3).all()

    def test_load_feature_realizable(self):
        # identical feature rows must map to identical load values
        case = make_realizable_case(seed=9, days=6)
        rows = {tuple(r) for r in np.column_stack(
            [case.features.matrix, case.true_load.values])}
        feats_only = {t[:-1] for t in rows}
        assert len(rows) == len(feats_only)

    def test_deterministic(self):
        a = make_realizable_case(seed=21, days=6)
        b = make_realizable_case(seed=21, days=6)
        assert np.array_equal(a.net.values, b.net.values)
        assert np.array_equal(a.true_weights.weights, b.true_weights.weights)

    def test_init_weights_near_unity_scale(self):
        case = make_realizable_case(seed=4, days=6)
        w0 = init_weights(list(case.max_gens), case.target_max_gen)
        assert (w0.weights > 0).all()
        assert w0.weights.sum() < 5.0
