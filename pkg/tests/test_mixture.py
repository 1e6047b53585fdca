from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from solardisagg.errors import DimensionMismatch, Misaligned, ZeroProxy
from solardisagg.mixture import (
    EPS_WEIGHT,
    ProxyMatrix,
    WeightVector,
    init_weight,
    init_weights,
    nnls,
    predict_solar,
    solve_weights,
)


def grid_nnls_objective(a: np.ndarray, b: np.ndarray, step: float = 1e-3,
                        zoom_stages: int = 3) -> float:
    """Independent oracle: staged exhaustive grid search over w >= 0.

    Starts from a bounding box derived from the unconstrained solution
    and zooms by 10x per stage until the final grid step is ``step``.
    Returns the best 2-norm objective found.
    """
    n = a.shape[1]
    ls = np.linalg.lstsq(a, b, rcond=None)[0]
    hi = float(max(1.0, 1.5 * np.max(np.abs(ls)) + 0.5))
    lo_box = np.zeros(n)
    hi_box = np.full(n, hi)
    best_obj, best_w = np.inf, np.zeros(n)
    for stage in range(zoom_stages):
        axes = [np.linspace(lo_box[j], hi_box[j], 21) for j in range(n)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        obj = np.linalg.norm(a @ pts.T - b[:, None], axis=0)
        k = int(np.argmin(obj))
        if obj[k] < best_obj:
            best_obj, best_w = float(obj[k]), pts[k]
        cell = (hi_box - lo_box) / 20.0
        lo_box = np.maximum(best_w - 2.0 * cell, 0.0)
        hi_box = best_w + 2.0 * cell
        if np.all(cell <= step):
            break
    return best_obj


class TestInitWeight:
    def test_identity(self, make_series):
        m = make_series([1.0, 2.0, 3.0])
        assert init_weight(m, m) == pytest.approx(1.0)

    def test_double_proxy_halves_weight(self, make_series):
        m_c = make_series([1.0, 2.0, 3.0])
        m_p = make_series([2.0, 4.0, 6.0])
        assert init_weight(m_p, m_c) == pytest.approx(0.5)

    def test_hand_inner_products(self, make_series):
        m_p = make_series([1.0, 2.0])
        m_c = make_series([2.0, 2.0])
        assert init_weight(m_p, m_c) == pytest.approx(1.2)

    def test_zero_proxy(self, make_series):
        with pytest.raises(ZeroProxy):
            init_weight(make_series([0.0, 0.0]), make_series([1.0, 1.0]))

    def test_positivity_floor(self, make_series):
        m_p = make_series([1.0, 0.0])
        m_c = make_series([0.0, 1.0])
        assert init_weight(m_p, m_c) == EPS_WEIGHT


class TestInitWeights:
    def test_single_identity(self, make_series):
        m = make_series([1.0, 2.0])
        out = init_weights([m], m)
        assert out.weights == pytest.approx([1.0])

    def test_two_equal_proxies(self, make_series):
        m = make_series([1.0, 2.0])
        out = init_weights([m, m], m)
        assert out.weights == pytest.approx([0.5, 0.5])

    def test_scaled_family(self, make_series):
        m_c = make_series([1.0, 2.0])
        gens = [make_series(c * m_c.values) for c in (1.0, 2.0, 4.0, 8.0)]
        out = init_weights(gens, m_c)
        assert out.weights == pytest.approx([0.25, 0.125, 0.0625, 0.03125])


class TestNnls:
    def test_orthonormal_columns(self):
        a = np.eye(2)
        assert nnls(a, np.array([2.0, 3.0])) == pytest.approx([2.0, 3.0])

    def test_constraint_binds(self):
        a = np.ones((2, 1))
        x = nnls(a, np.array([-1.0, -1.0]))
        assert x == pytest.approx([0.0])

    def test_interior_solution(self):
        a = np.array([[1.0, 1.0], [1.0, 0.0]])
        x = nnls(a, np.array([2.0, 1.0]))
        assert x == pytest.approx([1.0, 1.0], abs=1e-10)

    def test_kkt_conditions(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            m, n = int(rng.integers(2, 7)), int(rng.integers(1, 4))
            a = rng.normal(size=(m, n))
            b = rng.normal(size=m)
            x = nnls(a, b)
            g = a.T @ (a @ x - b)
            assert (x >= 0).all()
            scale = max(1.0, float(np.abs(a.T @ b).max()))
            assert (np.abs(g[x > 0]) <= 1e-8 * scale).all()
            assert (g[x == 0] >= -1e-8 * scale).all()

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2 ** 31 - 1))
    def test_matches_grid_oracle(self, seed):
        rng = np.random.default_rng(seed)
        m, n = int(rng.integers(2, 7)), int(rng.integers(1, 4))
        a = rng.normal(size=(m, n))
        b = rng.normal(size=m)
        x = nnls(a, b)
        obj = float(np.linalg.norm(a @ x - b))
        assert obj <= grid_nnls_objective(a, b) + 1e-3


class TestSolveWeights:
    def test_misaligned(self, make_series):
        cols = (make_series([1.0, 2.0]),)
        x = ProxyMatrix(cols, ("real",))
        s = make_series([1.0, 2.0, 3.0])
        with pytest.raises(Misaligned):
            solve_weights(x, s)

    def test_nonnegative_output(self, make_series):
        rng = np.random.default_rng(3)
        cols = tuple(make_series(np.abs(rng.normal(size=8))) for _ in range(3))
        x = ProxyMatrix(cols, ("real", "real", "synthetic"))
        s = make_series(rng.normal(size=8))
        w = solve_weights(x, s)
        assert (w.weights >= 0).all()

    def test_objective_beats_init_and_zero(self, make_series):
        rng = np.random.default_rng(11)
        cols = tuple(make_series(np.abs(rng.normal(size=10)) + 0.1)
                     for _ in range(2))
        x = ProxyMatrix(cols, ("real", "real"))
        target = make_series(np.abs(rng.normal(size=10)))
        w = solve_weights(x, target)

        def obj(vec):
            return float(np.linalg.norm(x.matrix @ vec - target.values))

        w0 = init_weights([cols[0], cols[1]], target).weights
        assert obj(w.weights) <= obj(np.zeros(2)) + 1e-12
        assert obj(w.weights) <= obj(w0) + 1e-12

    def test_column_rescaling_invariance(self, make_series):
        rng = np.random.default_rng(21)
        base = [np.abs(rng.normal(size=12)) + 0.05 for _ in range(2)]
        target = make_series(np.abs(rng.normal(size=12)))
        x1 = ProxyMatrix(tuple(make_series(c) for c in base), ("real",) * 2)
        x2 = ProxyMatrix(
            (make_series(3.0 * base[0]), make_series(0.5 * base[1])),
            ("real",) * 2,
        )
        w1 = solve_weights(x1, target)
        w2 = solve_weights(x2, target)
        fit1 = predict_solar(x1, w1)
        fit2 = predict_solar(x2, w2)
        assert np.allclose(fit1.values, fit2.values, atol=1e-8)
        assert w2.weights[0] == pytest.approx(w1.weights[0] / 3.0, abs=1e-9)


class TestPredictSolar:
    def test_zero_weights(self, make_series):
        x = ProxyMatrix((make_series([1.0, 2.0]),), ("real",))
        out = predict_solar(x, WeightVector(np.array([0.0])))
        assert (out.values == 0.0).all()

    def test_identity_single_proxy(self, make_series):
        col = make_series([1.5, 2.5])
        x = ProxyMatrix((col,), ("real",))
        out = predict_solar(x, WeightVector(np.array([1.0])))
        assert np.array_equal(out.values, col.values)

    def test_hand_product(self, make_series):
        x = ProxyMatrix(
            (make_series([1.0, 0.0]), make_series([0.0, 2.0])),
            ("real", "synthetic"),
        )
        out = predict_solar(x, WeightVector(np.array([3.0, 0.5])))
        assert list(out.values) == [3.0, 1.0]

    def test_dimension_mismatch(self, make_series):
        x = ProxyMatrix((make_series([1.0, 2.0]),), ("real",))
        with pytest.raises(DimensionMismatch):
            predict_solar(x, WeightVector(np.array([1.0, 2.0])))
