"""Home-load regressor: feature construction and a bagged regression forest.

Features are the four non-customer-specific explanatory variables
(temperature, its 24-hour exponentially weighted moving average,
local hour of day, weekday flag). The forest is fit fresh each
disaggregation iteration with an iteration-derived seed, so the whole
loop is reproducible from one master seed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta

import numpy as np

from . import _forest
from .errors import SchemaMismatch, TooFewRows
from .seeding import derive_seed
from .timeseries import SiteLocation, TimeSeries, Unit

FEATURE_COLUMNS = ("temp_c", "temp_ewma_24h", "hour", "weekday")

N_TREES = 100
MAX_DEPTH = 12
MIN_LEAF = 5
MTRY = 2


@dataclass(frozen=True)
class LoadFeatures:
    """T x 4 explanatory-variable matrix tied to a sampling grid."""

    matrix: np.ndarray = field(repr=False)
    start: datetime
    step_minutes: int
    columns: tuple[str, ...] = FEATURE_COLUMNS

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=np.float64).copy()
        if mat.ndim != 2 or mat.shape[1] != len(self.columns):
            raise ValueError(f"feature matrix must be T x {len(self.columns)}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    def __len__(self) -> int:
        return self.matrix.shape[0]

    def slice(self, first: int, length: int) -> "LoadFeatures":
        if first < 0 or length < 1 or first + length > len(self):
            raise ValueError("feature slice outside window")
        return LoadFeatures(
            matrix=self.matrix[first:first + length],
            start=self.start + timedelta(minutes=first * self.step_minutes),
            step_minutes=self.step_minutes,
            columns=self.columns,
        )


def ewma_24h(values: np.ndarray, step_minutes: int) -> np.ndarray:
    """EWMA with smoothing 2/(N+1), N = samples per 24 h, seeded at the
    first observation."""
    n_day = 24 * 60 // step_minutes
    alpha = 2.0 / (n_day + 1)
    out = np.empty_like(values, dtype=np.float64)
    acc = float(values[0])
    for i, v in enumerate(values):
        acc = alpha * float(v) + (1.0 - alpha) * acc
        out[i] = acc
    out[0] = values[0]
    return out


def build_features(temp: TimeSeries, loc: SiteLocation) -> LoadFeatures:
    """Assemble the four load features on the temperature grid."""
    index64 = temp.index64()
    local = index64 + np.timedelta64(int(round(loc.utc_offset * 3600)), "s")
    days = local.astype("datetime64[D]")
    hour = (local - days).astype("timedelta64[h]").astype(np.float64)
    # numpy weekday: 1970-01-01 was a Thursday (index 3), Mon=0 ... Sun=6
    dow = (days.astype(np.int64) + 3) % 7
    weekday = (dow < 5).astype(np.float64)
    matrix = np.column_stack([
        temp.values,
        ewma_24h(temp.values, temp.step_minutes),
        hour,
        weekday,
    ])
    return LoadFeatures(matrix=matrix, start=temp.start,
                        step_minutes=temp.step_minutes)


def _bin_feature(x: np.ndarray, max_bins: int = _forest.MAX_BINS) -> np.ndarray:
    uniq = np.unique(x)
    if uniq.size <= 1:
        return np.empty(0)
    if uniq.size <= max_bins:
        return (uniq[:-1] + uniq[1:]) / 2.0
    qs = np.linspace(0.0, 1.0, max_bins + 1)[1:-1]
    return np.unique(np.quantile(x, qs))


@dataclass
class LoadModelParams:
    """Fitted forest: flat node arrays plus the seed that produced it."""

    feature: np.ndarray   # (trees, nodes) int16, -1 marks a leaf
    threshold: np.ndarray  # (trees, nodes) float64, go left iff x <= thr
    left: np.ndarray      # (trees, nodes) int32
    right: np.ndarray     # (trees, nodes) int32
    value: np.ndarray     # (trees, nodes) float64 leaf means
    n_nodes: np.ndarray   # (trees,) int64
    seed: int
    columns: tuple[str, ...]
    target_range: tuple[float, float]

    @property
    def n_trees(self) -> int:
        return self.feature.shape[0]

    def _tree_dict(self, t: int, node: int) -> dict:
        if self.feature[t, node] < 0:
            return {"value": float(self.value[t, node])}
        return {
            "feature": int(self.feature[t, node]),
            "threshold": float(self.threshold[t, node]),
            "left": self._tree_dict(t, int(self.left[t, node])),
            "right": self._tree_dict(t, int(self.right[t, node])),
        }

    def to_json_dict(self) -> dict:
        """Nested tree serialization for debugging and model exchange."""
        return {
            "seed": self.seed,
            "columns": list(self.columns),
            "target_range": list(self.target_range),
            "trees": [self._tree_dict(t, 0) for t in range(self.n_trees)],
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "LoadModelParams":
        trees = payload["trees"]
        flat: list[list[tuple]] = []

        def walk(node_dict: dict, nodes: list) -> int:
            idx = len(nodes)
            nodes.append(None)
            if "value" in node_dict and "feature" not in node_dict:
                nodes[idx] = (-1, 0.0, -1, -1, float(node_dict["value"]))
            else:
                li = walk(node_dict["left"], nodes)
                ri = walk(node_dict["right"], nodes)
                nodes[idx] = (int(node_dict["feature"]),
                              float(node_dict["threshold"]), li, ri, 0.0)
            return idx

        for tree in trees:
            nodes: list = []
            walk(tree, nodes)
            flat.append(nodes)
        max_nodes = max(len(nodes) for nodes in flat)
        n_trees = len(flat)
        feature = np.full((n_trees, max_nodes), -1, dtype=np.int16)
        threshold = np.zeros((n_trees, max_nodes), dtype=np.float64)
        left = np.full((n_trees, max_nodes), -1, dtype=np.int32)
        right = np.full((n_trees, max_nodes), -1, dtype=np.int32)
        value = np.zeros((n_trees, max_nodes), dtype=np.float64)
        n_nodes = np.zeros(n_trees, dtype=np.int64)
        for t, nodes in enumerate(flat):
            n_nodes[t] = len(nodes)
            for i, (f, thr, li, ri, val) in enumerate(nodes):
                feature[t, i] = f
                threshold[t, i] = thr
                left[t, i] = li
                right[t, i] = ri
                value[t, i] = val
        rng = payload.get("target_range", [-np.inf, np.inf])
        return cls(feature=feature, threshold=threshold, left=left, right=right,
                   value=value, n_nodes=n_nodes, seed=int(payload.get("seed", 0)),
                   columns=tuple(payload.get("columns", FEATURE_COLUMNS)),
                   target_range=(float(rng[0]), float(rng[1])))


def fit(features: LoadFeatures, target: TimeSeries, seed: int) -> LoadModelParams:
    """Fit the bagged forest; bitwise deterministic in (features, target, seed)."""
    n = len(features)
    if (n != len(target) or features.start != target.start
            or features.step_minutes != target.step_minutes):
        raise SchemaMismatch("features and target are not on the same grid")
    if n < 2 * MIN_LEAF:
        raise TooFewRows(f"need >= {2 * MIN_LEAF} rows, got {n}")
    x = features.matrix
    n_feat = x.shape[1]
    thresholds = [_bin_feature(x[:, j]) for j in range(n_feat)]
    thr_off = np.zeros(n_feat + 1, dtype=np.int64)
    for j in range(n_feat):
        thr_off[j + 1] = thr_off[j] + thresholds[j].size
    thr_flat = (np.concatenate(thresholds) if thr_off[-1] > 0
                else np.zeros(1, dtype=np.float64))
    n_bins = np.array([t.size for t in thresholds], dtype=np.int64)
    xb = np.empty((n, n_feat), dtype=np.int16)
    for j in range(n_feat):
        xb[:, j] = np.searchsorted(thresholds[j], x[:, j], side="left").astype(np.int16)

    max_leaves = min(2 ** MAX_DEPTH, max(1, n // MIN_LEAF))
    max_nodes = 2 * max_leaves + 1
    seeds = np.array(
        [derive_seed(seed, t) for t in range(N_TREES)], dtype=np.uint64
    )
    feature = np.full((N_TREES, max_nodes), -1, dtype=np.int16)
    threshold = np.zeros((N_TREES, max_nodes), dtype=np.float64)
    left = np.full((N_TREES, max_nodes), -1, dtype=np.int32)
    right = np.full((N_TREES, max_nodes), -1, dtype=np.int32)
    value = np.zeros((N_TREES, max_nodes), dtype=np.float64)
    n_nodes = np.zeros(N_TREES, dtype=np.int64)
    _forest.grow_forest(xb, thr_flat, thr_off, target.values, n_bins, seeds,
                        MAX_DEPTH, MIN_LEAF, MTRY,
                        feature, threshold, left, right, value, n_nodes)
    return LoadModelParams(
        feature=feature, threshold=threshold, left=left, right=right,
        value=value, n_nodes=n_nodes, seed=int(seed), columns=features.columns,
        target_range=(float(target.values.min()), float(target.values.max())),
    )


def predict(features: LoadFeatures, params: LoadModelParams) -> TimeSeries:
    """Forest mean prediction as a kW series on the feature grid."""
    if tuple(features.columns) != tuple(params.columns):
        raise SchemaMismatch(
            f"feature columns {features.columns} != model columns {params.columns}"
        )
    out = np.empty(len(features), dtype=np.float64)
    _forest.predict_forest(features.matrix, params.feature, params.threshold,
                           params.left, params.right, params.value, out)
    return TimeSeries(features.start, features.step_minutes, out, Unit.KW)
