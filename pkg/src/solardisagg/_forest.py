"""Compiled kernels for the bagged regression forest.

Trees are grown breadth-last over pre-binned features with an explicit
stack, histogram split search, and a self-contained splitmix64 PRNG so
forests are bitwise reproducible for a given seed on any platform.
Candidate thresholds sit at feature-quantile bin edges (at most
MAX_BINS per feature), which for the four load features is exact for
the discrete columns and near-exact for the continuous ones.
"""
from __future__ import annotations

import numpy as np
from numba import njit

MAX_BINS = 64

U64 = np.uint64
_GOLDEN = U64(0x9E3779B97F4A7C15)


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> U64(30))) * U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> U64(27))) * U64(0x94D049BB133111EB)
    return z ^ (z >> U64(31))


@njit(cache=True, inline="always")
def _next_u64(state):
    state[0] = state[0] + _GOLDEN
    return _mix64(state[0])


@njit(cache=True)
def grow_forest(xb, thr_flat, thr_off, y, n_bins, seeds,
                max_depth, min_leaf, mtry,
                feat_out, thr_out, left_out, right_out, value_out, n_nodes_out):
    """Grow all trees; outputs are flat per-tree node arrays.

    ``feat_out`` holds the split feature per node (-1 for leaves),
    ``thr_out`` the float threshold (go left iff value <= threshold).
    """
    n, n_feat = xb.shape
    n_trees = seeds.shape[0]
    max_nodes = feat_out.shape[1]
    max_b = 0
    for j in range(n_feat):
        if n_bins[j] > max_b:
            max_b = n_bins[j]

    order = np.empty(n, dtype=np.int32)
    tmp = np.empty(n, dtype=np.int32)
    cnt = np.empty(max_b + 1, dtype=np.int64)
    sm = np.empty(max_b + 1, dtype=np.float64)
    stack = np.empty((max_nodes + 2, 4), dtype=np.int64)  # node, start, end, depth
    stack_sum = np.empty(max_nodes + 2, dtype=np.float64)
    feats = np.empty(n_feat, dtype=np.int64)
    state = np.empty(1, dtype=np.uint64)
    for b in range(max_b + 1):
        cnt[b] = 0
        sm[b] = 0.0

    for t in range(n_trees):
        state[0] = seeds[t]
        root_sum = 0.0
        for i in range(n):
            r = np.int32(_next_u64(state) % U64(n))
            order[i] = r
            root_sum += y[r]
        n_nodes = 1
        stack[0, 0] = 0
        stack[0, 1] = 0
        stack[0, 2] = n
        stack[0, 3] = 0
        stack_sum[0] = root_sum
        sp = 1
        while sp > 0:
            sp -= 1
            node = stack[sp, 0]
            start = stack[sp, 1]
            end = stack[sp, 2]
            depth = stack[sp, 3]
            tot = stack_sum[sp]
            cn = end - start
            value_out[t, node] = tot / cn
            if depth >= max_depth or cn < 2 * min_leaf:
                feat_out[t, node] = -1
                continue
            for j in range(n_feat):
                feats[j] = j
            for j in range(mtry):
                k = j + np.int64(_next_u64(state) % U64(n_feat - j))
                tmp_f = feats[j]
                feats[j] = feats[k]
                feats[k] = tmp_f
            best_gain = 1e-12
            best_feat = -1
            best_bin = -1
            best_left_sum = 0.0
            base = tot * tot / cn
            for j in range(mtry):
                ft = feats[j]
                nb = n_bins[ft]
                blo = nb
                bhi = 0
                for i in range(start, end):
                    r = order[i]
                    b = xb[r, ft]
                    if b < blo:
                        blo = b
                    if b > bhi:
                        bhi = b
                    cnt[b] += 1
                    sm[b] += y[r]
                nl = 0
                sl = 0.0
                top = bhi if bhi < nb else nb - 1
                for b in range(blo, top + 1):
                    nl += cnt[b]
                    sl += sm[b]
                    nr = cn - nl
                    if nl < min_leaf or nr < min_leaf:
                        continue
                    if cnt[b] == 0:
                        continue
                    gain = sl * sl / nl + (tot - sl) * (tot - sl) / nr - base
                    if gain > best_gain:
                        best_gain = gain
                        best_feat = ft
                        best_bin = b
                        best_left_sum = sl
                for b in range(blo, bhi + 1):
                    cnt[b] = 0
                    sm[b] = 0.0
            if best_feat < 0:
                feat_out[t, node] = -1
                continue
            # partition rows: left block keeps encounter order, right reversed
            nl = 0
            nr = 0
            for i in range(start, end):
                r = order[i]
                if xb[r, best_feat] <= best_bin:
                    tmp[nl] = r
                    nl += 1
                else:
                    nr += 1
                    tmp[cn - nr] = r
            for i in range(cn):
                order[start + i] = tmp[i]
            lid = n_nodes
            rid = n_nodes + 1
            n_nodes += 2
            feat_out[t, node] = best_feat
            thr_out[t, node] = thr_flat[thr_off[best_feat] + best_bin]
            left_out[t, node] = lid
            right_out[t, node] = rid
            stack[sp, 0] = rid
            stack[sp, 1] = start + nl
            stack[sp, 2] = end
            stack[sp, 3] = depth + 1
            stack_sum[sp] = tot - best_left_sum
            sp += 1
            stack[sp, 0] = lid
            stack[sp, 1] = start
            stack[sp, 2] = start + nl
            stack[sp, 3] = depth + 1
            stack_sum[sp] = best_left_sum
            sp += 1
        n_nodes_out[t] = n_nodes


@njit(cache=True)
def predict_forest(x, feat, thr, left, right, value, out):
    """Mean over per-tree leaf values for each row of ``x``."""
    n = x.shape[0]
    n_trees = feat.shape[0]
    for i in range(n):
        out[i] = 0.0
    for t in range(n_trees):
        for i in range(n):
            node = 0
            f = feat[t, node]
            while f >= 0:
                if x[i, f] <= thr[t, node]:
                    node = left[t, node]
                else:
                    node = right[t, node]
                f = feat[t, node]
            out[i] += value[t, node]
    inv = 1.0 / n_trees
    for i in range(n):
        out[i] *= inv
