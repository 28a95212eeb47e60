"""Pure-Python twins of the compiled kernels in ``_core.pyx``.

Same signatures, same random streams, same floating-point operation order, so
results are bit-identical to the compiled backend. Slow; used when the
extension is unavailable and as a cross-check in the test suite.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

BACKEND = "python"

_MASK = (1 << 64) - 1


class _Rng:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = int(seed) & _MASK

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        return float(self.next() >> 11) * (1.0 / 9007199254740992.0)


# ---------------------------------------------------------------- hnsw

def _sqdist(a, b) -> float:
    s = 0.0
    for x, y in zip(a, b):
        t = x - y
        s = s + t * t
    return s


def _search_layer(pts, q, eps, ef, links, counts, layer):
    visited = set()
    cand = []
    res = []  # max-heap via negated keys
    for d, i in eps:
        visited.add(i)
        heapq.heappush(cand, (d, i))
        heapq.heappush(res, (-d, -i))
    while len(res) > ef:
        heapq.heappop(res)
    while cand:
        cd, ci = heapq.heappop(cand)
        far_d = -res[0][0]
        if cd > far_d:
            break
        row = links[layer][ci]
        for slot in range(counts[layer][ci]):
            e = row[slot]
            if e in visited:
                continue
            visited.add(e)
            d = _sqdist(pts[e], q)
            top = (-res[0][0], -res[0][1])
            if len(res) < ef or (d, e) < top:
                heapq.heappush(cand, (d, e))
                heapq.heappush(res, (-d, -e))
                if len(res) > ef:
                    heapq.heappop(res)
    return sorted((-nd, -ni) for nd, ni in res)


def _select_neighbors(pts, cands, m):
    chosen: list[int] = []
    pruned: list[int] = []
    for d, i in cands:
        if len(chosen) >= m:
            break
        good = True
        for c in chosen:
            if _sqdist(pts[i], pts[c]) < d:
                good = False
                break
        if good:
            chosen.append(i)
        else:
            pruned.append(i)
    for p in pruned:
        if len(chosen) >= m:
            break
        chosen.append(p)
    return chosen


def hnsw_build(points, levels, m, ef_construction):
    points = np.ascontiguousarray(points, dtype=np.float64)
    n = points.shape[0]
    width = 2 * m
    top = int(max(levels)) if n else 0
    top = max(top, 0)
    pts = points.tolist()
    links = [[[-1] * width for _ in range(n)] for _ in range(top + 1)]
    counts = [[0] * n for _ in range(top + 1)]
    entry, max_level = -1, -1
    for i in range(n):
        lq = int(levels[i])
        if entry < 0:
            entry, max_level = i, lq
            continue
        q = pts[i]
        eps = [(_sqdist(pts[entry], q), entry)]
        lc = max_level
        while lc > lq:
            w = _search_layer(pts, q, eps, 1, links, counts, lc)
            eps = [w[0]]
            lc -= 1
        lc = min(lq, max_level)
        while lc >= 0:
            w = _search_layer(pts, q, eps, ef_construction, links, counts, lc)
            chosen = _select_neighbors(pts, w, m)
            for j, c in enumerate(chosen):
                links[lc][i][j] = c
            counts[lc][i] = len(chosen)
            cap = width if lc == 0 else m
            for e in chosen:
                cnt = counts[lc][e]
                if cnt < cap:
                    links[lc][e][cnt] = i
                    counts[lc][e] = cnt + 1
                else:
                    pe = pts[e]
                    tmp = [(_sqdist(pts[x], pe), x) for x in links[lc][e][:cnt]]
                    tmp.append((_sqdist(pts[i], pe), i))
                    tmp.sort()
                    kept = _select_neighbors(pts, tmp, cap)
                    links[lc][e] = kept + [-1] * (width - len(kept))
                    counts[lc][e] = len(kept)
            eps = w
            lc -= 1
        if lq > max_level:
            max_level, entry = lq, i
    return (np.asarray(links, dtype=np.int32).reshape(top + 1, n, width),
            np.asarray(counts, dtype=np.int32).reshape(top + 1, n), entry, max_level)


def hnsw_search(points, links, counts, entry, max_level, queries, k, ef):
    pts = np.asarray(points, dtype=np.float64).tolist()
    links_l = np.asarray(links).tolist()
    counts_l = np.asarray(counts).tolist()
    queries = np.asarray(queries, dtype=np.float64)
    efq = max(ef, k)
    ids = np.full((len(queries), k), -1, dtype=np.int64)
    dists = np.full((len(queries), k), np.inf)
    for qi, q in enumerate(queries.tolist()):
        ep = (_sqdist(pts[entry], q), entry)
        for lc in range(max_level, 0, -1):
            ep = _search_layer(pts, q, [ep], 1, links_l, counts_l, lc)[0]
        w = _search_layer(pts, q, [ep], efq, links_l, counts_l, 0)
        for j, (d, i) in enumerate(w[:k]):
            ids[qi, j] = i
            dists[qi, j] = d
    return ids, dists


# ---------------------------------------------------------------- walks

def random_walks(indptr, indices, starts, seeds, walk_length):
    indptr = np.asarray(indptr).tolist()
    indices = np.asarray(indices).tolist()
    out = np.full((len(starts), walk_length), -1, dtype=np.int64)
    for w, (start, seed) in enumerate(zip(np.asarray(starts).tolist(), np.asarray(seeds).tolist())):
        rng = _Rng(seed)
        cur = start
        out[w, 0] = cur
        for step in range(1, walk_length):
            deg = indptr[cur + 1] - indptr[cur]
            if deg == 0:
                break
            cur = indices[indptr[cur] + rng.next() % deg]
            out[w, step] = cur
    return out


# ---------------------------------------------------------------- skip-gram

def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _dot4(a, b) -> float:
    s = [0.0, 0.0, 0.0, 0.0]
    n = len(a)
    full = n - n % 4
    for d in range(0, full, 4):
        for k in range(4):
            s[k] = s[k] + a[d + k] * b[d + k]
    for d in range(full, n):
        s[0] = s[0] + a[d] * b[d]
    return (s[0] + s[1]) + (s[2] + s[3])


def _log_safe(x: float) -> float:
    if x < 1e-300:
        return -690.7755278982137
    return math.log(x)


def sgns_train(walks, syn0, syn1, table, window, negatives, epochs, lr_start, lr_end, seed):
    rng = _Rng(seed)
    walks_l = np.asarray(walks).tolist()
    w0 = syn0.tolist()
    w1 = syn1.tolist()
    table_l = np.asarray(table).tolist()
    n_table = len(table_l)
    dim = syn0.shape[1]
    total = sum(1 for row in walks_l for v in row if v >= 0) * epochs
    done = 0
    loss = 0.0
    n_pairs = 0
    for ep in range(epochs):
        loss = 0.0
        n_pairs = 0
        for row in walks_l:
            length = len(row)
            for i in range(length):
                center = row[i]
                if center < 0:
                    break
                lr = lr_start - (lr_start - lr_end) * (float(done) / float(total))
                done += 1
                h = w0[center]
                for j in range(max(i - window, 0), min(i + window + 1, length)):
                    if j == i:
                        continue
                    ctx = row[j]
                    if ctx < 0:
                        break
                    neu1e = [0.0] * dim
                    for k in range(negatives + 1):
                        if k == 0:
                            target, label = ctx, 1.0
                        else:
                            target = table_l[rng.next() % n_table]
                            label = 0.0
                            if target == ctx:
                                continue
                        v = w1[target]
                        f = _dot4(h, v)
                        s = _sigmoid(f)
                        if ep == epochs - 1:
                            loss = loss - (_log_safe(s) if k == 0 else _log_safe(1.0 - s))
                        g = (label - s) * lr
                        for d in range(dim):
                            neu1e[d] = neu1e[d] + g * v[d]
                        for d in range(dim):
                            v[d] = v[d] + g * h[d]
                    for d in range(dim):
                        h[d] = h[d] + neu1e[d]
                    n_pairs += 1
    syn0[...] = np.asarray(w0, dtype=np.float64).reshape(syn0.shape)
    syn1[...] = np.asarray(w1, dtype=np.float64).reshape(syn1.shape)
    return loss / n_pairs if n_pairs else 0.0


# ---------------------------------------------------------------- trees

def _weighted_impurity(c, n) -> float:
    return float(n) - float(int(np.dot(c, c))) / float(n)


def grow_tree(X, y, sample_idx, n_classes, max_features, max_depth, min_samples_split, seed):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n_feat = X.shape[1]
    mtry = min(max_features, n_feat)
    rng = _Rng(seed)
    feature, threshold, left, right, counts = [-1], [0.0], [-1], [-1], []
    imp = [0.0] * n_feat
    root_rows = np.asarray(sample_idx, dtype=np.int64)
    counts.append(np.bincount(y[root_rows], minlength=n_classes).astype(np.int64))
    stack = [(0, root_rows, 0)]
    max_seen = 0
    n_nodes = 1
    eye = np.eye(n_classes, dtype=np.int64)
    while stack:
        node, rows, depth = stack.pop()
        max_seen = max(max_seen, depth)
        nn = len(rows)
        c_node = counts[node]
        if np.count_nonzero(c_node) <= 1 or depth >= max_depth or nn < min_samples_split:
            continue
        feats = list(range(n_feat))
        best = None
        best_score = -1.0
        visited = 0
        j = 0
        while j < n_feat and visited < mtry:
            t = j + rng.next() % (n_feat - j)
            feats[j], feats[t] = feats[t], feats[j]
            f = feats[j]
            j += 1
            vals = X[rows, f]
            order = np.argsort(vals, kind="stable")
            v = vals[order]
            valid = np.flatnonzero(v[:-1] < v[1:])
            if len(valid) == 0:
                continue
            visited += 1
            cl = np.cumsum(eye[y[rows[order]]], axis=0)[:-1]
            cr = c_node[None, :] - cl
            nl = (valid + 1).astype(np.float64)
            sl = (cl[valid] ** 2).sum(axis=1).astype(np.float64)
            sr = (cr[valid] ** 2).sum(axis=1).astype(np.float64)
            score = sl / nl + sr / (float(nn) - nl)
            a = int(np.argmax(score))
            if score[a] > best_score:
                p = valid[a]
                best_score = score[a]
                best = (f, int(p + 1), float(v[p]), cl[p].copy(), cr[p].copy())
        if best is None:
            continue
        f, nl, thr, bl, br = best
        mask = X[rows, f] <= thr
        feature[node] = f
        threshold[node] = thr
        left[node], right[node] = n_nodes, n_nodes + 1
        feature += [-1, -1]
        threshold += [0.0, 0.0]
        left += [-1, -1]
        right += [-1, -1]
        counts += [bl, br]
        imp[f] = imp[f] + (_weighted_impurity(c_node, nn) - _weighted_impurity(bl, nl)
                           - _weighted_impurity(br, nn - nl))
        stack.append((n_nodes + 1, rows[~mask], depth + 1))
        stack.append((n_nodes, rows[mask], depth + 1))
        n_nodes += 2
    return (np.asarray(feature, dtype=np.int32), np.asarray(threshold, dtype=np.float64),
            np.asarray(left, dtype=np.int32), np.asarray(right, dtype=np.int32),
            np.asarray(counts, dtype=np.int64).reshape(n_nodes, n_classes),
            np.asarray(imp, dtype=np.float64), max_seen)


def apply_tree(feature, threshold, left, right, X):
    X = np.asarray(X, dtype=np.float64)
    node = np.zeros(len(X), dtype=np.int64)
    rows = np.arange(len(X))
    active = feature[node] >= 0
    while active.any():
        r = rows[active]
        nd = node[r]
        go_left = X[r, feature[nd]] <= threshold[nd]
        node[r] = np.where(go_left, left[nd], right[nd])
        active = feature[node] >= 0
    return node
