# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: HNSW index, uniform random walks, skip-gram SGD, tree growing.

Every routine here has a line-for-line twin in ``_pykernels``; both must return
bit-identical results for the same inputs. Floating-point reductions are kept
sequential so the two agree.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log
from libc.stdlib cimport malloc, free, qsort
from libc.stdint cimport uint64_t, int64_t, int32_t

cnp.import_array()

BACKEND = "compiled"


# ---------------------------------------------------------------- rng

cdef struct Rng:
    uint64_t state


cdef inline uint64_t rng_next(Rng* r) noexcept nogil:
    cdef uint64_t z
    r.state = r.state + <uint64_t>0x9E3779B97F4A7C15
    z = r.state
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline double rng_uniform(Rng* r) noexcept nogil:
    return <double>(rng_next(r) >> 11) * (1.0 / 9007199254740992.0)


# ---------------------------------------------------------------- hnsw

cdef struct Pair:
    double d
    int64_t i


cdef inline bint pair_lt(Pair a, Pair b) noexcept nogil:
    return a.d < b.d or (a.d == b.d and a.i < b.i)


cdef struct Heap:
    Pair* data
    int64_t size
    int64_t cap
    bint is_max


cdef inline bint heap_before(Heap* h, Pair a, Pair b) noexcept nogil:
    if h.is_max:
        return pair_lt(b, a)
    return pair_lt(a, b)


cdef int heap_init(Heap* h, int64_t cap, bint is_max) except -1 nogil:
    h.data = <Pair*>malloc(cap * sizeof(Pair))
    if h.data == NULL:
        with gil:
            raise MemoryError()
    h.size = 0
    h.cap = cap
    h.is_max = is_max
    return 0


cdef int heap_push(Heap* h, Pair p) except -1 nogil:
    cdef int64_t i, parent
    cdef Pair* grown
    if h.size == h.cap:
        grown = <Pair*>malloc(2 * h.cap * sizeof(Pair))
        if grown == NULL:
            with gil:
                raise MemoryError()
        for i in range(h.size):
            grown[i] = h.data[i]
        free(h.data)
        h.data = grown
        h.cap = 2 * h.cap
    i = h.size
    h.size += 1
    while i > 0:
        parent = (i - 1) // 2
        if heap_before(h, p, h.data[parent]):
            h.data[i] = h.data[parent]
            i = parent
        else:
            break
    h.data[i] = p
    return 0


cdef Pair heap_pop(Heap* h) noexcept nogil:
    cdef Pair top = h.data[0]
    cdef Pair last
    cdef int64_t i = 0, child
    h.size -= 1
    if h.size > 0:
        last = h.data[h.size]
        while True:
            child = 2 * i + 1
            if child >= h.size:
                break
            if child + 1 < h.size and heap_before(h, h.data[child + 1], h.data[child]):
                child += 1
            if heap_before(h, h.data[child], last):
                h.data[i] = h.data[child]
                i = child
            else:
                break
        h.data[i] = last
    return top


cdef inline double sqdist(const double[:, ::1] pts, int64_t a, const double* q, int64_t dim) noexcept nogil:
    cdef double s = 0.0, t
    cdef int64_t j
    for j in range(dim):
        t = pts[a, j] - q[j]
        s = s + t * t
    return s


cdef int compare_pairs(const void* a, const void* b) noexcept nogil:
    cdef Pair pa = (<Pair*>a)[0]
    cdef Pair pb = (<Pair*>b)[0]
    if pair_lt(pa, pb):
        return -1
    if pair_lt(pb, pa):
        return 1
    return 0


cdef int64_t search_layer(const double[:, ::1] pts, const double* q, int64_t dim,
                          Pair* eps, int64_t n_eps, int64_t ef,
                          const int32_t[:, :, ::1] links, const int32_t[:, ::1] counts, int64_t layer,
                          int32_t* visited, int32_t stamp, Pair* out) except -1 nogil:
    """Best-first search on one layer; writes up to ef results into out, sorted ascending."""
    cdef Heap cand, res
    cdef Pair c, far, p
    cdef int64_t i, e, n_out
    heap_init(&cand, ef + n_eps + 16, False)
    heap_init(&res, ef + n_eps + 16, True)
    for i in range(n_eps):
        visited[eps[i].i] = stamp
        heap_push(&cand, eps[i])
        heap_push(&res, eps[i])
    while res.size > ef:
        heap_pop(&res)
    while cand.size > 0:
        c = heap_pop(&cand)
        far = res.data[0]
        if c.d > far.d:
            break
        for i in range(counts[layer, c.i]):
            e = links[layer, c.i, i]
            if visited[e] == stamp:
                continue
            visited[e] = stamp
            p.d = sqdist(pts, e, q, dim)
            p.i = e
            if res.size < ef or pair_lt(p, res.data[0]):
                heap_push(&cand, p)
                heap_push(&res, p)
                if res.size > ef:
                    heap_pop(&res)
    n_out = res.size
    for i in range(n_out):
        out[i] = res.data[i]
    qsort(out, n_out, sizeof(Pair), compare_pairs)
    free(cand.data)
    free(res.data)
    return n_out


cdef int64_t select_neighbors(const double[:, ::1] pts, int64_t dim, Pair* cands, int64_t n_cands,
                              int64_t m, int64_t* chosen, int64_t* pruned) noexcept nogil:
    """Diversity heuristic with pruned-connection backfill; cands sorted ascending."""
    cdef int64_t n_chosen = 0, n_pruned = 0, i, j
    cdef bint good
    cdef double dd
    for i in range(n_cands):
        if n_chosen >= m:
            break
        good = True
        for j in range(n_chosen):
            dd = sqdist(pts, cands[i].i, &pts[chosen[j], 0], dim)
            if dd < cands[i].d:
                good = False
                break
        if good:
            chosen[n_chosen] = cands[i].i
            n_chosen += 1
        else:
            pruned[n_pruned] = cands[i].i
            n_pruned += 1
    i = 0
    while n_chosen < m and i < n_pruned:
        chosen[n_chosen] = pruned[i]
        n_chosen += 1
        i += 1
    return n_chosen


def hnsw_build(const double[:, ::1] points, const int32_t[::1] levels, int m, int ef_construction):
    """Insert points in index order. Returns (links, counts, entry, max_level)."""
    cdef int64_t n = points.shape[0], dim = points.shape[1]
    cdef int64_t top = 0, i, lc, j, k, e, nw, nsel, cnt, width = 2 * m, cap
    for i in range(n):
        if levels[i] > top:
            top = levels[i]
    links_arr = np.full((top + 1, n, width), -1, dtype=np.int32)
    counts_arr = np.zeros((top + 1, n), dtype=np.int32)
    cdef int32_t[:, :, ::1] links = links_arr
    cdef int32_t[:, ::1] counts = counts_arr
    cdef int32_t* visited = <int32_t*>malloc(max(n, 1) * sizeof(int32_t))
    cdef int32_t stamp = 0
    cdef int64_t buf = ef_construction + width + 2
    cdef Pair* w = <Pair*>malloc(buf * sizeof(Pair))
    cdef Pair* eps = <Pair*>malloc(buf * sizeof(Pair))
    cdef Pair* tmp = <Pair*>malloc((width + 2) * sizeof(Pair))
    cdef int64_t* chosen = <int64_t*>malloc((2 * width + 2) * sizeof(int64_t))
    cdef int64_t* pruned = <int64_t*>malloc(buf * sizeof(int64_t))
    cdef int64_t n_eps, entry = -1, max_level = -1, lq, nsel_e
    if visited == NULL or w == NULL or eps == NULL or tmp == NULL or chosen == NULL or pruned == NULL:
        free(visited); free(w); free(eps); free(tmp); free(chosen); free(pruned)
        raise MemoryError()
    try:
        with nogil:
            for i in range(n):
                visited[i] = -1
            for i in range(n):
                lq = levels[i]
                if entry < 0:
                    entry = i
                    max_level = lq
                    continue
                eps[0].i = entry
                eps[0].d = sqdist(points, entry, &points[i, 0], dim)
                n_eps = 1
                lc = max_level
                while lc > lq:
                    stamp += 1
                    search_layer(points, &points[i, 0], dim, eps, n_eps, 1, links, counts, lc,
                                 visited, stamp, w)
                    eps[0] = w[0]
                    lc -= 1
                lc = lq if lq < max_level else max_level
                while lc >= 0:
                    stamp += 1
                    nw = search_layer(points, &points[i, 0], dim, eps, n_eps, ef_construction,
                                      links, counts, lc, visited, stamp, w)
                    nsel = select_neighbors(points, dim, w, nw, m, chosen, pruned)
                    for j in range(nsel):
                        links[lc, i, j] = <int32_t>chosen[j]
                    counts[lc, i] = <int32_t>nsel
                    cap = width if lc == 0 else m
                    for j in range(nsel):
                        e = chosen[j]
                        cnt = counts[lc, e]
                        if cnt < cap:
                            links[lc, e, cnt] = <int32_t>i
                            counts[lc, e] = <int32_t>(cnt + 1)
                        else:
                            for k in range(cnt):
                                tmp[k].i = links[lc, e, k]
                                tmp[k].d = sqdist(points, tmp[k].i, &points[e, 0], dim)
                            tmp[cnt].i = i
                            tmp[cnt].d = sqdist(points, i, &points[e, 0], dim)
                            qsort(tmp, cnt + 1, sizeof(Pair), compare_pairs)
                            nsel_e = select_neighbors(points, dim, tmp, cnt + 1, cap, chosen + nsel, pruned)
                            for k in range(nsel_e):
                                links[lc, e, k] = <int32_t>chosen[nsel + k]
                            for k in range(nsel_e, width):
                                links[lc, e, k] = -1
                            counts[lc, e] = <int32_t>nsel_e
                    for j in range(nw):
                        eps[j] = w[j]
                    n_eps = nw
                    lc -= 1
                if lq > max_level:
                    max_level = lq
                    entry = i
    finally:
        free(visited); free(w); free(eps); free(tmp); free(chosen); free(pruned)
    return links_arr, counts_arr, int(entry), int(max_level)


def hnsw_search(const double[:, ::1] points, const int32_t[:, :, ::1] links, const int32_t[:, ::1] counts,
                int64_t entry, int64_t max_level, const double[:, ::1] queries, int k, int ef):
    """Batch k-NN query. Returns (ids int64[q, k], sqdists float64[q, k]); short rows padded with -1/inf."""
    cdef int64_t n = points.shape[0], dim = points.shape[1], nq = queries.shape[0]
    cdef int64_t qi, lc, nw, j, efq = ef if ef > k else k
    ids_arr = np.full((nq, k), -1, dtype=np.int64)
    d_arr = np.full((nq, k), np.inf, dtype=np.float64)
    cdef int64_t[:, ::1] ids = ids_arr
    cdef double[:, ::1] dists = d_arr
    cdef int32_t* visited = <int32_t*>malloc(max(n, 1) * sizeof(int32_t))
    cdef Pair* w = <Pair*>malloc((efq + 2) * sizeof(Pair))
    cdef Pair ep
    cdef int32_t stamp = 0
    if visited == NULL or w == NULL:
        free(visited); free(w)
        raise MemoryError()
    try:
        with nogil:
            for j in range(n):
                visited[j] = -1
            for qi in range(nq):
                ep.i = entry
                ep.d = sqdist(points, entry, &queries[qi, 0], dim)
                lc = max_level
                while lc > 0:
                    stamp += 1
                    search_layer(points, &queries[qi, 0], dim, &ep, 1, 1, links, counts, lc, visited, stamp, w)
                    ep = w[0]
                    lc -= 1
                stamp += 1
                nw = search_layer(points, &queries[qi, 0], dim, &ep, 1, efq, links, counts, 0, visited, stamp, w)
                for j in range(min(nw, k)):
                    ids[qi, j] = w[j].i
                    dists[qi, j] = w[j].d
    finally:
        free(visited); free(w)
    return ids_arr, d_arr


# ---------------------------------------------------------------- walks

def random_walks(const int64_t[::1] indptr, const int64_t[::1] indices, const int64_t[::1] starts,
                 const uint64_t[::1] seeds, int walk_length):
    """One uniform walk per start; rows padded with -1 after a dead end."""
    cdef int64_t m = starts.shape[0], w, step, cur, deg
    cdef Rng r
    out_arr = np.full((m, walk_length), -1, dtype=np.int64)
    cdef int64_t[:, ::1] out = out_arr
    with nogil:
        for w in range(m):
            r.state = seeds[w]
            cur = starts[w]
            out[w, 0] = cur
            for step in range(1, walk_length):
                deg = indptr[cur + 1] - indptr[cur]
                if deg == 0:
                    break
                cur = indices[indptr[cur] + <int64_t>(rng_next(&r) % <uint64_t>deg)]
                out[w, step] = cur
    return out_arr


# ---------------------------------------------------------------- skip-gram

cdef inline double sigmoid(double x) noexcept nogil:
    cdef double e
    if x >= 0:
        return 1.0 / (1.0 + exp(-x))
    e = exp(x)
    return e / (1.0 + e)


cdef inline double log_safe(double x) noexcept nogil:
    if x < 1e-300:
        return -690.7755278982137
    return log(x)


cdef inline double dot4(const double* a, const double* b, int64_t n) noexcept nogil:
    """Dot product with four interleaved partial sums, combined as (s0 + s1) + (s2 + s3)."""
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0
    cdef int64_t d = 0
    while d + 4 <= n:
        s0 = s0 + a[d] * b[d]
        s1 = s1 + a[d + 1] * b[d + 1]
        s2 = s2 + a[d + 2] * b[d + 2]
        s3 = s3 + a[d + 3] * b[d + 3]
        d += 4
    while d < n:
        s0 = s0 + a[d] * b[d]
        d += 1
    return (s0 + s1) + (s2 + s3)


cdef inline int64_t draw_negative(Rng* r, const int32_t[::1] table) noexcept nogil:
    return table[rng_next(r) % <uint64_t>table.shape[0]]


def sgns_train(const int64_t[:, ::1] walks, double[:, ::1] syn0, double[:, ::1] syn1,
               const int32_t[::1] table, int window, int negatives, int epochs,
               double lr_start, double lr_end, uint64_t seed):
    """Skip-gram with negative sampling, in place. Returns the mean pair loss of the last epoch."""
    cdef int64_t n_walks = walks.shape[0], length = walks.shape[1], dim = syn0.shape[1]
    cdef int64_t ep, wi, i, j, lo, hi, center, ctx, target, k, d, total, done = 0
    cdef double lr, f, g, label, loss = 0.0, s
    cdef int64_t n_pairs = 0, last = epochs - 1
    cdef Rng r
    cdef double* neu1e = <double*>malloc(max(dim, 1) * sizeof(double))
    if neu1e == NULL:
        raise MemoryError()
    r.state = seed
    total = 0
    for wi in range(n_walks):
        for i in range(length):
            if walks[wi, i] >= 0:
                total += 1
    total *= epochs
    try:
        with nogil:
            for ep in range(epochs):
                loss = 0.0
                n_pairs = 0
                for wi in range(n_walks):
                    for i in range(length):
                        center = walks[wi, i]
                        if center < 0:
                            break
                        lr = lr_start - (lr_start - lr_end) * (<double>done / <double>total)
                        done += 1
                        lo = i - window
                        if lo < 0:
                            lo = 0
                        hi = i + window + 1
                        if hi > length:
                            hi = length
                        for j in range(lo, hi):
                            if j == i:
                                continue
                            ctx = walks[wi, j]
                            if ctx < 0:
                                break
                            for d in range(dim):
                                neu1e[d] = 0.0
                            for k in range(negatives + 1):
                                if k == 0:
                                    target = ctx
                                    label = 1.0
                                else:
                                    target = draw_negative(&r, table)
                                    label = 0.0
                                    if target == ctx:
                                        continue
                                f = dot4(&syn0[center, 0], &syn1[target, 0], dim)
                                s = sigmoid(f)
                                if ep == last:
                                    if k == 0:
                                        loss = loss - log_safe(s)
                                    else:
                                        loss = loss - log_safe(1.0 - s)
                                g = (label - s) * lr
                                for d in range(dim):
                                    neu1e[d] = neu1e[d] + g * syn1[target, d]
                                for d in range(dim):
                                    syn1[target, d] = syn1[target, d] + g * syn0[center, d]
                            for d in range(dim):
                                syn0[center, d] = syn0[center, d] + neu1e[d]
                            n_pairs += 1
    finally:
        free(neu1e)
    if n_pairs == 0:
        return 0.0
    return loss / n_pairs



# ---------------------------------------------------------------- trees

cdef struct Item:
    double v
    int32_t y


cdef void sort_items(Item* a, int64_t n) noexcept nogil:
    """In-place sort by value: quicksort, median-of-three, insertion sort below 16."""
    cdef int64_t lo, hi, i, j, mid
    cdef int64_t stack[128]
    cdef int64_t top = 0
    cdef Item tmp, piv
    cdef double pv
    stack[0] = 0
    stack[1] = n - 1
    top = 1
    while top > 0:
        top -= 1
        lo = stack[2 * top]
        hi = stack[2 * top + 1]
        while hi - lo > 16:
            mid = lo + (hi - lo) // 2
            if a[mid].v < a[lo].v:
                tmp = a[mid]; a[mid] = a[lo]; a[lo] = tmp
            if a[hi].v < a[lo].v:
                tmp = a[hi]; a[hi] = a[lo]; a[lo] = tmp
            if a[hi].v < a[mid].v:
                tmp = a[hi]; a[hi] = a[mid]; a[mid] = tmp
            pv = a[mid].v
            i = lo
            j = hi
            while i <= j:
                while a[i].v < pv:
                    i += 1
                while a[j].v > pv:
                    j -= 1
                if i <= j:
                    tmp = a[i]; a[i] = a[j]; a[j] = tmp
                    i += 1
                    j -= 1
            # recurse into the smaller side via the loop, push the larger
            if j - lo < hi - i:
                if i < hi:
                    stack[2 * top] = i
                    stack[2 * top + 1] = hi
                    top += 1
                hi = j
            else:
                if lo < j:
                    stack[2 * top] = lo
                    stack[2 * top + 1] = j
                    top += 1
                lo = i
        for i in range(lo + 1, hi + 1):
            tmp = a[i]
            j = i - 1
            while j >= lo and a[j].v > tmp.v:
                a[j + 1] = a[j]
                j -= 1
            a[j + 1] = tmp


cdef inline double weighted_impurity(const int64_t* c, int64_t n_classes, int64_t n) noexcept nogil:
    cdef int64_t s = 0, k
    for k in range(n_classes):
        s += c[k] * c[k]
    return <double>n - <double>s / <double>n


def grow_tree(const double[:, ::1] X, const int32_t[::1] y, const int64_t[::1] sample_idx,
              int n_classes, int max_features, int max_depth, int min_samples_split, uint64_t seed):
    """Grow one CART classification tree (Gini) on the given bootstrap rows.

    Returns (feature, threshold, left, right, counts, importances, depth). Leaves
    carry feature -1. A sample goes left when x[feature] <= threshold; the
    threshold is the largest left-side training value.
    """
    cdef int64_t n = sample_idx.shape[0], n_feat = X.shape[1]
    cdef int64_t cap = 2 * n + 1
    cdef int64_t n_nodes = 1, top, node, start, end, depth, nn, i, j, k, f, t, cls, mtry
    cdef int64_t best_f, best_pos, nl, sl, sr, pos, visited, max_seen = 0
    cdef double best_score, score, thr, parent
    cdef Rng r
    r.state = seed
    mtry = max_features if max_features < n_feat else n_feat

    feature_arr = np.full(cap, -1, dtype=np.int32)
    threshold_arr = np.zeros(cap, dtype=np.float64)
    left_arr = np.full(cap, -1, dtype=np.int32)
    right_arr = np.full(cap, -1, dtype=np.int32)
    counts_arr = np.zeros((cap, n_classes), dtype=np.int64)
    imp_arr = np.zeros(n_feat, dtype=np.float64)
    cdef int32_t[::1] feature = feature_arr
    cdef double[::1] threshold = threshold_arr
    cdef int32_t[::1] left = left_arr
    cdef int32_t[::1] right = right_arr
    cdef int64_t[:, ::1] counts = counts_arr
    cdef double[::1] imp = imp_arr

    cdef int64_t* idx = <int64_t*>malloc(max(n, 1) * sizeof(int64_t))
    cdef int64_t* stack = <int64_t*>malloc(4 * cap * sizeof(int64_t))
    cdef Item* items = <Item*>malloc(max(n, 1) * sizeof(Item))
    cdef int64_t* feats = <int64_t*>malloc(max(n_feat, 1) * sizeof(int64_t))
    cdef int64_t* cl = <int64_t*>malloc(n_classes * sizeof(int64_t))
    cdef int64_t* cr = <int64_t*>malloc(n_classes * sizeof(int64_t))
    cdef int64_t* ctmp = <int64_t*>malloc(n_classes * sizeof(int64_t))
    cdef int64_t* bl = <int64_t*>malloc(n_classes * sizeof(int64_t))
    cdef int64_t* br = <int64_t*>malloc(n_classes * sizeof(int64_t))
    cdef bint pure
    if (idx == NULL or stack == NULL or items == NULL or feats == NULL or cl == NULL
            or cr == NULL or ctmp == NULL or bl == NULL or br == NULL):
        free(idx); free(stack); free(items); free(feats); free(cl); free(cr); free(ctmp); free(bl); free(br)
        raise MemoryError()
    try:
        with nogil:
            for i in range(n):
                idx[i] = sample_idx[i]
                counts[0, y[idx[i]]] += 1
            top = 0
            stack[0] = 0; stack[1] = 0; stack[2] = n; stack[3] = 0
            top = 1
            while top > 0:
                top -= 1
                node = stack[4 * top]
                start = stack[4 * top + 1]
                end = stack[4 * top + 2]
                depth = stack[4 * top + 3]
                if depth > max_seen:
                    max_seen = depth
                nn = end - start
                pure = True
                for k in range(n_classes):
                    if counts[node, k] != 0 and counts[node, k] != nn:
                        pure = False
                if pure or depth >= max_depth or nn < min_samples_split:
                    continue
                for f in range(n_feat):
                    feats[f] = f
                best_f = -1
                best_pos = -1
                best_score = -1.0
                thr = 0.0
                # lazy Fisher-Yates draw; features constant on this node do not use up the budget
                visited = 0
                j = 0
                while j < n_feat and visited < mtry:
                    t = j + <int64_t>(rng_next(&r) % <uint64_t>(n_feat - j))
                    f = feats[j]
                    feats[j] = feats[t]
                    feats[t] = f
                    f = feats[j]
                    j += 1
                    for i in range(nn):
                        items[i].v = X[idx[start + i], f]
                        items[i].y = y[idx[start + i]]
                    sort_items(items, nn)
                    if not items[0].v < items[nn - 1].v:
                        continue
                    visited += 1
                    for k in range(n_classes):
                        cl[k] = 0
                        cr[k] = counts[node, k]
                    for pos in range(nn - 1):
                        cls = items[pos].y
                        cl[cls] += 1
                        cr[cls] -= 1
                        if items[pos].v < items[pos + 1].v:
                            nl = pos + 1
                            sl = 0
                            sr = 0
                            for k in range(n_classes):
                                sl += cl[k] * cl[k]
                                sr += cr[k] * cr[k]
                            score = <double>sl / <double>nl + <double>sr / <double>(nn - nl)
                            if score > best_score:
                                best_score = score
                                best_f = f
                                best_pos = nl
                                thr = items[pos].v
                                for k in range(n_classes):
                                    bl[k] = cl[k]
                                    br[k] = cr[k]
                if best_f < 0:
                    continue
                # partition rows in place: x <= thr to the front
                i = start
                j = end - 1
                while i <= j:
                    if X[idx[i], best_f] <= thr:
                        i += 1
                    else:
                        t = idx[i]
                        idx[i] = idx[j]
                        idx[j] = t
                        j -= 1
                feature[node] = <int32_t>best_f
                threshold[node] = thr
                left[node] = <int32_t>n_nodes
                right[node] = <int32_t>(n_nodes + 1)
                for k in range(n_classes):
                    counts[n_nodes, k] = bl[k]
                    counts[n_nodes + 1, k] = br[k]
                for k in range(n_classes):
                    ctmp[k] = counts[node, k]
                parent = weighted_impurity(ctmp, n_classes, nn)
                imp[best_f] = imp[best_f] + (parent - weighted_impurity(bl, n_classes, best_pos)
                                             - weighted_impurity(br, n_classes, nn - best_pos))
                # right pushed first so the left subtree is grown first
                stack[4 * top] = n_nodes + 1
                stack[4 * top + 1] = start + best_pos
                stack[4 * top + 2] = end
                stack[4 * top + 3] = depth + 1
                top += 1
                stack[4 * top] = n_nodes
                stack[4 * top + 1] = start
                stack[4 * top + 2] = start + best_pos
                stack[4 * top + 3] = depth + 1
                top += 1
                n_nodes += 2
    finally:
        free(idx); free(stack); free(items); free(feats); free(cl); free(cr); free(ctmp); free(bl); free(br)
    return (feature_arr[:n_nodes].copy(), threshold_arr[:n_nodes].copy(), left_arr[:n_nodes].copy(),
            right_arr[:n_nodes].copy(), counts_arr[:n_nodes].copy(), imp_arr, int(max_seen))


def apply_tree(const int32_t[::1] feature, const double[::1] threshold, const int32_t[::1] left,
               const int32_t[::1] right, const double[:, ::1] X):
    """Leaf index reached by each row of X."""
    cdef int64_t n = X.shape[0], i, node
    out_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    with nogil:
        for i in range(n):
            node = 0
            while feature[node] >= 0:
                if X[i, feature[node]] <= threshold[node]:
                    node = left[node]
                else:
                    node = right[node]
            out[i] = node
    return out_arr
