"""Hot inner loops, each in two interchangeable forms.

``*_loops`` functions are plain loop code compiled by numba; ``*_numpy``
functions are vectorized numpy. The module-level names without suffix point at
whichever implementation :mod:`netpower._jit` selected. Both forms must return
identical results; the test suite compares them directly.
"""

from __future__ import annotations

import numpy as np

from ._jit import USE_JIT, njit, prange

# ---------------------------------------------------------------------------
# unweighted all-pairs geodesics


def _bfs_geodesics_py(indptr, indices, n):
    dist = np.full((n, n), np.inf)
    sigma = np.zeros((n, n))
    queue = np.empty(n, dtype=np.int64)
    for s in range(n):
        dist[s, s] = 0.0
        sigma[s, s] = 1.0
        head = 0
        tail = 1
        queue[0] = s
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[s, u]
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                if dist[s, v] == np.inf:
                    dist[s, v] = du + 1.0
                    queue[tail] = v
                    tail += 1
                if dist[s, v] == du + 1.0:
                    sigma[s, v] += sigma[s, u]
    return dist, sigma


bfs_geodesics_loops = njit(_bfs_geodesics_py)


def bfs_geodesics_numpy(indptr, indices, n):
    A = np.zeros((n, n))
    for u in range(n):
        A[u, indices[indptr[u]:indptr[u + 1]]] = 1.0
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    sigma = np.eye(n)
    frontier = np.eye(n)
    level = 0.0
    while frontier.any():
        level += 1.0
        reach = frontier @ A
        fresh = (reach > 0) & np.isinf(dist)
        dist[fresh] = level
        sigma[fresh] = reach[fresh]
        frontier = np.where(fresh, reach, 0.0)
    return dist, sigma


# ---------------------------------------------------------------------------
# weighted voting games: swing counts by coalition size and Johnston splits


def _coalition_counts_py(weights, threshold, strict):
    n = weights.shape[0]
    swings = np.zeros((n, n), dtype=np.int64)  # [player, |S| without player]
    johnston = np.zeros((n, n + 1), dtype=np.int64)  # [player, number of critical members]
    crit = np.empty(n, dtype=np.int64)
    for mask in range(1 << n):
        tot = weights[0] * 0
        size = 0
        for i in range(n):
            if (mask >> i) & 1:
                tot += weights[i]
                size += 1
        win = tot > threshold if strict else tot >= threshold
        if not win:
            continue
        k = 0
        for i in range(n):
            if (mask >> i) & 1:
                rest = tot - weights[i]
                still = rest > threshold if strict else rest >= threshold
                if not still:
                    crit[k] = i
                    k += 1
                    swings[i, size - 1] += 1
        for c in range(k):
            johnston[crit[c], k] += 1
    return swings, johnston


coalition_counts_loops = njit(_coalition_counts_py)


def coalition_counts_numpy(weights, threshold, strict):
    n = weights.shape[0]
    masks = np.arange(1 << n, dtype=np.int64)
    member = ((masks[:, None] >> np.arange(n)) & 1).astype(bool)
    tot = member.astype(weights.dtype) @ weights if n else np.zeros(1, dtype=weights.dtype)
    size = member.sum(axis=1)
    win = tot > threshold if strict else tot >= threshold
    rest = tot[:, None] - weights[None, :]
    still = rest > threshold if strict else rest >= threshold
    critical = member & win[:, None] & ~still
    k = critical.sum(axis=1)
    swings = np.zeros((n, n), dtype=np.int64)
    johnston = np.zeros((n, n + 1), dtype=np.int64)
    for i in range(n):
        rows = critical[:, i]
        swings[i] = np.bincount(size[rows] - 1, minlength=n)[:n]
        johnston[i] = np.bincount(k[rows], minlength=n + 1)[: n + 1]
    return swings, johnston


# ---------------------------------------------------------------------------
# arbitrary simple games given by a win table over bitmasks


def _marginal_counts_py(win):
    size_tab = win.shape[0]
    n = 0
    while (1 << n) < size_tab:
        n += 1
    counts = np.zeros((n, max(n, 1)), dtype=np.int64)  # [player, |S|]
    for mask in range(size_tab):
        size = 0
        for i in range(n):
            if (mask >> i) & 1:
                size += 1
        for i in range(n):
            if not (mask >> i) & 1:
                counts[i, size] += np.int64(win[mask | (1 << i)]) - np.int64(win[mask])
    return counts


marginal_counts_loops = njit(_marginal_counts_py)


def marginal_counts_numpy(win):
    size_tab = win.shape[0]
    n = size_tab.bit_length() - 1
    masks = np.arange(size_tab, dtype=np.int64)
    size = np.zeros(size_tab, dtype=np.int64)
    for i in range(n):
        size += (masks >> i) & 1
    w = win.astype(np.int64)
    counts = np.zeros((n, max(n, 1)), dtype=np.int64)
    for i in range(n):
        out = ((masks >> i) & 1) == 0
        diff = w[masks[out] | (1 << i)] - w[masks[out]]
        counts[i] = np.bincount(size[out], weights=diff, minlength=max(n, 1)).astype(np.int64)[: max(n, 1)]
    return counts


# ---------------------------------------------------------------------------
# control closure of every coalition


def _closure_table_py(shares, quota, strict):
    n = shares.shape[0]
    out = np.zeros(1 << n, dtype=np.int64)
    held = np.empty(n)
    for mask in range(1 << n):
        ctrl = 0
        changed = True
        while changed:
            changed = False
            active = mask | ctrl
            for j in range(n):
                held[j] = 0.0
            for i in range(n):
                if (active >> i) & 1:
                    for j in range(n):
                        held[j] += shares[i, j]
            for j in range(n):
                if not (ctrl >> j) & 1:
                    ok = held[j] > quota[j] if strict else held[j] >= quota[j]
                    if ok:
                        ctrl |= 1 << j
                        changed = True
        out[mask] = ctrl
    return out


closure_table_loops = njit(_closure_table_py)


def closure_table_numpy(shares, quota, strict):
    n = shares.shape[0]
    masks = np.arange(1 << n, dtype=np.int64)
    bits = 1 << np.arange(n, dtype=np.int64)
    member = (masks[:, None] & bits) != 0
    ctrl = np.zeros_like(member)
    while True:
        held = (member | ctrl).astype(float) @ shares
        reach = held > quota if strict else held >= quota
        nxt = ctrl | reach
        if (nxt == ctrl).all():
            break
        ctrl = nxt
    return (ctrl * bits).sum(axis=1)


# ---------------------------------------------------------------------------
# current-flow (random-walk) betweenness


def _walk_betweenness_py(A, V):
    n = A.shape[0]
    out = np.zeros(n)
    for i in prange(n):
        acc = 0.0
        for s in range(n):
            if s == i:
                continue
            for t in range(s + 1, n):
                if t == i:
                    continue
                vi = V[i, s] - V[i, t]
                cur = 0.0
                for u in range(n):
                    if A[i, u] != 0.0:
                        cur += A[i, u] * abs(vi - (V[u, s] - V[u, t]))
                acc += 0.5 * cur
        out[i] = acc
    return out


walk_betweenness_loops = njit(parallel=True)(_walk_betweenness_py)


def walk_betweenness_numpy(A, V):
    n = A.shape[0]
    out = np.zeros(n)
    for s in range(n):
        for t in range(s + 1, n):
            volt = V[:, s] - V[:, t]
            cur = 0.5 * (A * np.abs(volt[:, None] - volt[None, :])).sum(axis=1)
            cur[s] = cur[t] = 0.0
            out += cur
    return out


# ---------------------------------------------------------------------------
# acyclic-certification DP for the cheapest control problem


def _certification_dp_py(shares, need, price, cap, allowed):
    n = shares.shape[0]
    size = 1 << n
    best = np.full(size, np.inf)
    best[0] = 0.0
    inherited = np.zeros(n)
    for mask in range(size):
        if best[mask] == np.inf:
            continue
        if (mask & allowed) != mask:
            continue
        for j in range(n):
            inherited[j] = 0.0
        for i in range(n):
            if (mask >> i) & 1:
                for j in range(n):
                    inherited[j] += shares[i, j]
        for j in range(n):
            if (mask >> j) & 1 or not (allowed >> j) & 1:
                continue
            z = need[j] - inherited[j]
            if z < 0.0:
                z = 0.0
            if z > cap[j] + 1e-12:
                continue
            c = best[mask] + price[j] * z
            nxt = mask | (1 << j)
            if c < best[nxt]:
                best[nxt] = c
    return best


certification_dp_loops = njit(_certification_dp_py)


def certification_dp_numpy(shares, need, price, cap, allowed):
    n = shares.shape[0]
    size = 1 << n
    masks = np.arange(size, dtype=np.int64)
    bits = 1 << np.arange(n, dtype=np.int64)
    member = (masks[:, None] & bits) != 0
    inherited = member.astype(float) @ shares
    z = np.maximum(need[None, :] - inherited, 0.0)
    step = np.where(z <= cap[None, :] + 1e-12, price[None, :] * z, np.inf)
    popcount = member.sum(axis=1)
    best = np.full(size, np.inf)
    best[0] = 0.0
    ok = (masks & allowed) == masks
    for level in range(n):
        src = np.flatnonzero((popcount == level) & ok & np.isfinite(best))
        for j in range(n):
            if not (allowed >> j) & 1:
                continue
            cand = src[(src & (1 << j)) == 0]
            if cand.size == 0:
                continue
            np.minimum.at(best, cand | (1 << j), best[cand] + step[cand, j])
    return best


# ---------------------------------------------------------------------------
# Monte Carlo control draws for the hybrid estimators


def _draw_links_py(keys, holders_ptr, holders, holder_w, quota, johnston):
    """Pivot links for a block of iterations.

    ``keys[t, e]`` is the random sort key of the e-th holder slot. Returns
    ``links[t, e]``: control weight assigned to that holder in iteration t.
    """
    n_iter = keys.shape[0]
    n_slots = holders.shape[0]
    n_nodes = holders_ptr.shape[0] - 1
    links = np.zeros((n_iter, n_slots))
    widest = 0
    for j in range(n_nodes):
        if holders_ptr[j + 1] - holders_ptr[j] > widest:
            widest = holders_ptr[j + 1] - holders_ptr[j]
    order = np.empty(widest, dtype=np.int64)
    for t in range(n_iter):
        for j in range(n_nodes):
            lo = holders_ptr[j]
            hi = holders_ptr[j + 1]
            if hi == lo:
                continue
            # stable insertion sort of the slots by key
            for r in range(hi - lo):
                e = lo + r
                q = r
                while q > 0 and keys[t, order[q - 1]] > keys[t, e]:
                    order[q] = order[q - 1]
                    q -= 1
                order[q] = e
            cum = 0.0
            pos = -1
            for r in range(hi - lo):
                cum += holder_w[order[r]]
                if cum >= quota - 1e-12:
                    pos = r
                    break
            if pos < 0:
                continue
            if not johnston:
                links[t, order[pos]] = 1.0
                continue
            k = 0
            for r in range(pos + 1):
                if cum - holder_w[order[r]] < quota - 1e-12:
                    k += 1
            for r in range(pos + 1):
                if cum - holder_w[order[r]] < quota - 1e-12:
                    links[t, order[r]] = 1.0 / k
    return links


draw_links_loops = njit(_draw_links_py)


def draw_links_numpy(keys, holders_ptr, holders, holder_w, quota, johnston):
    n_iter = keys.shape[0]
    links = np.zeros((n_iter, holders.shape[0]))
    rows = np.arange(n_iter)
    for j in range(holders_ptr.shape[0] - 1):
        lo, hi = holders_ptr[j], holders_ptr[j + 1]
        if hi == lo:
            continue
        order = np.argsort(keys[:, lo:hi], axis=1, kind="mergesort") + lo
        w = holder_w[order]
        cum = np.cumsum(w, axis=1)
        hit = cum >= quota - 1e-12
        reached = hit.any(axis=1)
        pos = np.argmax(hit, axis=1)
        if not johnston:
            r = rows[reached]
            links[r, order[r, pos[reached]]] = 1.0
            continue
        total = cum[rows, pos]
        in_prefix = np.arange(hi - lo)[None, :] <= pos[:, None]
        critical = in_prefix & (total[:, None] - w < quota - 1e-12) & reached[:, None]
        k = critical.sum(axis=1)
        share = np.where(critical, 1.0 / np.maximum(k, 1)[:, None], 0.0)
        np.add.at(links, (np.repeat(rows, hi - lo), order.ravel()), share.ravel())
    return links


def _propagate_py(links, holders_ptr, holders, targets_of_slot, values, damping, want_inverse):
    """Sum over iterations of ``(I - d Y_t)^-1 v`` and, optionally, of the inverse itself.

    Each system is solved by Gaussian elimination with partial pivoting on
    preallocated buffers; the right-hand sides are ``v`` and, when wanted, the
    identity columns.
    """
    n_iter = links.shape[0]
    n = values.shape[0]
    n_rhs = n + 1 if want_inverse else 1
    acc_y = np.zeros(n)
    acc_inv = np.zeros((n, n))
    M = np.empty((n, n))
    LU = np.empty((n, n))
    X = np.empty((n, n_rhs))
    worst = 0.0
    for t in range(n_iter):
        for i in range(n):
            for j in range(n):
                M[i, j] = 0.0
            M[i, i] = 1.0
        for e in range(holders.shape[0]):
            if links[t, e] != 0.0:
                M[holders[e], targets_of_slot[e]] -= damping * links[t, e]
        for i in range(n):
            for j in range(n):
                LU[i, j] = M[i, j]
            X[i, 0] = values[i]
            for c in range(1, n_rhs):
                X[i, c] = 1.0 if c - 1 == i else 0.0
        for col in range(n):
            piv = col
            big = abs(LU[col, col])
            for r in range(col + 1, n):
                if abs(LU[r, col]) > big:
                    big = abs(LU[r, col])
                    piv = r
            if piv != col:
                for c in range(n):
                    tmp = LU[col, c]
                    LU[col, c] = LU[piv, c]
                    LU[piv, c] = tmp
                for c in range(n_rhs):
                    tmp = X[col, c]
                    X[col, c] = X[piv, c]
                    X[piv, c] = tmp
            for r in range(col + 1, n):
                f = LU[r, col] / LU[col, col]
                if f != 0.0:
                    for c in range(col, n):
                        LU[r, c] -= f * LU[col, c]
                    for c in range(n_rhs):
                        X[r, c] -= f * X[col, c]
        for col in range(n - 1, -1, -1):
            for c in range(n_rhs):
                acc = X[col, c]
                for k in range(col + 1, n):
                    acc -= LU[col, k] * X[k, c]
                X[col, c] = acc / LU[col, col]
        for i in range(n):
            r = -values[i]
            for j in range(n):
                r += M[i, j] * X[j, 0]
            if abs(r) > worst:
                worst = abs(r)
            acc_y[i] += X[i, 0]
            if want_inverse:
                for j in range(n):
                    acc_inv[i, j] += X[i, j + 1]
    return acc_y, acc_inv, worst


propagate_loops = njit(_propagate_py)


def propagate_numpy(links, holders_ptr, holders, targets_of_slot, values, damping, want_inverse):
    n_iter = links.shape[0]
    n = values.shape[0]
    M = np.broadcast_to(np.eye(n), (n_iter, n, n)).copy()
    np.add.at(M, (slice(None), holders, targets_of_slot), -damping * links)
    if want_inverse:
        inv = np.linalg.solve(M, np.broadcast_to(np.eye(n), (n_iter, n, n)))
        y = inv @ values
        acc_inv = inv.sum(axis=0)
    else:
        y = np.linalg.solve(M, np.broadcast_to(values, (n_iter, n))[..., None])[..., 0]
        acc_inv = np.zeros((n, n))
    resid = np.abs(np.einsum("tij,tj->ti", M, y) - values[None, :])
    worst = float(resid.max()) if n_iter else 0.0
    return y.sum(axis=0), acc_inv, worst


if USE_JIT:
    bfs_geodesics = bfs_geodesics_loops
    coalition_counts = coalition_counts_loops
    marginal_counts = marginal_counts_loops
    closure_table = closure_table_loops
    walk_betweenness = walk_betweenness_loops
    certification_dp = certification_dp_loops
    draw_links = draw_links_loops
    propagate = propagate_loops
else:
    bfs_geodesics = bfs_geodesics_numpy
    coalition_counts = coalition_counts_numpy
    marginal_counts = marginal_counts_numpy
    closure_table = closure_table_numpy
    walk_betweenness = walk_betweenness_numpy
    certification_dp = certification_dp_numpy
    draw_links = draw_links_numpy
    propagate = propagate_numpy
