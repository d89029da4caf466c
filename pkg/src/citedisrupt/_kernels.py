"""Compiled graph kernels over CSR arrays.

Node subsets are expressed with a stamp array: node ``x`` belongs to the
current subset iff ``allowed[x] == stamp``. Scratch arrays are allocated per
call, so calls are re-entrant and release the GIL.
"""

import numba as nb
import numpy as np

_JIT = dict(cache=True, nogil=True)


@nb.njit(**_JIT)
def _bfs_dependencies(indptr, indices, s, allowed, stamp, dist, sigma, delta, order):
    # Forward BFS counting shortest paths, then dependency accumulation in
    # reverse BFS order. Returns the number of nodes reached (order[:tail]).
    head = 0
    tail = 1
    order[0] = s
    dist[s] = 0
    sigma[s] = 1.0
    while head < tail:
        u = order[head]
        head += 1
        du = dist[u]
        for p in range(indptr[u], indptr[u + 1]):
            w = indices[p]
            if allowed[w] != stamp:
                continue
            if dist[w] < 0:
                dist[w] = du + 1
                order[tail] = w
                tail += 1
            if dist[w] == du + 1:
                sigma[w] += sigma[u]
    for idx in range(tail - 1, -1, -1):
        w = order[idx]
        dw = dist[w]
        acc = 0.0
        for p in range(indptr[w], indptr[w + 1]):
            x = indices[p]
            if allowed[x] != stamp:
                continue
            if dist[x] == dw + 1:
                acc += sigma[w] / sigma[x] * (1.0 + delta[x])
        delta[w] = acc
    return tail


@nb.njit(**_JIT)
def _reset(order, tail, dist, sigma, delta):
    for idx in range(tail):
        w = order[idx]
        dist[w] = -1
        sigma[w] = 0.0
        delta[w] = 0.0


@nb.njit(**_JIT)
def brandes_sources(indptr, indices, allowed, stamp, sources):
    """Summed dependencies over ``sources`` (processed in the given order)."""
    n = len(indptr) - 1
    out = np.zeros(n)
    dist = np.full(n, -1, np.int64)
    sigma = np.zeros(n)
    delta = np.zeros(n)
    order = np.empty(n, np.int64)
    for s in sources:
        tail = _bfs_dependencies(indptr, indices, s, allowed, stamp, dist, sigma, delta, order)
        for idx in range(1, tail):
            w = order[idx]
            out[w] += delta[w]
        _reset(order, tail, dist, sigma, delta)
    return out


@nb.njit(**_JIT)
def reverse_reach(in_indptr, in_indices, targets, allowed, stamp):
    """Sorted nodes (excluding the targets themselves) with a path into any target."""
    n = len(in_indptr) - 1
    seen = np.zeros(n, np.bool_)
    queue = np.empty(n, np.int64)
    tail = 0
    for t in targets:
        if not seen[t]:
            seen[t] = True
            queue[tail] = t
            tail += 1
    head = 0
    while head < tail:
        u = queue[head]
        head += 1
        for p in range(in_indptr[u], in_indptr[u + 1]):
            x = in_indices[p]
            if allowed[x] != stamp or seen[x]:
                continue
            seen[x] = True
            queue[tail] = x
            tail += 1
    for t in targets:
        seen[t] = False
    return np.flatnonzero(seen)


@nb.njit(**_JIT)
def ego_ball(out_indptr, out_indices, in_indptr, in_indices, v, k, allowed, stamp, hop, queue):
    """Stamp every node within ``k`` undirected hops of ``v`` (k < 0: unbounded).

    Returns the ball size; ``queue[:size]`` lists the members. ``hop`` must be
    -1 on entry for all nodes and is restored before returning.
    """
    head = 0
    tail = 1
    queue[0] = v
    hop[v] = 0
    allowed[v] = stamp
    while head < tail:
        u = queue[head]
        head += 1
        if k >= 0 and hop[u] >= k:
            continue
        for p in range(out_indptr[u], out_indptr[u + 1]):
            x = out_indices[p]
            if hop[x] < 0:
                hop[x] = hop[u] + 1
                allowed[x] = stamp
                queue[tail] = x
                tail += 1
        for p in range(in_indptr[u], in_indptr[u + 1]):
            x = in_indices[p]
            if hop[x] < 0:
                hop[x] = hop[u] + 1
                allowed[x] = stamp
                queue[tail] = x
                tail += 1
    for idx in range(tail):
        hop[queue[idx]] = -1
    return tail


@nb.njit(**_JIT)
def _power_iteration(lptr, lind, deg, m, alpha, tol, max_iter):
    x = np.full(m, 1.0 / m)
    gamma = 1.0 / m
    resid = np.inf
    it = 0
    while it < max_iter:
        it += 1
        new = np.zeros(m)
        dangling = 0.0
        total = 0.0
        for a in range(m):
            total += x[a]
            if deg[a] == 0:
                dangling += x[a]
            else:
                share = x[a] / deg[a]
                for p in range(lptr[a], lptr[a + 1]):
                    new[lind[p]] += share
        resid = 0.0
        for a in range(m):
            val = alpha * (new[a] + dangling * gamma) + (1.0 - alpha) * gamma * total
            resid += abs(val - x[a])
            new[a] = val
        x = new
        if resid <= tol:
            break
    return x, it, resid


@nb.njit(**_JIT)
def ego_block(out_indptr, out_indices, in_indptr, in_indices, focals, k,
              do_btw, do_pr, alpha, tol, max_iter):
    """Focal betweenness (standard normalization) and normalized Pagerank on ego balls.

    Undefined betweenness (ball smaller than 3) is NaN. ``pr_resid`` carries
    the final Pagerank residual so the caller can detect non-convergence.
    """
    n = len(out_indptr) - 1
    nf = len(focals)
    btw = np.full(nf, np.nan)
    pr = np.full(nf, np.nan)
    pr_resid = np.zeros(nf)
    pr_iters = np.zeros(nf, np.int64)
    allowed = np.zeros(n, np.int64)
    hop = np.full(n, -1, np.int64)
    queue = np.empty(n, np.int64)
    dist = np.full(n, -1, np.int64)
    sigma = np.zeros(n)
    delta = np.zeros(n)
    order = np.empty(n, np.int64)
    local = np.full(n, -1, np.int64)
    single = np.empty(1, np.int64)
    for fi in range(nf):
        v = focals[fi]
        stamp = fi + 1
        m = ego_ball(out_indptr, out_indices, in_indptr, in_indices, v, k, allowed, stamp, hop, queue)
        ball = np.sort(queue[:m])
        if do_btw and m >= 3:
            single[0] = v
            srcs = reverse_reach(in_indptr, in_indices, single, allowed, stamp)
            raw = 0.0
            for s in srcs:
                tail = _bfs_dependencies(out_indptr, out_indices, s, allowed, stamp,
                                         dist, sigma, delta, order)
                raw += delta[v]
                _reset(order, tail, dist, sigma, delta)
            btw[fi] = raw / ((m - 1.0) * (m - 2.0))
        if do_pr:
            for a in range(m):
                local[ball[a]] = a
            deg = np.zeros(m, np.int64)
            for a in range(m):
                u = ball[a]
                for p in range(out_indptr[u], out_indptr[u + 1]):
                    if allowed[out_indices[p]] == stamp:
                        deg[a] += 1
            lptr = np.zeros(m + 1, np.int64)
            for a in range(m):
                lptr[a + 1] = lptr[a] + deg[a]
            lind = np.empty(lptr[m], np.int64)
            for a in range(m):
                u = ball[a]
                q = lptr[a]
                for p in range(out_indptr[u], out_indptr[u + 1]):
                    w = out_indices[p]
                    if allowed[w] == stamp:
                        lind[q] = local[w]
                        q += 1
            x, it, resid = _power_iteration(lptr, lind, deg, m, alpha, tol, max_iter)
            pr[fi] = x[local[v]] * m / alpha
            pr_resid[fi] = resid
            pr_iters[fi] = it
            for a in range(m):
                local[ball[a]] = -1
    return btw, pr, pr_resid, pr_iters


@nb.njit(**_JIT)
def cd_counts_block(out_indptr, out_indices, in_indptr, in_indices, focals):
    """Per focal: n_I, n_J, n_K, J out-edge excess, deg_in, deg_out.

    The J excess is the sum over J-type citers of (out-degree within the CD
    neighborhood - 1), i.e. how many of the focal's references each cites.
    """
    n = len(out_indptr) - 1
    nf = len(focals)
    res = np.zeros((nf, 6), np.int64)
    refmark = np.zeros(n, np.int64)
    citmark = np.zeros(n, np.int64)
    kmark = np.zeros(n, np.int64)
    for fi in range(nf):
        v = focals[fi]
        stamp = fi + 1
        for p in range(out_indptr[v], out_indptr[v + 1]):
            refmark[out_indices[p]] = stamp
        for p in range(in_indptr[v], in_indptr[v + 1]):
            citmark[in_indices[p]] = stamp
        n_i = 0
        n_j = 0
        excess = 0
        for p in range(in_indptr[v], in_indptr[v + 1]):
            u = in_indices[p]
            c = 0
            for q in range(out_indptr[u], out_indptr[u + 1]):
                if refmark[out_indices[q]] == stamp:
                    c += 1
            if c == 0:
                n_i += 1
            else:
                n_j += 1
                excess += c
        n_k = 0
        for p in range(out_indptr[v], out_indptr[v + 1]):
            w = out_indices[p]
            for q in range(in_indptr[w], in_indptr[w + 1]):
                x = in_indices[q]
                if x == v or citmark[x] == stamp or refmark[x] == stamp or kmark[x] == stamp:
                    continue
                kmark[x] = stamp
                n_k += 1
        res[fi, 0] = n_i
        res[fi, 1] = n_j
        res[fi, 2] = n_k
        res[fi, 3] = excess
        res[fi, 4] = in_indptr[v + 1] - in_indptr[v]
        res[fi, 5] = out_indptr[v + 1] - out_indptr[v]
    return res
