"""Numba-compiled hot loops. Mirrors numpy_impl function-for-function."""

import numpy as np
from numba import njit


@njit(cache=True)
def sgns_train_epoch(W, C, centers, contexts, negatives, lrs):
    """One skip-gram/negative-sampling pass over precomputed training pairs.

    W: input vectors (vocab x dim), updated in place.
    C: output vectors (vocab x dim), updated in place.
    centers/contexts: int32 pair arrays; negatives: (n_pairs, k) int32.
    lrs: per-pair learning rate.
    """
    dim = W.shape[1]
    k = negatives.shape[1]
    err = np.empty(dim, dtype=W.dtype)
    for p in range(centers.shape[0]):
        c = centers[p]
        lr = lrs[p]
        for d in range(dim):
            err[d] = 0.0
        for s in range(k + 1):
            if s == 0:
                target = contexts[p]
                label = 1.0
            else:
                target = negatives[p, s - 1]
                label = 0.0
                if target == contexts[p]:
                    continue
            dot = 0.0
            for d in range(dim):
                dot += W[c, d] * C[target, d]
            if dot > 12.0:
                f = 1.0
            elif dot < -12.0:
                f = 0.0
            else:
                f = 1.0 / (1.0 + np.exp(-dot))
            g = (label - f) * lr
            for d in range(dim):
                err[d] += g * C[target, d]
                C[target, d] += g * W[c, d]
        for d in range(dim):
            W[c, d] += err[d]


@njit(cache=True)
def walk_hitting_times(indptr, indices, anchor_mask, starts, walks_per_vertex,
                       max_steps, seed):
    """Truncated random-walk hitting-time sums for each start vertex.

    Returns (step_sums, truncated_counts), both indexed like ``starts``.
    Walks move to a uniformly random neighbour each step and stop on entering
    an anchor; a walk that has not hit after max_steps contributes max_steps.
    """
    np.random.seed(seed)
    n_starts = starts.shape[0]
    sums = np.zeros(n_starts, dtype=np.int64)
    truncated = np.zeros(n_starts, dtype=np.int64)
    for i in range(n_starts):
        v = starts[i]
        if anchor_mask[v]:
            continue
        for _ in range(walks_per_vertex):
            cur = v
            steps = 0
            while steps < max_steps:
                lo = indptr[cur]
                deg = indptr[cur + 1] - lo
                cur = indices[lo + np.random.randint(0, deg)]
                steps += 1
                if anchor_mask[cur]:
                    break
            sums[i] += steps
            if steps == max_steps and not anchor_mask[cur]:
                truncated[i] += 1
    return sums, truncated


@njit(cache=True)
def mutual_reachability_mst(dist, core):
    """Prim's MST over the implicit complete mutual-reachability graph.

    Edge weight is max(core[i], core[j], dist[i, j]). Returns (n-1, 3) rows
    (parent, child, weight) in insertion order.
    """
    n = dist.shape[0]
    in_tree = np.zeros(n, dtype=np.bool_)
    best_w = np.full(n, np.inf)
    best_src = np.zeros(n, dtype=np.int64)
    edges = np.empty((n - 1, 3))
    in_tree[0] = True
    current = 0
    for it in range(n - 1):
        ccore = core[current]
        for j in range(n):
            if in_tree[j]:
                continue
            w = dist[current, j]
            if ccore > w:
                w = ccore
            if core[j] > w:
                w = core[j]
            if w < best_w[j]:
                best_w[j] = w
                best_src[j] = current
        nxt = -1
        nxt_w = np.inf
        for j in range(n):
            if not in_tree[j] and best_w[j] < nxt_w:
                nxt_w = best_w[j]
                nxt = j
        edges[it, 0] = best_src[nxt]
        edges[it, 1] = nxt
        edges[it, 2] = nxt_w
        in_tree[nxt] = True
        current = nxt
    return edges


@njit(cache=True)
def layout_optimize(pos, heads, tails, weights, n_epochs, neg_per_edge, lr0, seed):
    """SGD refinement of a 2D layout: weighted attraction along graph edges,
    repulsion against uniformly sampled vertices. Updates pos in place."""
    np.random.seed(seed)
    n = pos.shape[0]
    n_edges = heads.shape[0]
    for epoch in range(n_epochs):
        lr = lr0 * (1.0 - epoch / n_epochs)
        for e in range(n_edges):
            h = heads[e]
            t = tails[e]
            dx = pos[h, 0] - pos[t, 0]
            dy = pos[h, 1] - pos[t, 1]
            d2 = dx * dx + dy * dy
            coeff = -2.0 * weights[e] / (1.0 + d2)
            gx = min(4.0, max(-4.0, coeff * dx))
            gy = min(4.0, max(-4.0, coeff * dy))
            pos[h, 0] += lr * gx
            pos[h, 1] += lr * gy
            pos[t, 0] -= lr * gx
            pos[t, 1] -= lr * gy
            for _ in range(neg_per_edge):
                other = np.random.randint(0, n)
                if other == h:
                    continue
                dx = pos[h, 0] - pos[other, 0]
                dy = pos[h, 1] - pos[other, 1]
                d2 = dx * dx + dy * dy
                if d2 < 1e-12:
                    gx = 4.0
                    gy = 4.0
                else:
                    coeff = 2.0 / ((0.001 + d2) * (1.0 + d2))
                    gx = min(4.0, max(-4.0, coeff * dx))
                    gy = min(4.0, max(-4.0, coeff * dy))
                pos[h, 0] += lr * gx
                pos[h, 1] += lr * gy
