"""Pure-numpy fallbacks for the hot loops in numba_impl.

Same signatures and semantics; the SGNS and layout updates are applied in
vectorized blocks rather than pair-by-pair, so floating point results differ
slightly from the numba path while remaining deterministic per seed.
"""

import numpy as np

_SGNS_CHUNK = 4096


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-np.clip(x, -12.0, 12.0)))


def sgns_train_epoch(W, C, centers, contexts, negatives, lrs):
    k = negatives.shape[1]
    for lo in range(0, centers.shape[0], _SGNS_CHUNK):
        hi = min(lo + _SGNS_CHUNK, centers.shape[0])
        c = centers[lo:hi]
        targets = np.concatenate([contexts[lo:hi, None], negatives[lo:hi]], axis=1)
        labels = np.zeros((hi - lo, k + 1))
        labels[:, 0] = 1.0
        # negatives that collide with the true context are skipped
        valid = np.ones_like(labels, dtype=bool)
        valid[:, 1:] = negatives[lo:hi] != contexts[lo:hi, None]

        cw = W[c]
        tv = C[targets]
        f = _sigmoid(np.einsum("md,mkd->mk", cw, tv))
        g = (labels - f) * lrs[lo:hi, None]
        g[~valid] = 0.0
        dW = np.einsum("mk,mkd->md", g, tv)
        dC = g[:, :, None] * cw[:, None, :]
        np.add.at(W, c, dW)
        np.add.at(C, targets.reshape(-1), dC.reshape(-1, W.shape[1]))


def walk_hitting_times(indptr, indices, anchor_mask, starts, walks_per_vertex,
                       max_steps, seed):
    rng = np.random.default_rng(seed)
    n_starts = starts.shape[0]
    sums = np.zeros(n_starts, dtype=np.int64)
    truncated = np.zeros(n_starts, dtype=np.int64)

    walkable = ~anchor_mask[starts]
    walk_owner = np.repeat(np.nonzero(walkable)[0], walks_per_vertex)
    cur = np.repeat(starts[walkable], walks_per_vertex)
    deg = np.diff(indptr)

    steps = 0
    while cur.size and steps < max_steps:
        draw = rng.random(cur.size)
        cur = indices[indptr[cur] + (draw * deg[cur]).astype(np.int64)]
        steps += 1
        hit = anchor_mask[cur]
        if hit.any():
            np.add.at(sums, walk_owner[hit], steps)
            keep = ~hit
            cur = cur[keep]
            walk_owner = walk_owner[keep]
    if cur.size:
        np.add.at(sums, walk_owner, max_steps)
        np.add.at(truncated, walk_owner, 1)
    return sums, truncated


def mutual_reachability_mst(dist, core):
    n = dist.shape[0]
    in_tree = np.zeros(n, dtype=bool)
    best_w = np.full(n, np.inf)
    best_src = np.zeros(n, dtype=np.int64)
    edges = np.empty((n - 1, 3))
    in_tree[0] = True
    current = 0
    for it in range(n - 1):
        w = np.maximum(np.maximum(dist[current], core[current]), core)
        better = (w < best_w) & ~in_tree
        best_w[better] = w[better]
        best_src[better] = current
        masked = np.where(in_tree, np.inf, best_w)
        nxt = int(np.argmin(masked))
        edges[it] = (best_src[nxt], nxt, best_w[nxt])
        in_tree[nxt] = True
        current = nxt
    return edges


def layout_optimize(pos, heads, tails, weights, n_epochs, neg_per_edge, lr0, seed):
    rng = np.random.default_rng(seed)
    n = pos.shape[0]
    n_edges = heads.shape[0]
    for epoch in range(n_epochs):
        lr = lr0 * (1.0 - epoch / n_epochs)

        diff = pos[heads] - pos[tails]
        d2 = np.einsum("ij,ij->i", diff, diff)
        grad = np.clip((-2.0 * weights / (1.0 + d2))[:, None] * diff, -4.0, 4.0)
        np.add.at(pos, heads, lr * grad)
        np.add.at(pos, tails, -lr * grad)

        if neg_per_edge > 0:
            others = rng.integers(0, n, size=(n_edges, neg_per_edge))
            diff = pos[heads][:, None, :] - pos[others]
            d2 = np.einsum("ijk,ijk->ij", diff, diff)
            coeff = 2.0 / ((0.001 + d2) * (1.0 + d2))
            grad = np.clip(coeff[:, :, None] * diff, -4.0, 4.0)
            grad[d2 < 1e-12] = 4.0
            grad[others == heads[:, None]] = 0.0
            np.add.at(pos, heads, lr * grad.sum(axis=1))
