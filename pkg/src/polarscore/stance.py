"""Stance detection: 2D projection of user embeddings, density clustering,
and party labeling of the resulting clusters.

The projector builds a fuzzy k-nearest-neighbour graph (smoothed exponential
kernel, symmetrized) and refines a PCA initialization by stochastic gradient
descent with edge attraction and sampled repulsion. The clusterer follows the
hierarchical density pipeline: mutual-reachability distances, minimum spanning
tree, condensed cluster tree, stability-maximizing flat cut.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .corpus import UserProfile
from .embedding import UserEmbedding
from .errors import InputError, UnpolarizedEventError

logger = logging.getLogger("polarscore")

NOISE = -1
SMOOTH_TOL = 1e-5
MIN_SIGMA_SCALE = 1e-3


@dataclass
class Projection2D:
    user_ids: list[str]
    coords: np.ndarray  # (n, 2)
    method: str
    n_neighbors: int
    index: dict[str, int] = field(init=False)

    def __post_init__(self):
        self.index = {u: i for i, u in enumerate(self.user_ids)}

    def point(self, user_id: str) -> tuple[float, float]:
        x, y = self.coords[self.index[user_id]]
        return float(x), float(y)


@dataclass
class StanceClusters:
    labels: dict[str, int]  # user_id -> cluster id, -1 = noise
    party_labels: dict[int, str]  # cluster id -> "X" | "Y" | "unlabeled"
    min_cluster_size: int

    def cluster_ids(self) -> list[int]:
        return sorted({c for c in self.labels.values() if c != NOISE})

    def members(self, cluster_id: int) -> list[str]:
        return sorted(u for u, c in self.labels.items() if c == cluster_id)

    def partition_of(self, user_id: str) -> str:
        """Party side ("X"/"Y") of the user's cluster, or "none"."""
        c = self.labels.get(user_id, NOISE)
        if c == NOISE:
            return "none"
        side = self.party_labels.get(c, "unlabeled")
        return side if side in ("X", "Y") else "none"


def _pairwise_distances(points: np.ndarray) -> np.ndarray:
    sq = np.sum(points**2, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (points @ points.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return np.sqrt(d2)


def _smooth_knn_weights(knn_dists: np.ndarray) -> np.ndarray:
    """Per-point exponential kernel widths chosen so each row's fuzzy
    neighbourhood has total weight log2(k); returns the weight matrix."""
    n, k = knn_dists.shape
    target = math.log2(k) if k > 1 else 1.0
    weights = np.ones_like(knn_dists)
    mean_all = knn_dists[knn_dists > 0].mean() if (knn_dists > 0).any() else 1.0
    for i in range(n):
        row = knn_dists[i]
        pos = row[row > 0]
        rho = pos.min() if pos.size else 0.0
        shifted = np.maximum(row - rho, 0.0)
        if not shifted.any():
            continue  # all neighbours at rho: every weight stays 1
        lo, hi, mid = 0.0, np.inf, 1.0
        for _ in range(64):
            psum = np.exp(-shifted / mid).sum()
            if abs(psum - target) < SMOOTH_TOL:
                break
            if psum > target:
                hi = mid
                mid = (lo + hi) / 2.0
            else:
                lo = mid
                mid = mid * 2.0 if hi == np.inf else (lo + hi) / 2.0
        row_scale = pos.mean() if pos.size else mean_all
        sigma = max(mid, MIN_SIGMA_SCALE * row_scale)
        weights[i] = np.exp(-shifted / sigma)
    return weights


def _pca_init(X: np.ndarray, seed: int) -> np.ndarray:
    centered = X - X.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    comps = vt[:2]
    # fix component signs so the layout does not flip between runs
    for r in range(comps.shape[0]):
        j = np.argmax(np.abs(comps[r]))
        if comps[r, j] < 0:
            comps[r] = -comps[r]
    pos = centered @ comps.T
    if pos.shape[1] < 2:
        pos = np.hstack([pos, np.zeros((pos.shape[0], 2 - pos.shape[1]))])
    top = np.abs(pos).max()
    if top > 0:
        pos = pos * (10.0 / top)
    rng = np.random.default_rng(seed)
    return np.ascontiguousarray(pos + rng.normal(0.0, 1e-4, size=pos.shape))


def project_2d(
    embeddings: list[UserEmbedding],
    n_neighbors: int = 15,
    seed: int = 0,
    n_epochs: int = 300,
    learning_rate: float = 1.0,
    negative_samples: int = 5,
) -> Projection2D:
    """Neighbourhood-preserving 2D layout of user embeddings.

    Deterministic for a fixed (seed, kernel backend) pair. Needs at least 3
    points of dimension >= 2.
    """
    n = len(embeddings)
    if n < 3:
        raise InputError(f"stance: projection needs >= 3 points, got {n}")
    X = np.asarray([e.vector for e in embeddings], dtype=np.float64)
    if X.shape[1] < 2:
        raise InputError("stance: projection needs embedding dimension >= 2")
    k = min(n_neighbors, n - 1)

    dist = _pairwise_distances(X)
    order = np.argsort(dist, axis=1, kind="stable")
    nbr_idx = np.empty((n, k), dtype=np.intp)
    for i in range(n):
        nbr_idx[i] = order[i][order[i] != i][:k]
    knn_dists = np.take_along_axis(dist, nbr_idx, axis=1)
    w = _smooth_knn_weights(knn_dists)

    P = np.zeros((n, n))
    rows = np.repeat(np.arange(n), k)
    P[rows, nbr_idx.ravel()] = w.ravel()
    S = P + P.T - P * P.T
    heads, tails = np.nonzero(np.triu(S, 1))
    weights = S[heads, tails]
    if weights.size:
        weights = weights / weights.max()

    pos = _pca_init(X, seed)
    if weights.size:
        kernels.layout_optimize(
            pos,
            heads.astype(np.int64),
            tails.astype(np.int64),
            weights.astype(np.float64),
            n_epochs,
            negative_samples,
            learning_rate,
            seed,
        )
    if not np.isfinite(pos).all():
        raise InputError("stance: layout produced non-finite coordinates")
    return Projection2D(
        user_ids=[e.user_id for e in embeddings],
        coords=pos,
        method="fuzzy-knn-sgd",
        n_neighbors=n_neighbors,
    )


def _single_linkage(edges: np.ndarray, n: int) -> np.ndarray:
    """Merge list from MST edges sorted by weight.

    Row i describes tree node n+i: (left node, right node, distance, size).
    """
    order = np.argsort(edges[:, 2], kind="stable")
    uf = np.arange(2 * n - 1)
    node_of = np.arange(2 * n - 1)
    size = np.ones(2 * n - 1)
    merges = np.empty((n - 1, 4))

    def find(x: int) -> int:
        root = x
        while uf[root] != root:
            root = uf[root]
        while uf[x] != root:
            uf[x], x = root, uf[x]
        return root

    nxt = n
    for row, e in enumerate(order):
        a, b = int(edges[e, 0]), int(edges[e, 1])
        ra, rb = find(a), find(b)
        na, nb = node_of[ra], node_of[rb]
        merged = size[na] + size[nb]
        merges[row] = (na, nb, edges[e, 2], merged)
        uf[ra] = rb
        node_of[rb] = nxt
        size[nxt] = merged
        nxt += 1
    return merges


def _subtree_leaves(node: int, merges: np.ndarray, n: int):
    stack = [node]
    while stack:
        v = stack.pop()
        if v < n:
            yield v
        else:
            stack.append(int(merges[v - n, 0]))
            stack.append(int(merges[v - n, 1]))


def _condense(merges: np.ndarray, n: int, min_cluster_size: int):
    """Condensed cluster tree rows (parent, child, lambda, size).

    Cluster ids start at n (the root); children below min_cluster_size fall
    out as individual points at the split's lambda.
    """

    def node_size(v: int) -> int:
        return 1 if v < n else int(merges[v - n, 3])

    root = 2 * n - 2
    relabel = {root: n}
    next_label = n + 1
    rows = []
    queue = [root]
    while queue:
        node = queue.pop(0)
        i = node - n
        left, right = int(merges[i, 0]), int(merges[i, 1])
        d = merges[i, 2]
        lam = 1.0 / d if d > 0 else np.inf
        label = relabel[node]
        big_left = node_size(left) >= min_cluster_size
        big_right = node_size(right) >= min_cluster_size
        if big_left and big_right:
            for child in (left, right):
                relabel[child] = next_label
                rows.append((label, next_label, lam, node_size(child)))
                next_label += 1
                queue.append(child)
        elif not big_left and not big_right:
            for side in (left, right):
                for p in _subtree_leaves(side, merges, n):
                    rows.append((label, p, lam, 1))
        else:
            keep, drop = (left, right) if big_left else (right, left)
            relabel[keep] = label
            queue.append(keep)
            for p in _subtree_leaves(drop, merges, n):
                rows.append((label, p, lam, 1))
    return rows


def _stability(rows, n: int) -> dict[int, float]:
    births = {child: lam for _, child, lam, _ in rows if child >= n}
    births[n] = 0.0
    stab: dict[int, float] = {}
    for parent, _, lam, size in rows:
        stab[parent] = stab.get(parent, 0.0) + (lam - births[parent]) * size
    for _, child, _, _ in rows:
        if child >= n:
            stab.setdefault(child, 0.0)
    return stab


def _select_clusters(rows, stab: dict[int, float], n: int) -> set[int]:
    """Excess-of-mass flat cut; the root is never selectable."""
    children: dict[int, list[int]] = {}
    for parent, child, _, _ in rows:
        if child >= n:
            children.setdefault(parent, []).append(child)
    stab = dict(stab)
    selected = {c: True for c in stab if c != n}
    for c in sorted(selected, reverse=True):
        subtree = sum(stab[ch] for ch in children.get(c, []))
        if children.get(c) and subtree > stab[c]:
            stab[c] = subtree
            selected[c] = False
        else:
            stack = list(children.get(c, []))
            while stack:
                d = stack.pop()
                selected[d] = False
                stack.extend(children.get(d, []))
    return {c for c, keep in selected.items() if keep}


def cluster(points: Projection2D, min_cluster_size: int = 15) -> StanceClusters:
    """Density clustering of the 2D layout; label -1 marks noise.

    Cluster ids are renumbered by smallest member user id, so memberships do
    not depend on input order.
    """
    if min_cluster_size < 2:
        raise InputError("stance: min_cluster_size must be >= 2")
    ids = points.user_ids
    n = len(ids)
    if min_cluster_size > n:
        return StanceClusters(labels={u: NOISE for u in ids}, party_labels={},
                              min_cluster_size=min_cluster_size)

    dist = _pairwise_distances(points.coords)
    core = np.sort(dist, axis=1)[:, min_cluster_size - 1]
    mst = kernels.mutual_reachability_mst(dist, core)
    merges = _single_linkage(mst, n)
    rows = _condense(merges, n, min_cluster_size)

    non_root = {child for _, child, _, _ in rows if child >= n}
    if not non_root:
        # the hierarchy never split into two viable clusters: one density mode
        return StanceClusters(labels={u: 0 for u in ids},
                              party_labels={}, min_cluster_size=min_cluster_size)

    stab = _stability(rows, n)
    selected = _select_clusters(rows, stab, n)

    up = {child: parent for parent, child, _, _ in rows
          if child >= n and child not in selected}

    def resolve(c: int) -> int:
        while c in up:
            c = up[c]
        return c

    raw: dict[str, int] = {}
    for parent, child, _, _ in rows:
        if child < n:
            c = resolve(parent)
            raw[ids[child]] = c if c in selected else NOISE
    members: dict[int, list[str]] = {}
    for u, c in raw.items():
        if c != NOISE:
            members.setdefault(c, []).append(u)
    renumber = {
        c: i
        for i, c in enumerate(sorted(members, key=lambda c: min(members[c])))
    }
    labels = {u: renumber.get(c, NOISE) for u, c in raw.items()}
    return StanceClusters(labels=labels, party_labels={},
                          min_cluster_size=min_cluster_size)


def label_clusters(
    clusters: StanceClusters, users: dict[str, UserProfile]
) -> StanceClusters:
    """Assign X to the cluster holding the largest share of INC politicians
    and Y likewise for BJP; remaining clusters stay unlabeled.

    Shares are fractions of each party's politician total, so sparse clusters
    cannot win by being small. Ties and X=Y collisions are error states.
    """
    per_cluster: dict[int, dict[str, int]] = {}
    party_totals = {"INC": 0, "BJP": 0}
    for user_id, cid in clusters.labels.items():
        profile = users.get(user_id)
        if profile is None or not profile.is_politician:
            continue
        party_totals[profile.party] += 1
        if cid != NOISE:
            per_cluster.setdefault(cid, {"INC": 0, "BJP": 0})
            per_cluster[cid][profile.party] += 1
    if party_totals["INC"] == 0 or party_totals["BJP"] == 0:
        raise InputError(
            "stance: cannot label clusters without politicians from both parties"
        )

    def best(party: str) -> int:
        shares = {c: per_cluster[c][party] / party_totals[party]
                  for c in per_cluster}
        top = max(shares.values(), default=0.0)
        if top == 0.0:
            raise UnpolarizedEventError(
                f"stance: no clustered {party} politicians"
            )
        winners = [c for c, s in shares.items() if s == top]
        if len(winners) > 1:
            raise UnpolarizedEventError(
                f"stance: tied {party} share between clusters {sorted(winners)}"
            )
        return winners[0]

    x_cluster = best("INC")
    y_cluster = best("BJP")
    if x_cluster == y_cluster:
        raise UnpolarizedEventError(
            "stance: both parties concentrate in one cluster"
        )
    party_labels = {c: "unlabeled" for c in clusters.cluster_ids()}
    party_labels[x_cluster] = "X"
    party_labels[y_cluster] = "Y"
    return StanceClusters(labels=dict(clusters.labels),
                          party_labels=party_labels,
                          min_cluster_size=clusters.min_cluster_size)
