"""Thresholded undirected retweet graph and random-walk retweet polarity.

Polarity of a user is the gap between two rank statistics: how early the
user's random walks hit the top-degree vertices of side X versus side Y.
Hitting times come from an exact absorbing-walk linear solve on small graphs
and from truncated Monte-Carlo walks on large ones.
"""

import logging
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import spsolve
from scipy.stats import rankdata

from . import kernels
from .errors import InputError

logger = logging.getLogger("polarscore")

EXACT_MAX_VERTICES = 5000
DEFAULT_THRESHOLD = 2
DEFAULT_ANCHORS = 100
DEFAULT_MAX_STEPS = 200
DEFAULT_WALKS = 1000


@dataclass
class RetweetGraph:
    vertices: list[str]  # sorted user ids
    indptr: np.ndarray
    indices: np.ndarray
    edge_weights: np.ndarray  # aligned with indices
    threshold: int
    index: dict[str, int] = field(init=False)

    def __post_init__(self):
        self.index = {v: i for i, v in enumerate(self.vertices)}

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def degree(self, user_id: str) -> int:
        i = self.index[user_id]
        return int(self.indptr[i + 1] - self.indptr[i])

    def edges(self):
        """Unique undirected edges as (user_a, user_b, weight), a < b."""
        for i, u in enumerate(self.vertices):
            for p in range(self.indptr[i], self.indptr[i + 1]):
                j = self.indices[p]
                if i < j:
                    yield u, self.vertices[j], float(self.edge_weights[p])

    def edge_count(self) -> int:
        return len(self.indices) // 2


def build_graph(
    pairs: Counter,
    threshold: int = DEFAULT_THRESHOLD,
    vertices: list[str] | None = None,
) -> RetweetGraph:
    """Build the undirected graph from directed retweet counts.

    An edge appears when the two directions together reach the threshold;
    its weight is that combined count. Vertices with no surviving edge are
    kept so they still appear in rank denominators.
    """
    if threshold < 1:
        raise InputError("rtgraph: threshold must be >= 1")
    combined: dict[tuple[str, str], int] = {}
    vertex_set = set(vertices) if vertices is not None else set()
    for (a, b), count in pairs.items():
        if a == b:
            continue
        if vertices is not None and (a not in vertex_set or b not in vertex_set):
            raise InputError(f"rtgraph: retweet pair ({a}, {b}) references unknown vertices")
        key = (a, b) if a < b else (b, a)
        combined[key] = combined.get(key, 0) + count
        if vertices is None:
            vertex_set.update(key)

    ordered = sorted(vertex_set)
    index = {v: i for i, v in enumerate(ordered)}
    n = len(ordered)
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for (a, b), w in combined.items():
        if w >= threshold:
            ia, ib = index[a], index[b]
            adj[ia].append((ib, w))
            adj[ib].append((ia, w))

    indptr = np.zeros(n + 1, dtype=np.int64)
    indices = []
    weights = []
    for i in range(n):
        adj[i].sort()
        indptr[i + 1] = indptr[i] + len(adj[i])
        indices.extend(j for j, _ in adj[i])
        weights.extend(w for _, w in adj[i])
    return RetweetGraph(
        vertices=ordered,
        indptr=indptr,
        indices=np.asarray(indices, dtype=np.int64),
        edge_weights=np.asarray(weights, dtype=np.float64),
        threshold=threshold,
    )


@dataclass
class AnchorSets:
    x_star: list[str]  # degree-descending, ties by id
    y_star: list[str]
    k: int


def select_anchors(
    graph: RetweetGraph, partition: dict[str, str], k: int = DEFAULT_ANCHORS
) -> AnchorSets:
    """Top-k degree vertices per side; short sides are used whole with a warning."""
    if k < 1:
        raise InputError("rtgraph: anchor count k must be >= 1")
    deg = graph.degrees

    def top(side: str) -> list[str]:
        members = [v for v in graph.vertices if partition.get(v) == side]
        if not members:
            raise InputError(f"rtgraph: empty partition {side}; cannot select anchors")
        members.sort(key=lambda v: (-deg[graph.index[v]], v))
        if len(members) < k:
            logger.warning("rtgraph: partition %s has %d < k=%d vertices; using all",
                           side, len(members), k)
        return members[:k]

    return AnchorSets(x_star=top("X"), y_star=top("Y"), k=k)


@dataclass
class HittingProfile:
    values: np.ndarray  # aligned to graph.vertices; np.inf = unreachable
    method: str  # "exact" | "monte-carlo"
    anchors: list[str]
    truncated: np.ndarray | None = None  # per-vertex truncated-walk counts
    walks_per_vertex: int = 0
    max_steps: int = 0

    def value(self, graph: RetweetGraph, user_id: str) -> float:
        return float(self.values[graph.index[user_id]])


def _reachable_mask(graph: RetweetGraph, anchor_idx: np.ndarray) -> np.ndarray:
    n = graph.n
    if n == 0:
        return np.zeros(0, dtype=bool)
    data = np.ones(len(graph.indices))
    A = sparse.csr_matrix((data, graph.indices, graph.indptr), shape=(n, n))
    _, comp = connected_components(A, directed=False)
    return np.isin(comp, np.unique(comp[anchor_idx]))


def _transition_matrix(graph: RetweetGraph, weighted: bool) -> sparse.csr_matrix:
    n = graph.n
    data = graph.edge_weights if weighted else np.ones(len(graph.indices))
    A = sparse.csr_matrix((data, graph.indices, graph.indptr), shape=(n, n))
    out = np.asarray(A.sum(axis=1)).ravel()
    inv = np.divide(1.0, out, out=np.zeros_like(out), where=out > 0)
    return sparse.diags(inv) @ A


def hitting_times(
    graph: RetweetGraph,
    anchors: list[str],
    method: str = "auto",
    max_steps: int = DEFAULT_MAX_STEPS,
    walks_per_vertex: int = DEFAULT_WALKS,
    seed: int = 0,
    weighted: bool = False,
) -> HittingProfile:
    """Expected steps from each vertex to the anchor set.

    The exact method solves h(a) = 0, h(u) = 1 + sum_v P(u, v) h(v) with the
    anchors absorbing; Monte-Carlo averages truncated walk lengths (a walk cut
    at max_steps contributes max_steps and is counted in ``truncated``).
    Vertices in components without an anchor get np.inf.
    """
    if not anchors:
        raise InputError("rtgraph: anchor set is empty")
    missing = [a for a in anchors if a not in graph.index]
    if missing:
        raise InputError(f"rtgraph: anchors not in graph: {missing[:10]}")
    if method not in ("auto", "exact", "monte-carlo"):
        raise InputError(f"rtgraph: unknown hitting-time method {method!r}")
    if method == "auto":
        method = "exact" if graph.n <= EXACT_MAX_VERTICES else "monte-carlo"
    if weighted and method != "exact":
        raise InputError("rtgraph: weighted walks support the exact method only")

    anchor_idx = np.asarray(sorted(graph.index[a] for a in anchors), dtype=np.int64)
    anchor_mask = np.zeros(graph.n, dtype=bool)
    anchor_mask[anchor_idx] = True
    reached = _reachable_mask(graph, anchor_idx)

    values = np.full(graph.n, np.inf)
    values[anchor_idx] = 0.0
    free = np.nonzero(reached & ~anchor_mask)[0]
    if free.size == 0:
        return HittingProfile(values=values, method=method, anchors=list(anchors))

    if method == "exact":
        P = _transition_matrix(graph, weighted)
        Q = P[free][:, free]
        h = spsolve(sparse.identity(free.size, format="csr") - Q.tocsr(),
                    np.ones(free.size))
        values[free] = h
        return HittingProfile(values=values, method="exact", anchors=list(anchors))

    sums, truncated = kernels.walk_hitting_times(
        graph.indptr, graph.indices, anchor_mask, free,
        walks_per_vertex, max_steps, seed,
    )
    values[free] = sums / walks_per_vertex
    trunc_full = np.zeros(graph.n, dtype=np.int64)
    trunc_full[free] = truncated
    total_trunc = int(truncated.sum())
    if total_trunc:
        logger.warning("rtgraph: %d walks truncated at %d steps", total_trunc, max_steps)
    return HittingProfile(values=values, method="monte-carlo", anchors=list(anchors),
                          truncated=trunc_full, walks_per_vertex=walks_per_vertex,
                          max_steps=max_steps)


@dataclass
class RetweetPolarity:
    scores: dict[str, float]  # r = r_x - r_y, in (-1, 1)
    r_x: dict[str, float]
    r_y: dict[str, float]
    unscored: list[str]  # vertices without finite hitting times on both sides
    method: str


def retweet_polarity(
    graph: RetweetGraph,
    profile_x: HittingProfile,
    profile_y: HittingProfile,
    rank_vertices: set[str] | None = None,
) -> RetweetPolarity:
    """Rank-based polarity: r(u) compares u's hitting times against everyone
    else's; positive r means walks reach side X's hubs sooner than side Y's.

    For each side, r_side(u) is the fraction of ranked vertices with a
    strictly larger hitting time, ties counting half. Vertices lacking a
    finite hitting time on either side are left unscored.
    """
    if rank_vertices is not None:
        keep = np.zeros(graph.n, dtype=bool)
        for v in rank_vertices:
            if v in graph.index:
                keep[graph.index[v]] = True
    else:
        keep = np.ones(graph.n, dtype=bool)
    finite = np.isfinite(profile_x.values) & np.isfinite(profile_y.values)
    scoreable = np.nonzero(finite & keep)[0]
    m = scoreable.size
    if m < 2:
        raise InputError(f"rtgraph: only {m} scoreable vertices; need at least 2")

    rank_x = rankdata(profile_x.values[scoreable], method="average")
    rank_y = rankdata(profile_y.values[scoreable], method="average")
    rx = (m - rank_x) / m
    ry = (m - rank_y) / m
    r = rx - ry

    ids = [graph.vertices[i] for i in scoreable]
    unscored = [graph.vertices[i] for i in np.nonzero(keep & ~finite)[0]]
    if unscored:
        logger.info("rtgraph: %d vertices unscored (unreachable from an anchor set)",
                    len(unscored))
    return RetweetPolarity(
        scores=dict(zip(ids, r.tolist())),
        r_x=dict(zip(ids, rx.tolist())),
        r_y=dict(zip(ids, ry.tolist())),
        unscored=unscored,
        method=f"{profile_x.method}/{profile_y.method}",
    )


def write_gexf(graph: RetweetGraph, path, node_attrs: dict[str, dict] | None = None) -> None:
    """Graph-exchange XML with optional per-node attributes and edge weights."""
    node_attrs = node_attrs or {}
    attr_names: list[str] = []
    for attrs in node_attrs.values():
        for name in attrs:
            if name not in attr_names:
                attr_names.append(name)

    root = ET.Element("gexf", xmlns="http://www.gexf.net/1.2draft", version="1.2")
    ET.SubElement(root, "meta").set("creator", "polarscore")
    g = ET.SubElement(root, "graph", defaultedgetype="undirected")
    if attr_names:
        decls = ET.SubElement(g, "attributes", {"class": "node"})
        for i, name in enumerate(attr_names):
            sample = next(
                (a[name] for a in node_attrs.values() if a.get(name) is not None),
                "",
            )
            kind = "double" if isinstance(sample, (int, float)) else "string"
            ET.SubElement(decls, "attribute", id=str(i), title=name, type=kind)
    nodes = ET.SubElement(g, "nodes")
    for v in graph.vertices:
        node = ET.SubElement(nodes, "node", id=v, label=v)
        attrs = node_attrs.get(v)
        if attrs:
            values = ET.SubElement(node, "attvalues")
            for i, name in enumerate(attr_names):
                if name in attrs and attrs[name] is not None:
                    ET.SubElement(values, "attvalue", {"for": str(i),
                                                       "value": str(attrs[name])})
    edges = ET.SubElement(g, "edges")
    for eid, (a, b, w) in enumerate(graph.edges()):
        ET.SubElement(edges, "edge", id=str(eid), source=a, target=b,
                      weight=str(int(w) if float(w).is_integer() else w))
    tree = ET.ElementTree(root)
    ET.indent(tree)
    tree.write(path, encoding="unicode", xml_declaration=True)
