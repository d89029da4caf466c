"""CD-index, no-k and k-hop ego neighborhoods around a focal paper, and I/J/K labels."""

from __future__ import annotations

import csv
import io
from collections import deque
from dataclasses import dataclass

import numpy as np

from .graph import ALL, CitationGraph, Horizon, NeighborhoodGraph

__all__ = [
    "NeighborhoodGraph", "NodeLabeling",
    "cd_neighborhood", "nok_neighborhood", "ego_neighborhood", "label_nodes",
    "neighborhood_edges_csv", "neighborhood_labels_csv",
]


def _stars(g: CitationGraph, i: int) -> tuple[set[int], set[int]]:
    return set(g.in_neighbors(i).tolist()), set(g.out_neighbors(i).tolist())


def _star_edges(i: int, citers: set[int], refs: set[int]) -> list[tuple[int, int]]:
    return [(u, i) for u in citers] + [(i, w) for w in refs]


def cd_neighborhood(g: CitationGraph, v: str) -> NeighborhoodGraph:
    """The CD-index neighborhood: both stars of ``v`` plus every paper citing one of its references.

    Edges between two of ``v``'s references are left out, so a reference
    never acts as a shortcut to another reference. A paper that both cites
    and is cited by ``v`` keeps its citing edges (it is treated as a citer).
    """
    i = g.index(v)
    citers, refs = _stars(g, i)
    nodes = {i} | citers | refs
    edges = _star_edges(i, citers, refs)
    for w in refs:
        for x in g.in_neighbors(w).tolist():
            if x == i or (x in refs and x not in citers):
                continue
            nodes.add(x)
            edges.append((x, w))
    return NeighborhoodGraph(g, i, "cd", nodes, np.array(edges, dtype=np.int64))


def nok_neighborhood(g: CitationGraph, v: str) -> NeighborhoodGraph:
    """Both stars of ``v`` plus citations running from its citers to its references."""
    i = g.index(v)
    citers, refs = _stars(g, i)
    edges = _star_edges(i, citers, refs)
    for u in sorted(citers):
        for w in g.out_neighbors(u).tolist():
            if w in refs:
                edges.append((u, w))
    return NeighborhoodGraph(g, i, "nok", {i} | citers | refs, np.array(edges, dtype=np.int64))


def ego_ball(g: CitationGraph, i: int, k: Horizon) -> np.ndarray:
    """Sorted indices within undirected hop distance ``k`` of node index ``i``."""
    limit = None if k == ALL else int(k)
    dist = {i: 0}
    queue = deque([i])
    while queue:
        u = queue.popleft()
        d = dist[u]
        if limit is not None and d >= limit:
            continue
        for x in np.concatenate([g.out_neighbors(u), g.in_neighbors(u)]).tolist():
            if x not in dist:
                dist[x] = d + 1
                queue.append(x)
    return np.array(sorted(dist), dtype=np.int64)


def ego_neighborhood(g: CitationGraph, v: str, k: Horizon) -> NeighborhoodGraph:
    """Induced subgraph on every paper within ``k`` undirected hops of ``v``.

    ``k`` is a positive integer or :data:`ALL` (the weakly connected
    component of ``v``).
    """
    i = g.index(v)
    if k != ALL and (isinstance(k, bool) or int(k) < 1):
        raise ValueError(f"ego radius must be >= 1 or {ALL!r}, got {k!r}")
    ball = ego_ball(g, i, k)
    member = np.zeros(g.n_nodes, dtype=bool)
    member[ball] = True
    e = g.edges
    e = e[member[e[:, 0]] & member[e[:, 1]]] if len(e) else e
    return NeighborhoodGraph(g, i, "ego", ball, e, k=k if k == ALL else int(k))


@dataclass(frozen=True)
class NodeLabeling:
    """I/J/K partition of a CD-style neighborhood (parent indices)."""

    i_set: frozenset
    j_set: frozenset
    k_set: frozenset

    @property
    def n_I(self) -> int:
        return len(self.i_set)

    @property
    def n_J(self) -> int:
        return len(self.j_set)

    @property
    def n_K(self) -> int:
        return len(self.k_set)

    def counts(self) -> tuple[int, int, int]:
        return self.n_I, self.n_J, self.n_K


def label_nodes(n: NeighborhoodGraph) -> NodeLabeling:
    """Split citers of the focal paper into I (cite only it) and J types; the rest are K.

    Out-degrees are counted inside ``n``. Only ``cd`` and ``nok`` kinds
    carry this labeling.
    """
    if n.kind not in ("cd", "nok"):
        raise ValueError(f"I/J/K labels are defined for cd/nok neighborhoods, not {n.kind!r}")
    f = n.focal
    out_deg: dict[int, int] = {}
    citers = set()
    for u, w in n.edges.tolist():
        out_deg[u] = out_deg.get(u, 0) + 1
        if w == f:
            citers.add(u)
    refs = {w for u, w in n.edges.tolist() if u == f}
    i_set = frozenset(u for u in citers if out_deg[u] == 1)
    j_set = frozenset(citers - i_set)
    if n.kind == "nok":
        k_set = frozenset()
    else:
        k_set = frozenset(set(n.nodes.tolist()) - citers - refs - {f})
    return NodeLabeling(i_set, j_set, k_set)


def neighborhood_edges_csv(n: NeighborhoodGraph) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["citing", "cited"])
    writer.writerows(sorted(n.edge_ids()))
    return buf.getvalue()


def neighborhood_labels_csv(n: NeighborhoodGraph) -> str:
    """``node,label`` rows; labels are focal, I, J, K, out (and ``in``/``other`` for ego graphs)."""
    ids = n.parent.node_ids
    f = n.focal
    refs = {w for u, w in n.edges.tolist() if u == f}
    citers = {u for u, w in n.edges.tolist() if w == f}
    labeling = label_nodes(n) if n.kind in ("cd", "nok") else None
    rows = []
    for x in n.nodes.tolist():
        if x == f:
            label = "focal"
        elif labeling is not None and x in labeling.i_set:
            label = "I"
        elif labeling is not None and x in labeling.j_set:
            label = "J"
        elif labeling is not None and x in labeling.k_set:
            label = "K"
        elif x in refs:
            label = "out"
        elif x in citers:
            label = "in"
        else:
            label = "other"
        rows.append((ids[x], label))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["node", "label"])
    writer.writerows(sorted(rows))
    return buf.getvalue()
