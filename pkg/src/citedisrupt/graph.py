"""Immutable citation graphs with dense integer indexing and CSV round-tripping."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

ALL = "all"

Horizon = Union[int, str]


class CitationGraphError(ValueError):
    """Base class for rejected graph inputs or queries."""


class UnknownNodeError(CitationGraphError, KeyError):
    def __init__(self, node_id):
        super().__init__(f"unknown paper id: {node_id!r}")
        self.node_id = node_id

    def __str__(self):
        return self.args[0]


class DuplicatePaperError(CitationGraphError):
    def __init__(self, node_id):
        super().__init__(f"duplicate paper id: {node_id!r}")
        self.node_id = node_id


class MissingYearError(CitationGraphError):
    def __init__(self, node_id):
        super().__init__(f"paper {node_id!r} has no publication year")
        self.node_id = node_id


class MalformedInputError(CitationGraphError):
    """CSV content that cannot be parsed; message carries file and line number."""


@dataclass(frozen=True)
class PaperRecord:
    id: str
    year: int | None = None


@dataclass(frozen=True)
class BuildDiagnostics:
    self_loops_dropped: int = 0
    duplicates_dropped: int = 0
    forward_citations: int = 0

    @property
    def dropped(self) -> int:
        return self.self_loops_dropped + self.duplicates_dropped


def _csr(n: int, rows: np.ndarray, cols: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.lexsort((cols, rows))
    indices = cols[order].astype(np.int64)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, indices


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class CitationGraph:
    """Directed citation graph; edge ``(u, v)`` means paper ``u`` cites ``v``.

    Nodes are indexed densely in sorted id order. All arrays are read-only,
    so instances can be shared freely between threads.
    """

    def __init__(self, ids: Sequence[str], years: Sequence[int | None],
                 edges: np.ndarray, diagnostics: BuildDiagnostics | None = None):
        self._ids = tuple(ids)
        self._index = {node_id: i for i, node_id in enumerate(self._ids)}
        n = len(self._ids)
        self._has_year = _frozen(np.array([y is not None for y in years], dtype=bool))
        self._years = _frozen(np.array([0 if y is None else int(y) for y in years], dtype=np.int64))
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if len(edges):
            edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
        self._edges = _frozen(edges)
        self._out_indptr, self._out_indices = map(_frozen, _csr(n, edges[:, 0], edges[:, 1]))
        self._in_indptr, self._in_indices = map(_frozen, _csr(n, edges[:, 1], edges[:, 0]))
        self.diagnostics = diagnostics or BuildDiagnostics()

    # -- identity -------------------------------------------------------------
    @property
    def n_nodes(self) -> int:
        return len(self._ids)

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    @property
    def node_ids(self) -> tuple[str, ...]:
        return self._ids

    @property
    def edges(self) -> np.ndarray:
        """``(m, 2)`` array of (citing, cited) internal indices, sorted."""
        return self._edges

    def index(self, node_id: str) -> int:
        try:
            return self._index[node_id]
        except KeyError:
            raise UnknownNodeError(node_id) from None

    def __contains__(self, node_id) -> bool:
        return node_id in self._index

    def edge_ids(self) -> list[tuple[str, str]]:
        return [(self._ids[u], self._ids[w]) for u, w in self._edges]

    # -- years ----------------------------------------------------------------
    def year(self, node_id: str) -> int | None:
        i = self.index(node_id)
        return int(self._years[i]) if self._has_year[i] else None

    @property
    def years(self) -> np.ndarray:
        """Publication years by internal index; check :attr:`has_year` first."""
        return self._years

    @property
    def has_year(self) -> np.ndarray:
        return self._has_year

    def require_years(self, indices: Iterable[int] | None = None) -> None:
        """Raise :class:`MissingYearError` naming the first year-less node."""
        mask = ~self._has_year if indices is None else None
        if mask is not None:
            missing = np.flatnonzero(mask)
            if len(missing):
                raise MissingYearError(self._ids[missing[0]])
            return
        for i in indices:
            if not self._has_year[i]:
                raise MissingYearError(self._ids[i])

    def year_range(self) -> tuple[int, int] | None:
        if not self._has_year.any():
            return None
        ys = self._years[self._has_year]
        return int(ys.min()), int(ys.max())

    # -- adjacency ------------------------------------------------------------
    def out_neighbors(self, i: int) -> np.ndarray:
        return self._out_indices[self._out_indptr[i]:self._out_indptr[i + 1]]

    def in_neighbors(self, i: int) -> np.ndarray:
        return self._in_indices[self._in_indptr[i]:self._in_indptr[i + 1]]

    def deg_in(self, node_id: str) -> int:
        i = self.index(node_id)
        return int(self._in_indptr[i + 1] - self._in_indptr[i])

    def deg_out(self, node_id: str) -> int:
        i = self.index(node_id)
        return int(self._out_indptr[i + 1] - self._out_indptr[i])

    def in_degrees(self) -> np.ndarray:
        return np.diff(self._in_indptr)

    def out_degrees(self) -> np.ndarray:
        return np.diff(self._out_indptr)

    def adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        """Out-adjacency CSR ``(indptr, indices)``."""
        return self._out_indptr, self._out_indices

    def in_adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        return self._in_indptr, self._in_indices

    # -- comparison -----------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, CitationGraph):
            return NotImplemented
        return (self._ids == other._ids
                and np.array_equal(self._has_year, other._has_year)
                and np.array_equal(self._years, other._years)
                and np.array_equal(self._edges, other._edges))

    __hash__ = None

    def __repr__(self):
        return f"CitationGraph(n_nodes={self.n_nodes}, n_edges={self.n_edges})"

    def papers(self) -> list[PaperRecord]:
        return [PaperRecord(i, self.year(i)) for i in self._ids]

    def subgraph(self, keep: np.ndarray) -> "CitationGraph":
        """Induced subgraph on the boolean node mask ``keep``."""
        keep = np.asarray(keep, dtype=bool)
        new_index = np.full(self.n_nodes, -1, dtype=np.int64)
        kept = np.flatnonzero(keep)
        new_index[kept] = np.arange(len(kept))
        e = self._edges
        e = e[keep[e[:, 0]] & keep[e[:, 1]]] if len(e) else e
        return CitationGraph(
            [self._ids[i] for i in kept],
            [int(self._years[i]) if self._has_year[i] else None for i in kept],
            new_index[e],
        )


def build_graph(papers: Iterable[PaperRecord],
                citations: Iterable[tuple[str, str]]) -> CitationGraph:
    """Validate papers and citations and assemble a :class:`CitationGraph`.

    Self-loops and repeated citations are dropped and counted in
    ``graph.diagnostics``; citations whose endpoint is not a known paper are
    rejected. Cycles are allowed: citations pointing forward in time are only
    counted.
    """
    year_of: dict[str, int | None] = {}
    for p in papers:
        if p.id in year_of:
            raise DuplicatePaperError(p.id)
        year_of[p.id] = None if p.year is None else int(p.year)
    ids = sorted(year_of)
    index = {node_id: i for i, node_id in enumerate(ids)}

    pairs = []
    self_loops = 0
    for u, w in citations:
        if u not in index:
            raise UnknownNodeError(u)
        if w not in index:
            raise UnknownNodeError(w)
        if u == w:
            self_loops += 1
            continue
        pairs.append((index[u], index[w]))
    edges = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    unique = np.unique(edges, axis=0) if len(edges) else edges
    years = [year_of[i] for i in ids]

    forward = 0
    for u, w in unique:
        yu, yw = years[u], years[w]
        if yu is not None and yw is not None and yu < yw:
            forward += 1
    diagnostics = BuildDiagnostics(self_loops, len(edges) - len(unique), forward)
    return CitationGraph(ids, years, unique, diagnostics)


def slice_at(g: CitationGraph, t: int, h: Horizon) -> CitationGraph:
    """Papers published up to and including year ``t + h``, with their citations.

    ``h`` may be :data:`ALL`, which keeps every paper. Any year-less paper
    makes the slice undefined and raises :class:`MissingYearError`.
    """
    g.require_years()
    if h == ALL:
        return g
    if int(h) < 0:
        raise ValueError(f"horizon must be >= 0 or {ALL!r}, got {h!r}")
    keep = g.years <= t + int(h)
    if keep.all():
        return g
    return g.subgraph(keep)


# -- CSV ---------------------------------------------------------------------

def _check_header(reader, expected: list[str], name: str):
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedInputError(f"{name}:1: empty file, expected header {','.join(expected)}")
    if [h.strip() for h in header] != expected:
        raise MalformedInputError(
            f"{name}:1: expected header {','.join(expected)}, got {','.join(header)}")


def read_nodes_csv(path: str | Path) -> list[PaperRecord]:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        _check_header(reader, ["id", "year"], path.name)
        papers = []
        for row in reader:
            lineno = reader.line_num
            if not row:
                continue
            if len(row) != 2:
                raise MalformedInputError(f"{path.name}:{lineno}: expected 2 fields, got {len(row)}")
            node_id, year = row[0].strip(), row[1].strip()
            if not node_id:
                raise MalformedInputError(f"{path.name}:{lineno}: empty paper id")
            if year:
                try:
                    year_val = int(year)
                except ValueError:
                    raise MalformedInputError(
                        f"{path.name}:{lineno}: year {year!r} is not an integer") from None
            else:
                year_val = None
            papers.append(PaperRecord(node_id, year_val))
    return papers


def read_edges_csv(path: str | Path) -> list[tuple[str, str]]:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        _check_header(reader, ["citing", "cited"], path.name)
        edges = []
        for row in reader:
            if not row:
                continue
            if len(row) != 2 or not row[0].strip() or not row[1].strip():
                raise MalformedInputError(
                    f"{path.name}:{reader.line_num}: expected 'citing,cited', got {','.join(row)!r}")
            edges.append((row[0].strip(), row[1].strip()))
    return edges


def load_graph(nodes_path: str | Path, edges_path: str | Path) -> CitationGraph:
    """Read a node CSV and an edge CSV into a graph."""
    return build_graph(read_nodes_csv(nodes_path), read_edges_csv(edges_path))


def nodes_csv_text(g: CitationGraph) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", "year"])
    for i, node_id in enumerate(g.node_ids):
        writer.writerow([node_id, int(g.years[i]) if g.has_year[i] else ""])
    return buf.getvalue()


def edges_csv_text(g: CitationGraph) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["citing", "cited"])
    writer.writerows(sorted(g.edge_ids()))
    return buf.getvalue()


# -- subgraphs ---------------------------------------------------------------

class NeighborhoodGraph:
    """A focal-paper-centred subgraph of a :class:`CitationGraph`.

    ``nodes`` and ``edges`` hold parent (internal) indices. ``kind`` is one of
    ``"in"``, ``"out"``, ``"cd"``, ``"nok"`` or ``"ego"``; ``k`` is only set
    for ego graphs.
    """

    KINDS = ("in", "out", "cd", "nok", "ego")

    def __init__(self, parent: CitationGraph, focal: int, kind: str,
                 nodes: Iterable[int], edges: np.ndarray, k: Horizon | None = None):
        if kind not in self.KINDS:
            raise ValueError(f"unknown neighborhood kind {kind!r}")
        self.parent = parent
        self.focal = int(focal)
        self.kind = kind
        self.k = k
        self.nodes = _frozen(np.unique(np.asarray(list(nodes), dtype=np.int64)))
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if len(edges):
            edges = np.unique(edges, axis=0)
        self.edges = _frozen(edges)
        self._local = {int(u): i for i, u in enumerate(self.nodes)}

    @property
    def n_V(self) -> int:
        return len(self.nodes)

    n_nodes = n_V

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def focal_id(self) -> str:
        return self.parent.node_ids[self.focal]

    @property
    def node_ids(self) -> tuple[str, ...]:
        ids = self.parent.node_ids
        return tuple(ids[i] for i in self.nodes)

    def edge_ids(self) -> list[tuple[str, str]]:
        ids = self.parent.node_ids
        return [(ids[u], ids[w]) for u, w in self.edges]

    def local_index(self, i: int) -> int:
        return self._local[int(i)]

    def contains(self, i: int) -> bool:
        return int(i) in self._local

    @property
    def degree(self) -> int:
        """Star size minus one; equals deg_in / deg_out for ``in``/``out`` kinds."""
        return self.n_V - 1

    def adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        """Out-adjacency CSR over local indices (position in :attr:`nodes`)."""
        if len(self.edges):
            local = np.searchsorted(self.nodes, self.edges)
        else:
            local = np.zeros((0, 2), dtype=np.int64)
        return _csr(self.n_V, local[:, 0], local[:, 1])

    def out_degree_within(self, i: int) -> int:
        return int(np.count_nonzero(self.edges[:, 0] == i)) if len(self.edges) else 0

    def __repr__(self):
        k = f", k={self.k}" if self.kind == "ego" else ""
        return (f"NeighborhoodGraph(focal={self.focal_id!r}, kind={self.kind!r}{k}, "
                f"n_V={self.n_V}, n_edges={self.n_edges})")


def in_subgraph(g: CitationGraph, v: str) -> NeighborhoodGraph:
    """Star of ``v`` and the papers citing it, with only the edges into ``v``."""
    i = g.index(v)
    citers = g.in_neighbors(i)
    edges = np.column_stack([citers, np.full(len(citers), i)])
    return NeighborhoodGraph(g, i, "in", [i, *citers], edges)


def out_subgraph(g: CitationGraph, v: str) -> NeighborhoodGraph:
    """Star of ``v`` and the papers it cites, with only the edges out of ``v``."""
    i = g.index(v)
    refs = g.out_neighbors(i)
    edges = np.column_stack([np.full(len(refs), i), refs])
    return NeighborhoodGraph(g, i, "out", [i, *refs], edges)
