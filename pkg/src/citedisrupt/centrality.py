"""Betweenness (Brandes accumulation and CD-notation closed forms) and personalized Pagerank."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from . import _kernels
from .graph import CitationGraph, NeighborhoodGraph
from .neighborhoods import cd_neighborhood, label_nodes, nok_neighborhood

Graphish = Union[CitationGraph, NeighborhoodGraph]

NORMALIZERS = ("standard", "pcd", "pnk", "raw")

# Sources are reduced in fixed-size blocks, so the summation order (and thus
# every output bit) does not depend on how many threads process the blocks.
SOURCE_BLOCK = 256


def _csr(graph: Graphish) -> tuple[np.ndarray, np.ndarray]:
    indptr, indices = graph.adjacency()
    return np.ascontiguousarray(indptr, dtype=np.int64), np.ascontiguousarray(indices, dtype=np.int64)


def dependency_sums(indptr: np.ndarray, indices: np.ndarray, sources: np.ndarray | None = None,
                    threads: int = 1) -> np.ndarray:
    """Raw betweenness of every node from single-source dependency accumulation.

    ``sources`` defaults to all nodes; restricting it to the nodes that can
    reach the nodes of interest leaves their scores unchanged.
    """
    n = len(indptr) - 1
    if sources is None:
        sources = np.arange(n, dtype=np.int64)
    sources = np.ascontiguousarray(sources, dtype=np.int64)
    allowed = np.ones(n, dtype=np.int64)
    blocks = [sources[i:i + SOURCE_BLOCK] for i in range(0, len(sources), SOURCE_BLOCK)]

    def run(block):
        return _kernels.brandes_sources(indptr, indices, allowed, 1, block)

    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(threads) as pool:
            partials = list(pool.map(run, blocks))
    else:
        partials = [run(b) for b in blocks]
    total = np.zeros(n)
    for part in partials:
        total += part
    return total


@dataclass
class BetweennessResult:
    """Per-node raw path dependencies and their normalization by ``p``.

    ``p`` is ``None`` when the requested normalizer is zero; ``normalized``
    is then ``None`` as well (the value is undefined).
    """

    node_ids: tuple[str, ...]
    raw: np.ndarray
    p: float | None
    normalizer: str
    normalized: np.ndarray | None = field(init=False)

    def __post_init__(self):
        self.normalized = None if self.p is None else self.raw / self.p

    def value(self, node_id: str) -> float | None:
        if self.normalized is None:
            return None
        return float(self.normalized[self.node_ids.index(node_id)])

    def raw_value(self, node_id: str) -> float:
        return float(self.raw[self.node_ids.index(node_id)])


def _focal_p(graph: Graphish, normalizer: str, focal: str | None) -> float | None:
    if not isinstance(graph, NeighborhoodGraph) or graph.kind not in ("cd", "nok"):
        raise ValueError(f"normalizer {normalizer!r} needs a cd or nok neighborhood graph")
    if focal is not None and focal != graph.focal_id:
        raise ValueError(f"focal {focal!r} is not the neighborhood's focal paper {graph.focal_id!r}")
    labels = label_nodes(graph)
    deg_in = labels.n_I + labels.n_J
    deg_out = int(np.count_nonzero(graph.edges[:, 0] == graph.focal)) if graph.n_edges else 0
    if normalizer == "pcd":
        p = deg_out * (deg_in + labels.n_K)
    else:
        p = deg_in * deg_out
    return None if p == 0 else float(p)


def betweenness(graph: Graphish, normalizer: str = "standard", focal: str | None = None,
                threads: int = 1) -> BetweennessResult:
    """Directed shortest-path betweenness of every node in ``graph``.

    Normalizers: ``standard`` divides by (n-1)(n-2); ``pcd`` by
    deg_out(v)(deg_in(v) + n_K(v)) and ``pnk`` by deg_in(v)deg_out(v) of the
    focal paper ``v`` of a cd/nok neighborhood; ``raw`` leaves scores as path
    dependency sums over ordered pairs.
    """
    if normalizer not in NORMALIZERS:
        raise ValueError(f"unknown normalizer {normalizer!r}; expected one of {NORMALIZERS}")
    if graph.n_nodes == 0:
        raise ValueError("betweenness of an empty graph")
    indptr, indices = _csr(graph)
    raw = dependency_sums(indptr, indices, threads=threads)
    n = graph.n_nodes
    if normalizer == "standard":
        p = (n - 1) * (n - 2)
        p = None if p == 0 else float(p)
    elif normalizer == "raw":
        p = 1.0
    else:
        p = _focal_p(graph, normalizer, focal)
    return BetweennessResult(tuple(graph.node_ids), raw, p, normalizer)


# -- closed forms in CD notation ---------------------------------------------

def _label_terms(n: NeighborhoodGraph) -> tuple[int, int, int, int, int]:
    """(n_I, n_J, n_K, deg_out(v), sum over J of (deg_out(s_j) - 1)) within ``n``."""
    labels = label_nodes(n)
    out_deg: dict[int, int] = {}
    for u, _ in n.edges.tolist():
        out_deg[u] = out_deg.get(u, 0) + 1
    excess = sum(out_deg[u] - 1 for u in labels.j_set)
    return labels.n_I, labels.n_J, labels.n_K, out_deg.get(n.focal, 0), excess


def bcd_from_counts(n_i: int, n_j: int, n_k: int, j_excess: int, deg_out: int) -> Fraction | None:
    """deg_in/(deg_in+n_K) - j_excess/(deg_out (deg_in+n_K)); ``None`` on a zero denominator.

    ``j_excess`` is the sum over J-type citers of their out-degree minus one,
    counted inside the neighborhood.
    """
    d_in = n_i + n_j
    if deg_out == 0 or d_in + n_k == 0:
        return None
    return Fraction(d_in, d_in + n_k) - Fraction(j_excess, deg_out * (d_in + n_k))


def bnk_from_counts(n_i: int, n_j: int, j_excess: int, deg_out: int) -> Fraction | None:
    d_in = n_i + n_j
    if deg_out == 0 or d_in == 0:
        return None
    return 1 - Fraction(j_excess, deg_out * d_in)


def shift_from_counts(n_i: int, n_j: int, n_k: int, j_excess: int, deg_out: int) -> Fraction | None:
    d_in = n_i + n_j
    if deg_out == 0 or d_in + n_k == 0:
        return None
    return Fraction(2 * n_j, d_in + n_k) - Fraction(j_excess, deg_out * (d_in + n_k))


def _to_float(x: Fraction | None) -> float | None:
    return None if x is None else float(x)


def betweenness_cd_closed_form(g: CitationGraph, v: str) -> float | None:
    """Focal betweenness on the CD neighborhood normalized by p_CD, from label counts."""
    n_i, n_j, n_k, d_out, excess = _label_terms(cd_neighborhood(g, v))
    return _to_float(bcd_from_counts(n_i, n_j, n_k, excess, d_out))


def betweenness_nok_closed_form(g: CitationGraph, v: str) -> float | None:
    n_i, n_j, _, d_out, excess = _label_terms(nok_neighborhood(g, v))
    return _to_float(bnk_from_counts(n_i, n_j, excess, d_out))


def alignment_shift(g: CitationGraph, v: str) -> float | None:
    """The constant q(v) with B_CD(v) = D(v) + q(v)."""
    n_i, n_j, n_k, d_out, excess = _label_terms(cd_neighborhood(g, v))
    return _to_float(shift_from_counts(n_i, n_j, n_k, excess, d_out))


def alignment_shift_saturated(g: CitationGraph, v: str) -> float | None:
    """q(v) when every J-type citer cites all of v's references: n_J / (deg_in + n_K)."""
    n_i, n_j, n_k, _, _ = _label_terms(cd_neighborhood(g, v))
    den = n_i + n_j + n_k
    return None if den == 0 else float(Fraction(n_j, den))


# -- Pagerank ----------------------------------------------------------------

class PagerankConvergenceError(RuntimeError):
    def __init__(self, iterations: int, residual: float):
        super().__init__(f"Pagerank did not converge after {iterations} iterations "
                         f"(L1 residual {residual:.3e})")
        self.iterations = iterations
        self.residual = residual


@dataclass(frozen=True)
class PagerankConfig:
    """``alpha`` weights link-following; teleportation to ``gamma`` gets 1 - alpha.

    ``gamma=None`` means uniform over the nodes of whatever graph is ranked.
    """

    alpha: float = 0.1
    gamma: tuple[float, ...] | None = None
    tolerance: float = 1e-12
    max_iterations: int = 10_000

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if self.gamma is not None:
            gamma = np.asarray(self.gamma, dtype=float)
            if (gamma <= 0).any():
                raise ValueError("personalization vector must be strictly positive")
            if abs(gamma.sum() - 1.0) > max(self.tolerance, 1e-12):
                raise ValueError(f"personalization vector sums to {gamma.sum()}, not 1")

    def gamma_for(self, n: int) -> np.ndarray:
        if self.gamma is None:
            return np.full(n, 1.0 / n)
        if len(self.gamma) != n:
            raise ValueError(f"personalization vector has {len(self.gamma)} entries for {n} nodes")
        return np.asarray(self.gamma, dtype=float)


@dataclass
class PagerankResult:
    node_ids: tuple[str, ...]
    pi: np.ndarray
    iterations: int
    residual: float
    alpha: float
    tolerance: float

    def value(self, node_id: str) -> float:
        return float(self.pi[self.node_ids.index(node_id)])

    def diagnostics_json(self) -> str:
        return json.dumps({"iterations": self.iterations, "residual": self.residual,
                           "alpha": self.alpha, "tolerance": self.tolerance,
                           "n": len(self.pi)}, sort_keys=True)


def transition_step(indptr: np.ndarray, indices: np.ndarray, x: np.ndarray,
                    alpha: float, gamma: np.ndarray) -> np.ndarray:
    """One application of x^T (alpha * P_bar + (1 - alpha) 1 gamma^T)."""
    n = len(x)
    deg = np.diff(indptr)
    dangling = deg == 0
    src = np.repeat(np.arange(n), deg)
    share = np.zeros(n)
    share[~dangling] = x[~dangling] / deg[~dangling]
    follow = np.bincount(indices, weights=share[src], minlength=n)
    return alpha * (follow + x[dangling].sum() * gamma) + (1.0 - alpha) * x.sum() * gamma


def pagerank(graph: Graphish, config: PagerankConfig = PagerankConfig()) -> PagerankResult:
    """Stationary vector of the teleporting walk by power iteration from the uniform vector.

    Rows of papers with no references are replaced by ``gamma``. Raises
    :class:`PagerankConvergenceError` if the L1 change between iterates is
    still above tolerance after ``max_iterations``.
    """
    n = graph.n_nodes
    if n == 0:
        raise ValueError("Pagerank of an empty graph")
    indptr, indices = _csr(graph)
    gamma = config.gamma_for(n)
    x = np.full(n, 1.0 / n)
    residual = np.inf
    for it in range(1, config.max_iterations + 1):
        new = transition_step(indptr, indices, x, config.alpha, gamma)
        residual = float(np.abs(new - x).sum())
        x = new
        if residual <= config.tolerance:
            return PagerankResult(tuple(graph.node_ids), x, it, residual,
                                  config.alpha, config.tolerance)
    raise PagerankConvergenceError(config.max_iterations, residual)


def pagerank_normalized(graph: Graphish, config: PagerankConfig, v: str) -> float:
    """Pagerank of ``v`` divided by alpha / |V|."""
    res = pagerank(graph, config)
    return res.value(v) * graph.n_nodes / config.alpha
