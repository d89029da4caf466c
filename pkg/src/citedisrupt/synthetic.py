"""Seeded synthetic citation corpora for pipeline tests and desk-scale experiments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import CitationGraph, PaperRecord, build_graph


@dataclass(frozen=True)
class CorpusConfig:
    """Preferential attachment with exponential ageing.

    A new paper cites ``Poisson(mean_refs)`` distinct earlier-year papers,
    chosen with weight ``(citations + 1) * fitness * exp(-age / ageing)``,
    then also cites each reference of those papers with probability
    ``copy_prob`` (consolidating citations).

    Planted papers are disruptive by construction: each cites
    ``planted_refs`` papers that nobody had cited before and that nobody else
    may cite afterwards, so no citer of a planted paper can also cite its
    references and no outside paper can either. Planted papers carry
    ``planted_fitness`` so they attract citations.
    """

    n_papers: int = 10_000
    n_years: int = 20
    start_year: int = 2000
    mean_refs: float = 4.0
    ageing: float = 4.0
    copy_prob: float = 0.5
    n_planted: int = 100
    planted_refs: int = 5
    planted_fitness: float = 6.0
    seed: int = 0


@dataclass
class SyntheticCorpus:
    graph: CitationGraph
    planted: list[str]
    config: CorpusConfig


def paper_id(i: int) -> str:
    return f"p{i:06d}"


def synthetic_corpus(config: CorpusConfig = CorpusConfig()) -> SyntheticCorpus:
    rng = np.random.default_rng(config.seed)
    n = config.n_papers
    per_year = np.full(config.n_years, n // config.n_years)
    per_year[: n % config.n_years] += 1
    years = np.repeat(np.arange(config.start_year, config.start_year + config.n_years), per_year)

    # planted papers come from years with room to be cited within the horizon
    eligible = np.flatnonzero((years >= config.start_year + 2)
                              & (years <= config.start_year + config.n_years - 4))
    planted = np.sort(rng.choice(eligible, size=min(config.n_planted, len(eligible)), replace=False))
    is_planted = np.zeros(n, dtype=bool)
    is_planted[planted] = True

    fitness = np.where(is_planted, config.planted_fitness, 1.0)
    citations = np.zeros(n)
    reserved = np.zeros(n, dtype=bool)
    edges: list[tuple[int, int]] = []
    refs_of: list[np.ndarray] = [np.zeros(0, dtype=np.int64)] * n

    first_of_year = np.concatenate([[0], np.cumsum(per_year)])
    for y in range(1, config.n_years):
        lo, hi = first_of_year[y], first_of_year[y + 1]
        age = (config.start_year + y) - years[:lo]
        decay = np.exp(-age / config.ageing) * fitness[:lo]
        for u in range(lo, hi):
            if is_planted[u]:
                pool = np.flatnonzero((citations[:lo] == 0) & ~reserved[:lo] & ~is_planted[:lo])
                k = min(config.planted_refs, len(pool))
                refs = rng.choice(pool, size=k, replace=False)
                reserved[refs] = True
            else:
                weights = (citations[:lo] + 1.0) * decay
                weights[reserved[:lo]] = 0.0
                available = np.count_nonzero(weights)
                k = min(rng.poisson(config.mean_refs), available)
                if k == 0:
                    continue
                refs = rng.choice(lo, size=k, replace=False, p=weights / weights.sum())
                copied = np.concatenate([refs_of[w] for w in refs])
                copied = copied[(rng.random(len(copied)) < config.copy_prob) & ~reserved[copied]]
                refs = np.union1d(refs, copied)
            refs_of[u] = refs
            citations[refs] += 1
            edges.extend((u, int(w)) for w in refs)

    papers = [PaperRecord(paper_id(i), int(years[i])) for i in range(n)]
    graph = build_graph(papers, [(paper_id(u), paper_id(w)) for u, w in edges])
    return SyntheticCorpus(graph, [paper_id(i) for i in planted], config)
