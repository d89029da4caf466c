import numpy as np

from citedisrupt.measures import cd_counts
from citedisrupt.synthetic import CorpusConfig, synthetic_corpus

SMALL = CorpusConfig(n_papers=1500, n_planted=15)


def test_seeded_corpus_is_reproducible():
    a, b = synthetic_corpus(SMALL), synthetic_corpus(SMALL)
    assert a.graph == b.graph and a.planted == b.planted
    assert synthetic_corpus(CorpusConfig(n_papers=1500, n_planted=15, seed=1)).graph != a.graph


def test_citations_point_back_in_time():
    g = synthetic_corpus(SMALL).graph
    e = g.edges
    assert (g.years[e[:, 0]] > g.years[e[:, 1]]).all()
    assert g.diagnostics.forward_citations == 0
    assert g.n_nodes == 1500


def test_planted_papers_have_no_j_or_k():
    c = synthetic_corpus(SMALL)
    assert len(c.planted) == 15
    for p in c.planted:
        counts = cd_counts(c.graph, p)
        assert counts.n_J == 0 and counts.n_K == 0
        assert counts.deg_out == SMALL.planted_refs


def test_background_is_mostly_consolidating():
    c = synthetic_corpus(SMALL)
    g = c.graph
    j = [cd_counts(g, p).n_J for p in g.node_ids[:300] if g.deg_in(p) > 0 and g.deg_out(p) > 0]
    assert np.mean(np.array(j) > 0) > 0.5
