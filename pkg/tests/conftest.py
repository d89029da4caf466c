import random

import pytest
from hypothesis import settings, strategies as st

from citedisrupt.graph import PaperRecord, build_graph

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

E1_PAPERS = [("x", 2000), ("y", 2000), ("v", 2001), ("a", 2002), ("b", 2002), ("c", 2002)]
E1_EDGES = [("v", "x"), ("v", "y"), ("a", "v"), ("b", "v"), ("b", "x"), ("c", "x")]


def e1_graph():
    return build_graph([PaperRecord(i, y) for i, y in E1_PAPERS], E1_EDGES)


@pytest.fixture
def e1():
    return e1_graph()


@pytest.fixture
def e1_files(tmp_path):
    nodes = tmp_path / "nodes.csv"
    edges = tmp_path / "edges.csv"
    nodes.write_text("id,year\n" + "".join(f"{i},{y}\n" for i, y in E1_PAPERS))
    edges.write_text("citing,cited\n" + "".join(f"{u},{w}\n" for u, w in E1_EDGES))
    return nodes, edges


@st.composite
def digraphs(draw, max_nodes=9, min_nodes=1, with_years=False):
    """Small random citation graphs; with years, edges only point to strictly older papers."""
    n = draw(st.integers(min_nodes, max_nodes))
    ids = [f"n{i}" for i in range(n)]
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b and (not with_years or a > b)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=3 * n)) if pairs else []
    years = [2000 + i for i in range(n)] if with_years else [None] * n
    return build_graph([PaperRecord(i, y) for i, y in zip(ids, years)],
                       [(ids[a], ids[b]) for a, b in chosen])


def random_dag(seed, n=40, p=0.12):
    rng = random.Random(seed)
    papers = [PaperRecord(f"p{i:03d}", 2000 + i // 4) for i in range(n)]
    edges = [(papers[a].id, papers[b].id) for a in range(n) for b in range(a)
             if papers[b].year < papers[a].year and rng.random() < p]
    return build_graph(papers, edges)
