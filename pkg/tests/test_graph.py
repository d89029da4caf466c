import numpy as np
import pytest
from hypothesis import given

from citedisrupt.graph import (ALL, DuplicatePaperError, MalformedInputError, MissingYearError,
                               PaperRecord, UnknownNodeError, build_graph, edges_csv_text,
                               in_subgraph, load_graph, nodes_csv_text, out_subgraph,
                               read_edges_csv, read_nodes_csv, slice_at)

from conftest import digraphs


def test_e1_counts(e1):
    assert e1.n_nodes == 6
    assert e1.n_edges == 6
    assert e1.diagnostics.dropped == 0
    assert e1.deg_in("v") == 2
    assert e1.deg_out("v") == 2
    assert e1.deg_in("x") == 3


def test_self_loops_and_duplicates_are_dropped_and_counted():
    g = build_graph([PaperRecord("a", 2000), PaperRecord("b", 2001)],
                    [("b", "a"), ("b", "a"), ("a", "a")])
    assert g.n_edges == 1
    assert g.diagnostics.self_loops_dropped == 1
    assert g.diagnostics.duplicates_dropped == 1
    assert g.diagnostics.dropped == 2


def test_forward_citations_are_counted_not_rejected():
    g = build_graph([PaperRecord("a", 2000), PaperRecord("b", 2001)], [("a", "b"), ("b", "a")])
    assert g.n_edges == 2
    assert g.diagnostics.forward_citations == 1


def test_unknown_endpoint_rejected():
    with pytest.raises(UnknownNodeError) as info:
        build_graph([PaperRecord("a")], [("a", "zz")])
    assert info.value.node_id == "zz"


def test_duplicate_paper_rejected():
    with pytest.raises(DuplicatePaperError):
        build_graph([PaperRecord("a"), PaperRecord("a")], [])


def test_arrays_are_read_only(e1):
    with pytest.raises(ValueError):
        e1.edges[0, 0] = 1


def test_slice_keeps_papers_up_to_t_plus_h(e1):
    s = slice_at(e1, 2000, 1)
    assert set(s.node_ids) == {"x", "y", "v"}
    assert s.edge_ids() == [("v", "x"), ("v", "y")]
    assert slice_at(e1, 2000, ALL) is e1


def test_slice_needs_years():
    g = build_graph([PaperRecord("a", 2000), PaperRecord("b")], [])
    with pytest.raises(MissingYearError) as info:
        slice_at(g, 2000, 5)
    assert info.value.node_id == "b"


def test_slice_rejects_negative_horizon(e1):
    with pytest.raises(ValueError):
        slice_at(e1, 2000, -1)


def test_stars(e1):
    assert set(in_subgraph(e1, "v").node_ids) == {"v", "a", "b"}
    assert in_subgraph(e1, "v").degree == 2
    assert out_subgraph(e1, "v").edge_ids() == [("v", "x"), ("v", "y")]


def test_csv_round_trip(tmp_path, e1):
    (tmp_path / "n.csv").write_text(nodes_csv_text(e1))
    (tmp_path / "e.csv").write_text(edges_csv_text(e1))
    assert load_graph(tmp_path / "n.csv", tmp_path / "e.csv") == e1


def test_blank_year_reads_as_missing(tmp_path):
    (tmp_path / "n.csv").write_text("id,year\na,\nb,2001\n")
    assert read_nodes_csv(tmp_path / "n.csv") == [PaperRecord("a"), PaperRecord("b", 2001)]


@pytest.mark.parametrize("text, where", [
    ("id,yr\n", "n.csv:1"),
    ("id,year\na,2000\nb,twenty\n", "n.csv:3"),
    ("id,year\na,2000,9\n", "n.csv:2"),
])
def test_malformed_nodes_name_the_line(tmp_path, text, where):
    (tmp_path / "n.csv").write_text(text)
    with pytest.raises(MalformedInputError, match=where):
        read_nodes_csv(tmp_path / "n.csv")


def test_malformed_edges_name_the_line(tmp_path):
    (tmp_path / "e.csv").write_text("citing,cited\na,b\nc\n")
    with pytest.raises(MalformedInputError, match="e.csv:3"):
        read_edges_csv(tmp_path / "e.csv")


@given(digraphs(with_years=True))
def test_degrees_sum_to_edge_count(g):
    assert g.in_degrees().sum() == g.n_edges == g.out_degrees().sum()


@given(digraphs(with_years=True))
def test_slices_are_nested(g):
    lo, hi = g.year_range()
    prev = set()
    for t in range(lo, hi + 1):
        s = slice_at(g, t, 0)
        assert prev <= set(s.node_ids)
        assert set(s.edge_ids()) <= set(g.edge_ids())
        prev = set(s.node_ids)


@given(digraphs())
def test_csr_matches_edges(g):
    indptr, indices = g.adjacency()
    rebuilt = sorted((g.node_ids[u], g.node_ids[w])
                     for u in range(g.n_nodes) for w in indices[indptr[u]:indptr[u + 1]])
    assert rebuilt == sorted(g.edge_ids())
    in_ptr, _ = g.in_adjacency()
    assert np.array_equal(np.diff(in_ptr), g.in_degrees())
