import numpy as np
import pytest
from hypothesis import given, strategies as st

from citedisrupt.centrality import PagerankConfig, betweenness, pagerank_normalized
from citedisrupt.experiments import (MetricTable, SweepConfig, correlate, correlate_trends,
                                     correlation, descending_percentiles, rank_prizes, run_sweep,
                                     smooth, sweep_slice, trend_series)
from citedisrupt.graph import ALL, PaperRecord, build_graph, slice_at
from citedisrupt.measures import (Measure, MeasureRecord, cd_index, cd_index_nok, citation_count,
                                  di_star)
from citedisrupt.centrality import (alignment_shift, betweenness_cd_closed_form,
                                    betweenness_nok_closed_form)
from citedisrupt.neighborhoods import ego_neighborhood

from conftest import random_dag

ALL_MEASURES = tuple(Measure)


def test_spearman_fixture():
    assert correlation((1, 2, 3), (3, 1, 2)) == -0.5


def test_pearson_and_degenerate_inputs():
    assert correlation((1, 2, 3, 4), (2, 4, 6, 8), "pearson") == pytest.approx(1.0)
    assert correlation((1, 2), (2, 1)) is None
    assert correlation((1, 1, 1), (1, 2, 3)) is None
    with pytest.raises(ValueError):
        correlation((1, 2, 3), (1, 2, 3), "kendall")


def test_smoothing_fixture():
    assert smooth([0, 0, 5, 0, 0], 5)[2] == 1
    assert smooth([0, 0, 5, 0, 0], 5)[0] == pytest.approx(5 / 3)
    assert smooth([1, None, 3], 3) == [1, None, 3]
    assert smooth([1, None, 3], 5) == [2, None, 2]
    with pytest.raises(ValueError):
        smooth([1], 4)


def test_percentile_fixture():
    assert descending_percentiles([10, 20, 30, 40])[2] == 37.5
    assert list(descending_percentiles([5, 5])) == [50.0, 50.0]


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=40))
def test_percentiles_in_range(values):
    p = descending_percentiles(values)
    assert (p > 0).all() and (p < 100).all()
    assert p.mean() == pytest.approx(50.0)


@given(st.lists(st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3)), min_size=3, max_size=30))
def test_correlation_bounds(pairs):
    x, y = zip(*pairs)
    for method in ("spearman", "pearson"):
        r = correlation(x, y, method)
        assert r is None or -1 <= r <= 1


def _table(values, measure=Measure.CD, year=2000):
    return [MeasureRecord(p, measure, None, 5, v, year) for p, v in values.items()]


def test_rank_prizes_top_paper_and_skips():
    t = MetricTable(_table({"a": 1.0, "b": 0.5, "c": 0.0, "d": None}))
    row = rank_prizes(t, {"a", "d"}).rows[0]
    assert row.amr == pytest.approx(100 * 0.5 / 3)
    assert row.stdev == 0
    assert (row.n_ranked, row.n_skipped) == (1, 1)


def test_rank_prizes_per_year():
    recs = _table({"a": 1.0, "b": 2.0}, year=2000) + _table({"c": 0.0, "d": 0.5}, year=2001)
    t = MetricTable(recs)
    assert rank_prizes(t, {"a"}).rows[0].amr == pytest.approx(37.5)
    assert rank_prizes(t, {"a"}, per_year=True).rows[0].amr == pytest.approx(75.0)
    with pytest.raises(ValueError):
        rank_prizes(t, set())


def test_table_rejects_duplicate_cells():
    with pytest.raises(ValueError):
        MetricTable(_table({"a": 1.0}) + _table({"a": 2.0}))


def test_table_csv_round_trip():
    recs = _table({"a": 1 / 3, "b": None}) + [MeasureRecord("a", Measure.BETWEENNESS, ALL, ALL, 0.25, 2000)]
    t = MetricTable(recs)
    back = MetricTable.from_csv(t.to_csv())
    assert back.records == t.records
    assert back.to_csv() == t.to_csv()
    with pytest.raises(ValueError, match="<table>:2"):
        MetricTable.from_csv("paper_id,year,measure,k,h,value\na,2000,bogus,,5,1\n")


def test_correlate_and_trends():
    recs = []
    for i in range(8):
        recs.append(MeasureRecord(f"p{i}", Measure.CITATIONS, None, 5, float(i), 2000 + i % 4))
        recs.append(MeasureRecord(f"p{i}", Measure.CD, None, 5, float(-i), 2000 + i % 4))
    t = MetricTable(recs)
    m = correlate(t)
    assert m.labels == ["citations:h=5", "cd:h=5"]
    assert m.values[0][1] == -1.0 and m.values[0][0] == 1.0
    rows = trend_series(t, window=3)
    assert len(rows) == 8
    assert rows[0].mean == 2.0 and rows[0].smoothed == 2.5
    assert correlate_trends(rows).values[0][1] == -1.0
    with pytest.raises(ValueError):
        correlate(MetricTable(_table({"a": 1.0})))


def test_sweep_horizon_covering_the_corpus_is_all(e1):
    t = run_sweep(e1, SweepConfig(years=(2001, 2001), horizons=(5,), measures=(Measure.CD,)))
    assert [(r.paper, r.h, r.value) for r in t.records] == [("v", ALL, 0.0)]


def test_sweep_e1_full_vector(e1):
    t = run_sweep(e1, SweepConfig(years=(2001, 2001), horizons=(ALL,), ks=(1,),
                                  measures=ALL_MEASURES))
    got = {str(r.measure): r.value for r in t.records}
    assert got["citations"] == 2 and got["cd"] == 0 and got["cdnok"] == 0
    assert got["distar"] == 1 / 3
    assert got["bcd"] == 0.5 and got["bnk"] == 0.75 and got["shift"] == 0.5
    nb = ego_neighborhood(e1, "v", 1)
    assert got["betweenness"] == betweenness(nb).value("v")
    assert got["pagerank"] == pytest.approx(pagerank_normalized(nb, PagerankConfig(), "v"), abs=1e-12)


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(years=(2001, 2000))
    with pytest.raises(ValueError):
        SweepConfig(years=(2000, 2001), ks=(0,))
    with pytest.raises(ValueError):
        SweepConfig(years=(2000, 2001), measures=())


@pytest.mark.parametrize("seed", range(4))
def test_sweep_kernels_match_object_path(seed):
    g = random_dag(seed)
    sl = slice_at(g, 2004, 3)
    focal = [p for p in sl.node_ids if sl.year(p) == 2004]
    config = SweepConfig(years=(2004, 2004), ks=(1, 2, ALL), measures=ALL_MEASURES)
    cells = {(r.paper, r.measure, r.k): r.value for r in sweep_slice(sl, focal, 3, config, 2004)}
    scalar = {Measure.CITATIONS: lambda v: citation_count(sl, v).value,
              Measure.CD: lambda v: cd_index(sl, v).value,
              Measure.CDNOK: lambda v: cd_index_nok(sl, v).value,
              Measure.DISTAR: lambda v: di_star(sl, v).value,
              Measure.BCD: lambda v: betweenness_cd_closed_form(sl, v),
              Measure.BNK: lambda v: betweenness_nok_closed_form(sl, v),
              Measure.SHIFT: lambda v: alignment_shift(sl, v)}
    for v in focal:
        for m, f in scalar.items():
            assert cells[(v, m, None)] == f(v)
        for k in (1, 2, ALL):
            nb = sl if k == ALL else ego_neighborhood(sl, v, k)
            b = betweenness(nb).value(v)
            got = cells[(v, Measure.BETWEENNESS, k)]
            assert (got is None) == (b is None)
            if b is not None:
                assert got == pytest.approx(b, abs=1e-12)
            pr = pagerank_normalized(nb, PagerankConfig(), v)
            assert cells[(v, Measure.PAGERANK, k)] == pytest.approx(pr, rel=1e-9)


def test_sweep_is_thread_independent():
    g = random_dag(9, n=400, p=0.02)
    lo, hi = g.year_range()
    base = dict(years=(lo, hi), ks=(1, 3, ALL), measures=ALL_MEASURES, horizons=(2,))
    one = run_sweep(g, SweepConfig(**base, threads=1)).to_csv()
    four = run_sweep(g, SweepConfig(**base, threads=4)).to_csv()
    assert one == four


def test_sweep_requires_years():
    g = build_graph([PaperRecord("a", 2000), PaperRecord("b")], [("a", "b")])
    with pytest.raises(Exception, match="'b'"):
        run_sweep(g, SweepConfig(years=(2000, 2000)))


def test_sweep_ranges():
    g = random_dag(2, n=120, p=0.08)
    lo, hi = g.year_range()
    t = run_sweep(g, SweepConfig(years=(lo, hi), ks=(1, 2, ALL), measures=ALL_MEASURES))
    for r in t.records:
        if r.value is None:
            continue
        assert not np.isnan(r.value)
        if r.measure in (Measure.CD, Measure.CDNOK):
            assert -1 <= r.value <= 1
        if r.measure in (Measure.BETWEENNESS, Measure.DISTAR, Measure.BCD, Measure.BNK):
            assert 0 <= r.value <= 1
        if r.measure == Measure.PAGERANK:
            assert r.value >= (1 - 0.1) / 0.1 - 1e-9
