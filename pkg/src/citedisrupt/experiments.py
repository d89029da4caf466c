"""Time-sliced measure sweeps, correlations, smoothed trends and prize-paper rankings."""

from __future__ import annotations

import csv
import io
import logging
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import rankdata

from . import _kernels
from .centrality import (PagerankConfig, PagerankConvergenceError, bcd_from_counts,
                         bnk_from_counts, dependency_sums, pagerank, shift_from_counts)
from .graph import ALL, CitationGraph, Horizon, slice_at
from .measures import MEASURE_ORDER, Measure, MeasureRecord, format_value

log = logging.getLogger(__name__)

FOCAL_BLOCK = 64

Config = tuple  # (Measure, k, h)


def _param_key(p) -> tuple[int, int]:
    if p is None:
        return (0, 0)
    if p == ALL:
        return (2, 0)
    return (1, int(p))


def record_key(r: MeasureRecord):
    return (r.paper, MEASURE_ORDER[r.measure], _param_key(r.k), _param_key(r.h))


def config_key(c: Config):
    m, k, h = c
    return (MEASURE_ORDER[m], _param_key(k), _param_key(h))


def config_label(c: Config) -> str:
    m, k, h = c
    parts = [str(m)]
    if k is not None:
        parts.append(f"k={k}")
    if h is not None:
        parts.append(f"h={h}")
    return ":".join(parts)


@dataclass(frozen=True)
class SweepConfig:
    years: tuple[int, int]
    horizons: tuple[Horizon, ...] = (5,)
    ks: tuple[Horizon, ...] = (1,)
    measures: tuple[Measure, ...] = (Measure.CITATIONS, Measure.CD)
    pagerank: PagerankConfig = field(default_factory=PagerankConfig)
    betweenness_normalizer: str = "standard"
    threads: int = 1

    def __post_init__(self):
        if self.years[0] > self.years[1]:
            raise ValueError(f"empty year range {self.years[0]}:{self.years[1]}")
        if not self.measures:
            raise ValueError("select at least one measure")
        if self.betweenness_normalizer != "standard":
            raise ValueError("sweeps normalize betweenness by (n-1)(n-2) only")
        for k in self.ks:
            if k != ALL and int(k) < 1:
                raise ValueError(f"hop size must be >= 1 or {ALL!r}, got {k!r}")


@dataclass
class MetricTable:
    """Measure cells keyed by (paper, measure, k, h), kept in key order."""

    records: list[MeasureRecord]

    def __post_init__(self):
        self.records = sorted(self.records, key=record_key)
        seen = set()
        for r in self.records:
            key = (r.paper, r.measure, r.k, r.h)
            if key in seen:
                raise ValueError(f"duplicate table cell {key}")
            seen.add(key)

    def __len__(self):
        return len(self.records)

    def configurations(self) -> list[Config]:
        return sorted({(r.measure, r.k, r.h) for r in self.records}, key=config_key)

    def column(self, config: Config) -> dict[str, MeasureRecord]:
        m, k, h = config
        return {r.paper: r for r in self.records if (r.measure, r.k, r.h) == (m, k, h)}

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["paper_id", "year", "measure", "k", "h", "value"])
        for r in self.records:
            writer.writerow([r.paper, "" if r.year is None else r.year, str(r.measure),
                             "" if r.k is None else r.k, "" if r.h is None else r.h,
                             format_value(r.value)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, source: str = "<table>") -> "MetricTable":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        expected = ["paper_id", "year", "measure", "k", "h", "value"]
        if header != expected:
            raise ValueError(f"{source}:1: expected header {','.join(expected)}")
        records = []
        for row in reader:
            if not row:
                continue
            try:
                paper, year, measure, k, h, value = row
                records.append(MeasureRecord(
                    paper, Measure(measure), parse_param(k), parse_param(h),
                    float(value) if value else None, int(year) if year else None))
            except ValueError as exc:
                raise ValueError(f"{source}:{reader.line_num}: {exc}") from None
        return cls(records)


def parse_param(text: str) -> Horizon | None:
    text = text.strip()
    if not text:
        return None
    if text == ALL:
        return ALL
    return int(text)


# -- sweep ---------------------------------------------------------------------

def _map_blocks(fn, focals: np.ndarray, threads: int) -> list:
    blocks = [focals[i:i + FOCAL_BLOCK] for i in range(0, len(focals), FOCAL_BLOCK)]
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, blocks))
    return [fn(b) for b in blocks]


def _ratio(num: int, den: int) -> float | None:
    return None if den == 0 else num / den


def _frac(x) -> float | None:
    return None if x is None else float(x)


def _count_cells(measures, counts) -> dict[Measure, float | None]:
    n_i, n_j, n_k, excess, d_in, d_out = (int(c) for c in counts)
    cells = {
        Measure.CITATIONS: float(d_in),
        Measure.CD: _ratio(n_i - n_j, n_i + n_j + n_k),
        Measure.CDNOK: _ratio(n_i - n_j, d_in),
        Measure.DISTAR: _ratio(n_i, d_in + n_k),
        Measure.BCD: _frac(bcd_from_counts(n_i, n_j, n_k, excess, d_out)),
        Measure.BNK: _frac(bnk_from_counts(n_i, n_j, excess, d_out)),
        Measure.SHIFT: _frac(shift_from_counts(n_i, n_j, n_k, excess, d_out)),
    }
    return {m: cells[m] for m in measures if m in cells}


def _nan_to_none(x: float) -> float | None:
    return None if np.isnan(x) else float(x)


def sweep_slice(sl: CitationGraph, focal_ids: Sequence[str], h_label: Horizon,
                config: SweepConfig, year: int) -> list[MeasureRecord]:
    """All configured cells for ``focal_ids`` measured against the slice ``sl``."""
    focals = np.array([sl.index(p) for p in focal_ids], dtype=np.int64)
    op, oi = (np.ascontiguousarray(a) for a in sl.adjacency())
    ip, ii = (np.ascontiguousarray(a) for a in sl.in_adjacency())
    measures = set(config.measures)
    records: list[MeasureRecord] = []

    def emit(i, measure, k, value):
        records.append(MeasureRecord(focal_ids[i], measure, k, h_label, value, year))

    count_measures = [m for m in config.measures if not m.uses_k]
    if count_measures:
        parts = _map_blocks(lambda b: _kernels.cd_counts_block(op, oi, ip, ii, b),
                            focals, config.threads)
        counts = np.concatenate(parts) if parts else np.zeros((0, 6), np.int64)
        for i, row in enumerate(counts):
            for m, value in _count_cells(count_measures, row).items():
                emit(i, m, None, value)

    do_btw = Measure.BETWEENNESS in measures
    do_pr = Measure.PAGERANK in measures
    pr = config.pagerank
    for k in config.ks:
        if not (do_btw or do_pr):
            break
        if k == ALL:
            n = sl.n_nodes
            if do_btw:
                allowed = np.ones(n, dtype=np.int64)
                sources = _kernels.reverse_reach(ip, ii, focals, allowed, 1)
                raw = dependency_sums(op, oi, sources, threads=config.threads)
                p = (n - 1) * (n - 2)
                for i, f in enumerate(focals):
                    emit(i, Measure.BETWEENNESS, ALL, None if p == 0 else float(raw[f] / p))
            if do_pr:
                res = pagerank(sl, pr)
                for i, f in enumerate(focals):
                    emit(i, Measure.PAGERANK, ALL, float(res.pi[f] * n / pr.alpha))
            continue

        def run(block, k=int(k)):
            return _kernels.ego_block(op, oi, ip, ii, block, k, do_btw, do_pr,
                                      pr.alpha, pr.tolerance, pr.max_iterations)

        parts = _map_blocks(run, focals, config.threads)
        btw = np.concatenate([p[0] for p in parts])
        prv = np.concatenate([p[1] for p in parts])
        resid = np.concatenate([p[2] for p in parts])
        iters = np.concatenate([p[3] for p in parts])
        if do_pr and (resid > pr.tolerance).any():
            bad = int(np.argmax(resid))
            raise PagerankConvergenceError(int(iters[bad]), float(resid[bad]))
        for i in range(len(focals)):
            if do_btw:
                emit(i, Measure.BETWEENNESS, int(k), _nan_to_none(btw[i]))
            if do_pr:
                emit(i, Measure.PAGERANK, int(k), float(prv[i]))
    return records


def run_sweep(g: CitationGraph, config: SweepConfig) -> MetricTable:
    """Measure every paper published in each year ``t`` of the range against G_{t+h}.

    An integer horizon that already reaches the last corpus year from the
    first swept year is reported as ``all``.
    """
    g.require_years()
    span = g.year_range()
    t_min, t_max = config.years
    records: list[MeasureRecord] = []
    if span is None:
        return MetricTable(records)
    by_year: dict[int, list[str]] = defaultdict(list)
    for i, node_id in enumerate(g.node_ids):
        by_year[int(g.years[i])].append(node_id)
    for h in config.horizons:
        h_label = ALL if h == ALL or t_min + int(h) >= span[1] else int(h)
        for t in range(t_min, t_max + 1):
            focal_ids = by_year.get(t)
            if not focal_ids:
                continue
            sl = slice_at(g, t, h_label)
            log.info("year %d h=%s: %d papers, slice of %d nodes", t, h_label,
                     len(focal_ids), sl.n_nodes)
            records += sweep_slice(sl, focal_ids, h_label, config, t)
    return MetricTable(records)


# -- statistics ----------------------------------------------------------------

def _pearson(x: np.ndarray, y: np.ndarray) -> float | None:
    dx = x - x.mean()
    dy = y - y.mean()
    den = np.sqrt((dx @ dx) * (dy @ dy))
    if den == 0:
        return None
    return float(np.clip((dx @ dy) / den, -1.0, 1.0))


def correlation(x: Sequence[float], y: Sequence[float], method: str = "spearman") -> float | None:
    """Pearson or Spearman (Pearson on average ranks) correlation; ``None`` below 3 pairs."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 3:
        return None
    if method == "spearman":
        x, y = rankdata(x), rankdata(y)
    elif method != "pearson":
        raise ValueError(f"unknown correlation method {method!r}")
    return _pearson(x, y)


@dataclass
class CorrelationMatrix:
    labels: list[str]
    values: list[list[float | None]]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([""] + self.labels)
        for label, row in zip(self.labels, self.values):
            writer.writerow([label] + [format_value(v) for v in row])
        return buf.getvalue()


def _correlate_columns(columns: dict[str, dict[str, float]], method: str) -> CorrelationMatrix:
    labels = list(columns)
    size = len(labels)
    values: list[list[float | None]] = [[None] * size for _ in range(size)]
    for a in range(size):
        values[a][a] = 1.0
        for b in range(a + 1, size):
            ca, cb = columns[labels[a]], columns[labels[b]]
            common = sorted(set(ca) & set(cb))
            r = correlation([ca[p] for p in common], [cb[p] for p in common], method)
            values[a][b] = values[b][a] = r
    return CorrelationMatrix(labels, values)


def correlate(table: MetricTable, method: str = "spearman") -> CorrelationMatrix:
    """Pairwise-complete correlations between every pair of configurations over papers."""
    configs = table.configurations()
    if len(configs) < 2:
        raise ValueError("correlation needs at least two measure configurations")
    columns = {}
    for c in configs:
        columns[config_label(c)] = {p: r.value for p, r in table.column(c).items() if r.defined}
    return _correlate_columns(columns, method)


def smooth(values: Sequence[float | None], window: int) -> list[float | None]:
    """Centered moving average, truncated at the ends; missing points are skipped."""
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be a positive odd integer, got {window}")
    half = window // 2
    out: list[float | None] = []
    for i, v in enumerate(values):
        if v is None:
            out.append(None)
            continue
        near = [x for x in values[max(0, i - half): i + half + 1] if x is not None]
        out.append(sum(near) / len(near))
    return out


@dataclass
class TrendRow:
    year: int
    measure: Measure
    k: Horizon | None
    h: Horizon | None
    mean: float | None
    smoothed: float | None


def trend_series(table: MetricTable, window: int = 5) -> list[TrendRow]:
    """Yearly mean of defined values per configuration, then centered smoothing."""
    years = [r.year for r in table.records if r.year is not None]
    if not years:
        return []
    span = range(min(years), max(years) + 1)
    rows: list[TrendRow] = []
    for c in table.configurations():
        per_year: dict[int, list[float]] = defaultdict(list)
        for r in table.column(c).values():
            if r.defined and r.year is not None:
                per_year[r.year].append(r.value)
        means = [float(np.mean(per_year[y])) if per_year.get(y) else None for y in span]
        for y, mean, sm in zip(span, means, smooth(means, window)):
            rows.append(TrendRow(y, c[0], c[1], c[2], mean, sm))
    return rows


def trend_csv(rows: Iterable[TrendRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["year", "measure", "k", "h", "mean_value", "smoothed_value"])
    for r in rows:
        writer.writerow([r.year, str(r.measure), "" if r.k is None else r.k,
                         "" if r.h is None else r.h, format_value(r.mean), format_value(r.smoothed)])
    return buf.getvalue()


def correlate_trends(rows: Sequence[TrendRow], method: str = "spearman",
                     smoothed: bool = True) -> CorrelationMatrix:
    """Correlations between the yearly series of each configuration."""
    columns: dict[str, dict[str, float]] = {}
    for r in rows:
        value = r.smoothed if smoothed else r.mean
        label = config_label((r.measure, r.k, r.h))
        columns.setdefault(label, {})
        if value is not None:
            columns[label][str(r.year)] = value
    return _correlate_columns(columns, method)


def descending_percentiles(values: Sequence[float]) -> np.ndarray:
    """100 * (rank - 0.5) / N with rank 1 for the largest value and average ranks on ties."""
    values = np.asarray(values, dtype=float)
    ranks = rankdata(-values, method="average")
    return 100.0 * (ranks - 0.5) / len(values)


@dataclass
class RankingRow:
    measure: Measure
    k: Horizon | None
    h: Horizon | None
    amr: float | None
    stdev: float | None
    n_ranked: int
    n_skipped: int


@dataclass
class RankingReport:
    rows: list[RankingRow]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["measure", "k", "h", "amr_percent", "stdev_percent", "n_ranked", "n_skipped"])
        for r in self.rows:
            writer.writerow([str(r.measure), "" if r.k is None else r.k, "" if r.h is None else r.h,
                             format_value(r.amr), format_value(r.stdev), r.n_ranked, r.n_skipped])
        return buf.getvalue()

    def row(self, measure: Measure, k=None, h=None) -> RankingRow:
        for r in self.rows:
            if (r.measure, r.k, r.h) == (measure, k, h):
                return r
        raise KeyError((measure, k, h))


def rank_prizes(table: MetricTable, prize_ids: Iterable[str], per_year: bool = False) -> RankingReport:
    """Average descending percentile rank (AMR) of the prize papers per configuration.

    Papers with undefined values are left out of the ranked population; prize
    papers among them are counted in ``n_skipped``. ``per_year`` ranks each
    paper only against papers published in the same year.
    """
    prize = set(prize_ids)
    if not prize:
        raise ValueError("no prize papers given")
    rows = []
    for c in table.configurations():
        col = table.column(c)
        defined = [r for r in col.values() if r.defined]
        groups: dict[object, list[MeasureRecord]] = defaultdict(list)
        for r in defined:
            groups[r.year if per_year else None].append(r)
        pct: dict[str, float] = {}
        for members in groups.values():
            for r, p in zip(members, descending_percentiles([m.value for m in members])):
                pct[r.paper] = float(p)
        ranked = [pct[p] for p in sorted(prize) if p in pct]
        skipped = len(prize) - len(ranked)
        if ranked:
            rows.append(RankingRow(c[0], c[1], c[2], float(np.mean(ranked)),
                                   float(np.std(ranked)), len(ranked), skipped))
        else:
            rows.append(RankingRow(c[0], c[1], c[2], None, None, 0, skipped))
    return RankingReport(rows)
