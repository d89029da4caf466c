"""Count-based disruption measures: citation count, CD index, no-k CD index, DI*."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum

from .graph import CitationGraph, Horizon
from .neighborhoods import cd_neighborhood, label_nodes, nok_neighborhood


class Measure(str, Enum):
    CITATIONS = "citations"
    CD = "cd"
    CDNOK = "cdnok"
    DISTAR = "distar"
    BETWEENNESS = "betweenness"
    PAGERANK = "pagerank"
    # CD-notation betweenness on the CD / no-k neighborhoods and the shift q(v)
    BCD = "bcd"
    BNK = "bnk"
    SHIFT = "shift"

    def __str__(self):
        return self.value

    @property
    def uses_k(self) -> bool:
        return self in (Measure.BETWEENNESS, Measure.PAGERANK)


MEASURE_ORDER = {m: i for i, m in enumerate(Measure)}


@dataclass(frozen=True)
class MeasureRecord:
    """One result cell. ``value`` is ``None`` when the measure is undefined."""

    paper: str
    measure: Measure
    k: Horizon | None = None
    h: Horizon | None = None
    value: float | None = None
    year: int | None = None

    @property
    def defined(self) -> bool:
        return self.value is not None


@dataclass(frozen=True)
class CDCounts:
    n_I: int
    n_J: int
    n_K: int
    deg_in: int
    deg_out: int


def cd_counts(g: CitationGraph, v: str) -> CDCounts:
    labels = label_nodes(cd_neighborhood(g, v))
    return CDCounts(labels.n_I, labels.n_J, labels.n_K, g.deg_in(v), g.deg_out(v))


def _ratio(num: float, den: float) -> float | None:
    return None if den == 0 else num / den


def citation_count(g: CitationGraph, v: str) -> MeasureRecord:
    return MeasureRecord(v, Measure.CITATIONS, value=float(g.deg_in(v)))


def cd_index(g: CitationGraph, v: str) -> MeasureRecord:
    """``(n_I - n_J) / (n_I + n_J + n_K)`` on the CD neighborhood."""
    c = cd_counts(g, v)
    return MeasureRecord(v, Measure.CD, value=_ratio(c.n_I - c.n_J, c.n_I + c.n_J + c.n_K))


def cd_index_nok(g: CitationGraph, v: str) -> MeasureRecord:
    labels = label_nodes(nok_neighborhood(g, v))
    return MeasureRecord(v, Measure.CDNOK, value=_ratio(labels.n_I - labels.n_J, g.deg_in(v)))


def di_star(g: CitationGraph, v: str) -> MeasureRecord:
    """Share of I-type citers among citers plus K-type papers."""
    c = cd_counts(g, v)
    return MeasureRecord(v, Measure.DISTAR, value=_ratio(c.n_I, c.deg_in + c.n_K))


def format_value(value: float | None) -> str:
    """Shortest round-trip decimal form; empty for undefined cells."""
    return "" if value is None else repr(float(value))


def _fmt_param(p: Horizon | None) -> str:
    return "" if p is None else str(p)


def measures_csv_text(records) -> str:
    """Batch output with header ``paper_id,measure,k,h,value``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["paper_id", "measure", "k", "h", "value"])
    for r in records:
        writer.writerow([r.paper, str(r.measure), _fmt_param(r.k), _fmt_param(r.h),
                         format_value(r.value)])
    return buf.getvalue()
