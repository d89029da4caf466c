"""Centrality-based disruption measures for citation networks."""

__version__ = "0.1.0"

from .centrality import (PagerankConfig, PagerankConvergenceError, alignment_shift,
                         alignment_shift_saturated, betweenness, betweenness_cd_closed_form,
                         betweenness_nok_closed_form, pagerank, pagerank_normalized)
from .graph import (ALL, CitationGraph, CitationGraphError, MissingYearError, PaperRecord,
                    UnknownNodeError, build_graph, load_graph, slice_at)
from .measures import Measure, MeasureRecord, cd_index, cd_index_nok, citation_count, di_star
from .neighborhoods import cd_neighborhood, ego_neighborhood, label_nodes, nok_neighborhood

__all__ = [
    "ALL", "CitationGraph", "CitationGraphError", "Measure", "MeasureRecord", "MissingYearError",
    "PagerankConfig", "PagerankConvergenceError", "PaperRecord", "UnknownNodeError",
    "alignment_shift", "alignment_shift_saturated", "betweenness", "betweenness_cd_closed_form",
    "betweenness_nok_closed_form", "build_graph", "cd_index", "cd_index_nok", "cd_neighborhood",
    "citation_count", "di_star", "ego_neighborhood", "label_nodes", "load_graph",
    "nok_neighborhood", "pagerank", "pagerank_normalized", "slice_at",
]
