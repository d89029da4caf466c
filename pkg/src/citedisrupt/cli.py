"""Command-line entry point: ingest, slice, compute, correlate, trend, rank, verify."""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import random
import sys
import tempfile
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .centrality import (PagerankConfig, PagerankConvergenceError, betweenness, pagerank)
from .experiments import (MetricTable, SweepConfig, correlate, correlate_trends, parse_param,
                          rank_prizes, run_sweep, trend_csv, trend_series)
from .graph import (ALL, CitationGraphError, edges_csv_text, load_graph, nodes_csv_text,
                    slice_at)
from .measures import Measure
from .neighborhoods import (cd_neighborhood, ego_neighborhood, neighborhood_edges_csv,
                            neighborhood_labels_csv, nok_neighborhood)
from .oracle import (brute_force_betweenness, check_identities, dense_pagerank,
                     random_cd_census, random_cd_instance, random_digraph)

SWEEP_MEASURES = ("citations", "cd", "cdnok", "distar", "betweenness", "pagerank")
EXTRA_MEASURES = ("bcd", "bnk", "shift")

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 1, 2


class ValidationError(Exception):
    """Input that parses but violates a precondition (exit status 1)."""


# -- output plumbing ------------------------------------------------------------

def write_atomic(path: str | Path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename over the target."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    command: str
    version: str = __version__
    inputs: list[dict] = field(default_factory=list)
    outputs: list[dict] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    stage_seconds: dict[str, float] = field(default_factory=dict)

    def add_input(self, path) -> None:
        self.inputs.append({"path": str(path), "sha256": sha256_file(path)})

    def add_output(self, path) -> None:
        self.outputs.append({"path": str(path), "sha256": sha256_file(path)})

    @contextmanager
    def stage(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.stage_seconds[name] = round(time.perf_counter() - start, 6)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"


def warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def emit(text: str, out: str | None, manifest: RunManifest) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        write_atomic(out, text)
        manifest.add_output(out)


# -- prize files ------------------------------------------------------------------

@dataclass
class PrizeFile:
    ids: set[str]
    unknown: list[str]
    warnings: list[str]


def load_prize_file(path: str | Path, known: Iterable[str] | None = None) -> PrizeFile:
    """One paper id per line; blank lines and ``#`` comments are skipped.

    Ids absent from ``known`` are dropped with a warning rather than an error.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read prize file {path}: {exc.strerror}") from None
    listed: list[str] = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line and line not in listed:
            listed.append(line)
    known_set = None if known is None else set(known)
    ids = {p for p in listed if known_set is None or p in known_set}
    unknown = sorted(p for p in listed if p not in ids)
    warnings = []
    if not listed:
        warnings.append(f"prize file {path} lists no paper ids")
    if unknown:
        warnings.append(f"{len(unknown)} prize id(s) not found: {', '.join(unknown[:5])}"
                        + (" ..." if len(unknown) > 5 else ""))
    return PrizeFile(ids, unknown, warnings)


# -- argument parsing -------------------------------------------------------------

def _years(text: str) -> tuple[int, int]:
    try:
        a, b = text.split(":")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected START:END, got {text!r}") from None


def _horizon(text: str):
    try:
        value = parse_param(text)
    except ValueError:
        value = None
    if value is None or (value != ALL and value < 0):
        raise argparse.ArgumentTypeError(f"expected a non-negative integer or 'all', got {text!r}")
    return value


def _hop(text: str):
    value = _horizon(text)
    if value != ALL and value < 1:
        raise argparse.ArgumentTypeError(f"hop size must be >= 1 or 'all', got {text!r}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        value = 0
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--nodes", required=True, help="CSV with header id,year")
    p.add_argument("--edges", required=True, help="CSV with header citing,cited")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--manifest", help="write a JSON run manifest here")
    p.add_argument("--config", help="key=value file mirroring the long flags")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="citedisrupt", description="Centrality-based disruption measures for citation networks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a corpus and report counts")
    _add_graph_args(p)
    p.add_argument("--out-nodes", help="write the cleaned node table")
    p.add_argument("--out-edges", help="write the cleaned edge table")
    _add_common(p)

    p = sub.add_parser("slice", help="cut G_{t+h}, optionally around a focal paper")
    _add_graph_args(p)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--h", type=_horizon, default=ALL)
    p.add_argument("--focal", help="export a neighborhood of this paper instead")
    p.add_argument("--kind", choices=("cd", "nok", "ego"), default="cd")
    p.add_argument("--k", type=_hop, default=1, help="hop size for --kind ego")
    p.add_argument("--out-nodes", help="node table of the slice")
    p.add_argument("--out-labels", help="I/J/K labels of the neighborhood (cd/nok)")
    _add_common(p)

    p = sub.add_parser("compute", help="measure every paper of each year against its slice")
    _add_graph_args(p)
    p.add_argument("--measure", action="append", choices=SWEEP_MEASURES + EXTRA_MEASURES)
    p.add_argument("--k", action="append", type=_hop, help="ego hop size (repeatable)")
    p.add_argument("--h", action="append", type=_horizon, help="horizon in years (repeatable)")
    p.add_argument("--years", type=_years, help="START:END (default: corpus span)")
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=_positive_int, default=10_000)
    p.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1)
    _add_common(p)

    p = sub.add_parser("correlate", help="correlation matrix between measure configurations")
    p.add_argument("--table", required=True)
    p.add_argument("--corr-method", choices=("spearman", "pearson"), default="spearman")
    _add_common(p)

    p = sub.add_parser("trend", help="smoothed yearly averages per configuration")
    p.add_argument("--table", required=True)
    p.add_argument("--window", type=_positive_int, default=5)
    p.add_argument("--series-corr", help="also write correlations between the yearly series")
    p.add_argument("--raw-series", action="store_true",
                   help="correlate unsmoothed yearly means instead of smoothed ones")
    p.add_argument("--corr-method", choices=("spearman", "pearson"), default="spearman")
    _add_common(p)

    p = sub.add_parser("rank", help="average percentile rank of prize papers")
    p.add_argument("--table", required=True)
    p.add_argument("--prizes", required=True, help="one paper id per line, # comments allowed")
    p.add_argument("--per-year", action="store_true", help="rank within each publication year")
    _add_common(p)

    p = sub.add_parser("verify", help="check closed forms and kernels against brute-force oracles")
    p.add_argument("--seeds", type=_positive_int, default=100)
    p.add_argument("--tol", type=float, default=1e-12)
    _add_common(p)
    return parser


def read_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc.strerror}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def parse_args(argv: Sequence[str] | None) -> argparse.Namespace:
    """Parse flags; a ``--config`` file supplies values for flags not given explicitly."""
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    if extra:
        flags = sorted(s for a in sub._actions for s in a.option_strings if s.startswith("--"))
        sub.error(f"unrecognized arguments: {' '.join(extra)}; valid flags: {', '.join(flags)}")
    if not args.config:
        return args
    actions = {a.dest: a for a in sub._actions}
    explicit = {a.dest for a in sub._actions
                for s in (argv or sys.argv[1:]) if s.split("=")[0] in a.option_strings}
    for key, raw in read_config_file(args.config).items():
        action = actions.get(key)
        if action is None or key in ("config", "help"):
            raise ValidationError(f"{args.config}: unknown key {key!r}")
        if key in explicit:
            continue
        items = [s.strip() for s in raw.split(",")] if isinstance(action, argparse._AppendAction) else [raw]
        parsed = []
        for item in items:
            if isinstance(action, argparse._StoreTrueAction):
                parsed.append(item.lower() in ("1", "true", "yes", "on"))
                continue
            try:
                value = action.type(item) if action.type else item
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise ValidationError(f"{args.config}: {key}: {exc}") from None
            if action.choices is not None and value not in action.choices:
                raise ValidationError(f"{args.config}: {key}: {item!r} not in {list(action.choices)}")
            parsed.append(value)
        setattr(args, key, parsed if isinstance(action, argparse._AppendAction) else parsed[0])
    return args


# -- subcommands ------------------------------------------------------------------

def _load(args, manifest: RunManifest):
    with manifest.stage("load"):
        g = load_graph(args.nodes, args.edges)
    manifest.add_input(args.nodes)
    manifest.add_input(args.edges)
    d = g.diagnostics
    if d.forward_citations:
        warn(f"{d.forward_citations} citation(s) point forward in time")
    return g


def cmd_ingest(args, manifest: RunManifest) -> int:
    g = _load(args, manifest)
    d = g.diagnostics
    print(f"{g.n_nodes} nodes, {g.n_edges} edges, {d.dropped} dropped")
    if d.dropped:
        print(f"  self-citations dropped: {d.self_loops_dropped}, "
              f"duplicate citations dropped: {d.duplicates_dropped}", file=sys.stderr)
    if args.out_nodes:
        write_atomic(args.out_nodes, nodes_csv_text(g))
        manifest.add_output(args.out_nodes)
    if args.out_edges:
        write_atomic(args.out_edges, edges_csv_text(g))
        manifest.add_output(args.out_edges)
    return EXIT_OK


def cmd_slice(args, manifest: RunManifest) -> int:
    g = _load(args, manifest)
    with manifest.stage("slice"):
        sl = slice_at(g, args.t, args.h)
    if args.focal is None:
        if args.out_nodes:
            write_atomic(args.out_nodes, nodes_csv_text(sl))
            manifest.add_output(args.out_nodes)
        emit(edges_csv_text(sl), args.out, manifest)
        return EXIT_OK
    if args.kind == "cd":
        nb = cd_neighborhood(sl, args.focal)
    elif args.kind == "nok":
        nb = nok_neighborhood(sl, args.focal)
    else:
        nb = ego_neighborhood(sl, args.focal, args.k)
    if args.out_labels:
        if args.kind == "ego":
            raise ValidationError("labels are defined only for cd and nok neighborhoods")
        write_atomic(args.out_labels, neighborhood_labels_csv(nb))
        manifest.add_output(args.out_labels)
    emit(neighborhood_edges_csv(nb), args.out, manifest)
    return EXIT_OK


def cmd_compute(args, manifest: RunManifest) -> int:
    g = _load(args, manifest)
    g.require_years()
    span = g.year_range()
    if span is None:
        raise ValidationError("corpus is empty")
    years = args.years or span
    measures = tuple(Measure(m) for m in dict.fromkeys(args.measure or SWEEP_MEASURES))
    ks = tuple(dict.fromkeys(args.k or [1]))
    hs = tuple(dict.fromkeys(args.h or [5]))
    config = SweepConfig(years=years, horizons=hs, ks=ks, measures=measures,
                         pagerank=PagerankConfig(alpha=args.alpha, tolerance=args.tol,
                                                 max_iterations=args.max_iter),
                         threads=args.threads)
    manifest.config.update(years=list(years), measures=[str(m) for m in measures],
                           ks=list(ks), horizons=list(hs), alpha=args.alpha, tol=args.tol,
                           max_iter=args.max_iter, threads=args.threads)
    with manifest.stage("compute"):
        table = run_sweep(g, config)
    with manifest.stage("write"):
        emit(table.to_csv(), args.out, manifest)
    return EXIT_OK


def _read_table(path: str, manifest: RunManifest) -> MetricTable:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read table {path}: {exc.strerror}") from None
    manifest.add_input(path)
    return MetricTable.from_csv(text, Path(path).name)


def cmd_correlate(args, manifest: RunManifest) -> int:
    table = _read_table(args.table, manifest)
    manifest.config["corr_method"] = args.corr_method
    emit(correlate(table, args.corr_method).to_csv(), args.out, manifest)
    return EXIT_OK


def cmd_trend(args, manifest: RunManifest) -> int:
    table = _read_table(args.table, manifest)
    manifest.config.update(window=args.window, corr_method=args.corr_method,
                           smoothed_series=not args.raw_series)
    rows = trend_series(table, args.window)
    emit(trend_csv(rows), args.out, manifest)
    if args.series_corr:
        matrix = correlate_trends(rows, args.corr_method, smoothed=not args.raw_series)
        write_atomic(args.series_corr, matrix.to_csv())
        manifest.add_output(args.series_corr)
    return EXIT_OK


def cmd_rank(args, manifest: RunManifest) -> int:
    table = _read_table(args.table, manifest)
    prizes = load_prize_file(args.prizes, {r.paper for r in table.records})
    manifest.add_input(args.prizes)
    for w in prizes.warnings:
        warn(w)
    if not prizes.ids:
        raise ValidationError("no prize paper appears in the table")
    manifest.config["per_year"] = args.per_year
    emit(rank_prizes(table, prizes.ids, per_year=args.per_year).to_csv(), args.out, manifest)
    return EXIT_OK


def verification_reports(seeds: int, tol: float = 1e-12) -> list[dict]:
    """Identity checks, Brandes vs enumeration, and Pagerank vs a dense solve, per seed."""
    reports = []
    for seed in range(seeds):
        census = random_cd_census(random.Random(seed))
        g, v = random_cd_instance(seed, *census)
        name = f"cd-seed{seed}-IJKR{'-'.join(map(str, census))}"
        reports += [r.to_dict() for r in check_identities(g, v, tol, name)]

        dg = random_digraph(seed)
        fast = betweenness(dg, "raw")
        slow = brute_force_betweenness(dg, "raw")
        diff = max(abs(fast.raw_value(x) - slow[x]) for x in dg.node_ids)
        reports.append({"instance": f"digraph-seed{seed}", "identity": "brandes_vs_brute_force",
                        "left": None, "right": None, "abs_diff": diff, "passed": diff <= tol})

        pg = random_digraph(seed, max_nodes=6)
        pi = pagerank(pg, PagerankConfig()).pi
        diff = float(np.abs(pi - dense_pagerank(pg, 0.1)).max())
        reports.append({"instance": f"pagerank-seed{seed}", "identity": "power_vs_dense_solve",
                        "left": None, "right": None, "abs_diff": diff, "passed": diff <= 1e-9})
    return reports


def cmd_verify(args, manifest: RunManifest) -> int:
    manifest.config.update(seeds=args.seeds, tol=args.tol)
    with manifest.stage("verify"):
        reports = verification_reports(args.seeds, args.tol)
    failed = sum(not r["passed"] for r in reports)
    body = {"checks": len(reports), "failed": failed, "reports": reports}
    emit(json.dumps(body, indent=2, sort_keys=True) + "\n", args.out, manifest)
    if failed:
        print(f"error: {failed} of {len(reports)} oracle checks failed", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


COMMANDS = {"ingest": cmd_ingest, "slice": cmd_slice, "compute": cmd_compute,
            "correlate": cmd_correlate, "trend": cmd_trend, "rank": cmd_rank,
            "verify": cmd_verify}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    manifest = RunManifest(args.command)
    try:
        with manifest.stage("total"):
            status = COMMANDS[args.command](args, manifest)
    except (ValidationError, CitationGraphError, PagerankConvergenceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.manifest:
        write_atomic(args.manifest, manifest.to_json())
    return status


if __name__ == "__main__":
    sys.exit(main())
