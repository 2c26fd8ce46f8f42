"""Command line entry point: ``graphjoin <subcommand> ...``."""
from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from pathlib import Path

from . import bench
from .exceptions import GraphJoinError, SpecMismatch
from .ingest import (
    PROVENANCE_FILE,
    EnrichmentConfig,
    SampleConfig,
    enrich,
    parse_edge_list,
    random_walk_sample,
    write_provenance,
)
from .join import basic_join, cogrouped_join
from .predicates import derive_side_spec
from .storage import IndexedGraph, block_size_kb, build_index, load_graph, save_graph
from .validation import check_semantics, check_theta

EXIT_USAGE = 2
EXIT_SPEC_MISMATCH = 3


class CliError(Exception):
    def __init__(self, message, code=EXIT_USAGE):
        super().__init__(message)
        self.code = code


def _ms_since(start):
    return (time.perf_counter() - start) * 1000.0


def cmd_parse(args):
    g, original = parse_edge_list(args.edge_list)
    save_graph(g, args.out)
    write_provenance(Path(args.out) / PROVENANCE_FILE, original)
    print(f"vertices={g.n_vertices} edges={g.n_edges}")


def cmd_enrich(args):
    g = load_graph(args.graph)
    cfg = EnrichmentConfig(args.seed, args.organizations, (args.year_min, args.year_max),
                           args.suffix)
    enriched = enrich(g, cfg)
    save_graph(enriched, args.out)
    print(f"vertices={enriched.n_vertices} attributes={','.join(enriched.schema.names)}")


def cmd_sample(args):
    g = load_graph(args.graph)
    if not 1 <= args.size <= g.n_vertices:
        raise CliError(f"--size {args.size} outside [1, {g.n_vertices}]")
    cfg = SampleConfig(args.start, args.seed, args.size, args.restart_probability)
    sample = random_walk_sample(g, cfg)
    save_graph(sample.graph, args.out)
    write_provenance(Path(args.out) / PROVENANCE_FILE, sample.provenance)
    print(f"vertices={sample.graph.n_vertices} edges={sample.graph.n_edges}")


def cmd_index(args):
    g = load_graph(args.graph)
    theta = check_theta(args.predicate)
    spec = derive_side_spec(theta, g.schema, args.side)
    start = time.perf_counter()
    build_index(g, spec, args.side, args.out).close()
    print(f"store_index_ms={_ms_since(start):.3f}")


def cmd_join(args):
    semantics = check_semantics(args.semantics, args.algorithm)
    left = IndexedGraph(args.left)
    right = IndexedGraph(args.right)
    try:
        theta = check_theta(args.predicate, left.schema, right.schema)
        start = time.perf_counter()
        if args.algorithm == "cogrouped":
            result = cogrouped_join(left, right, theta)
        else:
            result = basic_join(left.to_graph(), right.to_graph(), theta, semantics)
        elapsed = _ms_since(start)
    finally:
        left.close()
        right.close()
    if args.export:
        with open(args.export, "w", encoding="utf-8", newline="\n") as fh:
            result.export_text(fh, canonical=not args.raw_ids)
    print(f"join_ms={elapsed:.3f} vertices={result.n_vertices} edges={result.n_edges} "
          f"avg_multiplicity={result.multiplicity('left'):.6f}")


def cmd_bench(args):
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    algorithms = tuple(a.strip() for a in args.algorithms.split(",") if a.strip())
    reports = bench.run_benchmark(
        args.edge_list, sizes, args.predicate, args.runs, algorithms=algorithms,
        start_vertex=args.start, left_seed=args.left_seed, right_seed=args.right_seed,
        enrich_seed=args.seed, organizations=args.organizations,
        year_range=(args.year_min, args.year_max), timeout_secs=args.timeout_secs,
        block_size=args.block_size,
    )
    _emit(args.out, lambda fh: bench.write_csv(reports, fh))


STATS_COLUMNS = ("graph", "vertices", "edges", "hashes", "hash_spec", "block_kb")


def cmd_stats(args):
    def write(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(STATS_COLUMNS)
        for path in args.graphs:
            with IndexedGraph(path) as ig:
                edges = sum(len(out) for _, _, out, _ in ig.scan())
                writer.writerow([Path(path).name, ig.n_vertices, edges, ig.n_hashes,
                                 ig.fingerprint, f"{block_size_kb(path, args.block_size):.0f}"])

    _emit(args.out, write)


def _emit(out, writer):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            writer(fh)
    else:
        writer(sys.stdout)


def build_parser():
    parser = argparse.ArgumentParser(prog="graphjoin", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="edge list -> graph directory")
    p.add_argument("edge_list")
    p.add_argument("out")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("enrich", help="attach IP/Organization/Year attributes")
    p.add_argument("graph")
    p.add_argument("out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--organizations", type=int, default=50)
    p.add_argument("--year-min", type=int, default=1990)
    p.add_argument("--year-max", type=int, default=2016)
    p.add_argument("--suffix", choices=("1", "2"), default="1")
    p.set_defaults(func=cmd_enrich)

    p = sub.add_parser("sample", help="random-walk sample of a graph directory")
    p.add_argument("graph")
    p.add_argument("out")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--restart-probability", type=float, default=0.15)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("index", help="hash-sort a graph for one side of a predicate")
    p.add_argument("graph")
    p.add_argument("out")
    p.add_argument("--predicate", required=True)
    p.add_argument("--side", choices=("left", "right"), default="left")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("join", help="join two indexed graph directories")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--predicate", required=True)
    p.add_argument("--algorithm", choices=("basic", "cogrouped"), default="cogrouped")
    p.add_argument("--semantics", choices=("and", "or"), default="and")
    p.add_argument("--export")
    p.add_argument("--raw-ids", action="store_true",
                   help="keep insertion-order result ids in the export")
    p.set_defaults(func=cmd_join)

    p = sub.add_parser("bench", help="trimmed-mean benchmark over power-of-10 sizes")
    p.add_argument("edge_list")
    p.add_argument("--sizes", default="10,100,1000")
    p.add_argument("--predicate", default="eq:Year1=Year2,Organization1=Organization2")
    p.add_argument("--algorithms", default="cogrouped,basic")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0, help="enrichment seed")
    p.add_argument("--left-seed", type=int, default=1)
    p.add_argument("--right-seed", type=int, default=2)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--organizations", type=int, default=50)
    p.add_argument("--year-min", type=int, default=1990)
    p.add_argument("--year-max", type=int, default=2016)
    p.add_argument("--timeout-secs", type=float, default=4 * 3600.0)
    p.add_argument("--block-size", type=int, default=4096)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("stats", help="CSV summary of graph directories")
    p.add_argument("graphs", nargs="+")
    p.add_argument("--block-size", type=int, default=4096)
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except SpecMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC_MISMATCH
    except (GraphJoinError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
