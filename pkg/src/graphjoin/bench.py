"""Benchmark harness: operand construction, trimmed-mean timing, CSV reports."""
from __future__ import annotations

import csv
import logging
import shutil
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

from .ingest import EnrichmentConfig, SampleConfig, enrich, parse_edge_list, random_walk_sample
from .join import basic_join, cogrouped_join
from .predicates import LEFT, RIGHT, derive_hash_spec
from .storage import block_size_kb, build_index
from .validation import check_run_count, check_theta

log = logging.getLogger(__name__)

TRIM_POLICY = "drop-1-min-1-max"
CSV_COLUMNS = (
    "left_size",
    "right_size",
    "result_vertices",
    "avg_multiplicity",
    "store_index_ms_left",
    "store_index_ms_right",
    "join_ms_cogrouped",
    "join_ms_basic",
    "block_kb_left",
    "block_kb_right",
    "runs",
    "trim",
    "status",
)


def trimmed_mean(samples) -> float:
    """Mean after removing exactly one smallest and one largest sample."""
    values = sorted(samples)
    if len(values) < 3:
        raise ValueError(f"need at least 3 samples to trim, got {len(values)}")
    kept = values[1:-1]
    return sum(kept) / len(kept)


@dataclass
class BenchReport:
    left_size: int
    right_size: int
    result_vertices: int = 0
    avg_multiplicity: float = 0.0
    store_index_ms: tuple = (float("nan"), float("nan"))
    join_ms: dict = field(default_factory=dict)
    block_kb: tuple = (0.0, 0.0)
    runs: int = 0
    trim: str = TRIM_POLICY
    status: str = "ok"

    def row(self) -> dict:
        def fmt(x):
            return "" if x is None or x != x else f"{x:.3f}"

        return {
            "left_size": self.left_size,
            "right_size": self.right_size,
            "result_vertices": self.result_vertices,
            "avg_multiplicity": f"{self.avg_multiplicity:.6f}",
            "store_index_ms_left": fmt(self.store_index_ms[0]),
            "store_index_ms_right": fmt(self.store_index_ms[1]),
            "join_ms_cogrouped": fmt(self.join_ms.get("cogrouped")),
            "join_ms_basic": fmt(self.join_ms.get("basic")),
            "block_kb_left": f"{self.block_kb[0]:.0f}",
            "block_kb_right": f"{self.block_kb[1]:.0f}",
            "runs": self.runs,
            "trim": self.trim,
            "status": self.status,
        }


def write_csv(reports, fh) -> None:
    writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for report in reports:
        writer.writerow(report.row())


def build_operands(source, size, *, start_vertex=0, left_seed=1, right_seed=2,
                   enrich_seed=0, organizations=50, year_range=(1990, 2016)):
    """Left and right operands of ``size`` vertices from one source graph.

    Both walks start at the same vertex with different seeds. The source is
    enriched once per attribute suffix with the same seed, so a source
    vertex carries identical values in both operands.
    """
    left_src = enrich(source, EnrichmentConfig(enrich_seed, organizations, year_range, "1"))
    right_src = enrich(source, EnrichmentConfig(enrich_seed, organizations, year_range, "2"))
    left = random_walk_sample(left_src, SampleConfig(start_vertex, left_seed, size)).graph
    right = random_walk_sample(right_src, SampleConfig(start_vertex, right_seed, size)).graph
    return left, right


class _Deadline(Exception):
    pass


def measure(left, right, theta, *, runs=10, algorithms=("cogrouped", "basic"),
            timeout_secs=4 * 3600.0, block_size=4096, workdir=None) -> BenchReport:
    """Time store+index and join over ``runs`` repetitions of fresh indexes."""
    runs = check_run_count(runs)
    theta = check_theta(theta, left.schema, right.schema)
    spec = derive_hash_spec(theta, left.schema, right.schema)
    report = BenchReport(left.n_vertices, right.n_vertices, runs=runs)
    deadline = time.monotonic() + timeout_secs
    store = ([], [])
    joins = {name: [] for name in algorithms}

    def check_deadline():
        if time.monotonic() > deadline:
            raise _Deadline

    try:
        for _ in range(runs):
            root = Path(tempfile.mkdtemp(prefix="gjbench-", dir=workdir))
            try:
                indexed = []
                for k, (g, side) in enumerate(((left, LEFT), (right, RIGHT))):
                    start = time.perf_counter()
                    indexed.append(build_index(g, spec, side, root / side))
                    store[k].append((time.perf_counter() - start) * 1000.0)
                    check_deadline()
                report.block_kb = (
                    block_size_kb(root / LEFT, block_size),
                    block_size_kb(root / RIGHT, block_size),
                )
                for name in algorithms:
                    start = time.perf_counter()
                    if name == "cogrouped":
                        result = cogrouped_join(indexed[0], indexed[1], theta)
                    else:
                        result = basic_join(left, right, theta)
                    joins[name].append((time.perf_counter() - start) * 1000.0)
                    report.result_vertices = result.n_vertices
                    report.avg_multiplicity = result.multiplicity(LEFT)
                    del result
                    check_deadline()
                for ig in indexed:
                    ig.close()
            finally:
                shutil.rmtree(root, ignore_errors=True)
    except _Deadline:
        report.status = "timeout"
        log.warning("size %d x %d hit the %.0fs timeout", left.n_vertices,
                    right.n_vertices, timeout_secs)
        return report

    report.store_index_ms = (trimmed_mean(store[0]), trimmed_mean(store[1]))
    report.join_ms = {name: trimmed_mean(samples) for name, samples in joins.items()}
    return report


def run_benchmark(source_edge_list, sizes, predicate, runs=10, *,
                  algorithms=("cogrouped", "basic"), start_vertex=0, left_seed=1,
                  right_seed=2, enrich_seed=0, organizations=50,
                  year_range=(1990, 2016), timeout_secs=4 * 3600.0, block_size=4096,
                  workdir=None):
    """One report row per operand size, mirroring the store/join timing tables."""
    runs = check_run_count(runs)
    sizes = list(sizes)
    if sizes != sorted(sizes):
        raise ValueError(f"sizes must be ascending, got {sizes}")
    source, _ = parse_edge_list(source_edge_list)
    reports = []
    for size in sizes:
        try:
            left, right = build_operands(
                source, size, start_vertex=start_vertex, left_seed=left_seed,
                right_seed=right_seed, enrich_seed=enrich_seed,
                organizations=organizations, year_range=year_range,
            )
            report = measure(left, right, predicate, runs=runs, algorithms=algorithms,
                             timeout_secs=timeout_secs, block_size=block_size,
                             workdir=workdir)
        except Exception as exc:
            log.error("size %d failed: %s", size, exc)
            report = BenchReport(size, size, runs=runs, status=f"failed: {exc}")
        reports.append(report)
    return reports
