import io
import random

import pytest
from hypothesis import given, strategies as st

from graphjoin.bench import (
    CSV_COLUMNS,
    BenchReport,
    build_operands,
    measure,
    run_benchmark,
    trimmed_mean,
    write_csv,
)

from helpers import bare_graph, seeded


@given(st.lists(st.integers(-1000, 1000), min_size=3, max_size=30))
def test_trimmed_mean_drops_one_min_and_one_max(samples):
    rest = list(samples)
    rest.remove(min(rest))
    rest.remove(max(rest))
    assert trimmed_mean(samples) == pytest.approx(sum(rest) / len(rest))


def test_trimmed_mean_ties():
    assert trimmed_mean([1, 1, 1, 5, 5]) == pytest.approx(7 / 3)
    with pytest.raises(ValueError):
        trimmed_mean([1, 2])


def test_csv_header_is_stable():
    buf = io.StringIO()
    write_csv([BenchReport(10, 10, runs=3)], buf)
    header = buf.getvalue().splitlines()[0]
    assert header == (
        "left_size,right_size,result_vertices,avg_multiplicity,store_index_ms_left,"
        "store_index_ms_right,join_ms_cogrouped,join_ms_basic,block_kb_left,"
        "block_kb_right,runs,trim,status"
    )
    assert tuple(header.split(",")) == CSV_COLUMNS


@pytest.fixture(scope="module")
def source_file(tmp_path_factory):
    g = bare_graph(seeded(17), 400, 6)
    path = tmp_path_factory.mktemp("src") / "edges.txt"
    path.write_text("".join(f"{s} {d}\n" for s, d in sorted(g.edges)))
    return path


def test_run_benchmark_two_sizes(source_file):
    reports = run_benchmark(source_file, [10, 100], "eq:Year1=Year2,Organization1=Organization2",
                            runs=3)
    assert [r.left_size for r in reports] == [10, 100]
    for r in reports:
        assert r.status == "ok"
        assert r.store_index_ms[0] >= 0 and r.store_index_ms[1] >= 0
        assert set(r.join_ms) == {"cogrouped", "basic"}
        assert all(t >= 0 for t in r.join_ms.values())
        assert r.block_kb[0] > 0
    buf = io.StringIO()
    write_csv(reports, buf)
    assert len(buf.getvalue().splitlines()) == 3


def test_run_benchmark_rejects_two_runs(source_file):
    with pytest.raises(ValueError):
        run_benchmark(source_file, [10], "eq:Year1=Year2", runs=2)


def test_run_benchmark_rejects_descending_sizes(source_file):
    with pytest.raises(ValueError):
        run_benchmark(source_file, [100, 10], "eq:Year1=Year2", runs=3)


def test_failed_size_marks_row_without_aborting(source_file):
    reports = run_benchmark(source_file, [10, 10_000], "eq:Year1=Year2", runs=3)
    assert reports[0].status == "ok"
    assert reports[1].status.startswith("failed")


def test_timeout_marks_row(source_file):
    reports = run_benchmark(source_file, [100], "eq:Year1=Year2", runs=3, timeout_secs=0.0)
    assert reports[0].status == "timeout"


def test_operands_share_start_and_differ_by_seed():
    g = bare_graph(seeded(3), 300, 5)
    from graphjoin import Graph

    ring = {(i, (i + 1) % len(g)) for i in range(len(g))}
    src = Graph((), [()] * len(g), g.edges | ring)
    left, right = build_operands(src, 50, left_seed=1, right_seed=2)
    assert left.schema.names == ("IP1", "Organization1", "Year1")
    assert right.schema.names == ("IP2", "Organization2", "Year2")
    # vertex 0 of both samples is the shared start vertex
    assert left.values[0] == right.values[0]
    assert left.values != right.values


def test_measure_reports_leq(tmp_path):
    rng = random.Random(1)
    from graphjoin import Graph

    g1 = Graph([("A", "Int64")], [(rng.randint(0, 3),) for _ in range(20)])
    g2 = Graph([("B", "Int64")], [(rng.randint(0, 3),) for _ in range(20)])
    report = measure(g1, g2, "leq:A<=B", runs=3, algorithms=("cogrouped",))
    assert report.status == "ok" and report.result_vertices > 0
    assert "basic" not in report.join_ms
