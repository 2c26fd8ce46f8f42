"""Dataset pipeline: edge-list parsing, attribute enrichment, random-walk sampling."""
from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

from .exceptions import AlreadyEnriched, ParseError, Unreachable
from .model import AttrType, Graph

PROVENANCE_FILE = "provenance.tsv"


@dataclass(frozen=True)
class EnrichmentConfig:
    seed: int = 0
    organizations: int = 50
    year_range: tuple[int, int] = (1990, 2016)
    attr_suffix: str = "1"

    def __post_init__(self):
        if self.organizations < 1:
            raise ValueError("organizations must be >= 1")
        lo, hi = self.year_range
        if lo > hi:
            raise ValueError(f"empty year range {self.year_range}")
        if str(self.attr_suffix) not in ("1", "2"):
            raise ValueError("attr_suffix must be 1 or 2")


@dataclass(frozen=True)
class SampleConfig:
    start_vertex: int = 0
    walk_seed: int = 0
    target_size: int = 10
    restart_probability: float = 0.15
    budget_factor: int = 100


@dataclass
class Sample:
    """A sampled subgraph plus ``provenance[dense_id] = source_id``."""

    graph: Graph
    provenance: list


def parse_edge_list(path):
    """Parse a SNAP-style edge list.

    Returns ``(graph, original_ids)`` where ``original_ids[dense]`` is the
    id used in the file. Dense ids follow first appearance order.
    """
    dense = {}
    original = []
    edges = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) < 2:
                raise ParseError(f"expected two vertex ids, got {text!r}", lineno)
            try:
                src, dst = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(f"non-integer vertex id in {text!r}", lineno) from None
            ids = []
            for raw in (src, dst):
                vid = dense.get(raw)
                if vid is None:
                    vid = dense[raw] = len(original)
                    original.append(raw)
                ids.append(vid)
            edges.add((ids[0], ids[1]))
    return Graph((), [()] * len(original), edges), original


def _vertex_rng(seed: int, vid: int) -> random.Random:
    return random.Random((seed & 0xFFFFFFFFFFFFFFFF) << 64 | vid)


def enrich(g: Graph, cfg: EnrichmentConfig) -> Graph:
    """Attach IP, Organization and Year attributes to an attribute-less graph.

    Each vertex draws from its own generator keyed by ``(seed, id)``, so a
    vertex receives the same values whatever graph it sits in.
    """
    if len(g.schema):
        raise AlreadyEnriched(f"graph already has attributes {g.schema.names}")
    sfx = cfg.attr_suffix
    lo, hi = cfg.year_range
    schema = [
        (f"IP{sfx}", AttrType.TEXT),
        (f"Organization{sfx}", AttrType.TEXT),
        (f"Year{sfx}", AttrType.INT64),
    ]
    rows = []
    for vid in range(g.n_vertices):
        rng = _vertex_rng(cfg.seed, vid)
        ip = ".".join(str(rng.randrange(256)) for _ in range(4))
        org = f"Org{rng.randrange(cfg.organizations)}"
        year = rng.randint(lo, hi)
        rows.append((ip, org, year))
    return Graph(schema, rows, g.edges)


def induced_subgraph(g: Graph, vertices) -> Sample:
    """Subgraph induced by ``vertices``, re-identified densely in the given order."""
    keep = list(vertices)
    new_id = {old: new for new, old in enumerate(keep)}
    edges = []
    for old in keep:
        s = new_id[old]
        for d in g.out[old]:
            t = new_id.get(d)
            if t is not None:
                edges.append((s, t))
    return Sample(Graph(g.schema, [g.values[old] for old in keep], edges), keep)


def random_walk_sample(g: Graph, cfg: SampleConfig) -> Sample:
    """Collect ``cfg.target_size`` distinct vertices with a restarting random walk.

    The walk follows a uniformly chosen out-edge; it jumps back to the
    start vertex on a sink or with probability ``cfg.restart_probability``.
    Vertices keep their discovery order in the returned sample.
    """
    n = g.n_vertices
    if not 0 <= cfg.start_vertex < n:
        raise ValueError(f"start vertex {cfg.start_vertex} not in graph of {n} vertices")
    if not 1 <= cfg.target_size <= n:
        raise ValueError(f"target size {cfg.target_size} outside [1, {n}]")
    avg_degree = max(1.0, g.n_edges / n)
    budget = int(cfg.budget_factor * cfg.target_size * avg_degree)
    rng = random.Random(cfg.walk_seed)
    start = cfg.start_vertex
    seen = {start}
    visited = [start]
    current = start
    steps = 0
    while len(visited) < cfg.target_size:
        if steps >= budget:
            raise Unreachable(
                f"walk budget of {budget} steps exhausted before {cfg.target_size} vertices",
                len(visited),
            )
        steps += 1
        out = g.out[current]
        if not out or rng.random() < cfg.restart_probability:
            current = start
            continue
        current = out[rng.randrange(len(out))]
        if current not in seen:
            seen.add(current)
            visited.append(current)
    return induced_subgraph(g, visited)


def write_provenance(path, provenance) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("denseId\toriginalId\n")
        for dense, orig in enumerate(provenance):
            fh.write(f"{dense}\t{orig}\n")


def read_provenance(path) -> list:
    with open(path, "r", encoding="utf-8") as fh:
        next(fh)
        return [int(line.split("\t")[1]) for line in fh if line.strip()]


def write_edge_list(g: Graph, path, original_ids=None) -> None:
    with open(Path(path), "w", encoding="utf-8") as fh:
        for s, d in sorted(g.edges):
            if original_ids is not None:
                s, d = original_ids[s], original_ids[d]
            fh.write(f"{s}\t{d}\n")
