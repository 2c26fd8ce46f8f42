"""Append-only adjacency-list container for join results."""
from __future__ import annotations

from collections import Counter

from .model import Graph, Schema


class BulkGraph:
    """Join result keyed by ``(left_id, right_id)`` provenance pairs.

    Result ids are dense and assigned at first insertion; ``add_vertex``
    on a known pair returns the existing id, which is how the neighbour
    expansion and the outer scan of the cogrouped joins stay idempotent.
    """

    def __init__(self, schema: Schema):
        self.schema = schema
        self.pairs = []
        self.values = []
        self.adjacency = []
        self._ids = {}
        self._edges = set()

    def __len__(self):
        return len(self.pairs)

    @property
    def n_vertices(self) -> int:
        return len(self.pairs)

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    def lookup(self, left_id: int, right_id: int):
        return self._ids.get((left_id, right_id))

    def add_vertex(self, left_id: int, right_id: int, values) -> int:
        key = (left_id, right_id)
        rid = self._ids.get(key)
        if rid is None:
            rid = len(self.pairs)
            self._ids[key] = rid
            self.pairs.append(key)
            self.values.append(values)
            self.adjacency.append([])
        return rid

    def add_edge(self, source: int, target: int) -> None:
        key = (source, target)
        if key not in self._edges:
            self._edges.add(key)
            self.adjacency[source].append(target)

    def edges(self):
        for source, targets in enumerate(self.adjacency):
            for target in targets:
                yield source, target

    # ------------------------------------------------------------ views

    def provenance_pairs(self) -> frozenset:
        return frozenset(self.pairs)

    def provenance_edges(self) -> frozenset:
        pairs = self.pairs
        return frozenset((pairs[s], pairs[t]) for s, t in self._edges)

    def same_as(self, other: "BulkGraph") -> bool:
        """Equal as graphs: same provenance pairs, tuples and edges."""
        if self.provenance_pairs() != other.provenance_pairs():
            return False
        if self.provenance_edges() != other.provenance_edges():
            return False
        mine = dict(zip(self.pairs, self.values))
        return all(mine[p] == v for p, v in zip(other.pairs, other.values))

    def multiplicity(self, side: str = "left") -> float:
        """Mean number of result vertices per participating operand vertex."""
        if not self.pairs:
            return 0.0
        slot = 0 if side == "left" else 1
        counts = Counter(pair[slot] for pair in self.pairs)
        return len(self.pairs) / len(counts)

    def canonical_order(self):
        """Result ids sorted by provenance pair."""
        return sorted(range(len(self.pairs)), key=self.pairs.__getitem__)

    def to_graph(self, canonical: bool = False) -> Graph:
        """Re-ingestible graph over the union schema, for join composition."""
        if not canonical:
            return Graph(self.schema, self.values, self._edges)
        order = self.canonical_order()
        new_id = {old: new for new, old in enumerate(order)}
        return Graph(
            self.schema,
            [self.values[old] for old in order],
            ((new_id[s], new_id[t]) for s, t in self._edges),
        )

    def export_text(self, fh, canonical: bool = True) -> None:
        """Write the vertex table and edge list as tab-separated text.

        With ``canonical`` the vertices are renumbered in provenance order,
        so results of different algorithms on the same input are
        byte-identical.
        """
        order = self.canonical_order() if canonical else list(range(len(self.pairs)))
        new_id = {old: new for new, old in enumerate(order)}
        names = self.schema.names
        fh.write("#vertices\tresultId\tleftId\trightId\tattributes\n")
        for new, old in enumerate(order):
            left_id, right_id = self.pairs[old]
            attrs = ",".join(f"{n}={v}" for n, v in zip(names, self.values[old]))
            fh.write(f"{new}\t{left_id}\t{right_id}\t{attrs}\n")
        fh.write("#edges\tsource\ttarget\n")
        for s, t in sorted((new_id[s], new_id[t]) for s, t in self._edges):
            fh.write(f"{s}\t{t}\n")

    def __repr__(self):
        return f"BulkGraph(|V|={self.n_vertices}, |E|={self.n_edges})"
