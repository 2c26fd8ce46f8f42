"""Attributed graph data model and the vertex merge operation.

A graph is a triple of vertex tuples, directed unlabelled edges and an
ordered attribute schema. Vertex ids are dense and 0-based, so the i-th
entry of ``Graph.values`` is the tuple of vertex ``i``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .exceptions import InvalidGraph, SchemaError, TypeConflict, UnknownAttribute

INT64_MIN = -(1 << 63)
INT64_MAX = (1 << 63) - 1


class AttrType(str, enum.Enum):
    INT64 = "Int64"
    TEXT = "Text"

    def accepts(self, value) -> bool:
        if self is AttrType.INT64:
            return (
                isinstance(value, int)
                and not isinstance(value, bool)
                and INT64_MIN <= value <= INT64_MAX
            )
        return isinstance(value, str)


class Attribute(NamedTuple):
    name: str
    type: AttrType


@dataclass(frozen=True)
class Schema:
    """Ordered attribute list with unique names."""

    attributes: tuple[Attribute, ...] = ()

    def __init__(self, attributes: Iterable = ()):
        attrs = tuple(Attribute(name, AttrType(kind)) for name, kind in attributes)
        names = [a.name for a in attrs]
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate attribute names in {names}")
        object.__setattr__(self, "attributes", attrs)
        object.__setattr__(self, "_pos", {a.name: i for i, a in enumerate(attrs)})

    def __len__(self):
        return len(self.attributes)

    def __iter__(self):
        return iter(self.attributes)

    def __contains__(self, name):
        return name in self._pos

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)

    def index(self, name: str) -> int:
        try:
            return self._pos[name]
        except KeyError:
            raise UnknownAttribute(f"unknown attribute {name!r}") from None

    def type_of(self, name: str) -> AttrType:
        return self.attributes[self.index(name)].type

    def validate(self, values: Sequence) -> None:
        if len(values) != len(self.attributes):
            raise SchemaError(
                f"tuple has {len(values)} values, schema has {len(self.attributes)}"
            )
        for attr, value in zip(self.attributes, values):
            if not attr.type.accepts(value):
                raise SchemaError(
                    f"value {value!r} does not fit attribute {attr.name}:{attr.type.value}"
                )

    def __repr__(self):
        inner = ", ".join(f"{a.name}:{a.type.value}" for a in self.attributes)
        return f"Schema({inner})"


class VertexTuple(NamedTuple):
    id: int
    values: tuple


def schema_union(a: Schema, b: Schema) -> Schema:
    """Union of two schemas: ``a``'s attributes first, then ``b``'s unseen ones."""
    attrs = list(a.attributes)
    for attr in b.attributes:
        if attr.name in a:
            mine = a.type_of(attr.name)
            if mine is not attr.type:
                raise TypeConflict(
                    f"attribute {attr.name!r} is {mine.value} on the left "
                    f"and {attr.type.value} on the right"
                )
        else:
            attrs.append(attr)
    return Schema(attrs)


class MergePlan:
    """Precomputed positions for merging tuples of two fixed schemas.

    Joins merge many tuple pairs over the same two schemas, so the shared
    attribute positions and the right-only suffix are resolved once.
    """

    __slots__ = ("schema", "shared_left", "shared_right", "right_only")

    def __init__(self, left: Schema, right: Schema):
        self.schema = schema_union(left, right)
        shared = [name for name in right.names if name in left]
        self.shared_left = tuple(left.index(n) for n in shared)
        self.shared_right = tuple(right.index(n) for n in shared)
        self.right_only = tuple(i for i, n in enumerate(right.names) if n not in left)

    def compatible(self, left_values: Sequence, right_values: Sequence) -> bool:
        for i, j in zip(self.shared_left, self.shared_right):
            if left_values[i] != right_values[j]:
                return False
        return True

    def merge(self, left_values: Sequence, right_values: Sequence):
        if not self.compatible(left_values, right_values):
            return None
        return tuple(left_values) + tuple(right_values[j] for j in self.right_only)


def merge_vertices(
    left: Sequence, left_schema: Schema, right: Sequence, right_schema: Schema
):
    """Merge two tuples into one over the union schema.

    Returns ``None`` when the tuples disagree on a shared attribute, since
    then no tuple projects back onto both inputs.
    """
    left_values = left.values if isinstance(left, VertexTuple) else left
    right_values = right.values if isinstance(right, VertexTuple) else right
    return MergePlan(left_schema, right_schema).merge(left_values, right_values)


def project(values: Sequence, schema: Schema, onto: Schema) -> tuple:
    return tuple(values[schema.index(name)] for name in onto.names)


class Graph:
    """Immutable attributed graph with dense vertex ids.

    Parameters
    ----------
    schema : Schema or iterable of (name, type) pairs
    values : sequence of tuples, one per vertex, in id order
    edges : iterable of (source, destination) id pairs; duplicates collapse
    """

    __slots__ = ("schema", "values", "edges", "out", "_in")

    def __init__(self, schema, values: Iterable[Sequence] = (), edges: Iterable = ()):
        if not isinstance(schema, Schema):
            schema = Schema(schema)
        rows = [tuple(v) for v in values]
        for row in rows:
            schema.validate(row)
        n = len(rows)
        edge_set = set()
        for edge in edges:
            s, d = edge
            if not (0 <= s < n and 0 <= d < n):
                raise InvalidGraph(f"edge ({s}, {d}) references a missing vertex")
            edge_set.add((s, d))
        out = [[] for _ in range(n)]
        for s, d in sorted(edge_set):
            out[s].append(d)
        self.schema = schema
        self.values = rows
        self.edges = frozenset(edge_set)
        self.out = tuple(tuple(adj) for adj in out)
        self._in = None

    def __len__(self):
        return len(self.values)

    @property
    def n_vertices(self) -> int:
        return len(self.values)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def vertex(self, i: int) -> VertexTuple:
        return VertexTuple(i, self.values[i])

    def vertices(self):
        return (VertexTuple(i, v) for i, v in enumerate(self.values))

    def in_neighbors(self, i: int) -> tuple:
        if self._in is None:
            inn = [[] for _ in range(len(self.values))]
            for s, d in sorted(self.edges):
                inn[d].append(s)
            self._in = tuple(tuple(adj) for adj in inn)
        return self._in[i]

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.schema == other.schema
            and self.values == other.values
            and self.edges == other.edges
        )

    def __repr__(self):
        return f"Graph({self.schema!r}, |V|={self.n_vertices}, |E|={self.n_edges})"
