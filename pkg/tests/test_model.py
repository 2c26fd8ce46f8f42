import pytest
from hypothesis import given, strategies as st

from graphjoin import Graph, Schema, merge_vertices, schema_union
from graphjoin.exceptions import InvalidGraph, SchemaError, TypeConflict, UnknownAttribute
from graphjoin.model import AttrType, project

S1 = Schema([("User", "Text"), ("MsgTime1", "Int64")])
S2 = Schema([("User", "Text"), ("MsgTime2", "Int64")])


def test_merge_shared_attribute_agrees():
    merged = merge_vertices(("Bob", 3), S1, ("Bob", 3), S2)
    assert merged == ("Bob", 3, 3)
    assert schema_union(S1, S2).names == ("User", "MsgTime1", "MsgTime2")


def test_merge_shared_attribute_disagrees():
    assert merge_vertices(("Alice", 1), S1, ("Dan", 6), S2) is None


def test_merge_disjoint_schemas_concatenates():
    sx, sy = Schema([("X", "Int64")]), Schema([("Y", "Int64")])
    assert merge_vertices((1,), sx, (2,), sy) == (1, 2)


def test_schema_union_idempotent():
    assert schema_union(S1, S1) == S1


def test_schema_union_type_conflict():
    with pytest.raises(TypeConflict):
        schema_union(Schema([("X", "Int64")]), Schema([("X", "Text")]))


def test_schema_rejects_duplicates_and_unknown_names():
    with pytest.raises(SchemaError):
        Schema([("A", "Int64"), ("A", "Text")])
    with pytest.raises(UnknownAttribute):
        S1.index("Nope")


def test_schema_type_enforcement():
    with pytest.raises(SchemaError):
        Graph(S1, [("Bob", "3")])
    with pytest.raises(SchemaError):
        Graph(S1, [("Bob",)])
    with pytest.raises(SchemaError):
        Graph([("X", "Int64")], [(1 << 63,)])
    with pytest.raises(SchemaError):
        Graph([("X", "Int64")], [(True,)])


def test_graph_rejects_dangling_edges():
    with pytest.raises(InvalidGraph):
        Graph(S1, [("Bob", 3)], [(0, 1)])


def test_graph_collapses_duplicates_and_keeps_self_loops():
    g = Graph(S1, [("A", 1), ("B", 2)], [(0, 1), (0, 1), (1, 1), (1, 0)])
    assert g.n_edges == 3
    assert g.out == ((1,), (0, 1))
    assert g.in_neighbors(1) == (0, 1)


def test_out_adjacency_is_projection_of_edges():
    edges = {(2, 0), (0, 2), (0, 1), (2, 2)}
    g = Graph([("X", "Int64")], [(0,), (1,), (2,)], edges)
    assert {(s, d) for s in range(3) for d in g.out[s]} == edges


# ---------------------------------------------------------------- properties

NAMES = ["A", "B", "C", "D"]


@st.composite
def schema_and_tuple(draw):
    names = draw(st.lists(st.sampled_from(NAMES), unique=True, max_size=4))
    # Shared names share a type across schemas: type is fixed per name.
    kinds = {"A": "Int64", "B": "Text", "C": "Int64", "D": "Text"}
    values = tuple(
        draw(st.integers(0, 2)) if kinds[n] == "Int64" else draw(st.sampled_from("xy"))
        for n in names
    )
    return Schema([(n, kinds[n]) for n in names]), values


@given(schema_and_tuple(), schema_and_tuple())
def test_merge_round_trip_property(left, right):
    (ls, lv), (rs, rv) = left, right
    merged = merge_vertices(lv, ls, rv, rs)
    shared = set(ls.names) & set(rs.names)
    agree = all(lv[ls.index(n)] == rv[rs.index(n)] for n in shared)
    assert (merged is not None) == agree
    if merged is not None:
        union = schema_union(ls, rs)
        assert project(merged, union, ls) == lv
        assert project(merged, union, rs) == rv


@given(schema_and_tuple(), schema_and_tuple())
def test_merge_symmetric_up_to_ordering(left, right):
    (ls, lv), (rs, rv) = left, right
    forward = merge_vertices(lv, ls, rv, rs)
    backward = merge_vertices(rv, rs, lv, ls)
    assert (forward is None) == (backward is None)
    if forward is not None:
        fwd = dict(zip(schema_union(ls, rs).names, forward))
        bwd = dict(zip(schema_union(rs, ls).names, backward))
        assert fwd == bwd


def test_attr_type_accepts():
    assert AttrType.INT64.accepts(-(1 << 63))
    assert not AttrType.INT64.accepts("1")
    assert AttrType.TEXT.accepts("")
