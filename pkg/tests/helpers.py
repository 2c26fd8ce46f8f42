"""Shared builders and independent oracles for the test-suite."""
import random

from graphjoin import Graph

USER_SCHEMA_1 = [("User", "Text"), ("MsgTime1", "Int64")]
USER_SCHEMA_2 = [("User", "Text"), ("MsgTime2", "Int64")]

# Vertex ids: G1 = v2, v3, v4 -> 0, 1, 2 ; G2 = w1..w4 -> 0..3
V1_ROWS = [("Alice", 1), ("Bob", 3), ("Carl", 2)]
V2_ROWS = [("Dan", 6), ("Alice", 7), ("Bob", 3), ("Carl", 2)]
E1 = [(0, 1), (1, 0), (2, 1)]
E2 = [(0, 1), (1, 2), (2, 1), (3, 2)]


def example_graphs(rename_user=False):
    s1, s2 = list(USER_SCHEMA_1), list(USER_SCHEMA_2)
    if rename_user:
        s1[0] = ("User1", "Text")
        s2[0] = ("User2", "Text")
    return Graph(s1, V1_ROWS, E1), Graph(s2, V2_ROWS, E2)


def random_edges(rng, n, avg_degree):
    if n == 0:
        return set()
    m = int(round(rng.uniform(0, avg_degree) * n)) if avg_degree else 0
    return {(rng.randrange(n), rng.randrange(n)) for _ in range(m)}


def random_graph(rng, n, avg_degree, schema, draw):
    """Graph with ``n`` vertices whose rows come from ``draw(rng, vid)``."""
    return Graph(schema, [draw(rng, i) for i in range(n)], random_edges(rng, n, avg_degree))


def bare_graph(rng, n, avg_degree, name="X"):
    return random_graph(rng, n, avg_degree, [(name, "Int64")], lambda r, i: (i,))


def log_uniform_size(rng, lo=1, hi=500):
    import math

    return int(round(math.exp(rng.uniform(math.log(lo), math.log(hi)))))


# ---------------------------------------------------------------- oracle


def definition_join(g1, g2, theta, op="and"):
    """Literal transcription of the join definition.

    ``theta(u_values_dict, v_values_dict, u_id, v_id) -> bool``. Tuples are
    merged through name -> value dictionaries, and edges are found by
    testing every ordered pair of result vertices. Returns
    ``(vertices, edges)``: ``vertices`` maps provenance pairs to merged
    name -> value dicts, ``edges`` is a set of provenance-pair pairs.
    """
    n1, n2 = g1.schema.names, g2.schema.names
    vertices = {}
    for i, lv in enumerate(g1.values):
        u = dict(zip(n1, lv))
        for j, rv in enumerate(g2.values):
            v = dict(zip(n2, rv))
            if not theta(u, v, i, j):
                continue
            if any(u[k] != v[k] for k in u.keys() & v.keys()):
                continue
            merged = dict(u)
            merged.update(v)
            vertices[(i, j)] = merged
    e1, e2 = set(g1.edges), set(g2.edges)
    edges = set()
    for a in vertices:
        for b in vertices:
            left = (a[0], b[0]) in e1
            right = (a[1], b[1]) in e2
            if (left and right) if op == "and" else (left or right):
                edges.add((a, b))
    return vertices, edges


def as_definition(result):
    """Project a BulkGraph onto the oracle's (vertices, edges) shape."""
    names = result.schema.names
    vertices = {pair: dict(zip(names, values)) for pair, values in zip(result.pairs, result.values)}
    return vertices, set(result.provenance_edges())


def seeded(seed):
    return random.Random(seed)
