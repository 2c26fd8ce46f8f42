"""Graph join algorithms.

``basic_join`` evaluates the join definition over every vertex pair and
serves any predicate under either edge semantics. The two cogrouped joins
work on hash-sorted operands and only compare vertices whose hashes can
match; they implement the conjunctive semantics only.
"""
from __future__ import annotations

import enum
from collections import defaultdict

from .bulk import BulkGraph
from .exceptions import SpecMismatch, UnsupportedPredicate
from .model import Graph, MergePlan
from .predicates import (
    EquiConjunction,
    LessEqual,
    LEFT,
    RIGHT,
    derive_hash_spec,
    eval_theta,
    key_functions,
    validate_theta,
)
from .storage import IndexedGraph


class JoinSemantics(str, enum.Enum):
    CONJUNCTIVE = "and"
    DISJUNCTIVE = "or"


CONJUNCTIVE = JoinSemantics.CONJUNCTIVE
DISJUNCTIVE = JoinSemantics.DISJUNCTIVE


def _pair_matches(theta, g1: Graph, g2: Graph, plan: MergePlan):
    """Yield ``(left_id, right_id)`` for every pair passing theta and the merge test.

    Every pair of V1 x V2 is examined. Key-comparable predicates are
    evaluated on precomputed key tuples, which keeps the scan linear in
    the number of pairs without skipping any of them.
    """
    keys = key_functions(theta, g1.schema, g2.schema)
    sl, sr = plan.shared_left, plan.shared_right
    if keys is not None:
        lkey, rkey, op = keys
        rows = [
            (rkey(v), tuple(v[j] for j in sr)) for v in g2.values
        ]
        for i, u in enumerate(g1.values):
            a = lkey(u)
            s = tuple(u[k] for k in sl)
            if op == "eq":
                probe = (a, s)
                for j, row in enumerate(rows):
                    if row == probe:
                        yield i, j
            else:
                for j, (b, t) in enumerate(rows):
                    if a <= b and t == s:
                        yield i, j
        return
    right_vertices = list(g2.vertices())
    for u in g1.vertices():
        for v in right_vertices:
            if eval_theta(theta, u, v, g1.schema, g2.schema) and plan.compatible(
                u.values, v.values
            ):
                yield u.id, v.id


def basic_join(g1: Graph, g2: Graph, theta, semantics=CONJUNCTIVE) -> BulkGraph:
    """Join two in-memory graphs by exhaustive vertex-pair evaluation."""
    semantics = JoinSemantics(semantics)
    validate_theta(theta, g1.schema, g2.schema)
    plan = MergePlan(g1.schema, g2.schema)
    result = BulkGraph(plan.schema)
    for i, j in _pair_matches(theta, g1, g2, plan):
        result.add_vertex(i, j, plan.merge(g1.values[i], g2.values[j]))

    # An edge (l+r, ll+rr) needs (l, ll) in E1 op (r, rr) in E2 with both
    # endpoints in the vertex join; enumerating from the operand
    # adjacency finds exactly those pairs without a |V|^2 sweep.
    pairs = result.pairs
    if semantics is CONJUNCTIVE:
        for rid, (l, r) in enumerate(pairs):
            out2 = g2.out[r]
            for ll in g1.out[l]:
                for rr in out2:
                    target = result.lookup(ll, rr)
                    if target is not None:
                        result.add_edge(rid, target)
    else:
        by_left = defaultdict(list)
        by_right = defaultdict(list)
        for rid, (l, r) in enumerate(pairs):
            by_left[l].append(rid)
            by_right[r].append(rid)
        for rid, (l, r) in enumerate(pairs):
            targets = set()
            for ll in g1.out[l]:
                targets.update(by_left.get(ll, ()))
            for rr in g2.out[r]:
                targets.update(by_right.get(rr, ()))
            for target in sorted(targets):
                result.add_edge(rid, target)
    return result


def _check_operands(g1: IndexedGraph, g2: IndexedGraph, theta):
    spec = derive_hash_spec(theta, g1.schema, g2.schema)
    for operand, side in ((g1, LEFT), (g2, RIGHT)):
        expected = spec.fingerprint(side)
        if operand.fingerprint != expected:
            raise SpecMismatch(
                f"{side} operand {operand.path} is indexed as {operand.fingerprint!r}, "
                f"join needs {expected!r}"
            )
    return spec


class _Decoded:
    """Per-join memo of decoded operand vertices, keyed by id."""

    __slots__ = ("graph", "values", "out")

    def __init__(self, graph: IndexedGraph):
        self.graph = graph
        self.values = {}
        self.out = {}

    def remember(self, vid, values, out_ids):
        self.values[vid] = values
        self.out[vid] = out_ids

    def get(self, vid):
        values = self.values.get(vid)
        if values is None:
            vertex, out_ids, _ = self.graph.vertex_by_id(vid)
            values = vertex.values
            self.values[vid] = values
            self.out[vid] = out_ids
        return values


def cogrouped_equijoin(g1: IndexedGraph, g2: IndexedGraph, theta: EquiConjunction) -> BulkGraph:
    """Conjunctive equi-join over hash-sorted operands.

    Only hash groups present in both operands are visited. Inside a group
    every left/right pair is tested against theta and the merge condition;
    for each surviving pair the out-neighbours are paired up, skipping
    neighbours whose hash is not shared by both operands or differs
    between the two sides.
    """
    if not isinstance(theta, EquiConjunction):
        raise UnsupportedPredicate("cogrouped_equijoin needs an equality predicate")
    _check_operands(g1, g2, theta)
    plan = MergePlan(g1.schema, g2.schema)
    lkey, rkey, _ = key_functions(theta, g1.schema, g2.schema)
    sl, sr = plan.shared_left, plan.shared_right

    def passes(u, v):
        if lkey(u) != rkey(v):
            return False
        for i, j in zip(sl, sr):
            if u[i] != v[j]:
                return False
        return True

    result = BulkGraph(plan.schema)
    shared = sorted(set(g1.hash_values()) & set(g2.hash_values()))
    hi = set(shared)
    lhash = g1.vertex_hashes()
    rhash = g2.vertex_hashes()
    left = _Decoded(g1)
    right = _Decoded(g2)

    for hc in shared:
        rgroup = []
        for vid, vertex, out_ids in g2.vertices_by_hash(hc):
            right.remember(vid, vertex.values, out_ids)
            rgroup.append((vid, vertex.values, out_ids))
        for uid, uvertex, uout in g1.vertices_by_hash(hc):
            u = uvertex.values
            left.remember(uid, u, uout)
            for vid, v, vout in rgroup:
                if not passes(u, v):
                    continue
                src = result.lookup(uid, vid)
                if src is None:
                    src = result.add_vertex(uid, vid, plan.merge(u, v))
                for nu in uout:
                    hnu = lhash[nu]
                    if hnu not in hi:
                        continue
                    nu_values = None
                    for nv in vout:
                        if rhash[nv] != hnu:
                            continue
                        if nu_values is None:
                            nu_values = left.get(nu)
                        nv_values = right.get(nv)
                        if not passes(nu_values, nv_values):
                            continue
                        dst = result.lookup(nu, nv)
                        if dst is None:
                            dst = result.add_vertex(nu, nv, plan.merge(nu_values, nv_values))
                        result.add_edge(src, dst)
    return result


def cogrouped_leq_join(g1: IndexedGraph, g2: IndexedGraph, theta: LessEqual) -> BulkGraph:
    """Conjunctive less-equal join over monotone-hash-sorted operands.

    Left hashes are scanned in ascending order and, for each left vertex,
    right hashes in descending order; the inner scan stops at the first
    right hash below the left one, since monotonicity rules out every
    remaining group.
    """
    if not isinstance(theta, LessEqual):
        raise UnsupportedPredicate("cogrouped_leq_join needs a less-equal predicate")
    _check_operands(g1, g2, theta)
    plan = MergePlan(g1.schema, g2.schema)
    i = g1.schema.index(theta.left_attr)
    j = g2.schema.index(theta.right_attr)
    sl, sr = plan.shared_left, plan.shared_right

    def passes(u, v):
        if u[i] > v[j]:
            return False
        for a, b in zip(sl, sr):
            if u[a] != v[b]:
                return False
        return True

    result = BulkGraph(plan.schema)
    left = _Decoded(g1)
    right = _Decoded(g2)
    right_hashes = list(g2.hash_values(descending=True))
    right_groups = {}

    def right_group(hr):
        group = right_groups.get(hr)
        if group is None:
            group = []
            for vid, vertex, out_ids in g2.vertices_by_hash(hr):
                right.remember(vid, vertex.values, out_ids)
                group.append((vid, vertex.values, out_ids))
            right_groups[hr] = group
        return group

    for hl in g1.hash_values():
        for uid, uvertex, uout in g1.vertices_by_hash(hl):
            u = uvertex.values
            left.remember(uid, u, uout)
            for hr in right_hashes:
                if hl > hr:
                    break
                for vid, v, vout in right_group(hr):
                    if not passes(u, v):
                        continue
                    src = result.lookup(uid, vid)
                    if src is None:
                        src = result.add_vertex(uid, vid, plan.merge(u, v))
                    for nu in uout:
                        nu_values = left.get(nu)
                        for nv in vout:
                            nv_values = right.get(nv)
                            if not passes(nu_values, nv_values):
                                continue
                            dst = result.lookup(nu, nv)
                            if dst is None:
                                dst = result.add_vertex(
                                    nu, nv, plan.merge(nu_values, nv_values)
                                )
                            result.add_edge(src, dst)
    return result


def cogrouped_join(g1: IndexedGraph, g2: IndexedGraph, theta) -> BulkGraph:
    if isinstance(theta, EquiConjunction):
        return cogrouped_equijoin(g1, g2, theta)
    if isinstance(theta, LessEqual):
        return cogrouped_leq_join(g1, g2, theta)
    raise UnsupportedPredicate(
        f"{type(theta).__name__} predicates run only through basic_join"
    )


def multiplicity(result: BulkGraph, side: str = LEFT) -> float:
    return result.multiplicity(side)
