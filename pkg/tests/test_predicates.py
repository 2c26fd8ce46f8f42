import random
import struct

import pytest
from hypothesis import given, strategies as st

from graphjoin import (
    EdgeMembership,
    EquiConjunction,
    Generic,
    LessEqual,
    Schema,
    VertexTuple,
    derive_hash_spec,
    eval_theta,
    hash_vertex,
    parse_predicate,
)
from graphjoin.exceptions import PredicateSyntaxError, TypeConflict, UnknownAttribute, UnsupportedPredicate
from graphjoin.model import INT64_MAX, INT64_MIN
from graphjoin.predicates import (
    FNV_OFFSET,
    FNV_PRIME,
    MASK64,
    attribute_hash,
    combine_hashes,
    fnv1a_64,
    monotone_key,
)

EMP1 = Schema([("IP1", "Text"), ("Organization1", "Text"), ("Year1", "Int64")])
EMP2 = Schema([("IP2", "Text"), ("Organization2", "Text"), ("Year2", "Int64")])
THETA = EquiConjunction([("Year1", "Year2"), ("Organization1", "Organization2")])
S1 = Schema([("User", "Text"), ("MsgTime1", "Int64")])
S2 = Schema([("User", "Text"), ("MsgTime2", "Int64")])


def test_fnv1a_reference_vectors():
    # Published FNV-1a 64-bit test vectors.
    assert fnv1a_64(b"") == 0xCBF29CE484222325
    assert fnv1a_64(b"a") == 0xAF63DC4C8601EC8C
    assert fnv1a_64(b"foobar") == 0x85944171F73967E8


def test_attribute_hash_uses_canonical_bytes():
    assert attribute_hash(7, S1.type_of("MsgTime1")) == fnv1a_64(struct.pack("<q", 7))
    assert attribute_hash("Bob", S1.type_of("User")) == fnv1a_64("Bob".encode())
    assert attribute_hash("é", S1.type_of("User")) == fnv1a_64(b"\xc3\xa9")


def test_combination_is_order_sensitive_running_combine():
    a, b = 11, 22
    expected = ((((FNV_OFFSET * FNV_PRIME) & MASK64) ^ a) * FNV_PRIME & MASK64) ^ b
    assert combine_hashes([a, b]) == expected
    assert combine_hashes([a, b]) != combine_hashes([b, a])


def test_derive_equi_spec_combines_in_pair_order():
    spec = derive_hash_spec(THETA, EMP1, EMP2)
    assert spec.kind == "eq"
    assert spec.left_attrs == ("Year1", "Organization1")
    assert spec.right_attrs == ("Year2", "Organization2")
    u = ("1.2.3.4", "Org3", 2001)
    expected = combine_hashes(
        [attribute_hash(2001, EMP1.type_of("Year1")), attribute_hash("Org3", EMP1.type_of("IP1"))]
    )
    assert hash_vertex(u, spec, "left", EMP1) == expected


def test_derive_leq_spec():
    spec = derive_hash_spec(LessEqual("MsgTime1", "MsgTime2"), S1, S2)
    assert spec.kind == "leq"
    assert hash_vertex(("Bob", 3), spec, "left", S1) == monotone_key(3)
    assert hash_vertex(("Bob", 3), spec, "right", S2) == monotone_key(3)


def test_derive_rejects_relational_predicates():
    with pytest.raises(UnsupportedPredicate):
        derive_hash_spec(EdgeMembership([(0, 1)]), S1, S2)
    with pytest.raises(UnsupportedPredicate):
        derive_hash_spec(Generic(lambda u, v: True), S1, S2)


def test_validation_errors():
    with pytest.raises(UnknownAttribute):
        derive_hash_spec(EquiConjunction([("Nope", "User")]), S1, S2)
    with pytest.raises(TypeConflict):
        derive_hash_spec(EquiConjunction([("User", "MsgTime2")]), S1, S2)
    with pytest.raises(TypeConflict):
        derive_hash_spec(LessEqual("User", "MsgTime2"), S1, S2)


def test_equal_attribute_values_hash_equal():
    spec = derive_hash_spec(THETA, EMP1, EMP2)
    u = ("10.0.0.1", "Org1", 1999)
    v = ("192.168.1.1", "Org1", 1999)
    assert hash_vertex(u, spec, "left", EMP1) == hash_vertex(v, spec, "right", EMP2)


def test_monotone_key_examples():
    assert monotone_key(2) < monotone_key(3)
    assert monotone_key(-1) < monotone_key(0)
    assert monotone_key(INT64_MIN) == 0
    assert monotone_key(INT64_MAX) == MASK64


@given(st.integers(INT64_MIN, INT64_MAX), st.integers(INT64_MIN, INT64_MAX))
def test_monotone_key_preserves_order(a, b):
    if a <= b:
        assert monotone_key(a) <= monotone_key(b)
    if a < b:
        assert monotone_key(a) < monotone_key(b)


def test_equi_hash_soundness_on_random_matching_pairs():
    rng = random.Random(1000)
    spec = derive_hash_spec(THETA, EMP1, EMP2)
    hl = spec.hasher(EMP1, "left")
    hr = spec.hasher(EMP2, "right")
    for _ in range(1000):
        year = rng.randint(-(10**9), 10**9)
        org = "".join(rng.choice("abcxyzé€") for _ in range(rng.randint(0, 12)))
        u = (f"{rng.randrange(256)}.0.0.1", org, year)
        v = (f"{rng.randrange(256)}.9.9.9", org, year)
        assert eval_theta(THETA, VertexTuple(0, u), VertexTuple(0, v), EMP1, EMP2)
        assert hl(u) == hr(v)


@given(
    st.tuples(st.integers(0, 3), st.sampled_from(["a", "b", "c"])),
    st.tuples(st.integers(0, 3), st.sampled_from(["a", "b", "c"])),
)
def test_eval_equi_agrees_with_attribute_equality(lv, rv):
    u = VertexTuple(0, ("ip", lv[1], lv[0]))
    v = VertexTuple(0, ("ip", rv[1], rv[0]))
    assert eval_theta(THETA, u, v, EMP1, EMP2) == (lv[0] == rv[0] and lv[1] == rv[1])


def test_eval_theta_examples():
    leq = LessEqual("MsgTime1", "MsgTime2")
    assert eval_theta(leq, VertexTuple(0, ("Alice", 1)), VertexTuple(1, ("Alice", 7)), S1, S2)
    users = EquiConjunction([("User", "User")])
    assert not eval_theta(users, VertexTuple(0, ("Alice", 1)), VertexTuple(0, ("Dan", 6)), S1, S2)


def test_eval_edge_membership_matches_set_lookup():
    e1 = {(0, 1), (1, 0), (2, 1)}
    theta = EdgeMembership(e1)
    for i in range(3):
        for j in range(3):
            got = eval_theta(theta, VertexTuple(i, ()), VertexTuple(j, ()), Schema(), Schema())
            assert got == ((i, j) in e1)


def test_parse_predicate():
    assert parse_predicate("eq:Year1=Year2,Organization1=Organization2") == THETA
    assert parse_predicate("leq: MsgTime1 <= MsgTime2") == LessEqual("MsgTime1", "MsgTime2")
    assert str(THETA) == "eq:Year1=Year2,Organization1=Organization2"
    for bad in ("Year1=Year2", "eq:", "eq:a=b,", "leq:a<b", "lt:a<=b", "leq:a<=b,c<=d"):
        with pytest.raises(PredicateSyntaxError):
            parse_predicate(bad)


def test_spec_fingerprint_is_per_side():
    spec = derive_hash_spec(THETA, EMP1, EMP2)
    assert spec.fingerprint("left") == "eq:Year1,Organization1"
    assert spec.fingerprint("right") == "eq:Year2,Organization2"
