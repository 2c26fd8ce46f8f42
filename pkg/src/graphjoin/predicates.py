"""Join predicates and the vertex hashing that makes cogrouping sound.

Equality predicates hash every side's join attributes with FNV-1a and
combine them in pair order, so matching vertices always share a hash.
Less-equal predicates use an order preserving embedding of the Int64
value into unsigned 64-bit keys.
"""
from __future__ import annotations

import re
import struct
from dataclasses import dataclass, field
from operator import itemgetter
from typing import Callable

from .exceptions import PredicateSyntaxError, TypeConflict, UnsupportedPredicate
from .model import AttrType, Schema, VertexTuple

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
MASK64 = 0xFFFFFFFFFFFFFFFF
SIGN_BIT = 1 << 63

LEFT = "left"
RIGHT = "right"


def fnv1a_64(data: bytes) -> int:
    h = FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * FNV_PRIME) & MASK64
    return h


def value_bytes(value, kind: AttrType) -> bytes:
    if kind is AttrType.INT64:
        return struct.pack("<q", value)
    return value.encode("utf-8")


def attribute_hash(value, kind: AttrType) -> int:
    return fnv1a_64(value_bytes(value, kind))


def combine_hashes(hashes) -> int:
    h = FNV_OFFSET
    for part in hashes:
        h = ((h * FNV_PRIME) & MASK64) ^ part
    return h


def monotone_key(value: int) -> int:
    """Order preserving map from signed Int64 to unsigned 64-bit."""
    return (value & MASK64) ^ SIGN_BIT


# ---------------------------------------------------------------- predicates


@dataclass(frozen=True)
class EquiConjunction:
    pairs: tuple[tuple[str, str], ...]

    def __init__(self, pairs):
        pairs = tuple((str(a), str(b)) for a, b in pairs)
        if not pairs:
            raise PredicateSyntaxError("equi-conjunction needs at least one pair")
        object.__setattr__(self, "pairs", pairs)

    @property
    def left_attrs(self):
        return tuple(a for a, _ in self.pairs)

    @property
    def right_attrs(self):
        return tuple(b for _, b in self.pairs)

    def swapped(self):
        return EquiConjunction((b, a) for a, b in self.pairs)

    def __str__(self):
        return "eq:" + ",".join(f"{a}={b}" for a, b in self.pairs)


@dataclass(frozen=True)
class LessEqual:
    left_attr: str
    right_attr: str

    def swapped(self):
        return GreaterEqual(self.right_attr, self.left_attr)

    def __str__(self):
        return f"leq:{self.left_attr}<={self.right_attr}"


@dataclass(frozen=True)
class GreaterEqual:
    """``u.left_attr >= v.right_attr``; the mirror image of LessEqual."""

    left_attr: str
    right_attr: str

    def swapped(self):
        return LessEqual(self.right_attr, self.left_attr)


@dataclass(frozen=True)
class EdgeMembership:
    """True for ``(u, v)`` iff ``(u.id, v.id)`` is in ``edges``."""

    edges: frozenset = field(default_factory=frozenset)

    def __init__(self, edges=()):
        object.__setattr__(self, "edges", frozenset((int(s), int(d)) for s, d in edges))

    def swapped(self):
        return EdgeMembership((d, s) for s, d in self.edges)


@dataclass(frozen=True)
class Generic:
    """Arbitrary predicate ``fn(u, v) -> bool`` over two VertexTuples."""

    fn: Callable[[VertexTuple, VertexTuple], bool]

    def swapped(self):
        fn = self.fn
        return Generic(lambda u, v: fn(v, u))


ThetaPredicate = (EquiConjunction, LessEqual, EdgeMembership, Generic, GreaterEqual)


class Always(Generic):
    """The constant-true predicate; the join then degenerates to a graph product."""

    def __init__(self):
        super().__init__(lambda u, v: True)

    def swapped(self):
        return self


def validate_theta(theta, left: Schema, right: Schema) -> None:
    """Check that ``theta`` references existing, type-compatible attributes."""
    if isinstance(theta, EquiConjunction):
        for a, b in theta.pairs:
            ta, tb = left.type_of(a), right.type_of(b)
            if ta is not tb:
                raise TypeConflict(
                    f"cannot equate {a}:{ta.value} with {b}:{tb.value}"
                )
    elif isinstance(theta, (LessEqual, GreaterEqual)):
        ta, tb = left.type_of(theta.left_attr), right.type_of(theta.right_attr)
        if ta is not AttrType.INT64 or tb is not AttrType.INT64:
            raise TypeConflict("less-equal predicates compare Int64 attributes only")
    elif not isinstance(theta, (EdgeMembership, Generic)):
        raise UnsupportedPredicate(f"not a join predicate: {theta!r}")


def eval_theta(theta, u: VertexTuple, v: VertexTuple, left: Schema, right: Schema) -> bool:
    """Exact truth value of ``theta(u, v)``."""
    if isinstance(theta, EquiConjunction):
        return all(u.values[left.index(a)] == v.values[right.index(b)] for a, b in theta.pairs)
    if isinstance(theta, LessEqual):
        return u.values[left.index(theta.left_attr)] <= v.values[right.index(theta.right_attr)]
    if isinstance(theta, GreaterEqual):
        return u.values[left.index(theta.left_attr)] >= v.values[right.index(theta.right_attr)]
    if isinstance(theta, EdgeMembership):
        return (u.id, v.id) in theta.edges
    if isinstance(theta, Generic):
        return bool(theta.fn(u, v))
    raise UnsupportedPredicate(f"not a join predicate: {theta!r}")


def _getter(positions):
    if not positions:
        return lambda values: ()
    if len(positions) == 1:
        (i,) = positions
        return lambda values: (values[i],)
    return itemgetter(*positions)


def key_functions(theta, left: Schema, right: Schema):
    """Per-side key extractors for predicates that reduce to key comparison.

    Returns ``(left_key, right_key, op)`` where ``op`` is ``"eq"`` or
    ``"leq"``, or ``None`` when the predicate needs full tuple evaluation.
    """
    if isinstance(theta, EquiConjunction):
        lk = _getter([left.index(a) for a in theta.left_attrs])
        rk = _getter([right.index(b) for b in theta.right_attrs])
        return lk, rk, "eq"
    if isinstance(theta, LessEqual):
        i, j = left.index(theta.left_attr), right.index(theta.right_attr)
        return (lambda values: values[i]), (lambda values: values[j]), "leq"
    return None


# ---------------------------------------------------------------- hashing


@dataclass(frozen=True)
class HashSpec:
    """How each operand's vertices are hashed.

    ``kind`` is ``"eq"`` (FNV-1a composition over the attribute list),
    ``"leq"`` (monotone key of a single Int64 attribute) or ``"none"``
    (every vertex hashes to 0; used for plain, unindexed graph storage).
    """

    kind: str
    left_attrs: tuple[str, ...] = ()
    right_attrs: tuple[str, ...] = ()
    types: tuple[AttrType, ...] = ()

    def attrs(self, side: str) -> tuple[str, ...]:
        if side == LEFT:
            return self.left_attrs
        if side == RIGHT:
            return self.right_attrs
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")

    def fingerprint(self, side: str) -> str:
        return f"{self.kind}:{','.join(self.attrs(side))}"

    def hasher(self, schema: Schema, side: str) -> Callable[[tuple], int]:
        """Compile a ``values -> hash`` function for tuples of ``schema``."""
        names = self.attrs(side)
        positions = [schema.index(n) for n in names]
        types = [schema.type_of(n) for n in names]
        if self.types and tuple(types) != self.types:
            raise TypeConflict(
                f"{side} schema types {[t.value for t in types]} do not match "
                f"the hash spec {[t.value for t in self.types]}"
            )
        if self.kind == "none":
            return lambda values: 0
        if self.kind == "leq":
            (i,) = positions
            return lambda values: monotone_key(values[i])
        if self.kind == "eq":
            slots = list(zip(positions, types))
            return lambda values: combine_hashes(
                attribute_hash(values[i], t) for i, t in slots
            )
        raise ValueError(f"unknown hash kind {self.kind!r}")


NO_HASH = HashSpec("none")


def derive_hash_spec(theta, left: Schema, right: Schema) -> HashSpec:
    validate_theta(theta, left, right)
    if isinstance(theta, EquiConjunction):
        types = tuple(left.type_of(a) for a in theta.left_attrs)
        return HashSpec("eq", theta.left_attrs, theta.right_attrs, types)
    if isinstance(theta, LessEqual):
        return HashSpec("leq", (theta.left_attr,), (theta.right_attr,), (AttrType.INT64,))
    raise UnsupportedPredicate(
        f"{type(theta).__name__} predicates run only through basic_join"
    )


def derive_side_spec(theta, schema: Schema, side: str) -> HashSpec:
    """Hash spec for one operand when the other operand's schema is not at hand."""
    if isinstance(theta, EquiConjunction):
        names = theta.left_attrs if side == LEFT else theta.right_attrs
        types = tuple(schema.type_of(n) for n in names)
        return HashSpec("eq", theta.left_attrs, theta.right_attrs, types)
    if isinstance(theta, LessEqual):
        name = theta.left_attr if side == LEFT else theta.right_attr
        if schema.type_of(name) is not AttrType.INT64:
            raise TypeConflict(f"less-equal attribute {name!r} must be Int64")
        return HashSpec("leq", (theta.left_attr,), (theta.right_attr,), (AttrType.INT64,))
    raise UnsupportedPredicate(
        f"{type(theta).__name__} predicates run only through basic_join"
    )


def hash_vertex(v, spec: HashSpec, side: str, schema: Schema) -> int:
    values = v.values if isinstance(v, VertexTuple) else v
    return spec.hasher(schema, side)(values)


# ---------------------------------------------------------------- mini-syntax

_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_EQ_PAIR = re.compile(rf"^\s*({_NAME})\s*=\s*({_NAME})\s*$")
_LEQ = re.compile(rf"^\s*({_NAME})\s*<=\s*({_NAME})\s*$")


def parse_predicate(text: str):
    """Parse ``eq:a=b,c=d`` or ``leq:a<=b`` into a predicate object."""
    kind, sep, body = text.partition(":")
    if not sep:
        raise PredicateSyntaxError(f"missing predicate kind in {text!r}")
    kind = kind.strip().lower()
    if kind == "eq":
        pairs = []
        for chunk in body.split(","):
            m = _EQ_PAIR.match(chunk)
            if not m:
                raise PredicateSyntaxError(f"bad equality term {chunk!r}")
            pairs.append((m.group(1), m.group(2)))
        return EquiConjunction(pairs)
    if kind == "leq":
        m = _LEQ.match(body)
        if not m:
            raise PredicateSyntaxError(f"bad less-equal term {body!r}")
        return LessEqual(m.group(1), m.group(2))
    raise PredicateSyntaxError(f"unknown predicate kind {kind!r}")
