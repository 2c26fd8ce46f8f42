"""Input validation helpers shared by the estimators, the CLI and the bench harness."""
from __future__ import annotations

from .exceptions import GraphJoinError, UnsupportedPredicate
from .model import Graph
from .predicates import ThetaPredicate, parse_predicate, validate_theta
from .storage import IndexedGraph

ALGORITHMS = ("basic", "cogrouped")


def check_graph(g, name="graph"):
    if not isinstance(g, (Graph, IndexedGraph)):
        raise TypeError(f"{name} must be a Graph or IndexedGraph, got {type(g).__name__}")
    return g


def check_theta(theta, left_schema=None, right_schema=None):
    """Accept a predicate object or its mini-syntax string and validate it."""
    if isinstance(theta, str):
        theta = parse_predicate(theta)
    if not isinstance(theta, ThetaPredicate):
        raise TypeError(f"not a join predicate: {theta!r}")
    if left_schema is not None and right_schema is not None:
        validate_theta(theta, left_schema, right_schema)
    return theta


def check_semantics(semantics, algorithm):
    from .join import JoinSemantics

    try:
        semantics = JoinSemantics(semantics)
    except ValueError:
        raise GraphJoinError(f"semantics must be 'and' or 'or', got {semantics!r}") from None
    if algorithm not in ALGORITHMS:
        raise GraphJoinError(f"algorithm must be one of {ALGORITHMS}, got {algorithm!r}")
    if algorithm == "cogrouped" and semantics is JoinSemantics.DISJUNCTIVE:
        raise UnsupportedPredicate("disjunctive requires basic")
    return semantics


def check_run_count(runs):
    if int(runs) < 3:
        raise ValueError(f"runs={runs}: trimming one fastest and one slowest run needs at least 3")
    return int(runs)
