"""Graph joins over attributed graphs with hash-sorted secondary-memory operands."""
from .bulk import BulkGraph
from .estimator import Enricher, GraphJoin, RandomWalkSampler
from .exceptions import *  # noqa: F401,F403
from .ingest import EnrichmentConfig, SampleConfig, enrich, parse_edge_list, random_walk_sample
from .join import (
    CONJUNCTIVE,
    DISJUNCTIVE,
    JoinSemantics,
    basic_join,
    cogrouped_equijoin,
    cogrouped_join,
    cogrouped_leq_join,
    multiplicity,
)
from .model import AttrType, Graph, Schema, VertexTuple, merge_vertices, schema_union
from .predicates import (
    Always,
    EdgeMembership,
    EquiConjunction,
    Generic,
    GreaterEqual,
    HashSpec,
    LessEqual,
    derive_hash_spec,
    eval_theta,
    hash_vertex,
    parse_predicate,
)
from .storage import IndexedGraph, build_index, load_graph, open_graph, save_graph

__version__ = "0.1.0"
