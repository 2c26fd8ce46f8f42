"""Estimator-style wrappers so joins and dataset stages compose like transformers.

``GraphJoin.fit`` stores and indexes both operands (the storing/indexing
cost) and ``transform`` runs the join (the join cost); the two phases are
timed separately.
"""
from __future__ import annotations

import shutil
import tempfile
import time
from pathlib import Path

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .ingest import EnrichmentConfig, SampleConfig, enrich, induced_subgraph, random_walk_sample
from .join import basic_join, cogrouped_join
from .predicates import LEFT, RIGHT, derive_hash_spec
from .storage import IndexedGraph, build_index
from .validation import check_graph, check_semantics, check_theta


def _ms(start):
    return (time.perf_counter() - start) * 1000.0


class GraphJoin(BaseEstimator):
    """Binary graph join as a fit/transform estimator.

    Parameters
    ----------
    theta : str or predicate
        ``"eq:a=b,..."``, ``"leq:a<=b"`` or a predicate object.
    semantics : {"and", "or"}
        Conjunctive or disjunctive edge semantics.
    algorithm : {"cogrouped", "basic"}
        ``cogrouped`` indexes the operands on disk and supports ``"and"`` only.
    workdir : path, optional
        Where operand indexes are written. A temporary directory is used
        (and removed by :meth:`close`) when omitted.
    """

    def __init__(self, theta="eq:Year1=Year2,Organization1=Organization2",
                 semantics="and", algorithm="cogrouped", workdir=None):
        self.theta = theta
        self.semantics = semantics
        self.algorithm = algorithm
        self.workdir = workdir

    def fit(self, left, right):
        check_graph(left, "left")
        check_graph(right, "right")
        self.semantics_ = check_semantics(self.semantics, self.algorithm)
        self.theta_ = check_theta(self.theta, left.schema, right.schema)
        self.close()
        if self.algorithm == "basic":
            self.left_ = left.to_graph() if isinstance(left, IndexedGraph) else left
            self.right_ = right.to_graph() if isinstance(right, IndexedGraph) else right
            self.store_index_ms_ = (0.0, 0.0)
            return self

        self.hash_spec_ = derive_hash_spec(self.theta_, left.schema, right.schema)
        if self.workdir is None:
            self._tmp = tempfile.mkdtemp(prefix="graphjoin-")
            root = Path(self._tmp)
        else:
            root = Path(self.workdir)
        timings = []
        operands = []
        for g, side in ((left, LEFT), (right, RIGHT)):
            start = time.perf_counter()
            if isinstance(g, IndexedGraph):
                indexed = g
            else:
                indexed = build_index(g, self.hash_spec_, side, root / side)
            timings.append(_ms(start))
            operands.append(indexed)
        self.left_, self.right_ = operands
        self.store_index_ms_ = tuple(timings)
        return self

    def transform(self, X=None):
        """Run the join on the fitted operands and return a BulkGraph."""
        check_is_fitted(self, "left_")
        start = time.perf_counter()
        if self.algorithm == "basic":
            result = basic_join(self.left_, self.right_, self.theta_, self.semantics_)
        else:
            result = cogrouped_join(self.left_, self.right_, self.theta_)
        self.join_ms_ = _ms(start)
        self.result_ = result
        return result

    def fit_transform(self, left, right):
        return self.fit(left, right).transform()

    def close(self):
        for name in ("left_", "right_"):
            operand = getattr(self, name, None)
            if isinstance(operand, IndexedGraph) and getattr(self, "_tmp", None):
                operand.close()
        tmp = getattr(self, "_tmp", None)
        if tmp:
            shutil.rmtree(tmp, ignore_errors=True)
            self._tmp = None


class Enricher(TransformerMixin, BaseEstimator):
    """Attach synthetic IP / Organization / Year attributes to a bare graph."""

    def __init__(self, seed=0, organizations=50, year_min=1990, year_max=2016, attr_suffix="1"):
        self.seed = seed
        self.organizations = organizations
        self.year_min = year_min
        self.year_max = year_max
        self.attr_suffix = attr_suffix

    def fit(self, g=None, y=None):
        self.config_ = EnrichmentConfig(
            seed=self.seed,
            organizations=self.organizations,
            year_range=(self.year_min, self.year_max),
            attr_suffix=str(self.attr_suffix),
        )
        return self

    def transform(self, g):
        check_is_fitted(self, "config_")
        return enrich(check_graph(g), self.config_)


class RandomWalkSampler(TransformerMixin, BaseEstimator):
    """Pick a vertex set by random walk in ``fit``; ``transform`` induces it."""

    def __init__(self, target_size=10, start_vertex=0, walk_seed=0, restart_probability=0.15):
        self.target_size = target_size
        self.start_vertex = start_vertex
        self.walk_seed = walk_seed
        self.restart_probability = restart_probability

    def fit(self, g, y=None):
        cfg = SampleConfig(
            start_vertex=self.start_vertex,
            walk_seed=self.walk_seed,
            target_size=self.target_size,
            restart_probability=self.restart_probability,
        )
        self.provenance_ = random_walk_sample(check_graph(g), cfg).provenance
        return self

    def transform(self, g):
        check_is_fitted(self, "provenance_")
        return induced_subgraph(g, self.provenance_).graph
