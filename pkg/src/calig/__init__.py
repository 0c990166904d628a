"""Continuous subgraph matching over streaming vertex-labeled graphs."""

from .graph import (LabeledGraph, OpKind, QueryGraph, UpdateOp, apply_update, load_graph,
                    load_query, load_update_stream)
from .index import CaLiGIndex, construct
from .kernel import KernelShellPlan, exact_mcks, greedy_cks, precompute_all, validate_plan
from .search import MatchSet, SearchCounters, find_incremental_matches
from .session import RunMetrics, SessionConfig, run_session, verify_session

__all__ = [
    "CaLiGIndex", "KernelShellPlan", "LabeledGraph", "MatchSet", "OpKind", "QueryGraph",
    "RunMetrics", "SearchCounters", "SessionConfig", "UpdateOp", "apply_update", "construct",
    "exact_mcks", "find_incremental_matches", "greedy_cks", "load_graph", "load_query",
    "load_update_stream", "precompute_all", "run_session", "validate_plan", "verify_session",
]
__version__ = "0.1.0"
