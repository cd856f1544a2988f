"""Hunt engine: query scheduling, execution, evidence graphs, matching,
and reporting."""

from .graph import DEFAULT_WINDOW_SECONDS, EvidenceGraph, GraphEdge, GraphNode, build_graph
from .matcher import MatchResult, Obligation, match, obligations_for
from .proxy import (
    DataProxy,
    Event,
    NdjsonProxy,
    ProxyUnavailable,
    event_from_json,
    execute,
    execute_all,
    parse_rfc3339,
)
from .query import (
    BindSpec,
    Predicate,
    QueryDescriptor,
    RelationRef,
    UnknownClass,
    UnknownVariable,
    make_qid,
    schedule,
)
from .report import REPORT_FORMATS, render_report, result_to_json

__all__ = [
    "DEFAULT_WINDOW_SECONDS",
    "EvidenceGraph",
    "GraphEdge",
    "GraphNode",
    "build_graph",
    "MatchResult",
    "Obligation",
    "match",
    "obligations_for",
    "DataProxy",
    "Event",
    "NdjsonProxy",
    "ProxyUnavailable",
    "event_from_json",
    "execute",
    "execute_all",
    "parse_rfc3339",
    "BindSpec",
    "Predicate",
    "QueryDescriptor",
    "RelationRef",
    "UnknownClass",
    "UnknownVariable",
    "make_qid",
    "schedule",
    "REPORT_FORMATS",
    "render_report",
    "result_to_json",
]
