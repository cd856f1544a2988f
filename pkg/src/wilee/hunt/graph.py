"""Evidence graphs assembled from query results.

Nodes are (descriptor, event) matches; edges witness a relation between
two matched events.  An edge exists when the log records an explicit
link with the relation's verb, or as a fallback when both events share
a host inside a configurable temporal window.  Edge timestamps are the
later of the two endpoints: the moment the relation is fully witnessed.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta

from .proxy import Event
from .query import QueryDescriptor

DEFAULT_WINDOW_SECONDS = 60.0


@dataclass(frozen=True)
class GraphNode:
    node_id: str
    qid: str
    event_id: str
    entity_class: str
    host: str
    timestamp: datetime


@dataclass(frozen=True)
class GraphEdge:
    edge_id: str
    qid: str
    peer_qid: str
    verb: str
    technique_id: str
    step_index: int
    source_event: str
    target_event: str
    source_host: str
    target_host: str
    timestamp: datetime
    kind: str  # "link" | "window"

    @property
    def hosts(self) -> tuple[str, ...]:
        return (self.source_host, self.target_host)


@dataclass(frozen=True)
class EvidenceGraph:
    nodes: tuple[GraphNode, ...]
    edges: tuple[GraphEdge, ...]

    def hosts(self) -> list[str]:
        seen = {n.host for n in self.nodes}
        for e in self.edges:
            seen.update(e.hosts)
        return sorted(seen)


def build_graph(
    results: dict[str, list[Event]],
    descriptors: list[QueryDescriptor],
    window_seconds: float = DEFAULT_WINDOW_SECONDS,
) -> EvidenceGraph:
    """Assemble nodes and TTP-labelled relation edges from per-descriptor
    query results."""
    nodes = [
        GraphNode(
            node_id=f"{q.qid}:{event.event_id}",
            qid=q.qid,
            event_id=event.event_id,
            entity_class=q.entity_class,
            host=event.host,
            timestamp=event.moment,
        )
        for q in descriptors
        for event in results.get(q.qid, [])
    ]

    window = timedelta(seconds=window_seconds)
    edges: list[GraphEdge] = []
    for q in descriptors:
        for rel in q.relations:
            for source in results.get(q.qid, []):
                for target in results.get(rel.peer_qid, []):
                    explicit = (rel.verb, target.event_id) in source.links
                    if explicit:
                        kind = "link"
                    elif (
                        source.event_id != target.event_id
                        and source.host == target.host
                        and abs(source.moment - target.moment) <= window
                    ):
                        kind = "window"
                    else:
                        continue
                    edges.append(
                        GraphEdge(
                            edge_id=f"e{len(edges):05d}",
                            qid=q.qid,
                            peer_qid=rel.peer_qid,
                            verb=rel.verb,
                            technique_id=q.technique_id,
                            step_index=q.step_index,
                            source_event=source.event_id,
                            target_event=target.event_id,
                            source_host=source.host,
                            target_host=target.host,
                            timestamp=max(source.moment, target.moment),
                            kind=kind,
                        )
                    )
    return EvidenceGraph(tuple(nodes), tuple(edges))
