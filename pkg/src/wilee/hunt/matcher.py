"""The match algorithm: decide whether an evidence graph confirms an
implementation.

Per step, every relation statement is an obligation needing a
supporting edge, and every object with no relations needs at least one
node.  Across steps a witness must exist on a single host whose
per-step earliest witnessing timestamps are non-decreasing (ties
allowed).  The score is the satisfied fraction of obligations under the
best such witness, so a score of 1.0 and confirmation coincide.

The search keeps, per host, the Pareto frontier of (time floor,
obligations satisfied) states across steps.  Within a step, satisfying
every obligation that has a supporting item at or after the floor, each
at its earliest such item, dominates any partial choice: it maximizes
the count and minimizes the step's earliest-witness timestamp, which is
all the non-decreasing constraint sees.  The only real branch is
engaging a step versus skipping it entirely, which the frontier tracks.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Optional

from ..dsl import NodeKind
from ..interpreter import ThreatImplementation
from .graph import EvidenceGraph
from .query import make_qid

_FLOOR_START = datetime.min.replace(tzinfo=timezone.utc)


@dataclass(frozen=True)
class Obligation:
    step_index: int
    kind: str  # "relation" | "node"
    label: str  # human-readable, for reports
    key: tuple  # ("relation", qid, peer_qid, verb) or ("node", qid)


@dataclass(frozen=True)
class MatchResult:
    impl_id: str
    description_name: str
    techniques: tuple[str, ...]
    confirmed: bool
    score: float
    step_scores: tuple[float, ...]
    witness: tuple[str, ...]
    step_witness: tuple[tuple[str, ...], ...]
    host: Optional[str] = None


def obligations_for(impl: ThreatImplementation) -> list[list[Obligation]]:
    """Per-step obligations: one per relation statement, plus one node
    obligation per object that no relation touches."""
    per_step: list[list[Obligation]] = []
    for step in impl.steps:
        fn = impl.step_ast(step.step_index)
        i = step.step_index
        obligations: list[Obligation] = []
        instantiated: list[str] = []
        related: set[str] = set()
        for stmt in fn.children:
            if stmt.kind is NodeKind.OBJECT_INSTANTIATION:
                instantiated.append(stmt.attrs["var"])
            elif stmt.kind is NodeKind.RELATION_STMT:
                subj = stmt.children[0].attrs["name"]
                obj = stmt.children[1].attrs["name"]
                verb = stmt.attrs["verb"]
                related.update((subj, obj))
                obligations.append(
                    Obligation(
                        i,
                        "relation",
                        f"{subj}.{verb}({obj})",
                        (
                            "relation",
                            make_qid(impl.impl_id, i, subj),
                            make_qid(impl.impl_id, i, obj),
                            verb,
                        ),
                    )
                )
        for var in instantiated:
            if var not in related:
                obligations.append(
                    Obligation(i, "node", var, ("node", make_qid(impl.impl_id, i, var)))
                )
        per_step.append(obligations)
    return per_step


def _support_index(
    graph: EvidenceGraph, host: str
) -> dict[tuple, list[tuple[datetime, str]]]:
    """Obligation key -> (timestamp, item id) support on one host,
    sorted by time then id."""
    index: dict[tuple, list[tuple[datetime, str]]] = {}
    for edge in graph.edges:
        if host in edge.hosts:
            key = ("relation", edge.qid, edge.peer_qid, edge.verb)
            index.setdefault(key, []).append((edge.timestamp, edge.edge_id))
    for node in graph.nodes:
        if node.host == host:
            index.setdefault(("node", node.qid), []).append((node.timestamp, node.node_id))
    for items in index.values():
        items.sort()
    return index


@dataclass(frozen=True)
class _State:
    floor: datetime
    count: int
    trace: tuple[tuple[str, ...], ...]  # per step, chosen item ids


def _advance(
    state: _State,
    obligations: list[Obligation],
    index: dict[tuple, list[tuple[datetime, str]]],
) -> _State:
    chosen: list[str] = []
    step_min: Optional[datetime] = None
    for obligation in obligations:
        items = index.get(obligation.key, [])
        pick = next((item for item in items if item[0] >= state.floor), None)
        if pick is None:
            continue
        chosen.append(pick[1])
        step_min = pick[0] if step_min is None else min(step_min, pick[0])
    new_floor = step_min if step_min is not None else state.floor
    return _State(new_floor, state.count + len(chosen), state.trace + (tuple(chosen),))


def _prune(states: list[_State]) -> list[_State]:
    states.sort(key=lambda s: (s.floor, -s.count))
    kept: list[_State] = []
    best = -1
    for state in states:
        if state.count > best:
            kept.append(state)
            best = state.count
    return kept


def _best_for_host(
    per_step: list[list[Obligation]], graph: EvidenceGraph, host: str
) -> _State:
    index = _support_index(graph, host)
    states = [_State(_FLOOR_START, 0, ())]
    for obligations in per_step:
        nxt = []
        for state in states:
            # Skip the step outright, or engage everything satisfiable.
            nxt.append(_State(state.floor, state.count, state.trace + ((),)))
            nxt.append(_advance(state, obligations, index))
        states = _prune(nxt)
    best_count = max(state.count for state in states)
    return min(
        (state for state in states if state.count == best_count),
        key=lambda s: s.floor,
    )


def match(graph: EvidenceGraph, impl: ThreatImplementation) -> MatchResult:
    per_step = obligations_for(impl)
    total = sum(len(obligations) for obligations in per_step)

    best_state: Optional[_State] = None
    best_host: Optional[str] = None
    for host in graph.hosts():
        state = _best_for_host(per_step, graph, host)
        if best_state is None or state.count > best_state.count:
            best_state = state
            best_host = host

    if total == 0:
        # An implementation asserting nothing is never confirmed.
        return _empty_result(impl, tuple(0.0 for _ in per_step))
    if best_state is None or best_state.count == 0:
        scores = tuple(0.0 if obligations else 1.0 for obligations in per_step)
        return _empty_result(impl, scores)

    step_scores = tuple(
        len(chosen) / len(obligations) if obligations else 1.0
        for chosen, obligations in zip(best_state.trace, per_step)
    )
    score = best_state.count / total
    return MatchResult(
        impl_id=impl.impl_id,
        description_name=impl.description_name,
        techniques=impl.techniques,
        confirmed=score == 1.0,
        score=score,
        step_scores=step_scores,
        witness=tuple(item for chosen in best_state.trace for item in chosen),
        step_witness=best_state.trace,
        host=best_host,
    )


def _empty_result(impl: ThreatImplementation, step_scores: tuple[float, ...]) -> MatchResult:
    return MatchResult(
        impl_id=impl.impl_id,
        description_name=impl.description_name,
        techniques=impl.techniques,
        confirmed=False,
        score=0.0,
        step_scores=step_scores,
        witness=(),
        step_witness=tuple(() for _ in step_scores),
        host=None,
    )
