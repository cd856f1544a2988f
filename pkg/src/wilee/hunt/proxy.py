"""Event stores and query execution.

The scheduler is data-store agnostic; backends implement the
:class:`DataProxy` protocol.  The baseline backend reads
newline-delimited JSON event logs, which keeps hunts hermetic and
testable.  ``execute`` applies a descriptor's predicates with any bind
resolved against the IOC database at match time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Protocol, Union

from ..stores import IocDb, resolve_bind
from ..globmatch import glob_match
from .query import BindSpec, Predicate, QueryDescriptor


class ProxyUnavailable(Exception):
    """The event store could not be read; the whole query fails."""


def parse_rfc3339(value: str) -> datetime:
    text = value[:-1] + "+00:00" if value.endswith(("Z", "z")) else value
    moment = datetime.fromisoformat(text)
    if moment.tzinfo is None:
        moment = moment.replace(tzinfo=timezone.utc)
    return moment


@dataclass(frozen=True)
class Event:
    event_id: str
    timestamp: str
    host: str
    entity_class: str
    fields: dict[str, str]
    links: tuple[tuple[str, str], ...] = ()
    moment: datetime = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "moment", parse_rfc3339(self.timestamp))


class DataProxy(Protocol):
    def scan(self, entity_class: str) -> Iterable[Event]:
        """All events of the given class, in log order."""
        ...


class NdjsonProxy:
    """Event log backend over an ``events.ndjson`` file."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self._events: list[Event] = []
        self._load()

    def _load(self) -> None:
        try:
            text = self.path.read_text("utf-8")
        except OSError as exc:
            raise ProxyUnavailable(f"cannot read event log {self.path}: {exc}") from None
        seen: set[str] = set()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            if not raw.strip():
                continue
            try:
                doc = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ProxyUnavailable(f"{self.path}:{lineno}: {exc.msg}") from None
            try:
                event = event_from_json(doc)
            except (KeyError, TypeError, ValueError) as exc:
                raise ProxyUnavailable(f"{self.path}:{lineno}: {exc}") from None
            if event.event_id in seen:
                raise ProxyUnavailable(
                    f"{self.path}:{lineno}: duplicate event_id {event.event_id!r}"
                )
            seen.add(event.event_id)
            self._events.append(event)

    def scan(self, entity_class: str) -> list[Event]:
        return [e for e in self._events if e.entity_class == entity_class]

    def all_events(self) -> list[Event]:
        return list(self._events)


def event_from_json(doc: dict) -> Event:
    fields = {
        str(k): v if isinstance(v, str) else json.dumps(v)
        for k, v in doc.get("fields", {}).items()
    }
    links = tuple(
        (str(link["verb"]), str(link["target"])) for link in doc.get("links", [])
    )
    return Event(
        event_id=str(doc["event_id"]),
        timestamp=str(doc["timestamp"]),
        host=str(doc["host"]),
        entity_class=str(doc["entity_class"]),
        fields=fields,
        links=links,
    )


def _value_matches(candidate: str, actual: str) -> bool:
    if "*" in candidate:
        return glob_match(candidate, actual)
    return candidate == actual


def _predicate_holds(pred: Predicate, event: Event, db: IocDb) -> bool:
    actual = event.fields.get(pred.variable)
    if actual is None:
        return False
    if isinstance(pred.value, BindSpec):
        # A bind holds when any type-matched candidate value matches.
        return any(_value_matches(r.value, actual) for r in resolve_bind(db, pred.value))
    if pred.op == "glob":
        return glob_match(pred.value, actual)
    return pred.value == actual


def execute(q: QueryDescriptor, proxy: DataProxy, db: IocDb) -> list[Event]:
    """Events of the descriptor's entity class satisfying every
    predicate, in log order."""
    return [
        event
        for event in proxy.scan(q.entity_class)
        if all(_predicate_holds(p, event, db) for p in q.predicates)
    ]


def execute_all(
    descriptors: list[QueryDescriptor], proxy: DataProxy, db: IocDb
) -> dict[str, list[Event]]:
    return {q.qid: execute(q, proxy, db) for q in descriptors}
