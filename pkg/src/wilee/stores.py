"""The three knowledge bases: TTP store, IOC database, and data model.

All three load from flat files (line-delimited JSON plus ``.wdsl``
sources for TTP bodies) into immutable in-memory stores.  Queries are
index-backed but contractually equivalent to a linear scan of the
underlying file contents.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .dsl import (
    AstNode,
    NodeKind,
    content_hash,
    is_technique_id,
    normalize_step,
    parse,
    validate,
)
from .dsl.vocab import IOC_TYPES, TACTIC_ORDER
from .globmatch import glob_match

logger = logging.getLogger(__name__)

TTP_SOURCES = ("SME", "MALMO", "GPE")

DEFAULT_CREATED_AT = "1970-01-01T00:00:00Z"


class StoreError(Exception):
    pass


class FormatError(StoreError):
    """A store file is malformed; carries file and line."""

    def __init__(self, file: str, line: int, message: str):
        self.file = file
        self.line = line
        super().__init__(f"{file}:{line}: {message}")


class ValidationError(StoreError):
    """TTP entries failed DSL validation."""

    def __init__(self, technique_ids: list[str], detail: str = ""):
        self.technique_ids = technique_ids
        suffix = f": {detail}" if detail else ""
        super().__init__(f"invalid TTP entries {technique_ids}{suffix}")


class UnknownIocType(StoreError):
    def __init__(self, ioc_type: str):
        self.ioc_type = ioc_type
        super().__init__(f"unknown ioc_type {ioc_type!r} (expected one of {IOC_TYPES})")


# ---------------------------------------------------------------------------
# Data model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DataModel:
    """Observable-object classes and their variables."""

    variables_by_class: dict[str, tuple[str, ...]]

    @property
    def class_names(self) -> tuple[str, ...]:
        return tuple(self.variables_by_class)

    @classmethod
    def from_json(cls, doc: dict, file: str = "<memory>") -> "DataModel":
        classes = doc.get("classes")
        if not isinstance(classes, list):
            raise FormatError(file, 1, "data model needs a 'classes' list")
        out: dict[str, tuple[str, ...]] = {}
        for entry in classes:
            name = entry.get("class_name")
            variables = entry.get("variables", [])
            if not isinstance(name, str) or not name:
                raise FormatError(file, 1, "class entry missing class_name")
            if name in out:
                raise FormatError(file, 1, f"duplicate class {name!r}")
            if len(set(variables)) != len(variables):
                raise FormatError(file, 1, f"duplicate variable in class {name!r}")
            out[name] = tuple(variables)
        return cls(out)

    @classmethod
    def load(cls, path: Path) -> "DataModel":
        try:
            doc = json.loads(Path(path).read_text("utf-8"))
        except json.JSONDecodeError as exc:
            raise FormatError(str(path), exc.lineno, exc.msg) from None
        return cls.from_json(doc, str(path))

    @classmethod
    def default(cls) -> "DataModel":
        text = resources.files("wilee").joinpath("data/data_model.json").read_text("utf-8")
        return cls.from_json(json.loads(text), "wilee/data/data_model.json")


def load_ioc_type_map() -> dict[str, str]:
    """Variable-name to ioc_type bridge used for template filling and
    indicator perturbation.  Keys are matched case-insensitively."""
    text = resources.files("wilee").joinpath("data/ioc_type_map.json").read_text("utf-8")
    return json.loads(text)


_IOC_TYPE_MAP: Optional[dict[str, str]] = None


def ioc_type_for_variable(variable: str) -> Optional[str]:
    global _IOC_TYPE_MAP
    if _IOC_TYPE_MAP is None:
        _IOC_TYPE_MAP = {k.lower(): v for k, v in load_ioc_type_map().items()}
    return _IOC_TYPE_MAP.get(variable.lower())


# ---------------------------------------------------------------------------
# IOC database
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IocRecord:
    ioc_type: str
    value: str
    technique_id: Optional[str] = None
    source: str = "manual"


@dataclass(frozen=True)
class IocDb:
    records: tuple[IocRecord, ...] = ()

    @classmethod
    def load(cls, path: Path) -> "IocDb":
        records: list[IocRecord] = []
        seen: set[tuple[str, str]] = set()
        for lineno, raw in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
            if not raw.strip():
                continue
            try:
                doc = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise FormatError(str(path), lineno, exc.msg) from None
            if not isinstance(doc, dict):
                raise FormatError(str(path), lineno, "expected a JSON object")
            ioc_type = doc.get("ioc_type")
            value = doc.get("value")
            if ioc_type not in IOC_TYPES:
                raise FormatError(str(path), lineno, f"unknown ioc_type {ioc_type!r}")
            if not isinstance(value, str) or not value:
                raise FormatError(str(path), lineno, "value must be a non-empty string")
            key = (ioc_type, value)
            if key in seen:
                logger.warning("%s:%d: duplicate IOC %r dropped (keeping earliest)", path, lineno, key)
                continue
            seen.add(key)
            records.append(
                IocRecord(
                    ioc_type=ioc_type,
                    value=value,
                    technique_id=doc.get("technique_id"),
                    source=doc.get("source", "manual"),
                )
            )
        return cls(tuple(records))

    def by_type(self, ioc_type: str) -> tuple[IocRecord, ...]:
        if ioc_type not in IOC_TYPES:
            raise UnknownIocType(ioc_type)
        return tuple(r for r in self.records if r.ioc_type == ioc_type)


def _bind_fields(bind) -> tuple[str, Optional[str], Optional[str]]:
    # Accepts a BindExpr AST node or any object with the three fields.
    if isinstance(bind, AstNode):
        if bind.kind is not NodeKind.BIND_EXPR:
            raise ValueError(f"expected a BindExpr node, got {bind.kind.value}")
        return (
            bind.attrs["ioc_type"],
            bind.attrs.get("technique"),
            bind.attrs.get("pattern"),
        )
    return bind.ioc_type, bind.technique, bind.pattern


def resolve_bind(db: IocDb, bind) -> list[IocRecord]:
    """All records matching the bind's ioc_type, optional technique
    filter, and optional glob pattern over the value, ordered by value
    ascending."""
    ioc_type, technique, pattern = _bind_fields(bind)
    matches = [
        r
        for r in db.by_type(ioc_type)
        if (technique is None or r.technique_id == technique)
        and (pattern is None or glob_match(pattern, r.value))
    ]
    matches.sort(key=lambda r: r.value)
    return matches


# ---------------------------------------------------------------------------
# TTP store
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TtpRecord:
    technique_id: str
    tactic_tags: tuple[str, ...]
    source: str
    ast: AstNode  # FunctionDef
    created_at: str = DEFAULT_CREATED_AT

    @property
    def ast_hash(self) -> str:
        return content_hash(self.ast)

    @property
    def record_id(self) -> str:
        return f"{self.technique_id}:{self.source}:{self.ast_hash}"


@dataclass
class TtpStore:
    """TTP implementations indexed by technique id and tactic tag.

    Immutable once a pipeline phase starts; :meth:`insert` is for the
    single-writer windows between phases."""

    records: list[TtpRecord] = field(default_factory=list)

    def __eq__(self, other) -> bool:
        return isinstance(other, TtpStore) and self.records == other.records

    def __len__(self) -> int:
        return len(self.records)

    def insert(self, record: TtpRecord, model: Optional[DataModel] = None) -> bool:
        """Add a record; returns False for an exact duplicate of an
        existing (technique_id, source, content-hash) triple."""
        if record.source not in TTP_SOURCES:
            raise ValueError(f"unknown TTP source {record.source!r}")
        diagnostics = validate(record.ast, model)
        if diagnostics:
            raise ValidationError([record.technique_id], "; ".join(map(str, diagnostics)))
        if _is_abstract(record.ast):
            raise ValidationError(
                [record.technique_id], "TTP bodies must be concrete, not abstract calls"
            )
        if any(r.record_id == record.record_id for r in self.records):
            logger.warning("duplicate TTP record %s ignored", record.record_id)
            return False
        self.records.append(record)
        return True

    def tactics_present(self) -> list[str]:
        """Distinct known tactics in canonical kill-chain order."""
        present = {tag for r in self.records for tag in r.tactic_tags if tag in TACTIC_ORDER}
        return sorted(present, key=lambda t: TACTIC_ORDER[t])


def _is_abstract(fn: AstNode) -> bool:
    return any(stmt.kind is NodeKind.ABSTRACT_CALL for stmt in fn.children)


def ttps_for_step(store: TtpStore, step) -> list[TtpRecord]:
    """Records matching one workflow step.

    Technique-id steps match exactly; tactic steps match any record
    tagged with the tactic; anything else matches nothing.  Results are
    ordered by (technique_id, content hash, source) so downstream
    expansion is deterministic.
    """
    name = step.attrs["step"] if isinstance(step, AstNode) else step
    if is_technique_id(name):
        matches = [r for r in store.records if r.technique_id == name]
    elif name in TACTIC_ORDER:
        matches = [r for r in store.records if name in r.tactic_tags]
    else:
        matches = []
    matches.sort(key=lambda r: (r.technique_id, r.ast_hash, r.source))
    return matches


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StorePaths:
    ttp_index: Optional[Path] = None
    ioc_db: Optional[Path] = None
    data_model: Optional[Path] = None


def _load_ttp_store(index_path: Path, model: DataModel) -> TtpStore:
    index_path = Path(index_path)
    if index_path.is_dir():
        index_path = index_path / "index.jsonl"
    base = index_path.parent
    store = TtpStore()
    invalid: list[str] = []
    details: list[str] = []
    for lineno, raw in enumerate(index_path.read_text("utf-8").splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise FormatError(str(index_path), lineno, exc.msg) from None
        technique_id = doc.get("technique_id")
        rel = doc.get("path")
        if not isinstance(technique_id, str) or not is_technique_id(technique_id):
            raise FormatError(str(index_path), lineno, f"bad technique_id {technique_id!r}")
        if not isinstance(rel, str):
            raise FormatError(str(index_path), lineno, "entry needs a 'path' to a .wdsl file")
        source = doc.get("source", "SME")
        if source not in TTP_SOURCES:
            raise FormatError(str(index_path), lineno, f"unknown source {source!r}")
        fn = _read_ttp_function(base / rel, technique_id, index_path, lineno)
        record = TtpRecord(
            technique_id=technique_id,
            tactic_tags=tuple(doc.get("tactic_tags", [])),
            source=source,
            ast=fn,
            created_at=doc.get("created_at", DEFAULT_CREATED_AT),
        )
        diagnostics = validate(fn, model)
        if diagnostics:
            invalid.append(technique_id)
            details.extend(f"{technique_id}: {d}" for d in diagnostics)
            continue
        if _is_abstract(fn):
            invalid.append(technique_id)
            details.append(f"{technique_id}: TTP bodies must be concrete, not abstract calls")
            continue
        if any(r.record_id == record.record_id for r in store.records):
            logger.warning("%s:%d: duplicate TTP record %s ignored", index_path, lineno, record.record_id)
            continue
        store.records.append(record)
    if invalid:
        raise ValidationError(invalid, "; ".join(details))
    return store


def _read_ttp_function(path: Path, technique_id: str, index_path: Path, lineno: int) -> AstNode:
    tree = parse(path.read_text("utf-8"))
    wanted = [
        fn
        for fn in tree.children
        if normalize_step(fn.attrs.get("name", "")) == technique_id
    ]
    if not wanted:
        raise FormatError(
            str(index_path),
            lineno,
            f"{path} defines no function for technique {technique_id}",
        )
    return wanted[0]


def load_stores(paths: StorePaths) -> tuple[TtpStore, IocDb, DataModel]:
    """Load all three stores.  Missing paths yield an empty TTP store,
    an empty IOC database, and the shipped default data model."""
    model = DataModel.load(paths.data_model) if paths.data_model else DataModel.default()
    ioc_db = IocDb.load(paths.ioc_db) if paths.ioc_db else IocDb()
    store = _load_ttp_store(paths.ttp_index, model) if paths.ttp_index else TtpStore()
    return store, ioc_db, model
