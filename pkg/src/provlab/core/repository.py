"""The object repository: typed records, links, datasets, and the journal.

Persistence is a single append-only journal (one JSON document per line,
after a fixed header line) replayed into in-memory indexes at startup.
Many readers may query concurrently; every mutation is serialized through
one writer lock and journaled before it becomes visible.
"""

from __future__ import annotations

import json
import threading
from dataclasses import replace
from datetime import datetime
from pathlib import Path
from typing import Any, Callable, Iterator

from ..errors import (
    CycleError,
    DomainError,
    NotFoundError,
    ValidationFailedError,
)
from .identity import mint_perm_id
from .records import AuditEvent, DatasetRecord, ObjectRecord, utc_now
from .schemas import ControlledVocabulary, ObjectTypeSchema, seed_schemas, seed_vocabularies
from .validation import validate_object

JOURNAL_HEADER = {"format": "rdm-journal", "version": 1}


class Repository:
    """Typed object store with journal persistence and DAG-safe linking."""

    def __init__(
        self,
        journal_path: str | Path | None = None,
        clock: Callable[[], datetime] = utc_now,
    ):
        self._clock = clock
        self._lock = threading.RLock()
        self._objects: dict[str, ObjectRecord] = {}
        self._datasets: dict[str, DatasetRecord] = {}
        self._audit: dict[str, list[AuditEvent]] = {}
        self._jobs: dict[tuple[str, str, str], list[str]] = {}
        self._schemas: dict[str, ObjectTypeSchema] = dict(seed_schemas())
        self._vocabularies: dict[str, ControlledVocabulary] = dict(seed_vocabularies())
        self._next_seq = 1
        self._journal_path = Path(journal_path) if journal_path else None
        self._fh = None
        if self._journal_path is not None:
            self._open_journal()

    # -- journal ---------------------------------------------------------

    def _open_journal(self) -> None:
        path = self._journal_path
        if path.exists() and path.stat().st_size > 0:
            with path.open("r", encoding="utf-8") as fh:
                header = json.loads(fh.readline())
                if header.get("format") != JOURNAL_HEADER["format"]:
                    raise DomainError(f"{path} is not a repository journal")
                for line in fh:
                    if line.strip():
                        self._replay(json.loads(line))
        else:
            path.parent.mkdir(parents=True, exist_ok=True)
            with path.open("w", encoding="utf-8") as fh:
                fh.write(json.dumps(JOURNAL_HEADER, separators=(",", ":")) + "\n")
        self._fh = path.open("a", encoding="utf-8")
        used = [
            int(pid.rsplit("-", 1)[1])
            for pid in (*self._objects, *self._datasets)
        ]
        self._next_seq = max(used, default=0) + 1

    def _replay(self, event: dict) -> None:
        kind = event.get("event")
        data = event.get("data", {})
        if kind == "object":
            incoming = ObjectRecord.from_dict(data)
            current = self._objects.get(incoming.perm_id)
            if current is not None:
                # Links are owned by link events; keep the replayed state.
                incoming = replace(incoming, parents=current.parents, children=current.children)
            self._objects[incoming.perm_id] = incoming
        elif kind == "link":
            self._apply_link(event["parent"], event["child"])
        elif kind == "dataset":
            record = DatasetRecord.from_dict(data)
            self._datasets[record.dataset_id] = record
        elif kind == "audit":
            entry = AuditEvent.from_dict(data)
            self._audit.setdefault(entry.perm_id, []).append(entry)
        elif kind == "job":
            key = (data["entry"], data["workflow"], data["fingerprint"])
            self._jobs[key] = list(data.get("produced", ()))
        elif kind == "schema":
            schema = ObjectTypeSchema.from_dict(data)
            self._schemas[schema.type_name] = schema
        elif kind == "vocabulary":
            vocab = ControlledVocabulary.from_dict(data)
            self._vocabularies[vocab.name] = vocab
        # Unknown events are ignored so newer journals stay readable.

    def _journal(self, event: dict) -> None:
        if self._fh is not None:
            self._fh.write(json.dumps(event, separators=(",", ":")) + "\n")
            self._fh.flush()

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __enter__(self) -> "Repository":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- schemas and vocabularies ----------------------------------------

    def register_schema(self, schema: ObjectTypeSchema) -> None:
        with self._lock:
            self._journal({"event": "schema", "data": schema.to_dict()})
            self._schemas[schema.type_name] = schema

    def register_vocabulary(self, vocabulary: ControlledVocabulary) -> None:
        with self._lock:
            self._journal({"event": "vocabulary", "data": vocabulary.to_dict()})
            self._vocabularies[vocabulary.name] = vocabulary

    def get_schema(self, type_name: str) -> ObjectTypeSchema | None:
        return self._schemas.get(type_name)

    def get_vocabulary(self, name: str) -> ControlledVocabulary:
        vocab = self._vocabularies.get(name)
        if vocab is None:
            raise NotFoundError(f"no vocabulary named {name!r}")
        return vocab

    @property
    def vocabularies(self) -> dict[str, ControlledVocabulary]:
        return dict(self._vocabularies)

    # -- identity ----------------------------------------------------------

    def mint_id(self) -> str:
        """Mint a repository-unique permId; the sequence never repeats."""
        with self._lock:
            while True:
                perm_id = mint_perm_id(self._clock(), self._next_seq)
                self._next_seq += 1
                if perm_id not in self._objects and perm_id not in self._datasets:
                    return perm_id

    # -- objects -----------------------------------------------------------

    def validate(self, record: ObjectRecord):
        return validate_object(record, self._schemas.get(record.type_name), self._vocabularies)

    def put_object(self, record: ObjectRecord, actor: str = "system") -> str:
        """Persist a validated record; re-puts edit properties and audit them."""
        report = self.validate(record)
        if not report.ok:
            details = "; ".join(v.message for v in report.violations)
            raise ValidationFailedError(f"record rejected: {details}", report=report)
        with self._lock:
            current = self._objects.get(record.perm_id)
            declared_parents = record.parents
            declared_children = record.children
            if current is not None:
                if current.type_name != record.type_name:
                    raise DomainError(
                        f"type of {record.perm_id} is immutable "
                        f"({current.type_name!r} -> {record.type_name!r})"
                    )
                stored = replace(
                    record,
                    parents=current.parents,
                    children=current.children,
                    registered_at=current.registered_at,
                )
                audit_events = self._property_diff(current, stored, actor)
            else:
                stored = replace(record, parents=frozenset(), children=frozenset())
                audit_events = []
            self._journal({"event": "object", "data": stored.to_dict()})
            for entry in audit_events:
                self._journal({"event": "audit", "data": entry.to_dict()})
                self._audit.setdefault(entry.perm_id, []).append(entry)
            self._objects[stored.perm_id] = stored
            if current is None:
                for parent in sorted(declared_parents):
                    self.link(parent, stored.perm_id)
                for child in sorted(declared_children):
                    self.link(stored.perm_id, child)
            return stored.perm_id

    def _property_diff(
        self, old: ObjectRecord, new: ObjectRecord, actor: str
    ) -> list[AuditEvent]:
        events = []
        at = self._clock()
        for name in sorted(set(old.properties) | set(new.properties)):
            before = old.properties.get(name)
            after = new.properties.get(name)
            if before != after:
                events.append(AuditEvent(new.perm_id, at, actor, name, before, after))
        return events

    def get_object(self, perm_id: str) -> ObjectRecord:
        record = self._objects.get(perm_id)
        if record is None:
            raise NotFoundError(f"no object with permId {perm_id}")
        return replace(record, properties=dict(record.properties))

    def has_object(self, perm_id: str) -> bool:
        return perm_id in self._objects

    def objects(self) -> Iterator[ObjectRecord]:
        for perm_id in sorted(self._objects):
            yield self.get_object(perm_id)

    def objects_of_type(self, type_name: str) -> list[ObjectRecord]:
        return [r for r in self.objects() if r.type_name == type_name]

    def audit_for(self, perm_id: str) -> list[AuditEvent]:
        return list(self._audit.get(perm_id, ()))

    # -- links ---------------------------------------------------------------

    def link(self, parent: str, child: str) -> None:
        """Create a parent->child provenance edge, refusing cycles."""
        with self._lock:
            if parent == child:
                raise CycleError(f"cannot link {parent} to itself")
            if parent not in self._objects:
                raise NotFoundError(f"no object with permId {parent}")
            if child not in self._objects:
                raise NotFoundError(f"no object with permId {child}")
            if child in self._objects[parent].children:
                return  # idempotent
            if self._reaches(child, parent):
                raise CycleError(f"linking {parent} -> {child} would create a cycle")
            self._journal({"event": "link", "parent": parent, "child": child})
            self._apply_link(parent, child)

    def _apply_link(self, parent: str, child: str) -> None:
        p = self._objects[parent]
        c = self._objects[child]
        self._objects[parent] = replace(p, children=p.children | {child})
        self._objects[child] = replace(c, parents=c.parents | {parent})

    def _reaches(self, start: str, target: str) -> bool:
        """True if ``target`` is reachable from ``start`` along child edges."""
        frontier = [start]
        seen = {start}
        while frontier:
            node = frontier.pop()
            if node == target:
                return True
            for nxt in self._objects[node].children:
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return False

    def ancestors(self, perm_id: str) -> set[str]:
        return self._closure(perm_id, "parents")

    def descendants(self, perm_id: str) -> set[str]:
        return self._closure(perm_id, "children")

    def _closure(self, perm_id: str, direction: str) -> set[str]:
        if perm_id not in self._objects:
            raise NotFoundError(f"no object with permId {perm_id}")
        result: set[str] = set()
        frontier = [perm_id]
        while frontier:
            node = frontier.pop()
            for nxt in getattr(self._objects[node], direction):
                if nxt not in result:
                    result.add(nxt)
                    frontier.append(nxt)
        result.discard(perm_id)
        return result

    # -- datasets --------------------------------------------------------------

    def put_dataset(self, record: DatasetRecord) -> str:
        with self._lock:
            if record.owner_entry not in self._objects:
                raise NotFoundError(f"no object with permId {record.owner_entry}")
            self._journal({"event": "dataset", "data": record.to_dict()})
            self._datasets[record.dataset_id] = record
            return record.dataset_id

    def get_dataset(self, dataset_id: str) -> DatasetRecord:
        record = self._datasets.get(dataset_id)
        if record is None:
            raise NotFoundError(f"no dataset with permId {dataset_id}")
        return record

    def has_dataset(self, dataset_id: str) -> bool:
        return dataset_id in self._datasets

    def datasets(self) -> Iterator[DatasetRecord]:
        for dataset_id in sorted(self._datasets):
            yield self._datasets[dataset_id]

    def datasets_of(self, owner_entry: str) -> list[DatasetRecord]:
        return [d for d in self.datasets() if d.owner_entry == owner_entry]

    def update_dataset(self, record: DatasetRecord) -> None:
        """Re-journal an amended dataset record (e.g. a regenerated preview)."""
        with self._lock:
            if record.dataset_id not in self._datasets:
                raise NotFoundError(f"no dataset with permId {record.dataset_id}")
            self._journal({"event": "dataset", "data": record.to_dict()})
            self._datasets[record.dataset_id] = record

    # -- workflow job ledger ------------------------------------------------

    def record_job(self, entry: str, workflow: str, fingerprint: str, produced: list[str]) -> None:
        with self._lock:
            self._journal(
                {
                    "event": "job",
                    "data": {
                        "entry": entry,
                        "workflow": workflow,
                        "fingerprint": fingerprint,
                        "produced": list(produced),
                    },
                }
            )
            self._jobs[(entry, workflow, fingerprint)] = list(produced)

    def find_job(self, entry: str, workflow: str, fingerprint: str) -> list[str] | None:
        produced = self._jobs.get((entry, workflow, fingerprint))
        return list(produced) if produced is not None else None

    # -- convenience -----------------------------------------------------------

    def create_object(
        self,
        type_name: str,
        properties: dict[str, Any],
        space: str = "DEFAULT",
        parents: tuple[str, ...] = (),
        actor: str = "system",
    ) -> ObjectRecord:
        """Mint an id, validate, persist, and link declared parents."""
        record = ObjectRecord(
            perm_id=self.mint_id(),
            type_name=type_name,
            properties=dict(properties),
            parents=frozenset(parents),
            space=space,
            registered_at=self._clock(),
        )
        self.put_object(record, actor=actor)
        return self.get_object(record.perm_id)
