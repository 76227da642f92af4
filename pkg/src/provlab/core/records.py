"""Record types stored in the repository.

Records are frozen snapshots: the repository hands out copies, so callers
can share them across threads without locking.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Any

from ..extract.unified import UnifiedSemMetadata


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


def _dt_to_iso(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat()


def _dt_from_iso(raw: str) -> datetime:
    return datetime.fromisoformat(raw)


@dataclass(frozen=True)
class ObjectRecord:
    """A typed entity: sample, instrument, protocol, or notebook entry."""

    perm_id: str
    type_name: str
    properties: dict[str, Any] = field(default_factory=dict)
    parents: frozenset[str] = field(default_factory=frozenset)
    children: frozenset[str] = field(default_factory=frozenset)
    space: str = "DEFAULT"
    registered_at: datetime = field(default_factory=utc_now)

    def with_properties(self, **updates: Any) -> "ObjectRecord":
        merged = dict(self.properties)
        merged.update(updates)
        return replace(self, properties=merged)

    def to_dict(self) -> dict:
        return {
            "perm_id": self.perm_id,
            "type_name": self.type_name,
            "properties": self.properties,
            "parents": sorted(self.parents),
            "children": sorted(self.children),
            "space": self.space,
            "registered_at": _dt_to_iso(self.registered_at),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ObjectRecord":
        return cls(
            perm_id=data["perm_id"],
            type_name=data["type_name"],
            properties=dict(data.get("properties", {})),
            parents=frozenset(data.get("parents", ())),
            children=frozenset(data.get("children", ())),
            space=data.get("space", "DEFAULT"),
            registered_at=_dt_from_iso(data["registered_at"]),
        )


@dataclass(frozen=True)
class BlobRef:
    """Content address of bytes held in the external object store."""

    content_hash: str
    size_bytes: int

    def to_dict(self) -> dict:
        return {"content_hash": self.content_hash, "size_bytes": self.size_bytes}

    @classmethod
    def from_dict(cls, data: dict) -> "BlobRef":
        return cls(content_hash=data["content_hash"], size_bytes=data["size_bytes"])


@dataclass(frozen=True)
class DatasetRecord:
    """A registered file: the bytes live in the object store, the link here."""

    dataset_id: str
    owner_entry: str
    dataset_type: str
    blob: BlobRef
    original_filename: str
    vendor: str = "Unknown"
    unified_metadata: UnifiedSemMetadata | None = None
    preview: BlobRef | None = None
    registered_at: datetime = field(default_factory=utc_now)

    def to_dict(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "owner_entry": self.owner_entry,
            "dataset_type": self.dataset_type,
            "blob": self.blob.to_dict(),
            "original_filename": self.original_filename,
            "vendor": self.vendor,
            "unified_metadata": (
                self.unified_metadata.to_dict() if self.unified_metadata is not None else None
            ),
            "preview": self.preview.to_dict() if self.preview is not None else None,
            "registered_at": _dt_to_iso(self.registered_at),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DatasetRecord":
        unified = data.get("unified_metadata")
        preview = data.get("preview")
        return cls(
            dataset_id=data["dataset_id"],
            owner_entry=data["owner_entry"],
            dataset_type=data["dataset_type"],
            blob=BlobRef.from_dict(data["blob"]),
            original_filename=data["original_filename"],
            vendor=data.get("vendor", "Unknown"),
            unified_metadata=UnifiedSemMetadata.from_dict(unified) if unified else None,
            preview=BlobRef.from_dict(preview) if preview else None,
            registered_at=_dt_from_iso(data["registered_at"]),
        )


@dataclass(frozen=True)
class Violation:
    property_name: str
    rule_id: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [
                {"property": v.property_name, "rule": v.rule_id, "message": v.message}
                for v in self.violations
            ],
        }


@dataclass(frozen=True)
class AuditEvent:
    """One property edit: who changed what, from which value to which."""

    perm_id: str
    at: datetime
    actor: str
    property_name: str
    old_value: Any
    new_value: Any

    def to_dict(self) -> dict:
        return {
            "perm_id": self.perm_id,
            "at": _dt_to_iso(self.at),
            "actor": self.actor,
            "property": self.property_name,
            "old": self.old_value,
            "new": self.new_value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AuditEvent":
        return cls(
            perm_id=data["perm_id"],
            at=_dt_from_iso(data["at"]),
            actor=data["actor"],
            property_name=data["property"],
            old_value=data["old"],
            new_value=data["new"],
        )
