"""Content-addressed blob storage and linked-dataset registration.

Large instrument files never enter the repository journal; they live in an
external store addressed by SHA-256, while the repository keeps a
DatasetRecord holding the link, checksum, and extracted metadata. The one
shipped backend writes blobs to a local directory tree; an S3-style
backend can implement the same three methods.
"""

from __future__ import annotations

import hashlib
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .core.records import BlobRef, DatasetRecord
from .core.repository import Repository
from .errors import (
    CorruptBlobError,
    NotFoundError,
    StorageIOError,
    VocabularyError,
)
from .extract import UNKNOWN, extract_metadata
from .previews import build_preview


@dataclass(frozen=True)
class StoreStats:
    blob_count: int
    total_bytes: int


class BlobStore:
    """Filesystem blob store: blobs at ``<root>/<first-2-hex>/<full-hash>``."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path_for(self, content_hash: str) -> Path:
        return self.root / content_hash[:2] / content_hash

    def put_blob(self, data: bytes) -> BlobRef:
        """Store bytes under their content address; idempotent."""
        content_hash = hashlib.sha256(data).hexdigest()
        ref = BlobRef(content_hash=content_hash, size_bytes=len(data))
        path = self._path_for(content_hash)
        if path.exists():
            return ref
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
            try:
                with os.fdopen(fd, "wb") as fh:
                    fh.write(data)
                os.replace(tmp_name, path)
            finally:
                if os.path.exists(tmp_name):
                    os.unlink(tmp_name)
        except OSError as exc:
            raise StorageIOError(f"cannot store blob at {path}: {exc}") from exc
        return ref

    def get_blob(self, ref: BlobRef) -> bytes:
        """Read bytes back, verifying the content address on every read."""
        path = self._path_for(ref.content_hash)
        if not path.exists():
            raise NotFoundError(f"no blob {ref.content_hash} in store {self.root}")
        try:
            data = path.read_bytes()
        except OSError as exc:
            raise StorageIOError(f"cannot read blob at {path}: {exc}") from exc
        actual = hashlib.sha256(data).hexdigest()
        if actual != ref.content_hash:
            raise CorruptBlobError(
                f"blob {ref.content_hash} failed verification (content hashes to {actual})"
            )
        return data

    def has_blob(self, content_hash: str) -> bool:
        return self._path_for(content_hash).exists()

    def delete_blob(self, content_hash: str) -> None:
        path = self._path_for(content_hash)
        if path.exists():
            path.unlink()

    def iter_hashes(self):
        for shard in sorted(self.root.iterdir()):
            if shard.is_dir():
                for blob in sorted(shard.iterdir()):
                    if not blob.name.startswith("."):
                        yield blob.name

    def stats(self) -> StoreStats:
        count = 0
        total = 0
        for content_hash in self.iter_hashes():
            count += 1
            total += self._path_for(content_hash).stat().st_size
        return StoreStats(blob_count=count, total_bytes=total)


def register_linked_dataset(
    repo: Repository,
    store: BlobStore,
    owner_entry: str,
    data: bytes,
    dataset_type: str,
    parser_choice: str | None = None,
    original_filename: str = "",
    warnings: list[str] | None = None,
) -> DatasetRecord:
    """Store a file and register it as a linked dataset of a notebook entry.

    When a parser is chosen, metadata extraction runs and the unified fields
    are attached; a failing parse degrades to a raw-only registration with a
    warning rather than refusing the file.
    """
    sink = warnings if warnings is not None else []
    if not repo.has_object(owner_entry):
        raise NotFoundError(f"no entry with permId {owner_entry}")
    vocab = repo.get_vocabulary("DATASET_TYPE")
    if not vocab.has_term(dataset_type):
        raise VocabularyError(f"{dataset_type!r} is not a DATASET_TYPE term")

    blob = store.put_blob(data)

    vendor = UNKNOWN
    unified = None
    if parser_choice is not None and parser_choice != UNKNOWN:
        try:
            result = extract_metadata(data, parser_choice)
            vendor = result.vendor
            unified = result.unified
            sink.extend(result.warnings)
        except Exception as exc:  # degraded registration, never a refusal
            sink.append(f"metadata extraction failed ({exc}); registered without metadata")

    preview_ref = None
    try:
        preview_png = build_preview(data, vendor=vendor, dataset_type=dataset_type)
        if preview_png is not None:
            preview_ref = store.put_blob(preview_png)
    except Exception as exc:
        sink.append(f"preview generation failed: {exc}")

    record = DatasetRecord(
        dataset_id=repo.mint_id(),
        owner_entry=owner_entry,
        dataset_type=dataset_type,
        blob=blob,
        original_filename=original_filename,
        vendor=vendor,
        unified_metadata=unified,
        preview=preview_ref,
    )
    repo.put_dataset(record)
    return record


def referenced_hashes(repo: Repository) -> set[str]:
    refs: set[str] = set()
    for dataset in repo.datasets():
        refs.add(dataset.blob.content_hash)
        if dataset.preview is not None:
            refs.add(dataset.preview.content_hash)
    return refs


def check_consistency(repo: Repository, store: BlobStore) -> list[str]:
    """Verify every registered blob exists and hashes correctly."""
    problems: list[str] = []
    for dataset in repo.datasets():
        for label, ref in (("blob", dataset.blob), ("preview", dataset.preview)):
            if ref is None:
                continue
            try:
                store.get_blob(ref)
            except (NotFoundError, CorruptBlobError, StorageIOError) as exc:
                problems.append(f"dataset {dataset.dataset_id} {label}: {exc.message}")
    return problems


def garbage_collect(repo: Repository, store: BlobStore) -> list[str]:
    """Delete blobs no dataset references (e.g. from failed registrations)."""
    live = referenced_hashes(repo)
    removed = []
    for content_hash in list(store.iter_hashes()):
        if content_hash not in live:
            store.delete_blob(content_hash)
            removed.append(content_hash)
    return removed
