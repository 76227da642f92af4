"""Slide-deck creation: one section per selected image with its metadata."""

from __future__ import annotations

import base64

from .core.records import DatasetRecord
from .core.repository import Repository
from .errors import DomainError, EmptyInputError
from .extract import VENDOR_A, vendor_a_image_payload
from .previews import PNG_MAGIC
from .store import BlobStore, register_linked_dataset

# Display units for unified metadata fields, in a fixed presentation order.
_FIELD_UNITS = (
    ("acceleration_voltage", "V"),
    ("dwell_time", "s"),
    ("stage_x", "m"),
    ("stage_y", "m"),
    ("stage_z", "m"),
    ("stage_rotation", "rad"),
    ("working_distance", "m"),
    ("pixel_size", "m"),
    ("emission_current", "A"),
    ("beam_current", "A"),
    ("frame_time", "s"),
    ("line_time", "s"),
    ("magnification", ""),
    ("chamber_pressure", "Pa"),
    ("system_vacuum", "Pa"),
    ("gun_vacuum", "Pa"),
    ("databar_rows", "rows"),
    ("image_width_px", "px"),
    ("image_height_px", "px"),
)


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _slide_image(dataset: DatasetRecord, store: BlobStore) -> bytes:
    """PNG bytes for a slide: direct image, embedded image, or preview."""
    data = store.get_blob(dataset.blob)
    if data.startswith(PNG_MAGIC):
        return data
    if dataset.vendor == VENDOR_A:
        payload = vendor_a_image_payload(data)
        if payload.startswith(PNG_MAGIC):
            return payload
    if dataset.preview is not None:
        return store.get_blob(dataset.preview)
    raise DomainError(
        f"dataset {dataset.dataset_id} has neither image content nor a preview"
    )


def _metadata_rows(dataset: DatasetRecord) -> list[tuple[str, str]]:
    rows = [
        ("Dataset", dataset.dataset_id),
        ("File", dataset.original_filename or "-"),
        ("Type", dataset.dataset_type),
        ("Size", f"{dataset.blob.size_bytes} B"),
    ]
    if dataset.vendor != "Unknown":
        rows.append(("Vendor format", dataset.vendor))
    meta = dataset.unified_metadata
    if meta is not None:
        for name, unit in _FIELD_UNITS:
            value = getattr(meta, name)
            if value is None:
                continue
            rendered = format(value, "g") if isinstance(value, float) else str(value)
            rows.append((name.replace("_", " "), f"{rendered} {unit}".strip()))
    return rows


def render_deck_html(
    title: str,
    slides: list[tuple[DatasetRecord, bytes]],
) -> str:
    parts = [
        "<!DOCTYPE html>",
        "<html><head><meta charset=\"utf-8\">",
        f"<title>{_esc(title)}</title>",
        "<style>",
        "body{font-family:Helvetica,Arial,sans-serif;margin:0;background:#444}",
        ".slide{background:#fff;margin:24px auto;padding:24px;max-width:960px;"
        "display:flex;gap:24px;page-break-after:always}",
        ".slide img{max-width:560px;max-height:480px;object-fit:contain}",
        "table{border-collapse:collapse;font-size:13px}",
        "td{border:1px solid #bbb;padding:3px 10px}",
        "td:first-child{background:#f2f2f2}",
        "h1{color:#fff;text-align:center;font-weight:normal}",
        "</style></head><body>",
        f"<h1>{_esc(title)}</h1>",
    ]
    for dataset, image_png in slides:
        encoded = base64.b64encode(image_png).decode("ascii")
        rows = "".join(
            f"<tr><td>{_esc(k)}</td><td>{_esc(v)}</td></tr>"
            for k, v in _metadata_rows(dataset)
        )
        parts.append('<div class="slide">')
        parts.append(f'<img src="data:image/png;base64,{encoded}" alt="{_esc(dataset.original_filename)}">')
        parts.append(f"<table>{rows}</table>")
        parts.append("</div>")
    parts.append("</body></html>")
    return "\n".join(parts)


def build_slide_deck(
    repo: Repository,
    store: BlobStore,
    dataset_ids: list[str],
    title: str = "Selected datasets",
) -> tuple[bytes, DatasetRecord]:
    """Compile selected datasets into an HTML deck and register it back.

    The deck is registered as a SLIDE_DECK dataset owned by the first
    selected dataset's entry.
    """
    if not dataset_ids:
        raise EmptyInputError("no datasets selected for the deck")
    slides = []
    for dataset_id in dataset_ids:
        dataset = repo.get_dataset(dataset_id)
        slides.append((dataset, _slide_image(dataset, store)))
    html = render_deck_html(title, slides).encode("utf-8")
    record = register_linked_dataset(
        repo,
        store,
        owner_entry=slides[0][0].owner_entry,
        data=html,
        dataset_type="SLIDE_DECK",
        original_filename="slide_deck.html",
    )
    return html, record
