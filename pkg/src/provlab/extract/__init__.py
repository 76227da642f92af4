"""Instrument-file detection, parsing, and metadata unification."""

from __future__ import annotations

from ..errors import ParseError
from .detect import KNOWN_VENDORS, UNKNOWN, VENDOR_A, VENDOR_B, VENDOR_C, detect_format
from .unified import (
    ONTOLOGY_IRIS,
    ParseResult,
    RawKeyValues,
    UnifiedSemMetadata,
    compute_databar_rows,
    compute_magnification,
    map_to_unified,
    normalize_value,
)
from .vendors import parse_vendor_a, parse_vendor_b, parse_vendor_c, vendor_a_image_payload

_PARSERS = {
    VENDOR_A: parse_vendor_a,
    VENDOR_B: parse_vendor_b,
    VENDOR_C: parse_vendor_c,
}


def extract_metadata(data: bytes, vendor: str | None = None) -> ParseResult:
    """Detect (or trust) the vendor format, parse, and map to unified fields."""
    detected = detect_format(data[:64])
    chosen = vendor or detected
    if chosen == UNKNOWN or chosen not in _PARSERS:
        raise ParseError(f"no parser for format {chosen!r}")
    warnings: list[str] = []
    if vendor and detected != vendor:
        warnings.append(
            f"requested parser {vendor} but leading bytes look like {detected}"
        )
    raw = _PARSERS[chosen](data, warnings)
    unified = map_to_unified(raw, chosen, warnings)
    unified.validate()
    return ParseResult(vendor=chosen, raw=raw, unified=unified, warnings=warnings)


__all__ = [
    "KNOWN_VENDORS",
    "UNKNOWN",
    "VENDOR_A",
    "VENDOR_B",
    "VENDOR_C",
    "ONTOLOGY_IRIS",
    "ParseResult",
    "RawKeyValues",
    "UnifiedSemMetadata",
    "compute_databar_rows",
    "compute_magnification",
    "detect_format",
    "extract_metadata",
    "map_to_unified",
    "normalize_value",
    "parse_vendor_a",
    "parse_vendor_b",
    "parse_vendor_c",
    "vendor_a_image_payload",
]
