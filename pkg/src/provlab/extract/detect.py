"""Vendor format detection from leading bytes.

A file extension alone does not identify the producing instrument, so the
synthetic vendor formats carry unambiguous magic: an 8-byte header for the
two binary layouts, a fixed first section header for the text layout.
"""

from __future__ import annotations

VENDOR_A = "VendorA"
VENDOR_B = "VendorB"
VENDOR_C = "VendorC"
UNKNOWN = "Unknown"

KNOWN_VENDORS = (VENDOR_A, VENDOR_B, VENDOR_C)

VENDOR_A_MAGIC = b"VNDA\x00\x01\x00\x00"
VENDOR_B_MAGIC = b"VNDB\x00\x01\x00\x00"
VENDOR_C_MAGIC = b"[System]"


def detect_format(leading_bytes: bytes) -> str:
    """Classify a byte prefix; pure function, never raises."""
    if len(leading_bytes) < 8:
        return UNKNOWN
    if leading_bytes[:8] == VENDOR_A_MAGIC:
        return VENDOR_A
    if leading_bytes[:8] == VENDOR_B_MAGIC:
        return VENDOR_B
    if leading_bytes.lstrip().startswith(VENDOR_C_MAGIC):
        return VENDOR_C
    return UNKNOWN
