"""Permanent object identifiers and their QR payload encoding.

A permId is ``<17-digit UTC timestamp with milliseconds>-<sequence>``,
e.g. ``20231204123456789-42``. The timestamp makes ids sortable by mint
time; the sequence disambiguates ids minted within the same millisecond.
"""

from __future__ import annotations

import re
from datetime import datetime, timezone

from ..errors import DomainError, ParseError

PERM_ID_RE = re.compile(r"^(\d{17})-([1-9]\d*)$")

QR_SCHEME = "rdm://object/"


def mint_perm_id(clock: datetime, seq: int) -> str:
    """Format a permId from a UTC timestamp and a positive sequence number."""
    if seq < 1:
        raise DomainError(f"sequence number must be >= 1, got {seq}")
    if clock.tzinfo is None:
        clock = clock.replace(tzinfo=timezone.utc)
    utc = clock.astimezone(timezone.utc)
    millis = utc.microsecond // 1000
    return f"{utc.strftime('%Y%m%d%H%M%S')}{millis:03d}-{seq}"


def is_perm_id(value: str) -> bool:
    return bool(PERM_ID_RE.match(value))


def require_perm_id(value: str) -> str:
    if not is_perm_id(value):
        raise ParseError(f"not a valid permId: {value!r}")
    return value


def qr_payload(perm_id: str) -> str:
    """Encode a permId as the payload rendered into QR code labels."""
    require_perm_id(perm_id)
    return f"{QR_SCHEME}{perm_id}"


def resolve_qr_payload(payload: str) -> str:
    """Exact inverse of :func:`qr_payload`."""
    if not payload.startswith(QR_SCHEME):
        raise ParseError(f"unrecognized QR payload scheme: {payload!r}")
    return require_perm_id(payload[len(QR_SCHEME):])
