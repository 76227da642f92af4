"""Parsers for the three synthetic SEM vendor file layouts.

Vendor A: 8-byte magic, u32-LE metadata length, UTF-8 ``Key = Value Unit``
lines, then a PNG image payload. Values carry human unit suffixes.

Vendor B: 8-byte magic, then TLV records (u16-LE key length, ASCII key,
u8 value type, u16-LE value length, value bytes) terminated by a zero key
length. Values are already SI base units: 0x01 = float64 LE, 0x02 = u32 LE.

Vendor C: INI-style text starting with ``[System]``; keys are emitted as
dotted ``Section.Key`` paths; values are SI base units.

All parsers are pure functions over byte strings.
"""

from __future__ import annotations

import re
import struct

from ..errors import (
    BadTypeError,
    EncodingError,
    ParseError,
    SyntaxFormatError,
    TruncatedError,
)
from .detect import VENDOR_A_MAGIC, VENDOR_B_MAGIC
from .unified import RawKeyValues

_INT_RE = re.compile(r"^[+-]?\d+$")

VALUE_TYPE_FLOAT64 = 0x01
VALUE_TYPE_U32 = 0x02

_VALUE_SIZES = {VALUE_TYPE_FLOAT64: 8, VALUE_TYPE_U32: 4}


def _coerce_scalar(text: str) -> float | int | str:
    if _INT_RE.match(text):
        return int(text)
    try:
        return float(text)
    except ValueError:
        return text


def parse_vendor_a(data: bytes, warnings: list[str] | None = None) -> RawKeyValues:
    """Parse the vendor A metadata block; the image payload stays opaque."""
    sink = warnings if warnings is not None else []
    if data[:8] != VENDOR_A_MAGIC:
        raise ParseError("vendor A magic not present")
    if len(data) < 12:
        raise TruncatedError("vendor A header truncated before metadata length")
    (meta_len,) = struct.unpack_from("<I", data, 8)
    if 12 + meta_len > len(data):
        raise TruncatedError(
            f"metadata block of {meta_len} bytes exceeds file size {len(data)}"
        )
    try:
        block = data[12:12 + meta_len].decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"vendor A metadata block is not UTF-8: {exc}") from exc

    raw = RawKeyValues()
    if meta_len == 0:
        sink.append("vendor A file has an empty metadata block")
        return raw
    for line in block.split("\n"):
        if not line.strip():
            continue
        key, sep, rhs = line.partition(" = ")
        if not sep:
            sink.append(f"skipped malformed metadata line: {line!r}")
            continue
        tokens = rhs.strip().split()
        if not tokens:
            sink.append(f"skipped metadata line with empty value: {line!r}")
            continue
        value = _coerce_scalar(tokens[0])
        unit = tokens[1] if len(tokens) > 1 and not isinstance(value, str) else None
        if isinstance(value, str):
            # Free-text value, e.g. a detector name; keep verbatim.
            value = rhs.strip()
        raw.add(key.strip(), value, unit)
    return raw


def vendor_a_image_payload(data: bytes) -> bytes:
    """Bytes following the metadata block (a PNG image)."""
    if data[:8] != VENDOR_A_MAGIC or len(data) < 12:
        raise ParseError("vendor A magic not present")
    (meta_len,) = struct.unpack_from("<I", data, 8)
    if 12 + meta_len > len(data):
        raise TruncatedError("metadata block exceeds file size")
    return data[12 + meta_len:]


def parse_vendor_b(data: bytes, warnings: list[str] | None = None) -> RawKeyValues:
    """Parse the vendor B TLV stream."""
    if data[:8] != VENDOR_B_MAGIC:
        raise ParseError("vendor B magic not present")
    raw = RawKeyValues()
    offset = 8
    while True:
        if offset + 2 > len(data):
            raise TruncatedError("vendor B stream ends without a terminator record")
        (key_len,) = struct.unpack_from("<H", data, offset)
        offset += 2
        if key_len == 0:
            return raw
        if offset + key_len + 3 > len(data):
            raise TruncatedError(f"vendor B record at offset {offset} overruns file")
        try:
            key = data[offset:offset + key_len].decode("ascii")
        except UnicodeDecodeError as exc:
            raise EncodingError(f"vendor B key at offset {offset} is not ASCII") from exc
        offset += key_len
        value_type = data[offset]
        offset += 1
        (value_len,) = struct.unpack_from("<H", data, offset)
        offset += 2
        expected = _VALUE_SIZES.get(value_type)
        if expected is None:
            raise BadTypeError(f"unknown vendor B value type 0x{value_type:02x} for key {key!r}")
        if value_len != expected:
            raise BadTypeError(
                f"vendor B key {key!r}: value length {value_len} does not match "
                f"type 0x{value_type:02x} (expected {expected})"
            )
        if offset + value_len > len(data):
            raise TruncatedError(f"vendor B value for key {key!r} overruns file")
        payload = data[offset:offset + value_len]
        offset += value_len
        if value_type == VALUE_TYPE_FLOAT64:
            (value,) = struct.unpack("<d", payload)
            raw.add(key, value)
        else:
            (value,) = struct.unpack("<I", payload)
            raw.add(key, value)


def parse_vendor_c(data: bytes, warnings: list[str] | None = None) -> RawKeyValues:
    """Parse the vendor C INI-style text into dotted ``Section.Key`` entries."""
    sink = warnings if warnings is not None else []
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"vendor C file is not UTF-8: {exc}") from exc

    raw = RawKeyValues()
    section: str | None = None
    seen: set[tuple[str, str]] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("["):
            if not stripped.endswith("]") or len(stripped) < 3:
                raise SyntaxFormatError(f"line {lineno}: malformed section header {stripped!r}")
            section = stripped[1:-1]
            continue
        if section is None:
            raise SyntaxFormatError(f"line {lineno}: key before any section header")
        key, sep, value_text = stripped.partition("=")
        if not sep:
            raise SyntaxFormatError(f"line {lineno}: expected 'Key=Value', got {stripped!r}")
        key = key.strip()
        dotted = f"{section}.{key}"
        if (section, key) in seen:
            sink.append(f"duplicate key {dotted!r} on line {lineno}; last occurrence wins")
        seen.add((section, key))
        raw.add(dotted, _coerce_scalar(value_text.strip()))
    return raw
