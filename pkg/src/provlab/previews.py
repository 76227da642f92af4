"""Dataset previews: image thumbnails and EBSD inverse-pole-figure maps.

The IPF-Z map colors each scan point by where the sample's Z direction
lands in the crystal frame, reduced to the cubic fundamental triangle with
corners 001 (red), 101 (green), and 111 (blue). This follows the standard
cubic-symmetry convention; only proper rotations (the 24-element group)
are applied, with the mirror absorbed by taking absolute components.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .errors import HeaderError, ShapeError, SyntaxFormatError
from .extract import UNKNOWN, VENDOR_A, detect_format, vendor_a_image_payload

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"

DEFAULT_THUMBNAIL_DIM = 256


@dataclass(frozen=True)
class EulerOrientation:
    """Bunge Z-X-Z Euler angles in radians, interpreted mod 2*pi."""

    phi1: float
    Phi: float
    phi2: float


@dataclass(frozen=True)
class EbsdCell:
    orientation: EulerOrientation
    quality: float
    phase_id: int


@dataclass(frozen=True)
class EbsdMap:
    n_cols: int
    n_rows: int
    step: float
    cells: tuple[EbsdCell, ...]

    def __post_init__(self):
        if len(self.cells) != self.n_cols * self.n_rows:
            raise ShapeError(
                f"EBSD map has {len(self.cells)} cells, expected "
                f"{self.n_cols} x {self.n_rows} = {self.n_cols * self.n_rows}"
            )


@dataclass(frozen=True)
class RgbImage:
    width: int
    height: int
    pixels: bytes  # row-major RGB8

    def __post_init__(self):
        if len(self.pixels) != 3 * self.width * self.height:
            raise ShapeError(
                f"pixel buffer has {len(self.pixels)} bytes, expected "
                f"{3 * self.width * self.height}"
            )


def parse_ang(text: str) -> EbsdMap:
    """Parse the open text EBSD format.

    Header lines start with ``#`` and must declare NCOLS, NROWS, and STEP.
    Data rows are ``phi1 Phi phi2 x y quality phase`` (angles in radians).
    """
    header: dict[str, str] = {}
    cells: list[EbsdCell] = []
    saw_any_line = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        saw_any_line = True
        if stripped.startswith("#"):
            body = stripped[1:].strip()
            if not body:
                continue
            key, _, value = body.partition(":")
            if not value:
                parts = body.split(None, 1)
                key, value = parts[0], parts[1] if len(parts) > 1 else ""
            header[key.strip().upper()] = value.strip()
            continue
        fields = stripped.split()
        if len(fields) != 7:
            raise SyntaxFormatError(
                f"line {lineno}: expected 7 fields 'phi1 Phi phi2 x y quality phase', "
                f"got {len(fields)}"
            )
        try:
            phi1, Phi, phi2 = float(fields[0]), float(fields[1]), float(fields[2])
            quality = float(fields[5])
            phase_id = int(fields[6])
        except ValueError as exc:
            raise SyntaxFormatError(f"line {lineno}: non-numeric field ({exc})") from exc
        cells.append(EbsdCell(EulerOrientation(phi1, Phi, phi2), quality, phase_id))

    if not saw_any_line:
        raise HeaderError("empty EBSD file")
    missing = [k for k in ("NCOLS", "NROWS", "STEP") if k not in header]
    if missing:
        raise HeaderError(f"EBSD header missing {', '.join(missing)}")
    try:
        n_cols = int(header["NCOLS"])
        n_rows = int(header["NROWS"])
        step = float(header["STEP"])
    except ValueError as exc:
        raise HeaderError(f"non-numeric EBSD header value ({exc})") from exc
    if len(cells) != n_cols * n_rows:
        raise ShapeError(
            f"EBSD data has {len(cells)} rows, header declares {n_cols} x {n_rows}"
        )
    return EbsdMap(n_cols=n_cols, n_rows=n_rows, step=step, cells=tuple(cells))


def bunge_matrix(o: EulerOrientation) -> np.ndarray:
    """Active rotation matrix Rz(phi1) @ Rx(Phi) @ Rz(phi2)."""
    c1, s1 = math.cos(o.phi1), math.sin(o.phi1)
    cP, sP = math.cos(o.Phi), math.sin(o.Phi)
    c2, s2 = math.cos(o.phi2), math.sin(o.phi2)
    rz1 = np.array([[c1, -s1, 0.0], [s1, c1, 0.0], [0.0, 0.0, 1.0]])
    rx = np.array([[1.0, 0.0, 0.0], [0.0, cP, -sP], [0.0, sP, cP]])
    rz2 = np.array([[c2, -s2, 0.0], [s2, c2, 0.0], [0.0, 0.0, 1.0]])
    return rz1 @ rx @ rz2


def sample_z_in_crystal(o: EulerOrientation) -> np.ndarray:
    """Crystal-frame direction of the sample Z axis: R^T (0, 0, 1)."""
    return bunge_matrix(o).T @ np.array([0.0, 0.0, 1.0])


def cubic_proper_rotations() -> list[np.ndarray]:
    """The 24 proper rotation matrices of the cubic lattice (det = +1)."""
    rotations = []
    for perm in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
        for signs in np.ndindex(2, 2, 2):
            mat = np.zeros((3, 3))
            for row, col in enumerate(perm):
                mat[row, col] = 1.0 if signs[row] == 0 else -1.0
            if round(np.linalg.det(mat)) == 1:
                rotations.append(mat)
    return rotations


_CUBIC_ROTATIONS = cubic_proper_rotations()


def _fundamental_direction(v: np.ndarray) -> np.ndarray:
    """Reduce a unit direction to the sorted-component fundamental zone.

    Applying the 24 proper rotations and folding the remaining mirror via
    absolute values is equivalent to sorting the absolute components, which
    yields 0 <= x <= y <= z: the standard triangle spanned by 001, 101, 111.
    """
    return np.sort(np.abs(v))


def color_from_direction(v: np.ndarray) -> tuple[int, int, int]:
    """Barycentric RGB against the triangle corners, max channel scaled to 255."""
    a, b, c = _fundamental_direction(v)
    red = c - b
    green = (b - a) * math.sqrt(2.0)
    blue = a * math.sqrt(3.0)
    top = max(red, green, blue)
    if top <= 0.0:
        return (0, 0, 0)
    # round half up so corner cases quantize exactly
    return (
        int(math.floor(255.0 * red / top + 0.5)),
        int(math.floor(255.0 * green / top + 0.5)),
        int(math.floor(255.0 * blue / top + 0.5)),
    )


def euler_to_ipf_color(o: EulerOrientation) -> tuple[int, int, int]:
    """IPF-Z color of one orientation."""
    return color_from_direction(sample_z_in_crystal(o))


def ipf_z_map(ebsd: EbsdMap) -> RgbImage:
    """Color the whole scan; zero-quality points render black."""
    buf = bytearray()
    for cell in ebsd.cells:
        if cell.quality == 0:
            buf += b"\x00\x00\x00"
        else:
            buf += bytes(euler_to_ipf_color(cell.orientation))
    return RgbImage(width=ebsd.n_cols, height=ebsd.n_rows, pixels=bytes(buf))


def thumbnail(image: RgbImage, max_dim: int = DEFAULT_THUMBNAIL_DIM) -> RgbImage:
    """Box-filter downsample so the larger side equals max_dim; never upscales."""
    if max_dim < 1:
        raise ShapeError(f"max_dim must be >= 1, got {max_dim}")
    if max(image.width, image.height) <= max_dim:
        return image
    scale = max_dim / max(image.width, image.height)
    new_w = max(1, int(math.floor(image.width * scale + 0.5)))
    new_h = max(1, int(math.floor(image.height * scale + 0.5)))
    if image.width >= image.height:
        new_w = max_dim
    else:
        new_h = max_dim
    arr = np.frombuffer(image.pixels, dtype=np.uint8).reshape(image.height, image.width, 3)
    resized = Image.fromarray(arr).resize((new_w, new_h), Image.BOX)
    return RgbImage(width=new_w, height=new_h, pixels=np.asarray(resized).tobytes())


def to_png(image: RgbImage) -> bytes:
    arr = np.frombuffer(image.pixels, dtype=np.uint8).reshape(image.height, image.width, 3)
    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, format="PNG")
    return buf.getvalue()


def from_png(data: bytes) -> RgbImage:
    img = Image.open(io.BytesIO(data)).convert("RGB")
    return RgbImage(width=img.width, height=img.height, pixels=np.asarray(img).tobytes())


def build_preview(
    data: bytes,
    vendor: str = UNKNOWN,
    dataset_type: str = "",
    max_dim: int = DEFAULT_THUMBNAIL_DIM,
) -> bytes | None:
    """Best-effort preview PNG for a registered file, or None."""
    if vendor == VENDOR_A or detect_format(data[:64]) == VENDOR_A:
        payload = vendor_a_image_payload(data)
        if payload.startswith(PNG_MAGIC):
            return to_png(thumbnail(from_png(payload), max_dim))
        return None
    if data.startswith(PNG_MAGIC):
        return to_png(thumbnail(from_png(data), max_dim))
    if dataset_type == "EBSD_MAP":
        ebsd = parse_ang(data.decode("utf-8"))
        return to_png(ipf_z_map(ebsd))
    return None
