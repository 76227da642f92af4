"""Synthetic instrument-file writers, the inverse of the vendor parsers.

Used by tests (write -> parse round trips), by the ``fixtures`` CLI
subcommand, and by the demo scripts. In SI mode the writers emit base-unit
values whose text/binary encodings parse back bit-for-bit; vendor A
additionally supports a human-units mode (kV, mm, nm, mbar, ...) matching
how that vendor's real files present values.
"""

from __future__ import annotations

import io
import struct

import numpy as np
from PIL import Image

from ..errors import DomainError
from .detect import VENDOR_A_MAGIC, VENDOR_B_MAGIC
from .unified import UnifiedSemMetadata, compute_magnification
from .vendors import VALUE_TYPE_FLOAT64, VALUE_TYPE_U32

# (vendor A key, unified field, SI unit suffix, human unit suffix)
_VENDOR_A_LAYOUT = (
    ("EHT", "acceleration_voltage", "V", "kV"),
    ("Dwell Time", "dwell_time", "s", "µs"),
    ("Stage at X", "stage_x", "m", "mm"),
    ("Stage at Y", "stage_y", "m", "mm"),
    ("Stage at Z", "stage_z", "m", "mm"),
    ("Stage at R", "stage_rotation", "rad", "deg"),
    ("WD", "working_distance", "m", "mm"),
    ("Pixel Size", "pixel_size", "m", "nm"),
    ("Beam Current", "beam_current", "A", "nA"),
    ("Cycle Time", "frame_time", "s", "s"),
    ("Line Time", "line_time", "s", "ms"),
    ("Mag", "magnification", None, None),
    ("Chamber", "chamber_pressure", "Pa", "mbar"),
    ("System Vacuum", "system_vacuum", "Pa", "mbar"),
    ("Gun Vacuum", "gun_vacuum", "Pa", "mbar"),
)

_HUMAN_FACTORS = {"kV": 1e3, "µs": 1e-6, "mm": 1e-3, "nm": 1e-9, "nA": 1e-9,
                  "mbar": 1e2, "deg": np.pi / 180.0, "ms": 1e-3, "s": 1.0}

_VENDOR_B_LAYOUT = (
    ("HV", "acceleration_voltage", VALUE_TYPE_FLOAT64),
    ("DwellTime", "dwell_time", VALUE_TYPE_FLOAT64),
    ("StageX", "stage_x", VALUE_TYPE_FLOAT64),
    ("StageY", "stage_y", VALUE_TYPE_FLOAT64),
    ("StageZ", "stage_z", VALUE_TYPE_FLOAT64),
    ("StageRotation", "stage_rotation", VALUE_TYPE_FLOAT64),
    ("WD", "working_distance", VALUE_TYPE_FLOAT64),
    ("PixelSizeX", "pixel_size", VALUE_TYPE_FLOAT64),
    ("EmissionCurrent", "emission_current", VALUE_TYPE_FLOAT64),
    ("PredictedBeamCurrent", "beam_current", VALUE_TYPE_FLOAT64),
    ("Magnification", "magnification", VALUE_TYPE_FLOAT64),
    ("ChamberPressure", "chamber_pressure", VALUE_TYPE_FLOAT64),
    ("ImageStripSize", "databar_rows", VALUE_TYPE_U32),
    ("ResolutionX", "image_width_px", VALUE_TYPE_U32),
    ("ResolutionY", "image_height_px", VALUE_TYPE_U32),
)

# (section, key, unified field)
_VENDOR_C_LAYOUT = (
    ("Beam", "HV", "acceleration_voltage"),
    ("Beam", "BeamCurrent", "beam_current"),
    ("EBeam", "EmissionCurrent", "emission_current"),
    ("Scan", "Dwelltime", "dwell_time"),
    ("Scan", "PixelWidth", "pixel_size"),
    ("EScan", "LineTime", "line_time"),
    ("Stage", "StageX", "stage_x"),
    ("Stage", "StageY", "stage_y"),
    ("Stage", "StageZ", "stage_z"),
    ("Stage", "StageR", "stage_rotation"),
    ("Stage", "WorkingDistance", "working_distance"),
    ("Vacuum", "ChPressure", "chamber_pressure"),
    ("Image", "ResolutionX", "image_width_px"),
    ("Image", "ResolutionY", "image_height_px"),
)

# Unified fields that survive a write -> parse round trip unchanged,
# per vendor. Vendor C magnification is recomputed rather than stored, so
# it round-trips only when it was derived with compute_magnification.
REPRESENTABLE_FIELDS: dict[str, frozenset[str]] = {
    "VendorA": frozenset(f for _, f, _, _ in _VENDOR_A_LAYOUT) | {
        "image_width_px", "image_height_px", "databar_rows",
    },
    "VendorB": frozenset(f for _, f, _ in _VENDOR_B_LAYOUT),
    "VendorC": frozenset(f for _, _, f in _VENDOR_C_LAYOUT) | {"databar_rows"},
}


def _scan_rows_for(meta: UnifiedSemMetadata) -> int | None:
    """Invert the databar rule: scan rows = image rows - databar rows."""
    if meta.databar_rows is None or meta.image_height_px is None:
        return None
    if meta.databar_rows > meta.image_height_px:
        raise DomainError("databar_rows exceeds image_height_px")
    return meta.image_height_px - meta.databar_rows


def write_vendor_a(
    meta: UnifiedSemMetadata,
    *,
    image: bytes | None = None,
    human_units: bool = False,
) -> bytes:
    """Encode a vendor A file. SI mode (default) round-trips bit-for-bit."""
    lines: list[str] = []
    for key, field_name, si_unit, human_unit in _VENDOR_A_LAYOUT:
        value = getattr(meta, field_name)
        if value is None:
            continue
        if human_units and human_unit is not None:
            display = value / _HUMAN_FACTORS[human_unit]
            lines.append(f"{key} = {format(display, '.12g')} {human_unit}")
        elif si_unit is None:
            lines.append(f"{key} = {value!r}")
        else:
            lines.append(f"{key} = {value!r} {si_unit}")
    if meta.image_width_px is not None:
        lines.append(f"Image Width = {meta.image_width_px} px")
    if meta.image_height_px is not None:
        lines.append(f"Image Height = {meta.image_height_px} px")
    scan_rows = _scan_rows_for(meta)
    if scan_rows is not None:
        lines.append(f"Scan Rows = {scan_rows} px")
    block = "\n".join(lines).encode("utf-8")
    payload = image if image is not None else _PLACEHOLDER_PNG
    return VENDOR_A_MAGIC + struct.pack("<I", len(block)) + block + payload


def write_vendor_b(meta: UnifiedSemMetadata) -> bytes:
    """Encode a vendor B TLV file; float64/u32 values are exact by layout."""
    out = bytearray(VENDOR_B_MAGIC)
    for key, field_name, value_type in _VENDOR_B_LAYOUT:
        value = getattr(meta, field_name)
        if value is None:
            continue
        encoded = key.encode("ascii")
        out += struct.pack("<H", len(encoded))
        out += encoded
        out.append(value_type)
        if value_type == VALUE_TYPE_FLOAT64:
            out += struct.pack("<H", 8)
            out += struct.pack("<d", float(value))
        else:
            out += struct.pack("<H", 4)
            out += struct.pack("<I", int(value))
    out += struct.pack("<H", 0)
    return bytes(out)


def write_vendor_c(meta: UnifiedSemMetadata) -> bytes:
    """Encode a vendor C INI file; magnification is left to be computed."""
    sections: dict[str, list[str]] = {"System": ["Type=SEM"]}
    for section, key, field_name in _VENDOR_C_LAYOUT:
        value = getattr(meta, field_name)
        if value is None:
            continue
        rendered = str(value) if isinstance(value, int) else repr(float(value))
        sections.setdefault(section, []).append(f"{key}={rendered}")
    scan_rows = _scan_rows_for(meta)
    if scan_rows is not None:
        sections.setdefault("EScan", []).append(f"ScanRows={scan_rows}")
    parts: list[str] = []
    for section in ("System", "Beam", "EBeam", "Scan", "EScan", "Stage", "Vacuum", "Image"):
        if section in sections:
            parts.append(f"[{section}]")
            parts.extend(sections[section])
    return ("\n".join(parts) + "\n").encode("utf-8")


def make_micrograph_png(
    width: int = 256,
    height: int = 221,
    databar_rows: int = 29,
    seed: int = 0,
) -> bytes:
    """Deterministic synthetic micrograph: speckle texture plus a databar strip."""
    rng = np.random.default_rng(seed)
    scan_rows = height - databar_rows
    gradient = np.linspace(60, 180, scan_rows)[:, None] * np.ones((1, width))
    speckle = rng.normal(0.0, 30.0, size=(scan_rows, width))
    scan = np.clip(gradient + speckle, 0, 255).astype(np.uint8)
    bar = np.zeros((databar_rows, width), dtype=np.uint8)
    if databar_rows > 2:
        bar[databar_rows // 2, 4:width - 4] = 220
    img = Image.fromarray(np.vstack([scan, bar]), mode="L").convert("RGB")
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


_PLACEHOLDER_PNG = make_micrograph_png(width=16, height=14, databar_rows=2, seed=7)


def demo_metadata() -> UnifiedSemMetadata:
    """One fully populated acquisition record used across demos and fixtures."""
    meta = UnifiedSemMetadata(
        acceleration_voltage=20000.0,
        dwell_time=1e-06,
        stage_x=0.01,
        stage_y=-0.005,
        stage_z=0.0025,
        stage_rotation=0.7853981633974483,
        working_distance=0.005,
        pixel_size=1e-07,
        emission_current=1e-04,
        beam_current=2e-09,
        frame_time=0.5,
        line_time=2e-04,
        magnification=1000.0,
        chamber_pressure=0.1,
        system_vacuum=1e-04,
        gun_vacuum=1e-07,
        databar_rows=116,
        image_width_px=1270,
        image_height_px=884,
    )
    return meta


def demo_metadata_for(vendor: str) -> UnifiedSemMetadata:
    """Demo metadata restricted to what the given vendor can represent."""
    meta = demo_metadata()
    representable = REPRESENTABLE_FIELDS[vendor]
    for name in meta.present_fields():
        if name not in representable:
            setattr(meta, name, None)
    if vendor == "VendorA":
        meta.emission_current = None
    if vendor == "VendorC" and meta.pixel_size and meta.image_width_px:
        meta.magnification = compute_magnification(meta.pixel_size, meta.image_width_px)
    return meta


def make_ang_text(
    n_cols: int = 16,
    n_rows: int = 16,
    step: float = 5e-7,
    n_grains: int = 5,
    seed: int = 0,
    zero_quality_fraction: float = 0.0,
) -> str:
    """Synthetic EBSD scan: Voronoi grains with random orientations."""
    rng = np.random.default_rng(seed)
    centers = rng.uniform(0, 1, size=(n_grains, 2))
    eulers = np.column_stack([
        rng.uniform(0, 2 * np.pi, n_grains),
        np.arccos(rng.uniform(-1, 1, n_grains)),
        rng.uniform(0, 2 * np.pi, n_grains),
    ])
    lines = [
        "# Synthetic EBSD export",
        f"# NCOLS: {n_cols}",
        f"# NROWS: {n_rows}",
        f"# STEP: {step!r}",
    ]
    for r in range(n_rows):
        for c in range(n_cols):
            pos = np.array([c / max(n_cols - 1, 1), r / max(n_rows - 1, 1)])
            grain = int(np.argmin(((centers - pos) ** 2).sum(axis=1)))
            phi1, Phi, phi2 = eulers[grain]
            quality = 0.0 if rng.uniform() < zero_quality_fraction else float(
                rng.uniform(0.5, 1.0)
            )
            lines.append(
                f"{phi1:.6f} {Phi:.6f} {phi2:.6f} {c * step:.6e} {r * step:.6e} "
                f"{quality:.4f} 1"
            )
    return "\n".join(lines) + "\n"


def make_load_csv(
    pillar: str = "MP1",
    n_points: int = 200,
    max_displacement_nm: float = 400.0,
    stiffness_mn_per_nm: float = 0.004,
    yield_fraction: float = 0.55,
    seed: int = 0,
) -> str:
    """Synthetic load-displacement series: elastic ramp then a soft plateau."""
    rng = np.random.default_rng(seed)
    u = np.linspace(0.0, max_displacement_nm, n_points)
    u_yield = yield_fraction * max_displacement_nm
    load = np.where(
        u <= u_yield,
        stiffness_mn_per_nm * u,
        stiffness_mn_per_nm * u_yield + 0.15 * stiffness_mn_per_nm * (u - u_yield),
    )
    load = np.maximum(load + rng.normal(0.0, 0.002, n_points), 0.0)
    load[0] = 0.0
    t = np.linspace(0.0, n_points * 0.05, n_points)
    lines = ["time_s,displacement_nm,load_mN"]
    for ti, ui, fi in zip(t, u, load):
        lines.append(f"{ti:.4f},{ui:.4f},{fi:.6f}")
    return "\n".join(lines) + "\n"


def make_geometry_csv(pillars: dict[str, tuple[float, float]] | None = None) -> str:
    """Pillar geometry spreadsheet; dimensions in micrometres."""
    if pillars is None:
        pillars = {"MP1": (1.0, 2.0), "MP2": (2.0, 4.5)}
    lines = ["pillar_id,diameter_top_um,height_um"]
    for pillar_id, (diameter_um, height_um) in pillars.items():
        lines.append(f"{pillar_id},{diameter_um},{height_um}")
    return "\n".join(lines) + "\n"
