"""Unified SEM acquisition metadata and the vendor-to-unified field mapping.

Vendors label the same physical quantity differently (the acceleration
voltage appears as ``EHT``, ``HV``, or ``Beam.HV`` depending on the
microscope). This module owns the harmonized superset of field names in
canonical SI units, the per-vendor key mapping onto it, and the rules for
fields that are not stored directly but can be computed from others.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields as dc_fields

from ..errors import DomainError

#: Fixed reference display width used to derive magnification when a vendor
#: stores only the pixel size: M = width_ref / (pixel_size * image_width_px).
#: 0.127 m is the historical photographic-print convention.
REFERENCE_DISPLAY_WIDTH_M = 0.127

# Multiplicative unit normalization factors to SI base units. Only vendor A
# writes unit suffixes; B and C store SI base values directly.
UNIT_FACTORS: dict[str, float] = {
    "": 1.0,
    "V": 1.0,
    "s": 1.0,
    "m": 1.0,
    "Pa": 1.0,
    "A": 1.0,
    "rad": 1.0,
    "px": 1.0,
    "kV": 1e3,
    "ms": 1e-3,
    "µs": 1e-6,
    "us": 1e-6,
    "ns": 1e-9,
    "mm": 1e-3,
    "µm": 1e-6,
    "um": 1e-6,
    "nm": 1e-9,
    "mbar": 1e2,
    "nA": 1e-9,
    "pA": 1e-12,
    "deg": math.pi / 180.0,
}

# Ontology IRIs for unified fields, attached verbatim when the field is
# populated. Fields without an agreed IRI carry none.
ONTOLOGY_IRIS: dict[str, str] = {
    "acceleration_voltage": "https://purls.helmholtz-metadaten.de/emg/EMG_00000004",
    "dwell_time": "https://purls.helmholtz-metadaten.de/emg/EMG_00000015",
    "working_distance": "https://purls.helmholtz-metadaten.de/emg/EMG_00000050",
    "pixel_size": "https://w3id.org/pmd/mo/PixelSize",
    "emission_current": "https://purls.helmholtz-metadaten.de/emg/EMG_00000025",
    "beam_current": "https://purls.helmholtz-metadaten.de/emg/EMG_00000006",
    "frame_time": "https://w3id.org/pmd/mo/FrameTime",
    "magnification": "https://w3id.org/pmd/mo/ActualMagnification",
    "chamber_pressure": "https://w3id.org/pmd/mo/ChamberVacuum",
    "system_vacuum": "https://w3id.org/pmd/mo/SystemVacuum",
    "gun_vacuum": "https://w3id.org/pmd/mo/GunVacuum",
}

_INT_FIELDS = ("databar_rows", "image_width_px", "image_height_px")

# Stage coordinates and rotation may legitimately be negative.
_SIGNED_FIELDS = ("stage_x", "stage_y", "stage_z", "stage_rotation")


@dataclass
class RawEntry:
    key: str
    value: float | int | str
    unit: str | None = None

    def to_dict(self) -> dict:
        return {"key": self.key, "value": self.value, "unit": self.unit}


@dataclass
class RawKeyValues:
    """Key/value pairs exactly as found in the file, in file order."""

    entries: list[RawEntry] = field(default_factory=list)

    def add(self, key: str, value: float | int | str, unit: str | None = None) -> None:
        self.entries.append(RawEntry(key, value, unit))

    def last_values(self) -> dict[str, RawEntry]:
        """Collapse duplicates, last occurrence winning."""
        return {e.key: e for e in self.entries}

    def to_dict(self) -> dict:
        return {"entries": [e.to_dict() for e in self.entries]}


@dataclass
class UnifiedSemMetadata:
    """Harmonized SEM acquisition fields, all in SI base units."""

    acceleration_voltage: float | None = None  # V
    dwell_time: float | None = None  # s
    stage_x: float | None = None  # m
    stage_y: float | None = None  # m
    stage_z: float | None = None  # m
    stage_rotation: float | None = None  # rad
    working_distance: float | None = None  # m
    pixel_size: float | None = None  # m
    emission_current: float | None = None  # A
    beam_current: float | None = None  # A
    frame_time: float | None = None  # s
    line_time: float | None = None  # s
    magnification: float | None = None  # dimensionless
    chamber_pressure: float | None = None  # Pa
    system_vacuum: float | None = None  # Pa
    gun_vacuum: float | None = None  # Pa
    databar_rows: int | None = None
    image_width_px: int | None = None
    image_height_px: int | None = None
    ontology_iri: dict[str, str] = field(default_factory=dict)

    def present_fields(self) -> list[str]:
        """Names of populated fields in declaration order."""
        return [
            f.name
            for f in dc_fields(self)
            if f.name != "ontology_iri" and getattr(self, f.name) is not None
        ]

    def validate(self) -> None:
        for f in self.present_fields():
            value = getattr(self, f)
            if not math.isfinite(value):
                raise DomainError(f"unified field {f} is not finite: {value}")
            if f not in _SIGNED_FIELDS and value < 0:
                raise DomainError(f"unified field {f} must be >= 0, got {value}")
        if self.databar_rows is not None and self.image_height_px is not None:
            if self.databar_rows > self.image_height_px:
                raise DomainError(
                    f"databar_rows {self.databar_rows} exceeds image height {self.image_height_px}"
                )

    def to_dict(self) -> dict:
        data = {f: getattr(self, f) for f in self.present_fields()}
        if self.ontology_iri:
            data["ontology_iri"] = dict(self.ontology_iri)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "UnifiedSemMetadata":
        known = {f.name for f in dc_fields(cls)}
        kwargs = {k: v for k, v in data.items() if k in known}
        kwargs["ontology_iri"] = dict(data.get("ontology_iri", {}))
        return cls(**kwargs)


@dataclass
class ParseResult:
    vendor: str
    raw: RawKeyValues
    unified: UnifiedSemMetadata
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "vendor": self.vendor,
            "raw": self.raw.to_dict(),
            "unified": self.unified.to_dict(),
            "warnings": list(self.warnings),
        }


# Vendor key -> unified field. Keys consumed only as inputs to computed
# fields map to None-valued sentinels handled separately below.
VENDOR_A_MAP: dict[str, str] = {
    "EHT": "acceleration_voltage",
    "Dwell Time": "dwell_time",
    "Stage at X": "stage_x",
    "Stage at Y": "stage_y",
    "Stage at Z": "stage_z",
    "Stage at R": "stage_rotation",
    "WD": "working_distance",
    "Pixel Size": "pixel_size",
    "Beam Current": "beam_current",
    "Cycle Time": "frame_time",
    "Line Time": "line_time",
    "Mag": "magnification",
    "Chamber": "chamber_pressure",
    "System Vacuum": "system_vacuum",
    "Gun Vacuum": "gun_vacuum",
    "Image Width": "image_width_px",
    "Image Height": "image_height_px",
}

VENDOR_B_MAP: dict[str, str] = {
    "HV": "acceleration_voltage",
    "DwellTime": "dwell_time",
    "StageX": "stage_x",
    "StageY": "stage_y",
    "StageZ": "stage_z",
    "StageRotation": "stage_rotation",
    "WD": "working_distance",
    "PixelSizeX": "pixel_size",
    "EmissionCurrent": "emission_current",
    "PredictedBeamCurrent": "beam_current",
    "Magnification": "magnification",
    "ChamberPressure": "chamber_pressure",
    "ImageStripSize": "databar_rows",
    "ResolutionX": "image_width_px",
    "ResolutionY": "image_height_px",
}

VENDOR_C_MAP: dict[str, str] = {
    "Beam.HV": "acceleration_voltage",
    "Scan.Dwelltime": "dwell_time",
    "Stage.StageX": "stage_x",
    "Stage.StageY": "stage_y",
    "Stage.StageZ": "stage_z",
    "Stage.StageR": "stage_rotation",
    "Stage.WorkingDistance": "working_distance",
    "Scan.PixelWidth": "pixel_size",
    "EBeam.EmissionCurrent": "emission_current",
    "Beam.BeamCurrent": "beam_current",
    "EScan.LineTime": "line_time",
    "Vacuum.ChPressure": "chamber_pressure",
    "Image.ResolutionX": "image_width_px",
    "Image.ResolutionY": "image_height_px",
}

# Keys read only to feed computed fields (never unified fields themselves).
VENDOR_A_COMPUTE_INPUTS = frozenset({"Scan Rows"})
VENDOR_C_COMPUTE_INPUTS = frozenset({"EScan.ScanRows"})

_VENDOR_TABLES: dict[str, tuple[dict[str, str], frozenset[str]]] = {
    "VendorA": (VENDOR_A_MAP, VENDOR_A_COMPUTE_INPUTS),
    "VendorB": (VENDOR_B_MAP, frozenset()),
    "VendorC": (VENDOR_C_MAP, VENDOR_C_COMPUTE_INPUTS),
}


def compute_magnification(pixel_size: float, image_width_px: int) -> float:
    """Magnification relative to the fixed reference display width."""
    if pixel_size <= 0:
        raise DomainError(f"pixel_size must be positive, got {pixel_size}")
    if image_width_px < 1:
        raise DomainError(f"image_width_px must be >= 1, got {image_width_px}")
    return REFERENCE_DISPLAY_WIDTH_M / (pixel_size * image_width_px)


def compute_databar_rows(image_height_px: int, scan_rows: int) -> int:
    """Rows of the information strip appended below the scanned area."""
    if scan_rows < 0:
        raise DomainError(f"scan_rows must be >= 0, got {scan_rows}")
    if scan_rows > image_height_px:
        raise DomainError(
            f"scan_rows {scan_rows} exceeds image height {image_height_px}"
        )
    return image_height_px - scan_rows


def normalize_value(value: float, unit: str | None) -> float:
    """Scale a declared-unit value to SI base units; exact multiplication."""
    if unit is None:
        return value
    factor = UNIT_FACTORS.get(unit)
    if factor is None:
        raise DomainError(f"unknown unit suffix {unit!r}")
    return value * factor


def map_to_unified(
    raw: RawKeyValues,
    vendor: str,
    warnings: list[str] | None = None,
) -> UnifiedSemMetadata:
    """Apply the vendor key mapping and fill computed fields.

    Unmappable keys stay raw-only and produce a warning, never an error.
    Computed fields (magnification for vendor C, databar rows for A and C)
    are filled when their inputs are available.
    """
    if vendor not in _VENDOR_TABLES:
        raise DomainError(f"no unified mapping for vendor {vendor!r}")
    sink = warnings if warnings is not None else []
    mapping, compute_inputs = _VENDOR_TABLES[vendor]

    meta = UnifiedSemMetadata()
    inputs: dict[str, float] = {}
    for key, entry in raw.last_values().items():
        if key in compute_inputs:
            try:
                inputs[key] = float(entry.value)
            except (TypeError, ValueError):
                sink.append(f"non-numeric value for {key!r}: {entry.value!r}")
            continue
        target = mapping.get(key)
        if target is None:
            sink.append(f"key {key!r} has no unified mapping; kept raw only")
            continue
        if isinstance(entry.value, str):
            sink.append(f"non-numeric value for {key!r}: {entry.value!r}; kept raw only")
            continue
        try:
            value = normalize_value(float(entry.value), entry.unit)
        except DomainError as exc:
            sink.append(f"{key!r}: {exc.message}; kept raw only")
            continue
        if target in _INT_FIELDS:
            setattr(meta, target, int(round(value)))
        else:
            setattr(meta, target, value)

    _fill_computed(meta, vendor, inputs, sink)

    for name in meta.present_fields():
        iri = ONTOLOGY_IRIS.get(name)
        if iri:
            meta.ontology_iri[name] = iri
    return meta


def _fill_computed(
    meta: UnifiedSemMetadata,
    vendor: str,
    inputs: dict[str, float],
    sink: list[str],
) -> None:
    if vendor == "VendorC" and meta.magnification is None:
        if meta.pixel_size is not None and meta.image_width_px is not None:
            try:
                meta.magnification = compute_magnification(meta.pixel_size, meta.image_width_px)
            except DomainError as exc:
                sink.append(f"magnification not computed: {exc.message}")
    if vendor in ("VendorA", "VendorC") and meta.databar_rows is None:
        scan_key = "Scan Rows" if vendor == "VendorA" else "EScan.ScanRows"
        scan_rows = inputs.get(scan_key)
        if scan_rows is not None and meta.image_height_px is not None:
            try:
                meta.databar_rows = compute_databar_rows(meta.image_height_px, int(scan_rows))
            except DomainError as exc:
                sink.append(f"databar_rows not computed: {exc.message}")
