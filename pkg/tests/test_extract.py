from __future__ import annotations

import random
import struct

import pytest

from provlab.errors import (
    BadTypeError,
    DomainError,
    EncodingError,
    SyntaxFormatError,
    TruncatedError,
)
from provlab.extract import (
    UNKNOWN,
    VENDOR_A,
    VENDOR_B,
    VENDOR_C,
    UnifiedSemMetadata,
    compute_databar_rows,
    compute_magnification,
    detect_format,
    extract_metadata,
    map_to_unified,
    normalize_value,
    parse_vendor_a,
    parse_vendor_b,
    parse_vendor_c,
)
from provlab.extract.detect import VENDOR_A_MAGIC, VENDOR_B_MAGIC
from provlab.extract.fixtures import (
    REPRESENTABLE_FIELDS,
    demo_metadata_for,
    write_vendor_a,
    write_vendor_b,
    write_vendor_c,
)
from provlab.extract.unified import UNIT_FACTORS, RawKeyValues

# The vendor key matrix: unified field -> (vendor A, vendor B, vendor C) cell,
# where "x" marks a field the vendor does not record and "*" one that is
# computed from other fields. 17 rows; the two frame-time-like rows are kept
# separate (frame_time from the cycle key, line_time from the line keys).
FIELD_MATRIX = [
    ("acceleration_voltage", "EHT", "HV", "Beam.HV"),
    ("dwell_time", "Dwell Time", "DwellTime", "Scan.Dwelltime"),
    ("stage_x", "Stage at X", "StageX", "Stage.StageX"),
    ("stage_y", "Stage at Y", "StageY", "Stage.StageY"),
    ("stage_z", "Stage at Z", "StageZ", "Stage.StageZ"),
    ("stage_rotation", "Stage at R", "StageRotation", "Stage.StageR"),
    ("working_distance", "WD", "WD", "Stage.WorkingDistance"),
    ("pixel_size", "Pixel Size", "PixelSizeX", "Scan.PixelWidth"),
    ("emission_current", "x", "EmissionCurrent", "EBeam.EmissionCurrent"),
    ("beam_current", "Beam Current", "PredictedBeamCurrent", "Beam.BeamCurrent"),
    ("frame_time", "Cycle Time", "x", "x"),
    ("line_time", "Line Time", "x", "EScan.LineTime"),
    ("magnification", "Mag", "Magnification", "*"),
    ("chamber_pressure", "Chamber", "ChamberPressure", "Vacuum.ChPressure"),
    ("system_vacuum", "System Vacuum", "x", "x"),
    ("gun_vacuum", "Gun Vacuum", "x", "x"),
    ("databar_rows", "*", "ImageStripSize", "*"),
]

EXPECTED_IRIS = {
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

VENDORS = {VENDOR_A: 1, VENDOR_B: 2, VENDOR_C: 3}

WRITERS = {VENDOR_A: write_vendor_a, VENDOR_B: write_vendor_b, VENDOR_C: write_vendor_c}


def full_fixture(vendor: str):
    meta = demo_metadata_for(vendor)
    data = WRITERS[vendor](meta)
    return meta, extract_metadata(data, vendor)


# -- detection ---------------------------------------------------------------


def test_detect_vendor_a_magic():
    assert detect_format(VENDOR_A_MAGIC + b"stuff") == VENDOR_A


def test_detect_vendor_b_magic():
    assert detect_format(VENDOR_B_MAGIC + b"\x00\x00") == VENDOR_B


def test_detect_vendor_c_first_nonwhitespace():
    assert detect_format(b"[System]\nType=SEM\n") == VENDOR_C
    assert detect_format(b"  \n\t[System]\nType=SEM\n") == VENDOR_C


def test_detect_unknown_and_short():
    assert detect_format(b"GIF89a, definitely an image") == UNKNOWN
    assert detect_format(b"VNDA") == UNKNOWN  # fewer than 8 bytes
    assert detect_format(b"[Beam]\nHV=1") == UNKNOWN


# -- vendor A ----------------------------------------------------------------


def vendor_a_bytes(lines: list[str], payload: bytes = b"") -> bytes:
    block = "\n".join(lines).encode("utf-8")
    return VENDOR_A_MAGIC + struct.pack("<I", len(block)) + block + payload


def test_vendor_a_line_parses_value_and_unit():
    raw = parse_vendor_a(vendor_a_bytes(["EHT = 20.00 kV"]))
    assert [(e.key, e.value, e.unit) for e in raw.entries] == [("EHT", 20.0, "kV")]


def test_vendor_a_empty_metadata_warns():
    warnings: list[str] = []
    raw = parse_vendor_a(vendor_a_bytes([]), warnings)
    assert raw.entries == []
    assert warnings


def test_vendor_a_truncated_block():
    data = VENDOR_A_MAGIC + struct.pack("<I", 1000) + b"short"
    with pytest.raises(TruncatedError):
        parse_vendor_a(data)


def test_vendor_a_non_utf8_block():
    bad = b"\xff\xfe\x00\x01"
    data = VENDOR_A_MAGIC + struct.pack("<I", len(bad)) + bad
    with pytest.raises(EncodingError):
        parse_vendor_a(data)


# -- vendor B ------------------------------------------------------------------


def tlv(key: str, value, value_type: int) -> bytes:
    encoded = key.encode("ascii")
    out = struct.pack("<H", len(encoded)) + encoded + bytes([value_type])
    if value_type == 0x01:
        return out + struct.pack("<H", 8) + struct.pack("<d", value)
    return out + struct.pack("<H", 4) + struct.pack("<I", value)


TERMINATOR = struct.pack("<H", 0)


def test_vendor_b_float_and_u32_records():
    data = VENDOR_B_MAGIC + tlv("HV", 20000.0, 0x01) + tlv("ImageStripSize", 116, 0x02) + TERMINATOR
    raw = parse_vendor_b(data)
    assert [(e.key, e.value, e.unit) for e in raw.entries] == [
        ("HV", 20000.0, None),
        ("ImageStripSize", 116, None),
    ]


def test_vendor_b_immediate_terminator_is_empty():
    raw = parse_vendor_b(VENDOR_B_MAGIC + TERMINATOR)
    assert raw.entries == []


def test_vendor_b_unknown_value_type():
    record = struct.pack("<H", 2) + b"HV" + bytes([0x7F]) + struct.pack("<H", 8) + b"\x00" * 8
    with pytest.raises(BadTypeError):
        parse_vendor_b(VENDOR_B_MAGIC + record + TERMINATOR)


def test_vendor_b_record_overruns_file():
    data = VENDOR_B_MAGIC + tlv("HV", 20000.0, 0x01)[:-4]
    with pytest.raises(TruncatedError):
        parse_vendor_b(data)


def test_vendor_b_missing_terminator():
    with pytest.raises(TruncatedError):
        parse_vendor_b(VENDOR_B_MAGIC + tlv("HV", 1.0, 0x01))


# -- vendor C -------------------------------------------------------------------


def test_vendor_c_dotted_keys():
    raw = parse_vendor_c(b"[Beam]\nHV=20000.0\n")
    assert [(e.key, e.value) for e in raw.entries] == [("Beam.HV", 20000.0)]


def test_vendor_c_key_before_section():
    with pytest.raises(SyntaxFormatError):
        parse_vendor_c(b"HV=20000.0\n[Beam]\n")


def test_vendor_c_missing_equals_reports_line_number():
    with pytest.raises(SyntaxFormatError) as excinfo:
        parse_vendor_c(b"[Beam]\nHV 20000.0\n")
    assert "line 2" in str(excinfo.value)


def test_vendor_c_duplicate_key_last_wins_with_warning():
    warnings: list[str] = []
    raw = parse_vendor_c(b"[Beam]\nHV=1.0\nHV=2.0\n", warnings)
    assert raw.last_values()["Beam.HV"].value == 2.0
    assert len(raw.entries) == 2  # both occurrences preserved verbatim
    assert any("duplicate" in w for w in warnings)


# -- computed fields --------------------------------------------------------------


def test_compute_magnification_reference_values():
    assert compute_magnification(1e-7, 1270) == 1000.0
    assert compute_magnification(0.127, 1) == 1.0
    with pytest.raises(DomainError):
        compute_magnification(0.0, 1024)


def test_compute_databar_rows_reference_values():
    assert compute_databar_rows(884, 768) == 116
    assert compute_databar_rows(768, 768) == 0
    with pytest.raises(DomainError):
        compute_databar_rows(700, 768)


# -- mapping ------------------------------------------------------------------------


def test_map_kilovolt_normalization():
    raw = RawKeyValues()
    raw.add("EHT", 20.0, "kV")
    meta = map_to_unified(raw, VENDOR_A)
    assert meta.acceleration_voltage == 20000.0


def test_emission_current_present_for_b_absent_for_a():
    raw_b = RawKeyValues()
    raw_b.add("EmissionCurrent", 1.0e-4)
    assert map_to_unified(raw_b, VENDOR_B).emission_current == 1.0e-4

    _, result_a = full_fixture(VENDOR_A)
    assert result_a.unified.emission_current is None


def test_vendor_c_magnification_computed():
    raw = RawKeyValues()
    raw.add("Scan.PixelWidth", 1e-7)
    raw.add("Image.ResolutionX", 1270)
    meta = map_to_unified(raw, VENDOR_C)
    assert meta.magnification == 1000.0


def test_unmapped_key_warns_but_never_errors():
    raw = RawKeyValues()
    raw.add("Operator Mood", "excellent")
    warnings: list[str] = []
    meta = map_to_unified(raw, VENDOR_A, warnings)
    assert meta.present_fields() == []
    assert any("Operator Mood" in w for w in warnings)


def test_unit_normalization_is_exact_multiplication():
    rng = random.Random(11)
    for _ in range(300):
        unit = rng.choice(list(UNIT_FACTORS))
        value = rng.uniform(-1e6, 1e6) * 10.0 ** rng.randint(-9, 6)
        assert normalize_value(value, unit) == value * UNIT_FACTORS[unit]


def test_unknown_unit_is_a_domain_error():
    with pytest.raises(DomainError):
        normalize_value(1.0, "furlongs")


# -- the full field matrix, one cell at a time -----------------------------------


@pytest.mark.parametrize("field,cell_a,cell_b,cell_c", FIELD_MATRIX)
@pytest.mark.parametrize("vendor", [VENDOR_A, VENDOR_B, VENDOR_C])
def test_field_matrix_cell(field, cell_a, cell_b, cell_c, vendor):
    cell = {VENDOR_A: cell_a, VENDOR_B: cell_b, VENDOR_C: cell_c}[vendor]
    meta, result = full_fixture(vendor)
    value = getattr(result.unified, field)
    if cell == "x":
        assert value is None, f"{field} should be absent for {vendor}"
        return
    if cell == "*":
        if field == "magnification":
            expected = compute_magnification(
                result.unified.pixel_size, result.unified.image_width_px
            )
        else:
            scan_rows = {e.key: e.value for e in result.raw.entries}[
                "Scan Rows" if vendor == VENDOR_A else "EScan.ScanRows"
            ]
            expected = compute_databar_rows(result.unified.image_height_px, int(scan_rows))
        assert value == expected, f"{field} must be computed for {vendor}"
        return
    # a direct cell: the vendor key appears verbatim in raw and feeds the field
    assert cell in {e.key for e in result.raw.entries}
    assert value is not None
    assert value == getattr(meta, field)


@pytest.mark.parametrize("vendor", [VENDOR_A, VENDOR_B, VENDOR_C])
def test_ontology_iris_attached_for_present_fields(vendor):
    _, result = full_fixture(vendor)
    for field in result.unified.present_fields():
        if field in EXPECTED_IRIS:
            assert result.unified.ontology_iri[field] == EXPECTED_IRIS[field]
        else:
            assert field not in result.unified.ontology_iri


# -- randomized write -> parse round trip --------------------------------------


def random_metadata(rng: random.Random, vendor: str) -> UnifiedSemMetadata:
    meta = UnifiedSemMetadata()
    signed = {"stage_x", "stage_y", "stage_z", "stage_rotation"}
    for field in sorted(REPRESENTABLE_FIELDS[vendor]):
        if field in ("databar_rows", "image_width_px", "image_height_px", "magnification"):
            continue
        if rng.random() < 0.2:
            continue
        magnitude = rng.uniform(1.0, 10.0) * 10.0 ** rng.randint(-9, 5)
        sign = -1.0 if field in signed and rng.random() < 0.5 else 1.0
        setattr(meta, field, sign * magnitude)
    if rng.random() < 0.9:
        meta.image_width_px = rng.randint(1, 4096)
        meta.image_height_px = rng.randint(1, 4096)
        meta.databar_rows = rng.randint(0, meta.image_height_px)
    if vendor == VENDOR_B and rng.random() < 0.9:
        meta.magnification = rng.uniform(1.0, 1e6)
    if vendor == VENDOR_A and rng.random() < 0.9:
        meta.magnification = rng.uniform(1.0, 1e6)
    if vendor == VENDOR_C and meta.pixel_size is not None and meta.image_width_px is not None:
        meta.magnification = compute_magnification(meta.pixel_size, meta.image_width_px)
    return meta


@pytest.mark.parametrize("vendor", [VENDOR_A, VENDOR_B, VENDOR_C])
def test_round_trip_recovers_every_representable_field_bitwise(vendor):
    rng = random.Random(VENDORS[vendor])
    for trial in range(100):
        meta = random_metadata(rng, vendor)
        result = extract_metadata(WRITERS[vendor](meta), vendor)
        for field in sorted(REPRESENTABLE_FIELDS[vendor] | {"magnification"}):
            expected = getattr(meta, field)
            actual = getattr(result.unified, field)
            if expected is None:
                assert actual is None, (trial, field)
            else:
                assert actual == expected, (trial, field, expected, actual)


def test_parse_is_deterministic():
    meta = demo_metadata_for(VENDOR_B)
    data = write_vendor_b(meta)
    first = extract_metadata(data, VENDOR_B)
    second = extract_metadata(data, VENDOR_B)
    assert first.to_dict() == second.to_dict()


# -- junk robustness ---------------------------------------------------------------


def test_junk_keys_never_abort_vendor_a():
    rng = random.Random(5)
    for _ in range(20):
        junk = [
            f"Junk {rng.randint(0, 999999)} = {rng.uniform(-10, 10)!r} qux"
            for _ in range(rng.randint(1, 5))
        ]
        lines = ["EHT = 20.0 kV", *junk]
        rng.shuffle(lines)
        result = extract_metadata(vendor_a_bytes(lines), VENDOR_A)
        assert result.unified.acceleration_voltage == 20000.0
        assert result.warnings


def test_junk_keys_never_abort_vendor_b():
    rng = random.Random(6)
    for _ in range(20):
        records = [tlv("HV", 20000.0, 0x01)]
        for _ in range(rng.randint(1, 5)):
            records.append(tlv(f"Mystery{rng.randint(0, 999)}", rng.uniform(0, 1), 0x01))
        rng.shuffle(records)
        data = VENDOR_B_MAGIC + b"".join(records) + TERMINATOR
        result = extract_metadata(data, VENDOR_B)
        assert result.unified.acceleration_voltage == 20000.0


def test_junk_keys_never_abort_vendor_c():
    result = extract_metadata(
        b"[System]\nType=SEM\n[Beam]\nHV=20000.0\nFluxCapacitor=1.21\n", VENDOR_C
    )
    assert result.unified.acceleration_voltage == 20000.0
    assert any("FluxCapacitor" in w for w in result.warnings)
