"""Walkthrough: vendor file parsing and the unified metadata vocabulary.

Writes one synthetic file per vendor layout, then parses each and shows how
differently-named vendor keys (EHT / HV / Beam.HV) land on the same unified
field in SI units, including the computed magnification and databar fields.

    python demos/02_metadata_extraction.py
"""

from pathlib import Path

from provlab import detect_format, extract_metadata
from provlab.extract import VENDOR_A, VENDOR_B, VENDOR_C
from provlab.extract.fixtures import (
    demo_metadata_for,
    make_micrograph_png,
    write_vendor_a,
    write_vendor_b,
    write_vendor_c,
)

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

meta_a = demo_metadata_for(VENDOR_A)
files = {
    "pillars_a.va": write_vendor_a(
        meta_a,
        image=make_micrograph_png(meta_a.image_width_px, meta_a.image_height_px,
                                  meta_a.databar_rows, seed=4),
        human_units=True,  # vendor A presents kV, mm, nm, mbar ...
    ),
    "pillars_b.vb": write_vendor_b(demo_metadata_for(VENDOR_B)),
    "pillars_c.ini": write_vendor_c(demo_metadata_for(VENDOR_C)),
}

for name, data in files.items():
    path = OUT / name
    path.write_bytes(data)
    vendor = detect_format(data[:64])
    result = extract_metadata(data, vendor)
    print(f"\n=== {name} -> {vendor} ({len(data)} bytes) ===")
    print("raw keys:", ", ".join(e.key for e in result.raw.entries[:6]), "...")
    unified = result.unified
    print(f"acceleration_voltage: {unified.acceleration_voltage} V")
    print(f"pixel_size:           {unified.pixel_size} m")
    print(f"magnification:        {unified.magnification}"
          + ("  (computed)" if vendor == VENDOR_C else ""))
    print(f"databar_rows:         {unified.databar_rows}"
          + ("  (computed)" if vendor != VENDOR_B else "  (stored directly)"))
    print(f"emission_current:     {unified.emission_current}"
          + ("  (vendor A never records it)" if vendor == VENDOR_A else ""))
    if unified.ontology_iri:
        sample_field, iri = next(iter(sorted(unified.ontology_iri.items())))
        print(f"ontology link example: {sample_field} -> {iri}")
    for warning in result.warnings:
        print("warning:", warning)
