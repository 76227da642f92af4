"""Walkthrough: registering samples and tracking their provenance.

Creates a cast ingot, cuts it into slices, records a notebook entry, and
exports the resulting provenance graph in DOT and JSON form. Run directly:

    python demos/01_sample_lifecycle.py
"""

from pathlib import Path

from provlab import Repository, build_graph, export_dot, export_json, qr_payload

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

repo = Repository()  # in-memory; pass a path to persist a journal

# A bulk cast specimen. Validation enforces the compulsory fields and the
# sum-to-100 composition rule before anything is stored.
cast = repo.create_object(
    "SAMPLE",
    {
        "name": "FeAl cast ingot",
        "sample_category": "BULK",
        "dimensions_mm": [30.0, 30.0, 10.0],
        "location": "inventory shelf 3",
        "composition": {"Fe": 60.0, "Al": 40.0},
        "defect_tags": ["grain-boundary"],
    },
)
print("cast sample:", cast.perm_id)
print("QR label payload:", qr_payload(cast.perm_id))

# Cutting produces child samples; the DAG also supports merging (welding),
# so a sample may have several parents.
slices = [
    repo.create_object(
        "SAMPLE",
        {
            "name": f"slice {letter}",
            "sample_category": "SHEET",
            "dimensions_mm": [30.0, 30.0, 2.0],
            "location": "lab 2",
            "composition": {"Fe": 60.0, "Al": 40.0},
        },
        parents=(cast.perm_id,),
    )
    for letter in "AB"
]

# A notebook entry documenting SEM work on slice A.
entry = repo.create_object(
    "ENTRY",
    {"name": "surface imaging", "technique": "SEM", "date": "2026-08-01"},
    parents=(slices[0].perm_id,),
)

graph = build_graph(repo, entry.perm_id, direction="up")
print(f"\nprovenance of {entry.perm_id}: {len(graph.nodes)} nodes, {len(graph.edges)} edges")

(OUT / "lifecycle.dot").write_text(export_dot(graph), encoding="utf-8")
(OUT / "lifecycle.json").write_text(export_json(graph), encoding="utf-8")
print("wrote", OUT / "lifecycle.dot", "and", OUT / "lifecycle.json")

# Property edits keep the identity and leave an audit trail.
repo.put_object(repo.get_object(cast.perm_id).with_properties(location="archive"), actor="demo")
for event in repo.audit_for(cast.perm_id):
    print(f"audit: {event.actor} changed {event.property_name}: "
          f"{event.old_value!r} -> {event.new_value!r}")
