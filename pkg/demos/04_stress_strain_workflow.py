"""Walkthrough: the scheduled micro-pillar analysis workflow, end to end.

Registers a micro-mechanics entry with a geometry spreadsheet and raw
load-displacement uploads, runs one scheduler tick, and shows that the
derived figures were attached back to the entry. A second tick is a no-op
until inputs change.

    python demos/04_stress_strain_workflow.py
"""

import tempfile
from pathlib import Path

from provlab import BlobStore, Repository, register_linked_dataset, scheduler_tick
from provlab.extract.fixtures import make_geometry_csv, make_load_csv

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

repo = Repository()
store = BlobStore(Path(tempfile.mkdtemp(prefix="provlab-demo-")))

entry = repo.create_object(
    "MICRO_MECH_EXP",
    {
        "name": "pillar compression, slice A",
        "technique": "MICROPILLAR_COMPRESSION",
        "pillar_geometry": make_geometry_csv({"MP1": (1.0, 2.0), "MP2": (2.0, 4.5)}),
    },
)
for seed, pillar in enumerate(("MP1", "MP2")):
    register_linked_dataset(
        repo, store, entry.perm_id,
        make_load_csv(pillar=pillar, seed=seed).encode("utf-8"),
        "LOAD_DISPLACEMENT",
        original_filename=f"{pillar}_load.csv",
    )

for outcome in scheduler_tick(repo, store):
    state = "skipped" if outcome.skipped else "executed"
    print(f"tick 1: {outcome.workflow_name} {state} "
          f"({outcome.reason or f'{len(outcome.produced_datasets)} datasets'})")

for dataset in repo.datasets_of(entry.perm_id):
    if dataset.dataset_type == "DERIVED_FIGURE":
        png = store.get_blob(dataset.blob)
        (OUT / dataset.original_filename).write_bytes(png)
        print(f"figure {dataset.original_filename}: {len(png)} bytes -> demos/output/")

second = scheduler_tick(repo, store)
print("tick 2 produced", sum(len(o.produced_datasets) for o in second), "datasets (idempotent)")
