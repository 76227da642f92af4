"""Walkthrough: driving the HTTP API, the surface the web client uses.

Starts the service on a loopback port in a background thread, registers an
entry and a vendor A image over multipart upload (with a dry-run first),
pulls the provenance graph, and downloads a slide deck.

    python demos/05_http_api.py
"""

import tempfile
import threading
import time
from pathlib import Path

import httpx
import uvicorn

from provlab import BlobStore, Repository
from provlab.extract import VENDOR_A
from provlab.extract.fixtures import demo_metadata_for, make_micrograph_png, write_vendor_a
from provlab.service import ApiConfig, create_app

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

workdir = Path(tempfile.mkdtemp(prefix="provlab-api-demo-"))
repo = Repository(workdir / "journal.jsonl")
store = BlobStore(workdir / "blobs")
app = create_app(repo, store, ApiConfig())

server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=8751, log_level="error"))
threading.Thread(target=server.run, daemon=True).start()
while not server.started:
    time.sleep(0.05)

base = "http://127.0.0.1:8751"
with httpx.Client(base_url=base, timeout=10) as client:
    entry = client.post("/objects", json={
        "type_name": "ENTRY",
        "properties": {"name": "SEM session", "technique": "SEM"},
    }).json()["perm_id"]
    print("entry:", entry, "| QR:", client.get(f"/qr/{entry}").text)

    meta = demo_metadata_for(VENDOR_A)
    image = make_micrograph_png(meta.image_width_px, meta.image_height_px,
                                meta.databar_rows, seed=6)
    file_bytes = write_vendor_a(meta, image=image, human_units=True)

    dry = client.post("/datasets",
                      files={"file": ("pillars.va", file_bytes)},
                      data={"entry": entry, "type": "SEM_IMAGE",
                            "format": "VendorA", "dry_run": "true"}).json()
    print("dry run acceleration_voltage:", dry["unified"]["acceleration_voltage"], "V")

    dataset = client.post("/datasets",
                          files={"file": ("pillars.va", file_bytes)},
                          data={"entry": entry, "type": "SEM_IMAGE",
                                "format": "VendorA"}).json()
    print("registered dataset:", dataset["dataset_id"])

    graph = client.get("/graph", params={"root": entry, "direction": "both"}).json()
    print("graph:", len(graph["nodes"]), "nodes,", len(graph["edges"]), "edges")

    deck = client.post("/decks", json={"dataset_ids": [dataset["dataset_id"]],
                                       "title": "API demo"})
    (OUT / "api_deck.html").write_bytes(deck.content)
    print("deck ->", OUT / "api_deck.html",
          "| registered as", deck.headers["X-Deck-Dataset"])

server.should_exit = True
time.sleep(0.2)
repo.close()
