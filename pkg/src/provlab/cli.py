"""Command-line interface.

Every action here is also reachable through the HTTP API; the CLI exists
for instrument-side scripting and for driving the full lifecycle in tests
and demos. Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from .core.repository import Repository
from .deck import build_slide_deck
from .errors import ProvlabError
from .extract import VENDOR_A, VENDOR_B, VENDOR_C, detect_format
from .extract.fixtures import (
    demo_metadata_for,
    make_ang_text,
    make_geometry_csv,
    make_load_csv,
    make_micrograph_png,
    write_vendor_a,
    write_vendor_b,
    write_vendor_c,
)
from .graph import build_graph, export_dot, export_json, filter_by_element
from .previews import build_preview
from .service import ApiConfig, serve as serve_app
from .store import BlobStore, check_consistency, garbage_collect, register_linked_dataset
from .workflows import prep_report, render_report_text, run_prep_report, run_stress_strain, scheduler_tick

_FORMAT_ALIASES = {
    "vendora": VENDOR_A,
    "vendorb": VENDOR_B,
    "vendorc": VENDOR_C,
    "auto": "auto",
    "none": "none",
}


class Workbench:
    """Lazily opened repository + store pair shared by all subcommands."""

    def __init__(self, journal: str, blob_root: str, token: str):
        self.journal_path = Path(journal)
        self.blob_root = Path(blob_root)
        self.token = token
        self._repo: Repository | None = None
        self._store: BlobStore | None = None

    @property
    def repo(self) -> Repository:
        if self._repo is None:
            self._repo = Repository(self.journal_path)
        return self._repo

    @property
    def store(self) -> BlobStore:
        if self._store is None:
            self._store = BlobStore(self.blob_root)
        return self._store

    def close(self) -> None:
        if self._repo is not None:
            self._repo.close()


@click.group()
@click.option("--journal", envvar="RDM_JOURNAL", default="rdm-journal.jsonl",
              show_default=True, help="Path of the repository journal file.")
@click.option("--blob-root", envvar="RDM_BLOBROOT", default="blobs",
              show_default=True, help="Root directory of the blob store.")
@click.option("--token", envvar="RDM_TOKEN", default="", help="API bearer token.")
@click.pass_context
def cli(ctx: click.Context, journal: str, blob_root: str, token: str):
    """Provenance-centric research data workbench."""
    ctx.obj = Workbench(journal, blob_root, token)
    ctx.call_on_close(ctx.obj.close)


@cli.command()
@click.pass_obj
def init(wb: Workbench):
    """Create the journal and blob store if they do not exist."""
    wb.repo
    wb.store
    click.echo(f"journal: {wb.journal_path}")
    click.echo(f"blob store: {wb.blob_root}")


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8750, show_default=True)
@click.option("--public-read", is_flag=True, help="Serve read endpoints without a token.")
@click.option("--scheduler-interval", type=float, default=None,
              help="Run the workflow scheduler every N seconds.")
@click.pass_obj
def serve(wb: Workbench, host: str, port: int, public_read: bool, scheduler_interval: float | None):
    """Run the HTTP API (blocking)."""
    logging.basicConfig(
        stream=sys.stdout,
        level=logging.INFO,
        format='{"ts":"%(asctime)s","level":"%(levelname)s","msg":%(message)s}',
        datefmt="%Y-%m-%dT%H:%M:%S",
    )
    config = ApiConfig(
        host=host,
        port=port,
        token=wb.token,
        journal_path=str(wb.journal_path),
        blob_root=str(wb.blob_root),
        public_read=public_read,
        scheduler_interval=scheduler_interval,
    )
    lock_path = str(wb.journal_path) + ".scheduler.lock"
    serve_app(wb.repo, wb.store, config, lock_path=lock_path)


# -- object ---------------------------------------------------------------


@cli.group("object")
def object_group():
    """Create, inspect, and link objects."""


@object_group.command("create")
@click.option("--type", "type_name", required=True, help="Object type, e.g. SAMPLE.")
@click.option("--props", default="{}", help="Properties as a JSON object.")
@click.option("--props-file", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--space", default="DEFAULT", show_default=True)
@click.option("--parent", "parents", multiple=True, help="Parent permId (repeatable).")
@click.pass_obj
def object_create(wb: Workbench, type_name: str, props: str, props_file: str | None,
                  space: str, parents: tuple[str, ...]):
    """Create an object and print its permId."""
    properties = json.loads(Path(props_file).read_text("utf-8")) if props_file else json.loads(props)
    record = wb.repo.create_object(type_name, properties, space=space, parents=parents, actor="cli")
    click.echo(record.perm_id)


@object_group.command("get")
@click.argument("perm_id")
@click.pass_obj
def object_get(wb: Workbench, perm_id: str):
    """Print an object record as JSON."""
    record = wb.repo.get_object(perm_id).to_dict()
    record["datasets"] = [d.dataset_id for d in wb.repo.datasets_of(perm_id)]
    click.echo(json.dumps(record, indent=2, sort_keys=True))


@object_group.command("link")
@click.argument("parent")
@click.argument("child")
@click.pass_obj
def object_link(wb: Workbench, parent: str, child: str):
    """Create a parent -> child provenance edge."""
    wb.repo.link(parent, child)
    click.echo(f"linked {parent} -> {child}")


# -- ingest ---------------------------------------------------------------


@cli.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--entry", required=True, help="Owning entry permId.")
@click.option("--format", "fmt", default="auto", show_default=True,
              type=click.Choice(sorted(_FORMAT_ALIASES), case_sensitive=False))
@click.option("--dataset-type", required=True, help="DATASET_TYPE term, e.g. SEM_IMAGE.")
@click.pass_obj
def ingest(wb: Workbench, file: str, entry: str, fmt: str, dataset_type: str):
    """Register a file as a linked dataset and print its permId."""
    data = Path(file).read_bytes()
    choice = _FORMAT_ALIASES[fmt.lower()]
    if choice == "auto":
        detected = detect_format(data[:64])
        choice = None if detected == "Unknown" else detected
    elif choice == "none":
        choice = None
    warnings: list[str] = []
    record = register_linked_dataset(
        wb.repo, wb.store,
        owner_entry=entry,
        data=data,
        dataset_type=dataset_type,
        parser_choice=choice,
        original_filename=Path(file).name,
        warnings=warnings,
    )
    for warning in warnings:
        click.echo(f"warning: {warning}", err=True)
    click.echo(record.dataset_id)


# -- graph ---------------------------------------------------------------


@cli.command("graph")
@click.option("--root", default=None, help="Root object permId.")
@click.option("--element", default=None, help="Filter by chemical element symbol.")
@click.option("--direction", default="both", show_default=True,
              type=click.Choice(["up", "down", "both"]))
@click.option("--depth", type=int, default=None, help="Maximum traversal depth.")
@click.option("--format", "fmt", default="dot", show_default=True,
              type=click.Choice(["dot", "json"]))
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_obj
def graph_cmd(wb: Workbench, root: str | None, element: str | None, direction: str,
              depth: int | None, fmt: str, out: str | None):
    """Export a provenance graph as DOT or JSON."""
    if element:
        graph = filter_by_element(wb.repo, element)
    elif root:
        graph = build_graph(wb.repo, root, direction=direction, max_depth=depth)
    else:
        raise click.UsageError("either --root or --element is required")
    text = export_dot(graph) if fmt == "dot" else export_json(graph)
    if out:
        Path(out).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        click.echo(text, nl=False)


# -- workflows ---------------------------------------------------------------


@cli.group()
def workflow():
    """Run automated analysis workflows."""


@workflow.command("tick")
@click.pass_obj
def workflow_tick(wb: Workbench):
    """Run one scheduler pass over all eligible entries."""
    outcomes = scheduler_tick(wb.repo, wb.store)
    executed = [o for o in outcomes if not o.skipped]
    for outcome in outcomes:
        status = "skipped" if outcome.skipped else "executed"
        detail = outcome.reason if outcome.skipped else f"{len(outcome.produced_datasets)} datasets"
        click.echo(f"{outcome.entry} {outcome.workflow_name}: {status} ({detail})")
    click.echo(f"{len(executed)} jobs executed")


@workflow.command("run")
@click.argument("name", type=click.Choice(["stress-strain"]))
@click.option("--entry", required=True)
@click.pass_obj
def workflow_run(wb: Workbench, name: str, entry: str):
    """Run one workflow for one entry."""
    outcome = run_stress_strain(wb.repo, wb.store, entry)
    if outcome.skipped:
        click.echo(f"skipped: {outcome.reason}")
    else:
        for dataset_id in outcome.produced_datasets:
            click.echo(dataset_id)


@workflow.command("report")
@click.argument("kind", type=click.Choice(["prep"]))
@click.option("--entry", required=True)
@click.pass_obj
def workflow_report(wb: Workbench, kind: str, entry: str):
    """Generate a preparation report for an entry and attach it."""
    table = prep_report(wb.repo, entry)
    if not table.rows:
        click.echo("warning: entry has no preparation steps", err=True)
    click.echo(render_report_text(table), nl=False)
    outcome = run_prep_report(wb.repo, wb.store, entry)
    if not outcome.skipped:
        click.echo("attached: " + ", ".join(outcome.produced_datasets))


# -- previews, decks, store ----------------------------------------------------


@cli.command("preview")
@click.option("--dataset", "dataset_id", required=True)
@click.pass_obj
def preview_cmd(wb: Workbench, dataset_id: str):
    """(Re)generate the preview image for a dataset."""
    from dataclasses import replace

    record = wb.repo.get_dataset(dataset_id)
    data = wb.store.get_blob(record.blob)
    png = build_preview(data, vendor=record.vendor, dataset_type=record.dataset_type)
    if png is None:
        click.echo("no preview available for this dataset")
        return
    ref = wb.store.put_blob(png)
    wb.repo.update_dataset(replace(record, preview=ref))
    click.echo(f"preview {ref.content_hash} ({ref.size_bytes} B)")


@cli.command("deck")
@click.argument("dataset_ids", nargs=-1, required=True)
@click.option("--title", default="Selected datasets", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default="slide_deck.html",
              show_default=True)
@click.pass_obj
def deck_cmd(wb: Workbench, dataset_ids: tuple[str, ...], title: str, out: str):
    """Compile selected datasets into an HTML slide deck."""
    html, record = build_slide_deck(wb.repo, wb.store, list(dataset_ids), title=title)
    Path(out).write_bytes(html)
    click.echo(f"wrote {out} (registered as {record.dataset_id})")


@cli.group("store")
def store_group():
    """Blob store maintenance."""


@store_group.command("check")
@click.pass_obj
def store_check(wb: Workbench):
    """Verify that every registered blob exists and hashes correctly."""
    problems = check_consistency(wb.repo, wb.store)
    for problem in problems:
        click.echo(problem, err=True)
    stats = wb.store.stats()
    click.echo(f"{stats.blob_count} blobs, {stats.total_bytes} bytes, {len(problems)} problems")
    if problems:
        raise ProvlabError(f"{len(problems)} store inconsistencies found")


@store_group.command("gc")
@click.pass_obj
def store_gc(wb: Workbench):
    """Delete blobs that no dataset references."""
    removed = garbage_collect(wb.repo, wb.store)
    click.echo(f"removed {len(removed)} orphan blobs")


# -- fixtures -------------------------------------------------------------------


@cli.command("fixtures")
@click.option("--kind", required=True,
              type=click.Choice(["vendorA", "vendorB", "vendorC", "ebsd", "load", "geometry"],
                                case_sensitive=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--pillar", default="MP1", show_default=True, help="Pillar id for load fixtures.")
@click.option("--human-units", is_flag=True,
              help="Vendor A only: write kV/mm/nm style values instead of SI.")
def fixtures_cmd(kind: str, out: str, seed: int, pillar: str, human_units: bool):
    """Write a synthetic instrument file for demos and tests."""
    kind = kind.lower()
    path = Path(out)
    if kind == "vendora":
        meta = demo_metadata_for(VENDOR_A)
        image = make_micrograph_png(
            meta.image_width_px, meta.image_height_px, meta.databar_rows, seed=seed
        )
        path.write_bytes(write_vendor_a(meta, image=image, human_units=human_units))
    elif kind == "vendorb":
        path.write_bytes(write_vendor_b(demo_metadata_for(VENDOR_B)))
    elif kind == "vendorc":
        path.write_bytes(write_vendor_c(demo_metadata_for(VENDOR_C)))
    elif kind == "ebsd":
        path.write_text(make_ang_text(seed=seed), encoding="utf-8")
    elif kind == "load":
        path.write_text(make_load_csv(pillar=pillar, seed=seed), encoding="utf-8")
    elif kind == "geometry":
        path.write_text(make_geometry_csv(), encoding="utf-8")
    click.echo(f"wrote {out}")


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show()
        return 2
    except click.ClickException as exc:
        exc.show()
        return 1
    except ProvlabError as exc:
        click.echo(f"error [{exc.code}]: {exc.message}", err=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
