"""Automated analysis workflows and the scheduler that drives them.

Two baseline workflows run over notebook entries: a metallographic
preparation report (one table row per recorded step) and engineering
stress-strain derivation for micro-pillar compression tests. The scheduler
is idempotent: each (entry, workflow, input fingerprint) runs once, and
re-uploaded inputs change the fingerprint and legitimately re-trigger.
"""

from __future__ import annotations

import hashlib
import io
import json
import math
import re
from dataclasses import dataclass

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .core.repository import Repository  # noqa: E402
from .errors import DomainError, EmptyInputError, SyntaxFormatError  # noqa: E402
from .store import BlobStore, register_linked_dataset  # noqa: E402

LOAD_CSV_HEADER = "time_s,displacement_nm,load_mN"
GEOMETRY_CSV_HEADER = "pillar_id,diameter_top_um,height_um"

WORKFLOW_STRESS_STRAIN = "stress-strain"
WORKFLOW_PREP_REPORT = "prep-report"

# Figure colors assigned to pillars in geometry order.
_CURVE_COLORS = ("tab:orange", "tab:blue", "tab:green", "tab:red", "tab:purple")


@dataclass(frozen=True)
class LoadDisplacementSeries:
    """SI-unit mechanical test series; time strictly increasing."""

    time_s: np.ndarray
    displacement_m: np.ndarray
    load_n: np.ndarray

    def __post_init__(self):
        n = len(self.time_s)
        if len(self.displacement_m) != n or len(self.load_n) != n:
            raise DomainError("series columns must have equal length")
        for name, arr in (
            ("time", self.time_s),
            ("displacement", self.displacement_m),
            ("load", self.load_n),
        ):
            if n and not np.all(np.isfinite(arr)):
                raise DomainError(f"{name} column contains non-finite values")
        if n > 1 and not np.all(np.diff(self.time_s) > 0):
            raise DomainError("time column must be strictly increasing")

    def __len__(self) -> int:
        return len(self.time_s)


@dataclass(frozen=True)
class PillarGeometry:
    pillar_id: str
    diameter_top_m: float
    height_m: float


@dataclass(frozen=True)
class StressStrainCurve:
    strain: np.ndarray
    stress_pa: np.ndarray
    geometry: PillarGeometry
    source_dataset: str = ""


@dataclass(frozen=True)
class ReportTable:
    title: str
    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise DomainError("report row arity must equal column count")


@dataclass(frozen=True)
class JobOutcome:
    entry: str
    workflow_name: str
    produced_datasets: tuple[str, ...] = ()
    skipped: bool = False
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "entry": self.entry,
            "workflow": self.workflow_name,
            "produced": list(self.produced_datasets),
            "skipped": self.skipped,
            "reason": self.reason,
        }


# -- input file parsing ------------------------------------------------------


def parse_load_csv(text: str) -> LoadDisplacementSeries:
    """Parse raw indenter output; converts nm -> m and mN -> N immediately."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != LOAD_CSV_HEADER:
        raise SyntaxFormatError(
            f"load-displacement CSV must start with header {LOAD_CSV_HEADER!r}"
        )
    t, u, f = [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 3:
            raise SyntaxFormatError(f"line {lineno}: expected 3 comma-separated values")
        try:
            t.append(float(parts[0]))
            u.append(float(parts[1]) * 1e-9)
            f.append(float(parts[2]) * 1e-3)
        except ValueError as exc:
            raise SyntaxFormatError(f"line {lineno}: non-numeric value ({exc})") from exc
    return LoadDisplacementSeries(np.asarray(t), np.asarray(u), np.asarray(f))


def parse_geometry_csv(text: str) -> list[PillarGeometry]:
    """Parse the pillar geometry spreadsheet; converts um -> m."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != GEOMETRY_CSV_HEADER:
        raise SyntaxFormatError(
            f"geometry CSV must start with header {GEOMETRY_CSV_HEADER!r}"
        )
    pillars = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise SyntaxFormatError(f"line {lineno}: expected 3 comma-separated values")
        try:
            pillars.append(
                PillarGeometry(parts[0], float(parts[1]) * 1e-6, float(parts[2]) * 1e-6)
            )
        except ValueError as exc:
            raise SyntaxFormatError(f"line {lineno}: non-numeric value ({exc})") from exc
    return pillars


# -- stress-strain -----------------------------------------------------------


def stress_strain(series: LoadDisplacementSeries, geometry: PillarGeometry) -> StressStrainCurve:
    """Engineering stress and strain, pointwise, no smoothing or reordering.

    stress_i = 4 F_i / (pi d^2) with the top diameter, strain_i = u_i / L.
    """
    if geometry.diameter_top_m <= 0 or geometry.height_m <= 0:
        raise DomainError(
            f"pillar {geometry.pillar_id!r} geometry must be positive "
            f"(d={geometry.diameter_top_m}, L={geometry.height_m})"
        )
    if len(series) == 0:
        raise EmptyInputError("load-displacement series is empty")
    area = math.pi * geometry.diameter_top_m ** 2
    stress = 4.0 * series.load_n / area
    strain = series.displacement_m / geometry.height_m
    return StressStrainCurve(strain=strain, stress_pa=stress, geometry=geometry)


def render_curve(curve: StressStrainCurve, color: str = "tab:orange") -> bytes:
    """Plot one curve to PNG bytes; byte-identical for equal inputs."""
    if len(curve.strain) == 0:
        raise EmptyInputError("cannot render an empty curve")
    fig, ax = plt.subplots(figsize=(5.0, 3.75), dpi=100)
    ax.plot(curve.strain, curve.stress_pa, color=color, linewidth=1.2)
    ax.set_xlabel("strain (dimensionless)")
    ax.set_ylabel("stress (Pa)")
    ax.set_title(f"Pillar {curve.geometry.pillar_id}")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    buf = io.BytesIO()
    fig.savefig(buf, format="png")
    plt.close(fig)
    return buf.getvalue()


# -- preparation report --------------------------------------------------------


def preparation_steps(repo: Repository, entry: str) -> list[dict]:
    """PREPARATION_STEP children of an entry, sorted by sequence index."""
    record = repo.get_object(entry)
    steps = [
        repo.get_object(child)
        for child in record.children
        if repo.get_object(child).type_name == "PREPARATION_STEP"
    ]
    steps.sort(key=lambda s: (s.properties.get("sequence_index", 0), s.perm_id))
    return [s.properties | {"perm_id": s.perm_id} for s in steps]


def prep_report(repo: Repository, entry: str) -> ReportTable:
    """Summarize an entry's preparation steps as a table."""
    record = repo.get_object(entry)
    rows = []
    for props in preparation_steps(repo, entry):
        duration = props.get("duration_s")
        rows.append(
            (
                str(props.get("sequence_index", "")),
                str(props.get("protocol_name", "")),
                str(props.get("abrasive", "")),
                str(props.get("lubricant", "")),
                f"{duration:g} s" if duration is not None else "",
            )
        )
    title = f"Preparation summary: {record.properties.get('name', entry)}"
    return ReportTable(
        title=title,
        columns=("Step", "Protocol", "Abrasive", "Lubricant", "Duration"),
        rows=tuple(rows),
    )


def render_report_text(table: ReportTable) -> str:
    widths = [
        max(len(col), *(len(row[i]) for row in table.rows), 0) if table.rows else len(col)
        for i, col in enumerate(table.columns)
    ]
    def fmt(cells):
        return " | ".join(cell.ljust(w) for cell, w in zip(cells, widths))
    lines = [table.title, fmt(table.columns), "-+-".join("-" * w for w in widths)]
    lines.extend(fmt(row) for row in table.rows)
    return "\n".join(lines) + "\n"


def render_report_html(table: ReportTable) -> str:
    def esc(text: str) -> str:
        return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    head = "".join(f"<th>{esc(c)}</th>" for c in table.columns)
    body = "".join(
        "<tr>" + "".join(f"<td>{esc(cell)}</td>" for cell in row) + "</tr>"
        for row in table.rows
    )
    return (
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\">"
        f"<title>{esc(table.title)}</title>"
        "<style>table{border-collapse:collapse}td,th{border:1px solid #999;"
        "padding:4px 10px;text-align:left}th{background:#eee}</style></head>"
        f"<body><h2>{esc(table.title)}</h2>"
        f"<table><thead><tr>{head}</tr></thead><tbody>{body}</tbody></table>"
        "</body></html>\n"
    )


# -- scheduler ------------------------------------------------------------------


def _filename_tokens(filename: str) -> set[str]:
    stem = filename.rsplit(".", 1)[0]
    return {tok for tok in re.split(r"[^A-Za-z0-9]+", stem) if tok}


def _fingerprint(parts: list[str]) -> str:
    return hashlib.sha256("\n".join(sorted(parts)).encode("utf-8")).hexdigest()


def run_stress_strain(repo: Repository, store: BlobStore, entry: str) -> JobOutcome:
    """Derive and attach stress-strain figures for one micro-mechanics entry."""
    record = repo.get_object(entry)
    geometry_csv = record.properties.get("pillar_geometry")
    load_datasets = [
        d for d in repo.datasets_of(entry) if d.dataset_type == "LOAD_DISPLACEMENT"
    ]
    if not geometry_csv or not load_datasets:
        return JobOutcome(entry, WORKFLOW_STRESS_STRAIN, skipped=True, reason="missing input")

    fingerprint = _fingerprint(
        [geometry_csv] + [d.blob.content_hash for d in load_datasets]
    )
    if repo.find_job(entry, WORKFLOW_STRESS_STRAIN, fingerprint) is not None:
        return JobOutcome(
            entry, WORKFLOW_STRESS_STRAIN, skipped=True, reason="outputs up to date"
        )

    pillars = parse_geometry_csv(geometry_csv)
    produced: list[str] = []
    for index, geometry in enumerate(pillars):
        color = _CURVE_COLORS[index % len(_CURVE_COLORS)]
        matches = [
            d for d in load_datasets
            if geometry.pillar_id in _filename_tokens(d.original_filename)
        ]
        for dataset in matches:
            series = parse_load_csv(store.get_blob(dataset.blob).decode("utf-8"))
            curve = stress_strain(series, geometry)
            png = render_curve(curve, color=color)
            figure = register_linked_dataset(
                repo,
                store,
                owner_entry=entry,
                data=png,
                dataset_type="DERIVED_FIGURE",
                original_filename=f"stress_strain_{geometry.pillar_id}.png",
            )
            produced.append(figure.dataset_id)
    if not produced:
        return JobOutcome(
            entry, WORKFLOW_STRESS_STRAIN, skipped=True,
            reason="no load dataset matches any pillar id",
        )
    repo.record_job(entry, WORKFLOW_STRESS_STRAIN, fingerprint, produced)
    return JobOutcome(entry, WORKFLOW_STRESS_STRAIN, produced_datasets=tuple(produced))


def run_prep_report(repo: Repository, store: BlobStore, entry: str) -> JobOutcome:
    """Generate and attach the preparation report (HTML and plain text)."""
    steps = preparation_steps(repo, entry)
    if not steps:
        return JobOutcome(entry, WORKFLOW_PREP_REPORT, skipped=True, reason="missing input")
    fingerprint = _fingerprint(
        [json.dumps(props, sort_keys=True, default=str) for props in steps]
    )
    if repo.find_job(entry, WORKFLOW_PREP_REPORT, fingerprint) is not None:
        return JobOutcome(
            entry, WORKFLOW_PREP_REPORT, skipped=True, reason="outputs up to date"
        )
    table = prep_report(repo, entry)
    produced = []
    for suffix, payload in (
        ("html", render_report_html(table).encode("utf-8")),
        ("txt", render_report_text(table).encode("utf-8")),
    ):
        dataset = register_linked_dataset(
            repo,
            store,
            owner_entry=entry,
            data=payload,
            dataset_type="DERIVED_FIGURE",
            original_filename=f"preparation_report.{suffix}",
        )
        produced.append(dataset.dataset_id)
    repo.record_job(entry, WORKFLOW_PREP_REPORT, fingerprint, produced)
    return JobOutcome(entry, WORKFLOW_PREP_REPORT, produced_datasets=tuple(produced))


def scheduler_tick(repo: Repository, store: BlobStore) -> list[JobOutcome]:
    """One scheduler pass over all eligible entries; failures never abort it."""
    outcomes: list[JobOutcome] = []
    jobs: list[tuple[str, str]] = []
    for record in repo.objects():
        if record.type_name == "MICRO_MECH_EXP":
            jobs.append((record.perm_id, WORKFLOW_STRESS_STRAIN))
        if any(
            repo.get_object(child).type_name == "PREPARATION_STEP"
            for child in record.children
        ):
            jobs.append((record.perm_id, WORKFLOW_PREP_REPORT))
    runners = {
        WORKFLOW_STRESS_STRAIN: run_stress_strain,
        WORKFLOW_PREP_REPORT: run_prep_report,
    }
    for entry, workflow in sorted(jobs):
        try:
            outcomes.append(runners[workflow](repo, store, entry))
        except Exception as exc:
            outcomes.append(
                JobOutcome(entry, workflow, skipped=True, reason=f"failed: {exc}")
            )
    return outcomes
