"""Provenance graph construction, element filtering, and export.

Node identity and ordering are deterministic (sorted by permId) so equal
repository states always export byte-identical DOT/JSON, independent of
where the researcher opened the graph.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .core.records import DatasetRecord, ObjectRecord
from .core.repository import Repository
from .core.schemas import ELEMENT_SYMBOLS
from .errors import DomainError, NotFoundError

KIND_SAMPLE = "sample"
KIND_PROTOCOL = "protocol"
KIND_DEVICE = "device"
KIND_ENTRY = "entry"
KIND_DATASET = "dataset"
KIND_OTHER = "other"

KIND_BY_TYPE = {
    "SAMPLE": KIND_SAMPLE,
    "PROTOCOL": KIND_PROTOCOL,
    "PREPARATION_STEP": KIND_PROTOCOL,
    "DEVICE": KIND_DEVICE,
    "ENTRY": KIND_ENTRY,
    "MICRO_MECH_EXP": KIND_ENTRY,
}

KIND_COLORS = {
    KIND_SAMPLE: "#8fd18f",
    KIND_PROTOCOL: "#f2e394",
    KIND_DEVICE: "#9ecbe8",
    KIND_ENTRY: "#d7bde2",
    KIND_DATASET: "#f5b041",
    KIND_OTHER: "#d5d8dc",
}


def node_kind(record: ObjectRecord | DatasetRecord) -> str:
    if isinstance(record, DatasetRecord):
        return KIND_DATASET
    return KIND_BY_TYPE.get(record.type_name, KIND_OTHER)


@dataclass(frozen=True)
class GraphNode:
    perm_id: str
    kind: str
    label: str
    tooltip: dict[str, str]


@dataclass(frozen=True)
class ProvenanceGraph:
    nodes: tuple[GraphNode, ...]
    edges: tuple[tuple[str, str], ...]
    root: str | None
    truncated: bool = False

    def node_ids(self) -> set[str]:
        return {n.perm_id for n in self.nodes}


def _format_number(value: float) -> str:
    return format(value, "g")


def _composition_text(composition: dict[str, float]) -> str:
    ordered = sorted(composition.items(), key=lambda kv: (-kv[1], kv[0]))
    return ", ".join(f"{el} {_format_number(pct)}" for el, pct in ordered)


def _size_text(size_bytes: int) -> str:
    if size_bytes >= 1_000_000:
        return f"{size_bytes / 1_000_000:.1f} MB"
    if size_bytes >= 1_000:
        return f"{size_bytes / 1_000:.1f} kB"
    return f"{size_bytes} B"


def node_tooltip(record: ObjectRecord | DatasetRecord, repo: Repository) -> dict[str, str]:
    """Key metadata projection shown on hover, chosen per node kind."""
    kind = node_kind(record)
    if kind == KIND_DATASET:
        tooltip = {
            "type": record.dataset_type,
            "file": record.original_filename,
            "size": _size_text(record.blob.size_bytes),
        }
        if record.vendor != "Unknown":
            tooltip["vendor"] = record.vendor
        meta = record.unified_metadata
        if meta is not None:
            if meta.acceleration_voltage is not None:
                tooltip["acceleration_voltage"] = f"{_format_number(meta.acceleration_voltage)} V"
            if meta.magnification is not None:
                tooltip["magnification"] = _format_number(meta.magnification)
            if meta.pixel_size is not None:
                tooltip["pixel_size"] = f"{_format_number(meta.pixel_size)} m"
            if meta.working_distance is not None:
                tooltip["working_distance"] = f"{_format_number(meta.working_distance)} m"
        return tooltip

    props = record.properties
    if kind == KIND_SAMPLE:
        tooltip = {}
        if isinstance(props.get("composition"), dict):
            tooltip["composition"] = _composition_text(props["composition"])
        dims = props.get("dimensions_mm")
        if isinstance(dims, (list, tuple)) and len(dims) == 3:
            tooltip["dimensions"] = "×".join(_format_number(v) for v in dims) + " mm"
        category = props.get("sample_category")
        if category:
            vocab = repo.get_vocabulary("SAMPLE_CATEGORY")
            labels = {t.code: t.label for t in vocab.terms}
            tooltip["category"] = labels.get(category, category)
        return tooltip
    if kind == KIND_DEVICE:
        return {
            key: str(props[key])
            for key in ("model", "manufacturer")
            if props.get(key)
        }
    if kind == KIND_ENTRY:
        tooltip = {}
        if props.get("technique"):
            tooltip["technique"] = str(props["technique"])
        if props.get("date"):
            tooltip["date"] = str(props["date"])
        tooltip["dataset_count"] = str(len(repo.datasets_of(record.perm_id)))
        return tooltip
    if kind == KIND_PROTOCOL:
        tooltip = {}
        for key in ("protocol_name", "abrasive", "lubricant"):
            if props.get(key):
                tooltip[key] = str(props[key])
        if props.get("description"):
            tooltip["description"] = str(props["description"])
        return tooltip
    return {"type": record.type_name}


def node_label(record: ObjectRecord | DatasetRecord) -> str:
    if isinstance(record, DatasetRecord):
        return record.original_filename or record.dataset_type
    name = record.properties.get("name") or record.properties.get("protocol_name")
    return str(name) if name else record.perm_id


def _bfs(repo: Repository, root: str, direction: str, max_depth: int | None) -> tuple[set[str], bool]:
    attr = "parents" if direction == "up" else "children"
    visited = {root}
    frontier = [root]
    depth = 0
    truncated = False
    while frontier:
        if max_depth is not None and depth >= max_depth:
            for node in frontier:
                if getattr(repo.get_object(node), attr) - visited:
                    truncated = True
                    break
            break
        nxt: list[str] = []
        for node in frontier:
            for neighbor in getattr(repo.get_object(node), attr):
                if neighbor not in visited:
                    visited.add(neighbor)
                    nxt.append(neighbor)
        frontier = nxt
        depth += 1
    return visited, truncated


def build_graph(
    repo: Repository,
    root: str,
    direction: str = "both",
    max_depth: int | None = None,
) -> ProvenanceGraph:
    """BFS from a root along parent edges (up), child edges (down), or both.

    Dataset nodes attached to any traversed object are always included.
    """
    if direction not in ("up", "down", "both"):
        raise DomainError(f"direction must be up, down, or both, got {direction!r}")
    if not repo.has_object(root):
        raise NotFoundError(f"no object with permId {root}")

    members: set[str] = set()
    truncated = False
    for dir_name in ("up", "down") if direction == "both" else (direction,):
        visited, pruned = _bfs(repo, root, dir_name, max_depth)
        members |= visited
        truncated = truncated or pruned
    return _assemble(repo, members, root, truncated)


def _assemble(
    repo: Repository,
    members: set[str],
    root: str | None,
    truncated: bool,
) -> ProvenanceGraph:
    nodes: list[GraphNode] = []
    edges: set[tuple[str, str]] = set()
    for perm_id in members:
        record = repo.get_object(perm_id)
        nodes.append(
            GraphNode(perm_id, node_kind(record), node_label(record), node_tooltip(record, repo))
        )
        for child in record.children:
            if child in members:
                edges.add((perm_id, child))
        for dataset in repo.datasets_of(perm_id):
            nodes.append(
                GraphNode(
                    dataset.dataset_id,
                    KIND_DATASET,
                    node_label(dataset),
                    node_tooltip(dataset, repo),
                )
            )
            edges.add((perm_id, dataset.dataset_id))
    nodes.sort(key=lambda n: n.perm_id)
    return ProvenanceGraph(
        nodes=tuple(nodes),
        edges=tuple(sorted(edges)),
        root=root,
        truncated=truncated,
    )


def filter_by_element(
    repo: Repository,
    element_symbol: str,
    radius: int | None = None,
) -> ProvenanceGraph:
    """Union of the graphs of every sample containing the element.

    By default expansion from each matched sample is unbounded; ``radius``
    caps the traversal depth around each match.
    """
    if element_symbol not in ELEMENT_SYMBOLS:
        raise DomainError(f"{element_symbol!r} is not a chemical element symbol")
    members: set[str] = set()
    for record in repo.objects_of_type("SAMPLE"):
        composition = record.properties.get("composition") or {}
        if composition.get(element_symbol, 0) > 0:
            up, _ = _bfs(repo, record.perm_id, "up", radius)
            down, _ = _bfs(repo, record.perm_id, "down", radius)
            members |= up | down
    return _assemble(repo, members, None, False)


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def export_dot(graph: ProvenanceGraph) -> str:
    """Graphviz rendering with kind-based fill colors; byte-deterministic."""
    lines = [
        "digraph provenance {",
        "  rankdir=TB;",
        '  node [style=filled, fontname="Helvetica"];',
    ]
    for node in graph.nodes:
        color = KIND_COLORS.get(node.kind, KIND_COLORS[KIND_OTHER])
        lines.append(
            f'  "{_dot_escape(node.perm_id)}" '
            f'[label="{_dot_escape(node.label)}", fillcolor="{color}"];'
        )
    for parent, child in graph.edges:
        lines.append(f'  "{_dot_escape(parent)}" -> "{_dot_escape(child)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_json(graph: ProvenanceGraph) -> str:
    """JSON rendering consumed by the web client; byte-deterministic."""
    payload = {
        "nodes": [
            {"id": n.perm_id, "kind": n.kind, "label": n.label, "tooltip": n.tooltip}
            for n in graph.nodes
        ],
        "edges": [{"from": parent, "to": child} for parent, child in graph.edges],
        "root": graph.root,
        "truncated": graph.truncated,
    }
    return json.dumps(payload, sort_keys=True)
