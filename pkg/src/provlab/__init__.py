"""provlab: provenance-centric research data workbench.

Registers samples, instruments, protocols, and notebook entries as a typed
object graph; ingests instrument files into a content-addressed store with
automatic metadata extraction; and runs automated report and analysis
workflows over the resulting records.
"""

__version__ = "0.1.0"

from .core import (
    BlobRef,
    ControlledVocabulary,
    DatasetRecord,
    ObjectRecord,
    ObjectTypeSchema,
    PropertyDefinition,
    Repository,
    ValidationReport,
    mint_perm_id,
    qr_payload,
    resolve_qr_payload,
    validate_object,
)
from .extract import (
    ParseResult,
    RawKeyValues,
    UnifiedSemMetadata,
    compute_databar_rows,
    compute_magnification,
    detect_format,
    extract_metadata,
    map_to_unified,
)
from .graph import ProvenanceGraph, build_graph, export_dot, export_json, filter_by_element
from .previews import (
    EbsdMap,
    EulerOrientation,
    RgbImage,
    euler_to_ipf_color,
    ipf_z_map,
    parse_ang,
    thumbnail,
)
from .store import BlobStore, check_consistency, garbage_collect, register_linked_dataset
from .workflows import (
    JobOutcome,
    LoadDisplacementSeries,
    PillarGeometry,
    ReportTable,
    StressStrainCurve,
    parse_geometry_csv,
    parse_load_csv,
    prep_report,
    render_curve,
    scheduler_tick,
    stress_strain,
)

__all__ = [
    "BlobRef",
    "BlobStore",
    "ControlledVocabulary",
    "DatasetRecord",
    "EbsdMap",
    "EulerOrientation",
    "JobOutcome",
    "LoadDisplacementSeries",
    "ObjectRecord",
    "ObjectTypeSchema",
    "ParseResult",
    "PillarGeometry",
    "PropertyDefinition",
    "ProvenanceGraph",
    "RawKeyValues",
    "ReportTable",
    "Repository",
    "RgbImage",
    "StressStrainCurve",
    "UnifiedSemMetadata",
    "ValidationReport",
    "build_graph",
    "check_consistency",
    "compute_databar_rows",
    "compute_magnification",
    "detect_format",
    "euler_to_ipf_color",
    "export_dot",
    "export_json",
    "extract_metadata",
    "filter_by_element",
    "garbage_collect",
    "ipf_z_map",
    "map_to_unified",
    "mint_perm_id",
    "parse_ang",
    "parse_geometry_csv",
    "parse_load_csv",
    "prep_report",
    "qr_payload",
    "register_linked_dataset",
    "render_curve",
    "resolve_qr_payload",
    "scheduler_tick",
    "stress_strain",
    "thumbnail",
    "validate_object",
]
