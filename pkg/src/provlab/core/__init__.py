"""Core object model: identity, schemas, validation, and the repository."""

from .identity import mint_perm_id, is_perm_id, qr_payload, resolve_qr_payload
from .records import AuditEvent, BlobRef, DatasetRecord, ObjectRecord, ValidationReport, Violation
from .repository import Repository
from .schemas import (
    ControlledVocabulary,
    ELEMENT_SYMBOLS,
    ObjectTypeSchema,
    PropertyDefinition,
    VocabularyTerm,
    seed_schemas,
    seed_vocabularies,
)
from .validation import COMPOSITION_SUM_TOLERANCE, validate_object

__all__ = [
    "AuditEvent",
    "BlobRef",
    "COMPOSITION_SUM_TOLERANCE",
    "ControlledVocabulary",
    "DatasetRecord",
    "ELEMENT_SYMBOLS",
    "ObjectRecord",
    "ObjectTypeSchema",
    "PropertyDefinition",
    "Repository",
    "ValidationReport",
    "Violation",
    "VocabularyTerm",
    "is_perm_id",
    "mint_perm_id",
    "qr_payload",
    "resolve_qr_payload",
    "seed_schemas",
    "seed_vocabularies",
    "validate_object",
]
