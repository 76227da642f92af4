"""Record validation against schemas and vocabularies.

Collects every violation instead of stopping at the first, so the caller
can present researchers a complete list of what to fix.
"""

from __future__ import annotations

from datetime import date, datetime
from numbers import Real
from typing import Any

from ..errors import SchemaNotFoundError
from .records import ObjectRecord, ValidationReport, Violation
from .schemas import ELEMENT_SYMBOLS, ControlledVocabulary, ObjectTypeSchema

COMPOSITION_SUM_TOLERANCE = 1e-6

RULE_REQUIRED = "REQUIRED"
RULE_UNKNOWN = "UNKNOWN_PROPERTY"
RULE_TYPE = "TYPE"
RULE_VOCAB = "VOCAB_TERM"
RULE_SUM_100 = "SUM_100"
RULE_ELEMENT = "ELEMENT_SYMBOL"
RULE_RANGE = "RANGE"


def _is_real(value: Any) -> bool:
    return isinstance(value, Real) and not isinstance(value, bool)


def _check_kind(value: Any, kind: str) -> bool:
    if kind == "text":
        return isinstance(value, str)
    if kind == "real":
        return _is_real(value)
    if kind == "integer":
        return isinstance(value, int) and not isinstance(value, bool)
    if kind == "date":
        return isinstance(value, (str, date, datetime))
    if kind == "boolean":
        return isinstance(value, bool)
    if kind == "spreadsheet":
        return isinstance(value, str)
    if kind == "composition":
        return isinstance(value, dict) and all(
            isinstance(k, str) and _is_real(v) for k, v in value.items()
        )
    if kind == "real_triple":
        return (
            isinstance(value, (list, tuple))
            and len(value) == 3
            and all(_is_real(v) for v in value)
        )
    if kind == "text_list":
        return isinstance(value, (list, tuple)) and all(isinstance(v, str) for v in value)
    if kind == "vocabulary":
        return isinstance(value, str)
    return False


def validate_object(
    record: ObjectRecord,
    schema: ObjectTypeSchema | None,
    vocabularies: dict[str, ControlledVocabulary],
) -> ValidationReport:
    """Validate one record; pure, returns all violations."""
    if schema is None or schema.type_name != record.type_name:
        raise SchemaNotFoundError(f"no schema registered for type {record.type_name!r}")

    violations: list[Violation] = []
    defs = schema.property_map()

    for name in sorted(schema.required_property_names):
        if record.properties.get(name) in (None, ""):
            violations.append(Violation(name, RULE_REQUIRED, f"required property {name!r} is missing"))

    for name, value in record.properties.items():
        definition = defs.get(name)
        if definition is None:
            violations.append(
                Violation(name, RULE_UNKNOWN, f"property {name!r} is not in schema {schema.type_name!r}")
            )
            continue
        if value is None:
            continue
        if not _check_kind(value, definition.value_kind):
            violations.append(
                Violation(
                    name,
                    RULE_TYPE,
                    f"property {name!r} must be of kind {definition.value_kind!r}",
                )
            )
            continue
        if definition.value_kind == "vocabulary":
            vocab = vocabularies.get(definition.vocabulary_name or "")
            if vocab is None or not vocab.has_term(value):
                violations.append(
                    Violation(
                        name,
                        RULE_VOCAB,
                        f"{value!r} is not a term of vocabulary {definition.vocabulary_name!r}",
                    )
                )
        elif definition.value_kind == "composition":
            violations.extend(_check_composition(name, value))
        elif definition.value_kind == "real_triple":
            if any(v < 0 for v in value):
                violations.append(
                    Violation(name, RULE_RANGE, f"property {name!r} components must be >= 0")
                )

    return ValidationReport(tuple(violations))


def _check_composition(name: str, value: dict[str, float]) -> list[Violation]:
    violations = []
    for symbol in value:
        if symbol not in ELEMENT_SYMBOLS:
            violations.append(
                Violation(name, RULE_ELEMENT, f"{symbol!r} is not a chemical element symbol")
            )
    if any(v < 0 for v in value.values()):
        violations.append(Violation(name, RULE_RANGE, "atomic percentages must be >= 0"))
    total = sum(value.values())
    if abs(total - 100.0) > COMPOSITION_SUM_TOLERANCE:
        violations.append(
            Violation(
                name,
                RULE_SUM_100,
                f"composition must sum to 100 at.% (got {total!r})",
            )
        )
    return violations
