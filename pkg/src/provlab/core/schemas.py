"""Object type schemas, property definitions, and controlled vocabularies.

Schemas describe which properties an object type carries and which are
compulsory; controlled vocabularies pin shared terminology (sample
categories, experimental techniques, dataset types) so records stay
comparable across groups. Seed vocabularies ship as JSON files next to
this module.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from ..errors import DomainError

# Recognized property value kinds. ``vocabulary`` needs ``vocabulary_name``;
# ``spreadsheet`` holds CSV text; ``composition`` holds {element: atomic %};
# ``real_triple`` holds three reals (e.g. dimensions in mm).
VALUE_KINDS = frozenset({
    "text",
    "real",
    "integer",
    "date",
    "boolean",
    "vocabulary",
    "spreadsheet",
    "composition",
    "real_triple",
    "text_list",
})

# IUPAC element symbols, atomic numbers 1..118.
ELEMENT_SYMBOLS = frozenset(
    "H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca Sc Ti V Cr Mn Fe Co Ni "
    "Cu Zn Ga Ge As Se Br Kr Rb Sr Y Zr Nb Mo Tc Ru Rh Pd Ag Cd In Sn Sb Te I "
    "Xe Cs Ba La Ce Pr Nd Pm Sm Eu Gd Tb Dy Ho Er Tm Yb Lu Hf Ta W Re Os Ir Pt "
    "Au Hg Tl Pb Bi Po At Rn Fr Ra Ac Th Pa U Np Pu Am Cm Bk Cf Es Fm Md No Lr "
    "Rf Db Sg Bh Hs Mt Ds Rg Cn Nh Fl Mc Lv Ts Og".split()
)


@dataclass(frozen=True)
class VocabularyTerm:
    code: str
    label: str
    description: str = ""


@dataclass(frozen=True)
class ControlledVocabulary:
    """Fixed, ordered term list presented to researchers as a drop-down."""

    name: str
    terms: tuple[VocabularyTerm, ...]

    def __post_init__(self):
        if not self.terms:
            raise DomainError(f"vocabulary {self.name!r} must have at least one term")
        codes = [t.code for t in self.terms]
        if len(set(codes)) != len(codes):
            raise DomainError(f"vocabulary {self.name!r} has duplicate term codes")

    def has_term(self, code: str) -> bool:
        return any(t.code == code for t in self.terms)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "terms": [
                {"code": t.code, "label": t.label, "description": t.description}
                for t in self.terms
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ControlledVocabulary":
        return cls(
            name=data["name"],
            terms=tuple(
                VocabularyTerm(t["code"], t["label"], t.get("description", ""))
                for t in data["terms"]
            ),
        )


@dataclass(frozen=True)
class PropertyDefinition:
    name: str
    value_kind: str
    vocabulary_name: str | None = None
    unit: str | None = None
    description: str = ""

    def __post_init__(self):
        if self.value_kind not in VALUE_KINDS:
            raise DomainError(f"unknown value kind {self.value_kind!r} for property {self.name!r}")
        if self.value_kind == "vocabulary" and not self.vocabulary_name:
            raise DomainError(f"vocabulary property {self.name!r} must name its vocabulary")


@dataclass(frozen=True)
class ObjectTypeSchema:
    type_name: str
    properties: tuple[PropertyDefinition, ...]
    required_property_names: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        names = [p.name for p in self.properties]
        if len(set(names)) != len(names):
            raise DomainError(f"schema {self.type_name!r} has duplicate property names")
        missing = self.required_property_names - set(names)
        if missing:
            raise DomainError(
                f"schema {self.type_name!r} requires undeclared properties: {sorted(missing)}"
            )

    def property_map(self) -> dict[str, PropertyDefinition]:
        return {p.name: p for p in self.properties}

    def to_dict(self) -> dict:
        return {
            "type_name": self.type_name,
            "properties": [
                {
                    "name": p.name,
                    "value_kind": p.value_kind,
                    "vocabulary_name": p.vocabulary_name,
                    "unit": p.unit,
                    "description": p.description,
                }
                for p in self.properties
            ],
            "required": sorted(self.required_property_names),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ObjectTypeSchema":
        return cls(
            type_name=data["type_name"],
            properties=tuple(
                PropertyDefinition(
                    name=p["name"],
                    value_kind=p["value_kind"],
                    vocabulary_name=p.get("vocabulary_name"),
                    unit=p.get("unit"),
                    description=p.get("description", ""),
                )
                for p in data["properties"]
            ),
            required_property_names=frozenset(data.get("required", ())),
        )


def _load_seed(filename: str) -> ControlledVocabulary:
    raw = resources.files("provlab.core").joinpath("seeds", filename).read_text("utf-8")
    return ControlledVocabulary.from_dict(json.loads(raw))


def seed_vocabularies() -> dict[str, ControlledVocabulary]:
    """Vocabularies shipped with the package, loaded from the JSON seed files."""
    vocabs = [
        _load_seed("sample_categories.json"),
        _load_seed("experimental_techniques.json"),
        _load_seed("dataset_types.json"),
    ]
    return {v.name: v for v in vocabs}


def _text(name: str, description: str = "") -> PropertyDefinition:
    return PropertyDefinition(name, "text", description=description)


def seed_schemas() -> dict[str, ObjectTypeSchema]:
    """Object type schemas shipped with the package."""
    sample = ObjectTypeSchema(
        type_name="SAMPLE",
        properties=(
            _text("name", "Short human-readable sample name"),
            PropertyDefinition("sample_category", "vocabulary", vocabulary_name="SAMPLE_CATEGORY"),
            PropertyDefinition("dimensions_mm", "real_triple", unit="mm"),
            _text("location", "Where the physical specimen currently is"),
            PropertyDefinition("composition", "composition", unit="at.%"),
            PropertyDefinition("defect_tags", "text_list"),
            PropertyDefinition("is_computational", "boolean"),
            _text("notes"),
        ),
        required_property_names=frozenset({"name", "sample_category", "dimensions_mm", "location"}),
    )
    protocol = ObjectTypeSchema(
        type_name="PROTOCOL",
        properties=(
            _text("name"),
            _text("description"),
            PropertyDefinition("technique", "vocabulary", vocabulary_name="EXPERIMENTAL_TECHNIQUE"),
        ),
        required_property_names=frozenset({"name"}),
    )
    device = ObjectTypeSchema(
        type_name="DEVICE",
        properties=(
            _text("name"),
            _text("model"),
            _text("manufacturer"),
            _text("location"),
        ),
        required_property_names=frozenset({"name", "model"}),
    )
    entry = ObjectTypeSchema(
        type_name="ENTRY",
        properties=(
            _text("name"),
            PropertyDefinition("technique", "vocabulary", vocabulary_name="EXPERIMENTAL_TECHNIQUE"),
            PropertyDefinition("date", "date"),
            _text("notes"),
        ),
        required_property_names=frozenset({"name"}),
    )
    micro_mech = ObjectTypeSchema(
        type_name="MICRO_MECH_EXP",
        properties=(
            _text("name"),
            PropertyDefinition("technique", "vocabulary", vocabulary_name="EXPERIMENTAL_TECHNIQUE"),
            PropertyDefinition("date", "date"),
            PropertyDefinition(
                "pillar_geometry",
                "spreadsheet",
                description="CSV with header pillar_id,diameter_top_um,height_um",
            ),
            _text("notes"),
        ),
        required_property_names=frozenset({"name"}),
    )
    prep_step = ObjectTypeSchema(
        type_name="PREPARATION_STEP",
        properties=(
            PropertyDefinition("sequence_index", "integer"),
            _text("protocol_name"),
            _text("abrasive"),
            _text("lubricant"),
            PropertyDefinition("duration_s", "real", unit="s"),
            _text("notes"),
        ),
        required_property_names=frozenset({"sequence_index", "protocol_name"}),
    )
    schemas = [sample, protocol, device, entry, micro_mech, prep_step]
    return {s.type_name: s for s in schemas}
