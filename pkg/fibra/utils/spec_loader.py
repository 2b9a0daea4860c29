"""Load bundle specification documents (JSON) into library objects.

``parse_spec`` checks syntax, the JSON schema and every cross-reference
(symbols, charts, points). Building the mathematical objects is left to the
``build_*`` methods so that law violations surface as verdicts of the
command that asked for them, not as load failures.
"""

import json
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Union

from jsonschema import Draft202012Validator

from fibra.services.algebra import FiniteAlgebra, GroupStructure, Signature, validate_algebra
from fibra.services.bundle import BaseSpace, BundleAtlas, Section, make_section, validate_atlas
from fibra.services.errors import (
    MissingSection,
    SchemaViolation,
    SpecSyntaxError,
    UnknownReference,
)
from fibra.services.fibered_algebra import FiberedAlgebra, make_fibered_algebra
from fibra.services.representation import (
    FiberedGroup,
    GroupRepresentation,
    make_fibered_group,
    make_representation,
)

logger = logging.getLogger(__name__)

SCHEMA_PATH = os.path.join(os.path.dirname(__file__), "..", "static", "spec.schema.json")

_validator: Optional[Draft202012Validator] = None


def get_validator() -> Draft202012Validator:
    """Schema validator for spec documents, loaded once."""
    global _validator
    if _validator is None:
        with open(SCHEMA_PATH, "r", encoding="utf-8") as f:
            _validator = Draft202012Validator(json.load(f))
    return _validator


@dataclass(frozen=True)
class RepresentationSpec:
    """The ``representation`` block with its group document resolved."""

    variance: str
    group: "SpecDocument"
    action: Dict[str, Dict[str, List[int]]]
    chart_actions: List[Dict[str, Any]] = field(default_factory=list)


@dataclass(frozen=True)
class SpecDocument:
    """A parsed, cross-checked spec file."""

    data: Dict[str, Any]
    source: Optional[str] = None
    representation: Optional[RepresentationSpec] = None

    @property
    def signature(self) -> Signature:
        return Signature(tuple((op["name"], op["arity"]) for op in self.data["signature"]))

    @property
    def has_group(self) -> bool:
        return "group" in self.data["fiber"]

    @property
    def section_names(self) -> List[str]:
        return list(self.data.get("sections", {}))

    def build_fiber(self) -> FiniteAlgebra:
        fiber = self.data["fiber"]
        return validate_algebra(self.signature, fiber["size"], fiber["tables"])

    def build_group(self) -> GroupStructure:
        if not self.has_group:
            raise MissingSection("Spec has no fiber.group block", {"section": "fiber.group"})
        group = self.data["fiber"]["group"]
        return GroupStructure(self.build_fiber(), group["mul"], group["inv"], group["unit"])

    def build_base(self) -> BaseSpace:
        base = self.data["base"]
        return BaseSpace(
            tuple(base["points"]),
            tuple((chart["name"], frozenset(chart["points"])) for chart in base["charts"]),
        )

    def build_atlas(self) -> BundleAtlas:
        transitions = [(t["from"], t["to"], t["map"]) for t in self.data.get("transitions", [])]
        return validate_atlas(self.build_base(), self.data["fiber"]["size"], transitions)

    def build_fibered_algebra(self) -> FiberedAlgebra:
        return make_fibered_algebra(self.build_atlas(), self.build_fiber())

    def build_fibered_group(self) -> FiberedGroup:
        return make_fibered_group(self.build_atlas(), self.build_group())

    def build_sections(self, atlas: Optional[BundleAtlas] = None) -> Dict[str, Section]:
        atlas = atlas or self.build_atlas()
        return {
            name: make_section(atlas, values)
            for name, values in self.data.get("sections", {}).items()
        }

    def build_section(self, name: str, atlas: Optional[BundleAtlas] = None) -> Section:
        sections = self.data.get("sections", {})
        if name not in sections:
            raise MissingSection(f"Spec has no section named '{name}'", {"section": name})
        return make_section(atlas or self.build_atlas(), sections[name])

    def build_representation(self) -> GroupRepresentation:
        if self.representation is None:
            raise MissingSection("Spec has no representation block", {"section": "representation"})
        rep = self.representation
        group = rep.group.build_fibered_group()
        target = self.build_atlas()
        chart_actions = {
            (entry["point"], entry["group_chart"], entry["target_chart"]): entry["action"]
            for entry in rep.chart_actions
        }
        return make_representation(group, target, rep.variance, rep.action, chart_actions)


def _load(source: Union[str, os.PathLike, Mapping[str, Any]]) -> tuple:
    if isinstance(source, Mapping):
        return dict(source), None
    text = str(source)
    if text.lstrip().startswith("{"):
        path = None
    else:
        path = os.fspath(source)
        try:
            with open(path, "r", encoding="utf-8") as f:
                text = f.read()
        except OSError as e:
            raise UnknownReference(f"Cannot read spec file '{path}': {e}", {"path": path})
    try:
        return json.loads(text), path
    except json.JSONDecodeError as e:
        raise SpecSyntaxError(
            f"Invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}",
            {"line": e.lineno, "column": e.colno, "path": path},
        )


def _check_schema(data: Any):
    errors = sorted(get_validator().iter_errors(data), key=lambda e: list(e.path))
    if errors:
        first = errors[0]
        location = ".".join(str(p) for p in first.path) or "<root>"
        raise SchemaViolation(
            f"{location}: {first.message}", {"field": location, "errors": len(errors)}
        )


def _unique(names: List[str], what: str):
    seen = set()
    for name in names:
        if name in seen:
            raise SchemaViolation(f"Duplicate {what} '{name}'", {"field": what, "name": name})
        seen.add(name)


def _require(name: str, known, what: str):
    if name not in known:
        raise UnknownReference(f"Unknown {what} '{name}'", {what: name})


def _check_references(data: Dict[str, Any]):
    symbols = [op["name"] for op in data["signature"]]
    _unique(symbols, "symbol")
    for symbol in data["fiber"]["tables"]:
        _require(symbol, symbols, "symbol")
    for symbol in data["fiber"].get("group", {}).values():
        _require(symbol, symbols, "symbol")

    points = data["base"]["points"]
    _unique(points, "point")
    charts = [chart["name"] for chart in data["base"]["charts"]]
    _unique(charts, "chart")
    for chart in data["base"]["charts"]:
        for x in chart["points"]:
            _require(x, points, "point")
    for transition in data.get("transitions", []):
        _require(transition["from"], charts, "chart")
        _require(transition["to"], charts, "chart")
    for values in data.get("sections", {}).values():
        for x in values:
            _require(x, points, "point")


def _resolve_representation(
    block: Dict[str, Any], data: Dict[str, Any], path: Optional[str]
) -> RepresentationSpec:
    group_source = block["group_spec"]
    if isinstance(group_source, str) and path is not None and not os.path.isabs(group_source):
        group_source = os.path.join(os.path.dirname(path), group_source)
    group = parse_spec(group_source, resolve_representation=False)
    if not group.has_group:
        raise MissingSection(
            "Group spec has no fiber.group block", {"section": "representation.group_spec"}
        )

    points = data["base"]["points"]
    charts = [chart["name"] for chart in data["base"]["charts"]]
    group_charts = [chart["name"] for chart in group.data["base"]["charts"]]
    for x in block["action"]:
        _require(x, points, "point")
    for entry in block.get("chart_actions", []):
        _require(entry["point"], points, "point")
        _require(entry["target_chart"], charts, "chart")
        _require(entry["group_chart"], group_charts, "chart")
    return RepresentationSpec(
        block["variance"], group, block["action"], list(block.get("chart_actions", []))
    )


def parse_spec(
    source: Union[str, os.PathLike, Mapping[str, Any]], resolve_representation: bool = True
) -> SpecDocument:
    """Parse a spec given as a path, a JSON string or an already-decoded dict.

    Args:
        source: File path, JSON text, or mapping
        resolve_representation: Also load the group document named by
            ``representation.group_spec`` (relative paths are taken from the
            spec file's directory)

    Returns:
        SpecDocument with all references resolved

    Raises:
        SpecSyntaxError: the text is not JSON (carries the line)
        SchemaViolation: structure or duplicate names
        UnknownReference: a name that is not declared, or an unreadable file
    """
    data, path = _load(source)
    _check_schema(data)
    _check_references(data)
    representation = None
    if resolve_representation and "representation" in data:
        representation = _resolve_representation(data["representation"], data, path)
    logger.info(f"Parsed spec {path or '<inline>'}")
    return SpecDocument(data, path, representation)
