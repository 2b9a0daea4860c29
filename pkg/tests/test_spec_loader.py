import json
import os

import pytest

from fibra.services.errors import (
    MissingSection,
    SchemaViolation,
    SpecSyntaxError,
    TransitionNotHomomorphism,
    UnknownReference,
)
from fibra.services.representation import COVARIANT, transitivity_report
from fibra.utils.spec_loader import parse_spec


def base_spec():
    return {
        "signature": [{"name": "*", "arity": 2}],
        "fiber": {"size": 2, "tables": {"*": [[0, 1], [1, 0]]}},
        "base": {
            "points": ["a", "b"],
            "charts": [{"name": "U0", "points": ["a", "b"]}, {"name": "U1", "points": ["b"]}],
        },
        "transitions": [{"from": "U0", "to": "U1", "map": [0, 1]}],
        "sections": {"s": {"a": 1, "b": 0}},
    }


class TestSources:
    def test_mapping(self):
        spec = parse_spec(base_spec())
        assert spec.source is None
        assert spec.signature.symbols == ("*",)
        assert spec.build_atlas().fiber_size == 2

    def test_json_text(self):
        spec = parse_spec(json.dumps(base_spec()))
        assert spec.section_names == ["s"]
        assert spec.build_section("s").as_dict() == {"a": 1, "b": 0}

    def test_file(self, examples_dir):
        spec = parse_spec(os.path.join(examples_dir, "z5_doubling.json"))
        assert spec.has_group
        assert spec.build_fibered_group().order == 5

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(UnknownReference):
            parse_spec(str(tmp_path / "nothing.json"))

    def test_syntax_error_carries_position(self):
        with pytest.raises(SpecSyntaxError) as excinfo:
            parse_spec('{\n  "signature": [,]\n}')
        assert excinfo.value.witness["line"] == 2
        assert excinfo.value.usage


class TestChecks:
    def test_schema_violation_names_the_field(self):
        data = base_spec()
        data["transitions"][0]["map"] = "identity"
        with pytest.raises(SchemaViolation) as excinfo:
            parse_spec(data)
        assert excinfo.value.witness["field"] == "transitions.0.map"

    def test_unknown_top_level_key(self):
        data = base_spec()
        data["extra"] = 1
        with pytest.raises(SchemaViolation):
            parse_spec(data)

    def test_table_for_undeclared_symbol(self):
        data = base_spec()
        data["fiber"]["tables"]["+"] = [[0, 0], [0, 0]]
        with pytest.raises(UnknownReference) as excinfo:
            parse_spec(data)
        assert excinfo.value.witness == {"symbol": "+"}

    def test_section_on_unknown_point(self):
        data = base_spec()
        data["sections"]["s"]["z"] = 0
        with pytest.raises(UnknownReference):
            parse_spec(data)

    def test_duplicate_point(self):
        data = base_spec()
        data["base"]["points"].append("a")
        with pytest.raises(SchemaViolation):
            parse_spec(data)

    def test_law_violations_surface_when_building(self):
        data = base_spec()
        data["fiber"]["tables"]["*"] = [[0, 0], [0, 1]]
        data["transitions"][0]["map"] = [1, 0]
        spec = parse_spec(data)
        with pytest.raises(TransitionNotHomomorphism):
            spec.build_fibered_algebra()

    def test_missing_group_block(self):
        spec = parse_spec(base_spec())
        with pytest.raises(MissingSection):
            spec.build_group()
        with pytest.raises(MissingSection):
            spec.build_representation()
        with pytest.raises(MissingSection):
            spec.build_section("t")


class TestRepresentationBlock:
    def test_group_spec_resolved_next_to_the_file(self, examples_dir):
        spec = parse_spec(os.path.join(examples_dir, "z3_left_regular.json"))
        r = spec.build_representation()
        assert r.variance == COVARIANT
        assert r.group.order == 3
        assert transitivity_report(r)["single_transitive"]

    def test_inline_group_spec(self, examples_dir):
        with open(os.path.join(examples_dir, "z3_left_regular.json"), encoding="utf-8") as f:
            data = json.load(f)
        with open(os.path.join(examples_dir, "z3_group.json"), encoding="utf-8") as f:
            data["representation"]["group_spec"] = json.load(f)
        spec = parse_spec(data)
        assert spec.build_representation().group.order == 3

    def test_unknown_chart_in_chart_actions(self, examples_dir):
        with open(os.path.join(examples_dir, "z3_left_regular.json"), encoding="utf-8") as f:
            data = json.load(f)
        data["representation"]["group_spec"] = os.path.join(examples_dir, "z3_group.json")
        data["representation"]["chart_actions"][0]["group_chart"] = "U5"
        with pytest.raises(UnknownReference):
            parse_spec(data)

    def test_group_spec_without_group(self, examples_dir):
        with open(os.path.join(examples_dir, "z3_left_regular.json"), encoding="utf-8") as f:
            data = json.load(f)
        data["representation"]["group_spec"] = base_spec()
        with pytest.raises(MissingSection):
            parse_spec(data)
