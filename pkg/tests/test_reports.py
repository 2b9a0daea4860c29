import pytest

from fibra.services.errors import CocycleViolated, SchemaViolation
from fibra.utils.command_helpers import error_report
from fibra.utils.reports import Report, render, render_text


@pytest.mark.parametrize(
    "verdict,exit_code",
    [("pass", 0), ("holonomic", 0), ("fail", 1), ("anholonomic", 1), ("usage-error", 2)],
)
def test_exit_codes(verdict, exit_code):
    assert Report("validate", verdict).exit_code == exit_code


def test_json_round_trip():
    report = Report(
        "orbits",
        "pass",
        {"orbit_count": 2},
        {"orbits": [[{"p": 0}], [{"p": 1}]], "sizes": [1, 1]},
    )
    assert Report.from_json(report.to_json()) == report


def test_text_rendering():
    report = Report("kernel", "pass", {"kernel_size": 1}, {"kernel": [{"p": 0, "q": 0}]})
    text = render_text(report)
    assert text.splitlines()[0] == "kernel: PASS"
    assert "kernel_size: 1" in text
    assert render(report, "json") == report.to_json()


def test_error_reports():
    verdict = error_report("validate", CocycleViolated("bad", {"triple": ["U0", "U1", "U2"]}))
    assert verdict.exit_code == 1
    assert verdict.witnesses["error"]["witness"] == {"triple": ["U0", "U1", "U2"]}
    usage = error_report("validate", SchemaViolation("bad", {"field": "base"}))
    assert usage.exit_code == 2
    unexpected = error_report("validate", RuntimeError("boom"))
    assert unexpected.exit_code == 2
    assert unexpected.witnesses["error"]["code"] == "UnexpectedError"
