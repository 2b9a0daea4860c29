"""Command reports and their text / JSON renderings."""

import json
from dataclasses import dataclass, field
from typing import Any, Dict

PASS = "pass"
FAIL = "fail"
HOLONOMIC = "holonomic"
ANHOLONOMIC = "anholonomic"
USAGE_ERROR = "usage-error"

EXIT_CODES = {PASS: 0, HOLONOMIC: 0, FAIL: 1, ANHOLONOMIC: 1, USAGE_ERROR: 2}


@dataclass
class Report:
    """Outcome of one command.

    ``witnesses`` names what failed or what was found (violations, loops,
    kernel sizes, orbit counts); ``payload`` is the full machine-readable result.
    """

    command: str
    verdict: str
    witnesses: Dict[str, Any] = field(default_factory=dict)
    payload: Dict[str, Any] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES.get(self.verdict, 2)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "verdict": self.verdict,
            "witnesses": self.witnesses,
            "payload": self.payload,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        data = json.loads(text)
        return cls(data["command"], data["verdict"], data["witnesses"], data["payload"])


def _render_value(value: Any, indent: int) -> str:
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            return " {}"
        lines = [""]
        for key, item in value.items():
            lines.append(f"{pad}{key}:{_render_value(item, indent + 1)}")
        return "\n".join(lines)
    if isinstance(value, list) and value and all(isinstance(v, dict) for v in value):
        lines = [""]
        for item in value:
            lines.append(f"{pad}-{_render_value(item, indent + 1)}")
        return "\n".join(lines)
    return f" {json.dumps(value)}"


def render_text(report: Report) -> str:
    """Human-readable rendering: verdict first, then witnesses and payload."""
    lines = [f"{report.command}: {report.verdict.upper()}"]
    if report.witnesses:
        lines.append(f"witnesses:{_render_value(report.witnesses, 1)}")
    if report.payload:
        lines.append(f"payload:{_render_value(report.payload, 1)}")
    return "\n".join(lines)


def render(report: Report, output_format: str = "text") -> str:
    """Render a report.

    Args:
        report: Command outcome
        output_format: ``"json"`` for the machine-readable form, anything else for text

    Returns:
        The rendered report
    """
    if output_format == "json":
        return report.to_json()
    return render_text(report)
