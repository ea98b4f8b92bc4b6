import re
from typing import Any

from ..reports import FAIL, PASS, AxiomReport, SEVERITY
from .structure_files import canonical_json


_AXIOM_NUMBER = re.compile(r"(?:^|/)(\d+)\.")


def _plain(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (str, int, bool)) or value is None:
        return value
    return str(value)


def axiom_summary(report: AxiomReport) -> dict[str, dict]:
    """Worst status and first witness per numbered axiom, keyed axiom1..axiom8."""
    summary: dict[str, dict] = {}
    for entry in report.entries:
        match = _AXIOM_NUMBER.search(entry.name)
        if not match:
            continue
        key = f"axiom{match.group(1)}"
        current = summary.get(key)
        if current is None or SEVERITY[entry.status] > SEVERITY[current["status"]]:
            summary[key] = {
                "status": entry.status,
                "entry": entry.name,
                "witness": _plain(entry.witnesses[0]) if entry.witnesses else None,
            }
    return dict(sorted(summary.items(), key=lambda item: int(item[0][5:])))


def report_to_dict(report: AxiomReport) -> dict:
    data = {
        "subject": report.subject,
        "status": PASS if report.passed else FAIL,
        "entries": [
            {
                "name": e.name,
                "status": e.status,
                "detail": e.detail,
                "failures": e.failures,
                "witnesses": _plain(e.witnesses),
                "expected_fail": e.name in report.expected_failures,
            }
            for e in report.entries
        ],
        "quantities": _plain(report.quantities),
    }
    summary = axiom_summary(report)
    if summary:
        data["axioms"] = summary
    if report.expected_failures:
        data["expected-fail"] = PASS if report.passed else FAIL
    return data


def render_json(report: AxiomReport) -> str:
    return canonical_json(report_to_dict(report))


def _format_witness(witness: tuple) -> str:
    return "(" + ", ".join(str(w) for w in witness) + ")"


def render_text(report: AxiomReport) -> str:
    lines = [f"# {report.subject}: {'PASS' if report.passed else 'FAIL'}"]
    for e in report.entries:
        line = f"- [{e.status}] {e.name}"
        if e.name in report.expected_failures:
            line += " (expected to fail)"
        if e.detail:
            line += f" -- {e.detail}"
        lines.append(line)
        if e.witnesses:
            extra = f" and {e.failures - 1} more" if e.failures > 1 else ""
            lines.append(f"    witness {_format_witness(e.witnesses[0])}{extra}")
    if report.quantities:
        lines.append("")
        for name, value in sorted(report.quantities.items()):
            lines.append(f"{name}: {value}")
    return "\n".join(lines) + "\n"


def render(report: AxiomReport, fmt: str) -> str:
    if fmt == "json":
        return render_json(report) + "\n"
    if fmt == "text":
        return render_text(report)
    raise ValueError(f"Unknown report format '{fmt}'")
