from dataclasses import dataclass, field
from typing import Any, Iterable

PASS = "pass"
FAIL = "fail"
UNSUPPORTED = "unsupported"

SEVERITY = {PASS: 0, UNSUPPORTED: 1, FAIL: 2}


@dataclass(frozen=True)
class CheckEntry:
    name: str
    status: str
    witnesses: tuple = ()
    detail: str = ""
    failures: int = 0

    def __post_init__(self):
        if self.status not in SEVERITY:
            raise ValueError(f"Unknown check status '{self.status}'")
        if self.status == FAIL and not self.witnesses:
            raise ValueError(f"Failing check '{self.name}' needs a witness")


@dataclass(frozen=True)
class AxiomReport:
    subject: str
    entries: tuple[CheckEntry, ...]
    quantities: dict[str, Any] = field(default_factory=dict, compare=False)
    expected_failures: frozenset[str] = frozenset()

    def entry(self, name: str) -> CheckEntry:
        for entry in self.entries:
            if entry.name == name:
                return entry
        raise KeyError(name)

    def failures(self) -> list[CheckEntry]:
        return [e for e in self.entries if e.status == FAIL]

    @property
    def passed(self) -> bool:
        for entry in self.entries:
            expected = entry.name in self.expected_failures
            if expected != (entry.status == FAIL):
                return False
        return True

    def status_of(self, prefix: str) -> str:
        """Worst status among the entries named ``prefix`` or ``prefix.*``."""
        statuses = [
            e.status for e in self.entries
            if e.name == prefix or e.name.startswith(prefix + ".")
        ]
        if not statuses:
            raise KeyError(prefix)
        return max(statuses, key=SEVERITY.__getitem__)


def check(name: str, witnesses: Iterable[tuple], detail: str = "") -> CheckEntry:
    """Builds an entry from the (possibly lazy) stream of failure witnesses.

    Only the first witness is kept; the rest are counted.
    """
    first = None
    count = 0
    for witness in witnesses:
        if first is None:
            first = tuple(witness)
        count += 1
    if first is None:
        return CheckEntry(name, PASS, detail=detail)
    return CheckEntry(name, FAIL, (first,), detail, count)


def unsupported(name: str, detail: str) -> CheckEntry:
    return CheckEntry(name, UNSUPPORTED, detail=detail)


def satisfied(name: str, detail: str = "") -> CheckEntry:
    return CheckEntry(name, PASS, detail=detail)


def merge_reports(subject: str, reports: Iterable[AxiomReport]) -> AxiomReport:
    entries: list[CheckEntry] = []
    quantities: dict[str, Any] = {}
    expected: set[str] = set()
    for report in reports:
        for entry in report.entries:
            entries.append(CheckEntry(f"{report.subject}/{entry.name}", entry.status,
                                      entry.witnesses, entry.detail, entry.failures))
        expected.update(f"{report.subject}/{name}" for name in report.expected_failures)
        if report.quantities:
            quantities[report.subject] = report.quantities
    return AxiomReport(subject, tuple(entries), quantities, frozenset(expected))
