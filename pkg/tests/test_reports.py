import json

import pytest

from src.format_adapters.report_formats import axiom_summary, render, report_to_dict
from src.reports import AxiomReport, CheckEntry, check, merge_reports, unsupported


def _report(*entries, expected=()):
    return AxiomReport("demo", tuple(entries), {"n": 1}, frozenset(expected))


def test_check_keeps_first_witness_and_counts():
    entry = check("1.order", iter([("a",), ("b",), ("c",)]))
    assert entry.status == "fail"
    assert entry.witnesses == (("a",),)
    assert entry.failures == 3
    assert check("1.order", ()).status == "pass"


def test_failing_entries_need_a_witness():
    with pytest.raises(ValueError):
        CheckEntry("x", "fail")


def test_unsupported_entries_do_not_fail_a_report():
    assert _report(check("2.a", ()), unsupported("3.b", "needs m(4;A)")).passed


def test_expected_failures_must_fail():
    failing = check("8.hidden-axiom", [("a", "b", "c")])
    assert _report(failing, expected={"8.hidden-axiom"}).passed
    assert not _report(check("8.hidden-axiom", ()), expected={"8.hidden-axiom"}).passed
    assert not _report(failing).passed


def test_merge_prefixes_names_with_subjects():
    merged = merge_reports("all", [_report(check("1.order", ()), expected={"1.order"})])
    assert merged.entries[0].name == "demo/1.order"
    assert merged.expected_failures == {"demo/1.order"}
    assert merged.quantities == {"demo": {"n": 1}}


def test_axiom_summary_takes_the_worst_status():
    report = _report(check("2.a", ()), unsupported("2.b", "x"), check("3.c", [("w",)]))
    summary = axiom_summary(report)
    assert list(summary) == ["axiom2", "axiom3"]
    assert summary["axiom2"]["status"] == "unsupported"
    assert summary["axiom3"]["witness"] == ["w"]


def test_json_rendering_is_canonical():
    report = _report(check("1.order", ()))
    text = render(report, "json")
    assert json.loads(text) == report_to_dict(report)
    assert text == render(report, "json")
    with pytest.raises(ValueError):
        render(report, "yaml")
