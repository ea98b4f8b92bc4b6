import json

import pytest

from main import main
from src import manager
from src.format_adapters.structure_files import dump_system, parse_system
from src.manager import EXIT_FAIL, EXIT_MALFORMED, EXIT_PASS, RunConfig, run


def _run_json(command, *paths, **options):
    code, output = run(RunConfig(command, tuple(str(p) for p in paths), fmt="json", **options))
    return code, json.loads(output) if code != EXIT_MALFORMED else output


def test_counterexample_is_an_expected_failure():
    code, data = _run_json("counterexample")
    assert code == EXIT_PASS
    assert data["expected-fail"] == "pass"
    assert data["axioms"]["axiom8"]["status"] == "fail"
    assert data["axioms"]["axiom8"]["witness"] == ["m4:x0_0", "m2:x1_0", "m2:x2_0"]
    assert all(data["axioms"][f"axiom{n}"]["status"] == "pass" for n in range(1, 8))
    assert data["quantities"]["tilde_classes"] == 4
    assert data["quantities"]["dual_tilde_classes"] == 3
    assert data["quantities"]["limit_order"] == 4
    assert data["quantities"]["common_kernel"] == ["m4:x0_0", "m4:x0_2"]


def test_counterexample_text_report():
    code, output = run(RunConfig("counterexample", kcap=5))
    assert code == EXIT_PASS
    assert "(expected to fail)" in output
    assert output.startswith("# counterexample: PASS")


def test_counterexample_rejects_a_small_kcap():
    code, output = run(RunConfig("counterexample", kcap=3))
    assert code == EXIT_MALFORMED
    assert "k-cap" in output


@pytest.mark.parametrize("command,name", [
    ("roundtrip", "z4.group.json"),
    ("roundtrip", "s3.group.json"),
    ("check-group", "z2.group.json"),
    ("check-system", "z2.system.json"),
    ("interpret", "z2.model.json"),
    ("fiber", "fiber.json"),
])
def test_corpus_files_pass(corpus_dir, command, name):
    code, data = _run_json(command, corpus_dir / name)
    assert code == EXIT_PASS, data


def test_fiber_reports_its_order(corpus_dir):
    _, data = _run_json("fiber", corpus_dir / "fiber.json")
    assert data["quantities"]["order"] == 4
    assert data["quantities"]["product_order"] == 16


@pytest.mark.parametrize("index", [0, 1, 2])
def test_ultraproduct_at_every_index(corpus_dir, index):
    code, _ = _run_json("ultraproduct", corpus_dir / "ultraproduct.json", index=index)
    assert code == EXIT_PASS


def test_ultraproduct_needs_an_index(corpus_dir):
    code, _ = _run_json("ultraproduct", corpus_dir / "ultraproduct.json")
    assert code == EXIT_MALFORMED


def test_dualize_group_writes_the_coset_system(corpus_dir):
    code, data = _run_json("dualize", corpus_dir / "z2.group.json", direction="g2s")
    assert code == EXIT_PASS
    expected = parse_system(json.loads((corpus_dir / "z2.system.json").read_text()))
    assert parse_system(data["quantities"]["structure"]) == expected


def test_dualize_flags_a_system_that_fails_its_axioms(write_json):
    from src.corpus import hidden_axiom_example
    path = write_json("hidden.json", dump_system(hidden_axiom_example(4)))
    code, data = _run_json("dualize", path, direction="s2g")
    assert code == EXIT_FAIL
    assert data["axioms"]["axiom8"]["entry"] == "system/8.hidden-axiom"
    assert data["axioms"]["axiom8"]["witness"] == ["m4:x0_0", "m2:x1_0", "m2:x2_0"]
    assert data["quantities"]["dual-group"]["structure"]["order"] == 4


def test_dualize_system_file_passes(corpus_dir):
    code, data = _run_json("dualize", corpus_dir / "z2.system.json", direction="s2g")
    assert code == EXIT_PASS
    assert data["quantities"]["dual-group"]["structure"]["order"] == 2


def test_check_system_reports_the_hidden_axiom(write_json):
    from src.corpus import hidden_axiom_example
    path = write_json("hidden.json", dump_system(hidden_axiom_example(4)))
    code, data = _run_json("check-system", path)
    assert code == EXIT_FAIL
    assert data["axioms"]["axiom8"]["status"] == "fail"


def test_several_files_are_merged_in_order(corpus_dir):
    paths = [corpus_dir / "z2.group.json", corpus_dir / "z4.group.json", corpus_dir / "s3.group.json"]
    code, data = _run_json("roundtrip", *paths)
    assert code == EXIT_PASS
    names = [entry["name"] for entry in data["entries"]]
    firsts = [next(i for i, name in enumerate(names) if name.startswith(f"{p}/")) for p in paths]
    assert firsts == sorted(firsts)


@pytest.mark.parametrize("content", ["not json", '{"order": 2}', '{"order": 2, "cayley": [[0, 1], [1, 1]]}'])
def test_malformed_input_exits_with_two(write_json, content):
    code, output = _run_json("roundtrip", write_json("bad.json", content))
    assert code == EXIT_MALFORMED
    assert output.startswith("error:")


def test_check_group_reports_a_table_that_is_not_a_group(write_json):
    code, data = _run_json("check-group", write_json("bad.json", {"order": 2, "cayley": [[0, 1], [1, 1]]}))
    assert code == EXIT_FAIL
    entry = next(e for e in data["entries"] if e["name"] == "group/inverses")
    assert entry["status"] == "fail"
    assert entry["witnesses"] == [[1]]


def test_check_group_still_rejects_a_ragged_table(write_json):
    code, output = _run_json("check-group", write_json("bad.json", {"order": 2, "cayley": [[0, 1], [1]]}))
    assert code == EXIT_MALFORMED
    assert output.startswith("error:")


def test_missing_file_exits_with_two(tmp_path):
    code, output = _run_json("check-group", tmp_path / "missing.json")
    assert code == EXIT_MALFORMED
    assert "not found" in output


def test_worker_count_comes_from_the_environment(monkeypatch):
    monkeypatch.setenv("GDL_MAX_WORKERS", "2")
    assert manager._max_workers() == 2


def test_main_returns_the_exit_code(corpus_dir, capsys):
    assert main(["--format", "json", "roundtrip", str(corpus_dir / "z2.group.json")]) == EXIT_PASS
    assert json.loads(capsys.readouterr().out)["status"] == "pass"
    assert main(["counterexample"]) == EXIT_PASS
    assert main(["no-such-command"]) == EXIT_MALFORMED
