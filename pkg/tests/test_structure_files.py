import pytest

from src.corpus import standard_sorted_group
from src.errors import StructureFormatError
from src.format_adapters.structure_files import (
    dump_model,
    dump_sorted_group,
    dump_system,
    load_structure,
    parse_model,
    parse_sorted_group,
    parse_support,
    parse_system,
)
from src.interpretation.action_model import validate_model
from src.systems.complete_system import Sort
from src.systems.duality import faithful_support, system_of_group


def test_corpus_system_file_is_the_coset_system_of_z2(corpus_dir, z2):
    parsed = load_structure(corpus_dir / "z2.system.json", "system")
    assert parsed == system_of_group(z2, faithful_support(z2))


def test_sorted_group_survives_dumping(s3):
    assert parse_sorted_group(dump_sorted_group(s3)) == s3


def test_system_survives_dumping(hidden_example):
    assert parse_system(dump_system(hidden_example)) == hidden_example


def test_model_file_is_valid(corpus_dir, z2_model):
    model = load_structure(corpus_dir / "z2.model.json", "model")
    assert validate_model(model).passed
    assert dump_model(model) == dump_model(z2_model)
    assert parse_model(dump_model(model)) == model


def test_group_without_sorting_gets_the_maximal_one(corpus_dir, s3):
    assert load_structure(corpus_dir / "s3.group.json", "group") == s3


def test_explicit_sorting_is_read(corpus_dir, z4):
    assert load_structure(corpus_dir / "z4.group.json", "group") == z4


def test_fiber_and_factor_files_load(corpus_dir):
    maps = load_structure(corpus_dir / "fiber.json", "fiber")
    assert maps["pAB_A"].source.order == 4
    factors = load_structure(corpus_dir / "ultraproduct.json", "factors")
    assert [SG.group.order for SG in factors] == [2, 4, 6]
    assert factors[2] == standard_sorted_group("S3")


def test_syntax_errors_carry_line_and_column(write_json):
    path = write_json("broken.json", '{\n  "order": 2,\n  "cayley": [[0, 1], [1, 0]\n}')
    with pytest.raises(StructureFormatError) as excinfo:
        load_structure(path, "group")
    assert excinfo.value.location.startswith(f"{path}:4:")


@pytest.mark.parametrize("data,location", [
    ({"cayley": [[0]]}, "$"),
    ({"order": 2, "cayley": [[0, 1]]}, "$.cayley"),
    ({"order": 2, "cayley": [[0, 1], [1, "x"]]}, "$.cayley[1][1]"),
    ({"order": 2, "cayley": [[0, 1], [1, 1]]}, "$.cayley"),
    ({"order": 1, "cayley": [[0]], "sorting": [{"subgroup": [0], "generators": [[]]}]}, "$.sorting[0].generators[0]"),
])
def test_schema_errors_carry_a_path(write_json, data, location):
    with pytest.raises(StructureFormatError) as excinfo:
        load_structure(write_json("group.json", data), "group")
    assert excinfo.value.location == location


def test_system_with_unknown_element_is_rejected(write_json):
    data = {"sorts": [{"k": 1, "J": ["A"]}], "elements": [{"id": "a", "sort": {"k": 1, "J": ["A"]}}],
            "leq": [["a", "b"]]}
    with pytest.raises(StructureFormatError):
        load_structure(write_json("system.json", data), "system")


def test_support_strings():
    assert parse_support("1:A;4:A,B") == [Sort(1, ("A",)), Sort(4, ("A", "B"))]
    for bad in ("", "x:A", "4"):
        with pytest.raises(StructureFormatError):
            parse_support(bad)


def test_table_kind_checks_only_the_shape(write_json):
    G = load_structure(write_json("table.json", {"order": 2, "cayley": [[0, 1], [1, 1]]}), "table")
    assert G.cayley == ((0, 1), (1, 1))
    with pytest.raises(StructureFormatError):
        load_structure(write_json("table.json", {"order": 2, "cayley": [[0, 1], [1, 2]]}), "table")
