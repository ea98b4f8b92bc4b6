import pytest

from src.algebra.groups import normal_subgroups, validate_group
from src.corpus import (
    CorpusEntry,
    STANDARD_GROUPS,
    corpus_entries,
    kcap_from_env,
    standard_group,
)
from src.errors import GroupError
from src.interpretation.action_model import GaloisActionModel, validate_model


@pytest.fixture(scope="module")
def entries() -> list[CorpusEntry]:
    return corpus_entries()


def test_every_standard_group_has_an_entry(entries):
    names = {entry.name for entry in entries}
    assert set(STANDARD_GROUPS) <= names
    assert "hidden-axiom" in names


def test_group_entries_match_their_expectations(entries):
    for entry in entries:
        if entry.name in STANDARD_GROUPS:
            G = entry.payload.group
            assert validate_group(G).passed
            assert G.order == entry.expected["order"]
            assert len(normal_subgroups(G)) == entry.expected["normal_subgroups"], entry.name


def test_model_entries_are_valid(entries):
    models = [entry for entry in entries if isinstance(entry.payload, GaloisActionModel)]
    assert len(models) == 6
    for entry in models:
        assert validate_model(entry.payload).passed, entry.name
        assert entry.payload.gamma.order == entry.expected["gamma_order"]


def test_unknown_group_is_rejected():
    with pytest.raises(GroupError):
        standard_group("Z17")


def test_kcap_comes_from_the_environment(monkeypatch):
    monkeypatch.setenv("GDL_KCAP", "6")
    assert kcap_from_env() == 6
    monkeypatch.delenv("GDL_KCAP")
    assert kcap_from_env() == 4
