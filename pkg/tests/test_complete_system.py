import pytest

from src.algebra.groups import identity_map
from src.algebra.sorted_group import is_sorted_morphism
from src.errors import CompleteSystemError
from src.systems.complete_system import (
    Sort,
    class_group,
    class_join,
    class_meet,
    pieces,
    projection,
    saturate,
)
from src.systems.duality import group_of_system, system_of_group

A = ("A",)


@pytest.fixture(scope="module")
def coset_system(z4):
    return system_of_group(z4, [Sort(1, A), Sort(4, A)])


def test_pieces_of_the_coset_system(coset_system):
    assert sorted(len(p) for p in pieces(coset_system)) == [1, 1, 2, 4]


def test_meet_and_join_of_classes(coset_system):
    trivial, middle = "4:A|N0|0", "4:A|N1|0"
    assert class_meet(coset_system, trivial, middle) == {f"4:A|N0|{g}" for g in range(4)}
    assert class_join(coset_system, trivial, middle) == {"4:A|N1|0", "4:A|N1|1"}
    assert class_meet(coset_system, middle, middle) == class_join(coset_system, middle, middle)


def test_class_groups_and_projections(coset_system):
    assert class_group(coset_system, "4:A|N0|3").group.order == 4
    pi = projection(coset_system, "4:A|N0|0", "4:A|N1|0")
    assert pi("4:A|N0|3") == "4:A|N1|1"
    assert pi.kernel() == {"4:A|N0|0", "4:A|N0|2"}
    with pytest.raises(CompleteSystemError):
        projection(coset_system, "4:A|N1|0", "4:A|N0|0")


def test_saturation_adds_small_classes(coset_system):
    S = saturate(coset_system, [(2, A)])
    assert Sort(2, A) in S.sorts
    assert len(S.elements_of(Sort(2, A))) == 3
    assert saturate(S, [(2, A)]) is S


def test_group_of_the_coset_system(coset_system, z4):
    group, sorted_group = group_of_system(coset_system)
    assert group.order == 4 and group.is_cyclic()
    assert is_sorted_morphism(identity_map(sorted_group.group), sorted_group, sorted_group)
    assert is_sorted_morphism(identity_map(z4.group), z4, z4)
