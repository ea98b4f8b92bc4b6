import pytest

from src.corpus import standard_sorted_group
from src.errors import DualityError
from src.systems.complete_system import Sort
from src.systems.duality import check_system_map, faithful_support, system_of_group
from src.systems.ultraproduct import (
    PrincipalUltrafilter,
    phi_map,
    principal_ultraproduct,
    ultraproduct_of_systems,
)

FACTORS = ["Z2", "Z4", "S3"]


@pytest.fixture(scope="module")
def factors():
    return [standard_sorted_group(name) for name in FACTORS]


@pytest.mark.parametrize("index", range(len(FACTORS)))
def test_phi_is_an_isomorphism_at_every_index(factors, index):
    report = principal_ultraproduct(factors, index)
    assert report.passed, report.failures()
    assert report.quantities["classes"] == report.quantities["target_elements"]


def test_classes_follow_the_generating_coordinate(factors):
    support = [Sort(1, ("A",)), Sort(2, ("A",))]
    systems = [system_of_group(SG, support) for SG in factors]
    ultrafilter = PrincipalUltrafilter(len(systems), 1)
    product, representatives = ultraproduct_of_systems(systems, ultrafilter)
    assert len(product) == len(systems[1])
    phi = phi_map(systems, ultrafilter, product, representatives)
    assert sorted(phi.table.values()) == sorted(systems[1].element_ids)


@pytest.mark.parametrize("index", [-1, 3])
def test_index_outside_the_factors_is_rejected(factors, index):
    with pytest.raises(DualityError):
        principal_ultraproduct(factors, index)


def test_no_factors_is_rejected():
    with pytest.raises(DualityError):
        principal_ultraproduct([], 0)


FACTOR_LISTS = [
    (["Z4"], 0),
    (["Z4", "Z4", "Z4"], 0),
    (["Z4", "Z4", "Z4"], 2),
    (["Z2", "Z4"], 0),
    (["Z2", "Z4"], 1),
]


@pytest.mark.parametrize("names,index", FACTOR_LISTS)
def test_phi_maps_onto_the_generating_factor(names, index):
    sorted_groups = [standard_sorted_group(name) for name in names]
    report = principal_ultraproduct(sorted_groups, index)
    assert report.passed, report.failures()

    support = sorted({s for SG in sorted_groups for s in faithful_support(SG)}, key=Sort.key)
    systems = [system_of_group(SG, support) for SG in sorted_groups]
    ultrafilter = PrincipalUltrafilter(len(systems), index)
    product, representatives = ultraproduct_of_systems(systems, ultrafilter)
    phi = phi_map(systems, ultrafilter, product, representatives)
    assert phi.target is systems[index]
    assert all(entry.status == "pass" for entry in check_system_map(phi, require_surjective=True))
    assert len(product) == len(systems[index])
