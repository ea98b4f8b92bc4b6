import pytest

from src.algebra.groups import compose_maps
from src.algebra.sorts import family_contains
from src.corpus import STANDARD_GROUPS, cyclic_chain, standard_sorted_group
from src.errors import DualityError
from src.systems.axioms import check_axioms
from src.systems.complete_system import Sort, make_system, tilde_classes
from src.systems.duality import (
    alpha,
    beta,
    check_alpha_beta,
    compose_system_maps,
    dual_group_morphism,
    dual_system_embedding,
    faithful_support,
    find_embedding,
    identity_system_map,
    is_embedding,
    limit_of_system,
    system_of_group,
)

GROUPS = list(STANDARD_GROUPS)
A = ("A",)


def _expected_size(SG, support):
    return sum(
        N.index
        for s in support
        for N, F in SG.items()
        if N.index <= s.k and family_contains(F, s.J)
    )


@pytest.mark.parametrize("name", GROUPS)
def test_coset_system_size(name):
    SG = standard_sorted_group(name)
    support = faithful_support(SG)
    assert len(system_of_group(SG, support)) == _expected_size(SG, support)


@pytest.mark.parametrize("name", GROUPS)
def test_coset_systems_satisfy_every_axiom(name):
    SG = standard_sorted_group(name)
    report = check_axioms(system_of_group(SG, faithful_support(SG)))
    assert not report.failures()


@pytest.mark.parametrize("name", GROUPS)
def test_alpha_and_beta_are_isomorphisms(name):
    report = check_alpha_beta(standard_sorted_group(name))
    assert report.passed, report.failures()
    assert report.quantities["limit_order"] == report.quantities["order"]


def test_alpha_is_injective_on_s3(s3):
    assert alpha(s3).kernel() == {0}


def test_faithful_support_of_z4(z4):
    assert faithful_support(z4) == [Sort(1, A), Sort(4, A)]


def test_beta_is_an_embedding(z4):
    assert is_embedding(beta(system_of_group(z4, faithful_support(z4))))


def test_alpha_of_a_non_faithful_support_has_a_kernel(z4):
    support = [Sort(2, A)]
    assert alpha(z4, support).kernel() == {0, 2}
    report = check_alpha_beta(z4, support)
    assert report.entry("alpha.faithful").witnesses[0] == (2,)
    assert report.quantities["alpha_kernel"] == [0, 2]
    assert not report.passed


def test_faithful_support_passes_the_faithfulness_check(z4):
    assert check_alpha_beta(z4).entry("alpha.faithful").status == "pass"


def test_edited_system_breaks_beta(z2):
    S = system_of_group(z2, faithful_support(z2))
    edited = make_system(S.sorts, S.homes, S.leq, S.c_rel - {("2:A|N0|1", "2:A|N1|0")}, S.p_rel, S.resolution)
    report = check_alpha_beta(z2, system=edited)
    assert report.status_of("alpha-isomorphism") == "pass"
    assert report.status_of("beta-isomorphism") == "fail"
    assert report.status_of("s-alpha-beta-identity") == "fail"


def test_empty_support_is_rejected(z2):
    with pytest.raises(DualityError):
        system_of_group(z2, [])


def test_dual_morphisms_compose_along_a_chain():
    (z8, z4, z2), (pi1, pi2) = cyclic_chain((8, 4, 2))
    support = [Sort(1, A), Sort(8, A)]
    upper = dual_group_morphism(pi1, z8, z4, support, support)
    lower = dual_group_morphism(pi2, z4, z2, support, support)
    direct = dual_group_morphism(compose_maps(pi2, pi1), z8, z2, support, support)
    assert is_embedding(upper) and is_embedding(lower)
    assert compose_system_maps(upper, lower).table == direct.table


def test_dual_of_an_embedding_recovers_the_kernel():
    (z8, z4, z2), (pi1, pi2) = cyclic_chain((8, 4, 2))
    support = [Sort(1, A), Sort(8, A)]
    restriction = dual_system_embedding(dual_group_morphism(pi1, z8, z4, support, support))
    assert restriction.is_epimorphism
    assert len(restriction.kernel()) == 2
    composite = dual_system_embedding(dual_group_morphism(compose_maps(pi2, pi1), z8, z2, support, support))
    assert len(composite.kernel()) == 4


def test_identity_embedding_is_found(z4):
    S = system_of_group(z4, faithful_support(z4))
    f = find_embedding(S, S)
    assert f is not None and is_embedding(f)
    assert is_embedding(identity_system_map(S))


def test_limit_of_hidden_example_is_cyclic_of_order_four(hidden_example):
    limit = limit_of_system(hidden_example)
    assert limit.group.order == 4
    assert limit.group.is_cyclic()


def test_hidden_example_does_not_embed_into_its_double_dual(hidden_example):
    limit = limit_of_system(hidden_example)
    dual = system_of_group(limit.sorted_group, hidden_example.sorts)
    assert len(tilde_classes(dual)) == 3
    assert find_embedding(hidden_example, dual) is None
