import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from src.algebra.sorts import (
    Base,
    SetCode,
    SortFamily,
    base_sorts,
    code_closure,
    family_add,
    family_contains,
    family_includes,
    in_sqrt,
    j_star_cap,
    j_star_sub,
    make_tuple,
    maximal_family,
    support,
)
from src.errors import SortError

names = st.sampled_from(["A", "B", "C"])
terms = st.recursive(
    st.builds(Base, names),
    lambda inner: st.builds(SetCode, st.integers(1, 3), st.lists(inner, min_size=1, max_size=2).map(tuple)),
    max_leaves=5,
)
sort_tuples = st.lists(terms, min_size=1, max_size=3).map(tuple)


@given(sort_tuples)
def test_code_closure_is_idempotent_and_extensive(J):
    closure = code_closure(support(J))
    assert support(J) <= closure
    assert code_closure(closure) == closure


@given(sort_tuples, sort_tuples)
def test_family_membership_is_upward_closed(J, extra):
    F = SortFamily(frozenset({support(J)}))
    assert family_contains(F, J)
    assert family_contains(F, J + extra)


@given(sort_tuples, sort_tuples)
def test_family_add_contains_new_tuple(J1, J2):
    F = family_add(SortFamily(frozenset({support(J1)})), J2)
    assert family_contains(F, J1) and family_contains(F, J2)


@given(sort_tuples)
def test_maximal_family_contains_tuples_over_its_bases(J):
    assume(base_sorts(J))
    assert family_contains(maximal_family(base_sorts(J)), J)


def test_singleton_code_is_interdefinable_with_its_element():
    F = SortFamily(frozenset({frozenset({Base("A")})}))
    assert family_contains(F, (SetCode(1, ("A",)),))
    assert not family_contains(F, (SetCode(2, ("A",)),))


def test_normalization_drops_dominated_generators():
    F = SortFamily(frozenset({frozenset({Base("A")}), frozenset({Base("A"), Base("B")})}))
    assert F.generators == frozenset({frozenset({Base("A")})})


def test_family_includes():
    small = SortFamily(frozenset({frozenset({Base("A"), Base("B")})}))
    large = maximal_family(["A"])
    assert family_includes(large, small)
    assert not family_includes(small, large)


def test_j_star_operations():
    A = make_tuple(["A"])
    assert j_star_sub(2, A) == (SetCode(1, A), SetCode(2, A))
    assert j_star_cap(A, make_tuple(["B"])) == (Base("A"), Base("B"))
    assert base_sorts(j_star_sub(3, A)) == {"A"}


@pytest.mark.parametrize("bad", [lambda: make_tuple([]), lambda: Base("1x"), lambda: SetCode(0, ("A",)),
                                 lambda: j_star_sub(0, ("A",))])
def test_invalid_sorts_are_rejected(bad):
    with pytest.raises(SortError):
        bad()


def test_square_root_membership():
    assert in_sqrt(("A", "B"), ("A",))
    assert in_sqrt(("A",), ("A",))
    assert not in_sqrt(("A",), ("A", "B"))
