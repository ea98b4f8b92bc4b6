import pytest

from src.algebra.groups import cyclic_group
from src.algebra.sorts import Base
from src.corpus import regular_model, s3_coset_model, standard_sorted_group
from src.errors import ModelError
from src.interpretation.action_model import (
    OrbitBlock,
    coset_block,
    conj,
    dcl,
    derived_sorted_group,
    is_n_primitive,
    make_model,
    orbit,
    primitive_representative,
    stabilizer,
    validate_model,
)
from src.interpretation.interpret import (
    InterpretedPair,
    approx,
    check_approx_laws,
    check_interpretation,
    dcl_iff_primitive,
    interpret_system,
    rel_C,
    rel_leq,
    u_pairs,
)
from src.systems.complete_system import Sort

A = ("A",)
MOVING, MOVED, FIXED = (0, 0), (0, 1), (1, 0)


def test_definable_closure(z2_model):
    assert dcl(z2_model, [MOVING]) == {MOVING, MOVED, FIXED}
    assert dcl(z2_model, [FIXED]) == {FIXED}
    assert dcl(z2_model, []) == {FIXED}


def test_conjugates(z2_model):
    assert conj(z2_model, [(MOVING,), (MOVED,)])
    assert not conj(z2_model, [(MOVING,)])
    assert not conj(z2_model, [(MOVING,), (MOVING,)])
    assert not conj(z2_model, [])


def test_primitivity(z2_model):
    assert is_n_primitive(z2_model, (MOVING,), 2)
    assert is_n_primitive(z2_model, (FIXED,), 1)
    assert not is_n_primitive(z2_model, (MOVING,), 1)
    assert orbit(z2_model, (MOVING, FIXED)) == [(MOVING, FIXED), (MOVED, FIXED)]


def test_coset_points_are_not_primitive():
    model = s3_coset_model()
    coset_point = (len(model.orbits) - 1, 0)
    assert len(orbit(model, (coset_point,))) == 3
    assert not is_n_primitive(model, (coset_point,), 3)


def test_u_pairs_of_z2(z2_model):
    pairs = u_pairs(z2_model, 2, A)
    assert len(pairs) == 4
    same = InterpretedPair(2, A, (MOVING,), (MOVING,))
    swapped = InterpretedPair(2, A, (MOVED,), (MOVED,))
    assert approx(z2_model, same, swapped)
    assert not approx(z2_model, same, InterpretedPair(2, A, (MOVING,), (MOVED,)))


def test_order_and_projection_between_levels(z2_model):
    top = InterpretedPair(2, A, (MOVING,), (MOVED,))
    bottom = InterpretedPair(1, A, (FIXED,), (FIXED,))
    assert rel_leq(z2_model, top, bottom)
    assert not rel_leq(z2_model, bottom, top)
    assert rel_C(z2_model, top, bottom)


def test_approx_laws_on_z4(z4):
    report = check_approx_laws(regular_model(z4), 2, A)
    assert report.passed
    assert report.quantities["classes"] == 2


@pytest.mark.parametrize("name", ["Z2", "Z3", "Z4", "V4", "S3", "D4"])
def test_regular_models_interpret_their_coset_systems(name):
    report = check_interpretation(regular_model(standard_sorted_group(name)))
    assert report.passed, report.failures()


def test_s3_coset_model_interprets_its_coset_system():
    report = check_interpretation(s3_coset_model())
    assert report.passed, report.failures()


def test_interpreted_system_size_matches_cosets(z4):
    interpreted = interpret_system(regular_model(z4), [Sort(1, A), Sort(4, A)])
    assert len(interpreted.system) == 1 + (1 + 2 + 4)


def test_derived_sorting_of_a_regular_model(z4):
    derived = derived_sorted_group(regular_model(z4))
    assert derived.group == z4.group
    assert all(Base("A") in g for _, F in derived.sorting for g in F.generators)


def test_primitive_representative_has_the_right_stabilizer(z4):
    model = regular_model(z4)
    for N in model._normal:
        a = primitive_representative(model, A * N.index, N)
        assert a is not None
        assert is_n_primitive(model, a, N.index)


@pytest.mark.parametrize("max_length", [1, 2])
def test_dcl_iff_primitive(max_length):
    assert dcl_iff_primitive(s3_coset_model(), max_length).passed


def test_trivial_action_is_not_faithful():
    model = make_model(cyclic_group(2), [OrbitBlock(Base("A"), 2, ((0, 1), (0, 1)))])
    assert validate_model(model).status_of("galois-faithful") == "fail"
    report = check_interpretation(model)
    assert not report.passed
    assert report.status_of("model.galois-faithful") == "fail"
    with pytest.raises(ModelError):
        interpret_system(model, [Sort(1, A)])


def test_incompatible_action_is_reported():
    swap, stay = (1, 0), (0, 1)
    block = OrbitBlock(Base("A"), 2, (stay, swap, swap, stay))
    model = make_model(cyclic_group(4), [block, coset_block(cyclic_group(4), range(4))])
    assert validate_model(model).status_of("action.compatibility") == "fail"


def test_model_without_rational_point_is_reported():
    model = make_model(cyclic_group(2), [coset_block(cyclic_group(2), {0})])
    assert validate_model(model).status_of("rational-points") == "fail"


@pytest.mark.parametrize("build", [
    lambda: OrbitBlock(Base("A"), 0, ()),
    lambda: OrbitBlock(Base("A"), 2, ((0, 2),)),
    lambda: make_model(cyclic_group(2), []),
    lambda: make_model(cyclic_group(2), [OrbitBlock(Base("A"), 1, ((0,),))]),
])
def test_malformed_models_are_rejected(build):
    with pytest.raises(ModelError):
        build()


def test_levels_beyond_the_tuple_bound_are_reported_as_skipped():
    report = check_interpretation(regular_model(standard_sorted_group("D4")))
    assert report.passed, report.failures()
    entry = report.entry("w-classes.skipped")
    assert entry.status == "unsupported"
    skipped = report.quantities["w_classes_skipped"]
    assert [i for _, i in skipped] == [3, 4, 5, 6, 7, 8]
    assert skipped[0][0] == "m(8;A)"


def test_small_levels_are_all_counted(z2_model):
    report = check_interpretation(z2_model)
    assert report.passed, report.failures()
    assert "w-classes.skipped" not in [e.name for e in report.entries]
    assert "w_classes_skipped" not in report.quantities


def test_primitive_representative_searches_past_a_greedy_miss():
    gamma = cyclic_group(6)
    model = make_model(gamma, [
        coset_block(gamma, {0, 2, 4}, "A"),
        coset_block(gamma, {0, 3}, "A"),
        coset_block(gamma, {0, 3}, "B"),
    ])
    trivial = next(N for N in model._normal if N.elements == frozenset({0}))
    a = primitive_representative(model, ("A", "B"), trivial)
    assert a is not None
    assert stabilizer(model, a) == frozenset({0})
    assert model._point_stabilizers[a[0]] == frozenset({0, 2, 4})


def test_s3_coset_model_has_a_tuple_for_the_alternating_subgroup():
    model = s3_coset_model()
    alternating = next(N for N in model._normal if N.size == 3)
    for length in range(1, 4):
        a = primitive_representative(model, A * length, alternating)
        assert a is not None
        assert stabilizer(model, a) == alternating.elements
    for N in model._normal:
        a = primitive_representative(model, A * N.index, N)
        assert stabilizer(model, a) == N.elements
        assert is_n_primitive(model, a, N.index)
