"""The complete system of a Galois-action model, read off through pairs.

A pair (a, b) of co-orbital k-primitive tuples stands for the automorphism
taking a to b. Pairs naming the same automorphism of the same extension are
identified by ``approx``; the classes, lifted into sorts m(k, J) through the
tuple sorts J^i for i <= k, carry the relations of S(G) for the derived
sorting of the model.
"""
import logging
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from ..algebra.sorts import SortTuple, format_tuple, make_tuple
from ..errors import DualityError, GaloisDualityError, ModelError
from ..reports import AxiomReport, CheckEntry, check, satisfied, unsupported
from ..systems.complete_system import CompleteSystem, Sort, make_system
from ..systems.duality import (
    check_system_map,
    coset_elements,
    coset_resolution,
    faithful_support,
    make_system_map,
    system_of_group,
)
from .action_model import (
    GaloisActionModel,
    Point,
    act_tuple,
    dcl,
    derived_sorted_group,
    enumeration_limit,
    is_n_primitive,
    lemma_tuple_length,
    orbit,
    primitive_representative,
    require_valid,
    sort_size,
    tuple_length_bound,
    tuples_of_sort,
    validate_model,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class InterpretedPair:
    k: int
    J: SortTuple
    a: tuple[Point, ...]
    b: tuple[Point, ...]


def power(J: SortTuple, i: int) -> SortTuple:
    """J concatenated with itself ``i`` times."""
    return make_tuple(J) * i


def u_pairs(model: GaloisActionModel, k: int, J: SortTuple) -> list[InterpretedPair]:
    J = make_tuple(J)
    size = sort_size(model, J)
    if size > enumeration_limit():
        raise ModelError(
            f"Sort {format_tuple(J)} has {size} tuples, above the enumeration limit (GDL_ENUMERATION_LIMIT)"
        )
    pairs = []
    for a in tuples_of_sort(model, J):
        if is_n_primitive(model, a, k):
            pairs.extend(InterpretedPair(k, J, a, b) for b in orbit(model, a))
    return pairs


def approx(model: GaloisActionModel, p1: InterpretedPair, p2: InterpretedPair) -> bool:
    if p1.k != p2.k or p1.J != p2.J:
        return False
    a = p1.a + p2.a
    return is_n_primitive(model, a, p1.k) and p1.b + p2.b in orbit(model, a)


def rel_leq(model: GaloisActionModel, p1: InterpretedPair, p2: InterpretedPair) -> bool:
    return p1.k >= p2.k and set(p2.a) <= dcl(model, p1.a)


def rel_C(model: GaloisActionModel, p1: InterpretedPair, p2: InterpretedPair) -> bool:
    if p1.k < p2.k:
        return False
    a = p1.a + p2.a
    return is_n_primitive(model, a, p1.k) and p1.b + p2.b in orbit(model, a)


def rel_P(model: GaloisActionModel, p1: InterpretedPair, p2: InterpretedPair, p3: InterpretedPair) -> bool:
    if not p1.k == p2.k == p3.k or not p1.J == p2.J == p3.J:
        return False
    closure = dcl(model, p1.a)
    if not set(p2.a) <= closure or not set(p3.a) <= closure:
        return False
    k, J = p1.k, p1.J
    for c in orbit(model, p2.a):
        if approx(model, p1, InterpretedPair(k, J, p2.b, c)) and approx(model, p3, InterpretedPair(k, J, p2.a, c)):
            return True
    return False


@dataclass(frozen=True)
class InterpretedSystem:
    system: CompleteSystem
    pairs: dict  # element id -> InterpretedPair at its own level
    representatives: dict  # (Sort, subgroup elements) -> the tuple standing for that subgroup


def _w_elements(model: GaloisActionModel, support: Sequence[Sort]):
    """For every declared sort, one pair (a_N, g a_N) per normal N of index i <= k
    with a primitive representative of sort J^i, and per coset gN."""
    G = model.gamma
    pairs: dict[str, InterpretedPair] = {}
    representatives: dict[tuple, tuple[Point, ...]] = {}
    for s in support:
        for n, N in enumerate(model._normal):
            if N.index > s.k:
                continue
            a = primitive_representative(model, power(s.J, N.index), N)
            if a is None:
                continue
            representatives[s, N.elements] = a
            images = sorted({act_tuple(model, g, a) for g in G.elements})
            for j, b in enumerate(images):
                pairs[f"{s.k}:{format_tuple(s.J)}|W{n}.{j}"] = InterpretedPair(N.index, power(s.J, N.index), a, b)
    return pairs, representatives


def interpret_system(model: GaloisActionModel, support: Iterable[Sort]) -> InterpretedSystem:
    require_valid(model)
    support = sorted(set(support), key=Sort.key)
    if not support:
        raise ModelError("interpret_system needs a nonempty support")
    pairs, representatives = _w_elements(model, support)
    home = {}
    for s in support:
        prefix = f"{s.k}:{format_tuple(s.J)}|"
        home.update({x: s for x in pairs if x.startswith(prefix)})
    ids = list(pairs)
    leq = [(x, y) for x in ids for y in ids if rel_leq(model, pairs[x], pairs[y])]
    c_rel = [(x, y) for x in ids for y in ids if rel_C(model, pairs[x], pairs[y])]
    p_rel = []
    for s in support:
        members = [x for x in ids if home[x] == s]
        for x, y, z in product(members, repeat=3):
            if rel_P(model, pairs[x], pairs[y], pairs[z]):
                p_rel.append((x, y, z))
    resolution = coset_resolution(derived_sorted_group(model))
    log.info(f"Interpreted system: {len(ids)} elements over {len(support)} sort(s)")
    system = make_system(support, [(x, home[x]) for x in ids], leq, c_rel, p_rel, resolution)
    return InterpretedSystem(system, pairs, representatives)


def _bijection_images(model: GaloisActionModel, SG, support, interpreted: InterpretedSystem) -> dict[str, str]:
    """F: gH -> class of (a_H, g a_H)."""
    lookup = {(p.a, p.b): x for x, p in interpreted.pairs.items()}
    images = {}
    for element in coset_elements(SG, support).values():
        a = interpreted.representatives.get((element.sort, element.subgroup))
        if a is None:
            raise DualityError(f"No primitive tuple of sort {element.sort} for subgroup {sorted(element.subgroup)}")
        images[element.id] = lookup[a, act_tuple(model, element.rep, a)]
    return images


def _literal_count_failures(model: GaloisActionModel, interpreted: InterpretedSystem, skipped: list):
    """Counts of U/approx classes per level against the constructed W elements."""
    for s in interpreted.system.sorts:
        for i in range(1, s.k + 1):
            J = power(s.J, i)
            if len(J) > tuple_length_bound() or sort_size(model, J) > enumeration_limit():
                skipped.append((str(s), i))
                continue
            classes = approx_classes(model, u_pairs(model, i, J))
            built = sum(1 for x, p in interpreted.pairs.items() if interpreted.system.home[x] == s and p.k == i)
            if len(classes) != built:
                yield (str(s), i, len(classes), built)


def approx_classes(model: GaloisActionModel, pairs: Sequence[InterpretedPair]) -> list[list[InterpretedPair]]:
    classes: list[list[InterpretedPair]] = []
    for p in pairs:
        for members in classes:
            if approx(model, members[0], p):
                members.append(p)
                break
        else:
            classes.append([p])
    return classes


def check_interpretation(model: GaloisActionModel, support: Iterable[Sort] | None = None) -> AxiomReport:
    model_report = validate_model(model)
    entries = [CheckEntry(f"model.{e.name}", e.status, e.witnesses, e.detail, e.failures) for e in model_report.entries]
    quantities = dict(model_report.quantities)
    if not model_report.passed:
        return AxiomReport("interpretation", tuple(entries), quantities)
    SG = derived_sorted_group(model)
    support = sorted(set(support), key=Sort.key) if support is not None else faithful_support(SG)
    try:
        interpreted = interpret_system(model, support)
        direct = system_of_group(SG, support)
        images = _bijection_images(model, SG, support, interpreted)
    except GaloisDualityError as e:
        entries.append(check("F.construction", [(str(e),)]))
        return AxiomReport("interpretation", tuple(entries), quantities)
    entries.append(satisfied("F.construction"))
    F = make_system_map(direct, interpreted.system, images)
    entries.extend(check_system_map(F, "F", require_surjective=True))
    skipped: list = []
    entries.append(check("w-classes", _literal_count_failures(model, interpreted, skipped),
                         "literal U/approx classes per level"))
    if skipped:
        log.debug(f"Literal class count skipped for {skipped}")
        entries.append(unsupported(
            "w-classes.skipped",
            f"{len(skipped)} level(s) above GDL_TUPLE_LENGTH or GDL_ENUMERATION_LIMIT were not counted",
        ))
        quantities["w_classes_skipped"] = [[s, i] for s, i in skipped]
    quantities.update({
        "support": [str(s) for s in support],
        "elements": len(interpreted.system),
        "normal_subgroups": len(SG.sorting),
    })
    return AxiomReport("interpretation", tuple(entries), quantities)


def _orbit_representatives(model: GaloisActionModel, length: int):
    seen: set = set()
    for a in product(model.points, repeat=length):
        if a in seen:
            continue
        members = orbit(model, a)
        seen.update(members)
        yield a, len(members)


def _lemma_failures(model: GaloisActionModel, max_length: int):
    for length in range(1, max_length + 1):
        for a, n in _orbit_representatives(model, length):
            if not is_n_primitive(model, a, n):
                continue
            closure = dcl(model, a)
            for b in model.points:
                if (b in closure) != is_n_primitive(model, a + (b,), n):
                    yield (a, b)


def dcl_iff_primitive(model: GaloisActionModel, max_length: int | None = None) -> AxiomReport:
    """For n-primitive a and every point b: b in dcl(a) iff (a, b) is n-primitive."""
    if max_length is None:
        max_length = lemma_tuple_length()
    entries = (check("dcl-iff-primitive", _lemma_failures(model, max_length), f"tuples up to length {max_length}"),)
    return AxiomReport("dcl-primitive", entries, {"max_length": max_length, "points": len(model.points)})


def _equivalence_failures(model, pairs, cls):
    for p, q in product(pairs, repeat=2):
        if approx(model, p, q) != (cls[p] == cls[q]):
            yield (p.a, p.b, q.a, q.b)


def _uniqueness_failures(model, pairs):
    for p, q in product(pairs, repeat=2):
        if p.a == q.a and p.b != q.b and approx(model, p, q):
            yield (p.a, p.b, q.b)


def _invariance_failures(model, classes, other_classes):
    """Replacing an argument by an approx-equivalent pair never changes a relation."""
    reps = [members[0] for members in classes]
    other_reps = [members[0] for members in other_classes]
    for relation in (rel_leq, rel_C):
        for members in classes:
            for q in other_reps:
                expected = relation(model, members[0], q), relation(model, q, members[0])
                for p in members[1:]:
                    if (relation(model, p, q), relation(model, q, p)) != expected:
                        yield (relation.__name__, p.a, p.b, q.a, q.b)
    for members in classes:
        for y, z in product(reps, repeat=2):
            for position in range(3):
                expected = rel_P(model, *_placed(members[0], position, y, z))
                for p in members[1:]:
                    if rel_P(model, *_placed(p, position, y, z)) != expected:
                        yield ("rel_P", position, p.a, p.b)


def _placed(p: InterpretedPair, position: int, y: InterpretedPair, z: InterpretedPair) -> list[InterpretedPair]:
    args = [y, z]
    args.insert(position, p)
    return args


def check_approx_laws(model: GaloisActionModel, k: int, J: SortTuple) -> AxiomReport:
    """Equivalence, uniqueness of second components and invariance of the
    relations under approx, exhaustively over U^k_J."""
    J = make_tuple(J)
    try:
        pairs = u_pairs(model, k, J)
    except ModelError as e:
        entry = unsupported("approx", str(e))
        return AxiomReport("approx-laws", (entry,), {"k": k, "J": format_tuple(J)})
    classes = approx_classes(model, pairs)
    cls = {p: i for i, members in enumerate(classes) for p in members}
    lower = [approx_classes(model, u_pairs(model, i, J)) for i in range(1, k)]
    entries = (
        check("approx.equivalence", _equivalence_failures(model, pairs, cls)),
        check("approx.uniqueness", _uniqueness_failures(model, pairs)),
        check("relations.invariance", _invariance_failures(model, classes, classes + [c for cs in lower for c in cs])),
    )
    return AxiomReport("approx-laws", entries, {"k": k, "J": format_tuple(J), "pairs": len(pairs),
                                                "classes": len(classes)})
