"""The functors between sorted finite groups and complete systems.

``system_of_group`` builds S(G) from cosets; ``limit_of_system`` computes
G(S) as the group of compatible families over all pieces [a]_{k,J}. The
canonical maps alpha and beta, dual morphisms and an exhaustive embedding
search sit on top of these two constructions.
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

from ..algebra.groups import (
    FiniteGroup,
    GroupMap,
    cosets,
    homomorphism_failures,
    make_group_map,
    normal_subgroups,
)
from ..algebra.sorted_group import SortedFiniteGroup, is_sorted_morphism, saturate_sorting
from ..algebra.sorts import Base, SortFamily, canonical_tuple, family_contains, format_tuple, support
from ..errors import CompleteSystemError, DualityError, GroupError, SortingError
from ..reports import AxiomReport, CheckEntry, check, unsupported
from .complete_system import (
    CompleteSystem,
    Resolution,
    Sort,
    class_group,
    make_system,
    pieces,
    projection,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CosetElement:
    id: str
    sort: Sort
    subgroup: frozenset
    coset: frozenset

    @property
    def rep(self) -> int:
        return min(self.coset)


def coset_elements(SG: SortedFiniteGroup, support: Iterable[Sort]) -> dict[str, CosetElement]:
    """Elements of S(G) over ``support``: cosets gH with [G:H] <= k and J in F(H)."""
    result: dict[str, CosetElement] = {}
    subgroups = SG.subgroups()
    for s in sorted(set(support), key=Sort.key):
        for n, N in enumerate(subgroups):
            if N.index > s.k or not family_contains(SG.family(N), s.J):
                continue
            for coset in cosets(SG.group, N.elements):
                element_id = f"{s.k}:{format_tuple(s.J)}|N{n}|{min(coset)}"
                result[element_id] = CosetElement(element_id, s, N.elements, coset)
    return result


def _coset_lookup(elements: dict[str, CosetElement]) -> dict[tuple, str]:
    return {(e.sort, e.subgroup, g): e.id for e in elements.values() for g in e.coset}


def coset_resolution(SG: SortedFiniteGroup) -> Resolution:
    """Sorts of S(G) coincide above k = |G|, and across J when the sorting is base-only."""
    base_only = all(
        all(isinstance(t, Base) for t in g)
        for _, F in SG.sorting for g in F.generators
    )
    return Resolution(tail=SG.group.order, collapse=base_only)


def system_of_group(SG: SortedFiniteGroup, support: Iterable[Sort]) -> CompleteSystem:
    support = sorted(set(support), key=Sort.key)
    if not support:
        raise DualityError("system_of_group needs a nonempty support")
    G = SG.group
    elements = coset_elements(SG, support)
    lookup = _coset_lookup(elements)
    items = list(elements.values())
    leq, c_rel, p_rel = [], [], []
    for x in items:
        for y in items:
            if x.subgroup <= y.subgroup:
                leq.append((x.id, y.id))
                if x.coset <= y.coset:
                    c_rel.append((x.id, y.id))
    for x in items:
        for y in items:
            if x.sort == y.sort and x.subgroup == y.subgroup:
                z = lookup[x.sort, x.subgroup, G.mul(x.rep, y.rep)]
                p_rel.append((x.id, y.id, z))
    resolution = coset_resolution(SG)
    log.info(f"S(G) for a group of order {G.order}: {len(items)} elements over {len(support)} sort(s)")
    return make_system(support, [(e.id, e.sort) for e in items], leq, c_rel, p_rel, resolution)


def faithful_support(SG: SortedFiniteGroup) -> list[Sort]:
    """Sorts (|G|, J) and (1, J) for every generator J of the family at {e}."""
    G = SG.group
    generators = SG.family(frozenset({0})).ordered()
    if not generators:
        log.warning("The trivial subgroup has an empty family; falling back to generators of all families")
        generators = sorted({g for _, F in SG.sorting for g in F.generators}, key=lambda g: str(canonical_tuple(g)))
    if not generators:
        raise DualityError("Sorting has no generators at all; no support can be derived")
    whole = SG.family(frozenset(G.elements))
    result = []
    for g in generators:
        J = canonical_tuple(g)
        result.append(Sort(G.order, J))
        if family_contains(whole, J):
            result.append(Sort(1, J))
    return sorted(set(result), key=Sort.key)


@dataclass(frozen=True)
class SystemLimit:
    system: CompleteSystem
    pieces: tuple  # tuples of element ids
    class_groups: tuple
    families: tuple  # member-index tuples, identity first then lexicographic
    group: FiniteGroup
    sorted_group: SortedFiniteGroup
    kernels: tuple  # per piece, the family indices projecting to the identity

    @cached_property
    def family_index(self) -> dict[tuple, int]:
        return {family: i for i, family in enumerate(self.families)}

    @cached_property
    def piece_index(self) -> dict[str, int]:
        return {x: i for i, members in enumerate(self.pieces) for x in members}

    def project(self, family: int, piece_number: int) -> str:
        return self.class_groups[piece_number].members[self.families[family][piece_number]]


def _compatible_families(S, piece_list, groups, projections) -> list[tuple]:
    count = len(piece_list)
    below = [[j for j in range(count) if (j, i) in projections] for i in range(count)]
    order = sorted(range(count), key=lambda i: (len(below[i]), i))
    assignment: list[int | None] = [None] * count
    families = []

    def candidates(i):
        forced = None
        for j in below[i]:
            if j != i and assignment[j] is not None:
                image = projections[j, i].map(assignment[j])
                if forced is None:
                    forced = image
                elif forced != image:
                    return []
        return [forced] if forced is not None else list(groups[i].group.elements)

    def consistent(i, value):
        for j in range(count):
            if assignment[j] is None or j == i:
                continue
            if (i, j) in projections and projections[i, j].map(value) != assignment[j]:
                return False
            if (j, i) in projections and projections[j, i].map(assignment[j]) != value:
                return False
        if (i, i) in projections and projections[i, i].map(value) != value:
            return False
        return True

    def extend(depth):
        if depth == count:
            families.append(tuple(assignment))
            return
        i = order[depth]
        for value in candidates(i):
            if consistent(i, value):
                assignment[i] = value
                extend(depth + 1)
                assignment[i] = None

    extend(0)
    return sorted(families)


def limit_of_system(S: CompleteSystem) -> SystemLimit:
    piece_list = pieces(S)
    try:
        groups = [class_group(S, members[0]) for members in piece_list]
        projections = {}
        for i, p in enumerate(piece_list):
            for j, q in enumerate(piece_list):
                if S.le(p[0], q[0]):
                    projections[i, j] = projection(S, p[0], q[0])
    except CompleteSystemError as e:
        raise DualityError(f"Projective system is not well formed: {e}") from e

    families = _compatible_families(S, piece_list, groups, projections)
    if not families:
        raise DualityError("The projective system has no compatible family")
    index = {family: n for n, family in enumerate(families)}
    table = []
    for x in families:
        row = []
        for y in families:
            product = tuple(G.group.mul(a, b) for G, a, b in zip(groups, x, y))
            if product not in index:
                raise DualityError("Compatible families are not closed under multiplication")
            row.append(index[product])
        table.append(row)
    group = FiniteGroup(table)
    kernels = tuple(
        frozenset(n for n, family in enumerate(families) if family[i] == 0) for i in range(len(piece_list))
    )

    generators: dict[frozenset, set] = {}
    for i, members in enumerate(piece_list):
        generators.setdefault(kernels[i], set()).add(support(S.home[members[0]].J))
    sorting = tuple(
        (N.elements, SortFamily(frozenset(generators.get(N.elements, ()))))
        for N in normal_subgroups(group)
    )
    try:
        sorted_group = saturate_sorting(SortedFiniteGroup(group, sorting))
    except SortingError as e:
        raise DualityError(f"Recovered sorting does not saturate: {e}") from e
    log.info(f"Limit computed: order {group.order} over {len(piece_list)} pieces")
    return SystemLimit(S, tuple(piece_list), tuple(groups), tuple(families), group, sorted_group, kernels)


def group_of_system(S: CompleteSystem) -> tuple[FiniteGroup, SortedFiniteGroup]:
    limit = limit_of_system(S)
    return limit.group, limit.sorted_group


@dataclass(frozen=True)
class SystemMap:
    source: CompleteSystem
    target: CompleteSystem
    images: tuple  # ((source id, target id), ...)

    @cached_property
    def table(self) -> dict[str, str]:
        return dict(self.images)

    def __call__(self, x: str) -> str:
        return self.table[x]


def make_system_map(source: CompleteSystem, target: CompleteSystem, images: dict[str, str]) -> SystemMap:
    missing = [x for x in source.element_ids if x not in images]
    if missing:
        raise DualityError(f"Map leaves {missing[0]} without an image")
    return SystemMap(source, target, tuple((x, images[x]) for x in source.element_ids))


def identity_system_map(S: CompleteSystem) -> SystemMap:
    return SystemMap(S, S, tuple((x, x) for x in S.element_ids))


def compose_system_maps(outer: SystemMap, inner: SystemMap) -> SystemMap:
    """``outer ∘ inner``."""
    return SystemMap(inner.source, outer.target, tuple((x, outer(inner(x))) for x in inner.source.element_ids))


def check_system_map(f: SystemMap, prefix: str = "map", require_surjective: bool = False) -> list[CheckEntry]:
    S, T = f.source, f.target
    ids = S.element_ids

    def sort_failures():
        for x in ids:
            if f(x) not in T.home or T.home[f(x)] != S.home[x]:
                yield (x, f(x))

    def injectivity_failures():
        seen: dict[str, str] = {}
        for x in ids:
            if f(x) in seen:
                yield (seen[f(x)], x)
            seen.setdefault(f(x), x)

    def binary_failures(source_rel, target_rel):
        for x in ids:
            for y in ids:
                if ((x, y) in source_rel) != ((f(x), f(y)) in target_rel):
                    yield (x, y)

    def product_failures():
        for s in S.sorts:
            members = S.elements_of(s)
            for x in members:
                for y in members:
                    for z in members:
                        if ((x, y, z) in S.p_rel) != ((f(x), f(y), f(z)) in T.p_rel):
                            yield (x, y, z)

    def surjectivity_failures():
        hit = {f(x) for x in ids}
        for y in T.element_ids:
            if y not in hit:
                yield (y,)

    entries = [
        check(f"{prefix}.sorts", sort_failures()),
        check(f"{prefix}.injective", injectivity_failures()),
        check(f"{prefix}.leq", binary_failures(S.leq, T.leq), "preserved and reflected"),
        check(f"{prefix}.c", binary_failures(S.c_rel, T.c_rel), "preserved and reflected"),
        check(f"{prefix}.p", product_failures(), "preserved and reflected"),
    ]
    if require_surjective:
        entries.append(check(f"{prefix}.surjective", surjectivity_failures()))
    return entries


def is_embedding(f: SystemMap) -> bool:
    return all(entry.status != "fail" for entry in check_system_map(f))


def dual_group_morphism(
    pi: GroupMap,
    SG1: SortedFiniteGroup,
    SG2: SortedFiniteGroup,
    support1: Iterable[Sort] | None = None,
    support2: Iterable[Sort] | None = None,
) -> SystemMap:
    """S(pi): S(SG2) -> S(SG1), gH -> g' pi^-1[H] with pi(g') = g."""
    try:
        sorted_ok = is_sorted_morphism(pi, SG1, SG2)
    except SortingError as e:
        raise DualityError(str(e)) from e
    if not sorted_ok:
        raise DualityError("Group map is not a morphism of sorted groups")
    support2 = list(support2) if support2 is not None else faithful_support(SG2)
    support1 = list(support1) if support1 is not None else support2
    target_elements = coset_elements(SG1, support1)
    lookup = _coset_lookup(target_elements)
    source = system_of_group(SG2, support2)
    target = system_of_group(SG1, support1)
    source_elements = coset_elements(SG2, support2)
    lift = {}
    for g1 in SG1.group.elements:
        lift.setdefault(pi(g1), g1)
    images = {}
    for x in source_elements.values():
        if x.sort not in target.by_sort:
            raise DualityError(f"Support of the target system lacks sort {x.sort}")
        key = (x.sort, pi.preimage(x.subgroup), lift[x.rep])
        if key not in lookup:
            raise DualityError(f"No element of {x.sort} holds the preimage coset of {x.id}")
        images[x.id] = lookup[key]
    return make_system_map(source, target, images)


def dual_system_embedding(f: SystemMap) -> GroupMap:
    """G(f): G(S') -> G(S) for an embedding f: S -> S'."""
    failures = [entry for entry in check_system_map(f, "embedding") if entry.status == "fail"]
    if failures:
        raise DualityError(f"Not an embedding: {failures[0].name} fails at {failures[0].witnesses[0]}")
    small, large = limit_of_system(f.source), limit_of_system(f.target)
    matching = []
    for i, members in enumerate(small.pieces):
        j = large.piece_index[f(members[0])]
        image = {f(x) for x in members}
        if image != set(large.pieces[j]):
            raise DualityError(f"Embedding is not onto the class of {f(members[0])}")
        matching.append(j)
    images = []
    for family in large.families:
        restricted = []
        for i, j in enumerate(matching):
            target_member = large.class_groups[j].members[family[j]]
            source_member = next(x for x in small.pieces[i] if f(x) == target_member)
            restricted.append(small.class_groups[i].index[source_member])
        restricted = tuple(restricted)
        if restricted not in small.family_index:
            raise DualityError("Restricted family is not compatible")
        images.append(small.family_index[restricted])
    try:
        result = make_group_map(large.group, small.group, images)
    except GroupError as e:
        raise DualityError(f"Restriction is not a homomorphism: {e}") from e
    if not result.is_epimorphism:
        raise DualityError("Restriction of families is not onto")
    return result


def _alpha_images(SG: SortedFiniteGroup, elements: dict[str, CosetElement], limit: SystemLimit) -> list[int]:
    lookup = _coset_lookup(elements)
    images = []
    for g in SG.group.elements:
        family = []
        for members, G in zip(limit.pieces, limit.class_groups):
            meta = elements[members[0]]
            family.append(G.index[lookup[meta.sort, meta.subgroup, g]])
        family = tuple(family)
        if family not in limit.family_index:
            raise DualityError(f"alpha({g}) is not a compatible family")
        images.append(limit.family_index[family])
    return images


def alpha(SG: SortedFiniteGroup, support: Iterable[Sort] | None = None) -> GroupMap:
    support = list(support) if support is not None else faithful_support(SG)
    S = system_of_group(SG, support)
    limit = limit_of_system(S)
    result = GroupMap(SG.group, limit.group, tuple(_alpha_images(SG, coset_elements(SG, support), limit)))
    if len(result.kernel()) > 1:
        log.warning(f"Support is not faithful: alpha has kernel {sorted(result.kernel())}")
    return result


def _beta_from_limit(S: CompleteSystem, limit: SystemLimit) -> SystemMap:
    target_elements = coset_elements(limit.sorted_group, S.sorts)
    target = system_of_group(limit.sorted_group, S.sorts)
    lookup = _coset_lookup(target_elements)
    images = {}
    for a in S.element_ids:
        i = limit.piece_index[a]
        g = next(n for n in range(len(limit.families)) if limit.project(n, i) == a)
        key = (S.home[a], limit.kernels[i], g)
        if key not in lookup:
            raise DualityError(f"beta({a}) has no coset in {S.home[a]} of the dual system")
        images[a] = lookup[key]
    return make_system_map(S, target, images)


def beta(S: CompleteSystem) -> SystemMap:
    return _beta_from_limit(S, limit_of_system(S))


def _first_failure(name: str, entries: list[CheckEntry]) -> CheckEntry:
    failing = next((e for e in entries if e.status == "fail"), None)
    if failing is None:
        return check(name, ())
    return CheckEntry(name, "fail", failing.witnesses, f"{failing.name} fails", failing.failures)


def check_alpha_beta(
    SG: SortedFiniteGroup,
    support: Iterable[Sort] | None = None,
    system: CompleteSystem | None = None,
) -> AxiomReport:
    """alpha iso, beta iso, and S(alpha) ∘ beta = id.

    ``system`` replaces S(SG) for beta, so an edited copy can be checked against alpha.
    """
    support = sorted(set(support), key=Sort.key) if support is not None else faithful_support(SG)
    S = system if system is not None else system_of_group(SG, support)
    elements = coset_elements(SG, support)
    entries = []
    quantities = {"order": SG.group.order, "support": [str(s) for s in support]}

    try:
        limit = limit_of_system(system_of_group(SG, support))
        images = _alpha_images(SG, elements, limit)
        alpha_map = GroupMap(SG.group, limit.group, tuple(images))
        failures = [(f"kernel:{g}",) for g in sorted(alpha_map.kernel()) if g != 0]
        failures += [(f"not hit:{h}",) for h in limit.group.elements if h not in set(images)]
        failures += [(f"product:{a},{b}",) for a, b in homomorphism_failures(SG.group, limit.group, images)]
        entries.append(check("alpha-isomorphism", failures))
        entries.append(check("alpha.faithful", ((g,) for g in sorted(alpha_map.kernel()) if g != 0),
                             "alpha is injective only when the cosets of {e} are in the support"))
        quantities["limit_order"] = limit.group.order
        quantities["alpha_kernel"] = sorted(alpha_map.kernel())
    except DualityError as e:
        entries.append(check("alpha-isomorphism", [(str(e),)]))
        entries.append(unsupported("alpha.faithful", "alpha unavailable"))
        alpha_map, limit = None, None

    beta_map = None
    try:
        beta_map = _beta_from_limit(S, limit if system is None and limit is not None else limit_of_system(S))
        entries.append(_first_failure("beta-isomorphism", check_system_map(beta_map, "beta", require_surjective=True)))
    except DualityError as e:
        entries.append(check("beta-isomorphism", [(str(e),)]))

    if alpha_map is None or beta_map is None:
        entries.append(check("s-alpha-beta-identity", [("alpha or beta unavailable",)]))
    else:
        try:
            s_alpha = dual_group_morphism(alpha_map, SG, limit.sorted_group, support, support)
            if s_alpha.source.element_ids != beta_map.target.element_ids:
                raise DualityError("beta and S(alpha) disagree on the dual system")
            composite = compose_system_maps(s_alpha, beta_map)
            entries.append(check("s-alpha-beta-identity", ((x, composite(x)) for x in S.element_ids if composite(x) != x)))
        except DualityError as e:
            entries.append(check("s-alpha-beta-identity", [(str(e),)]))

    return AxiomReport("alpha-beta", tuple(entries), quantities)


def find_embedding(S: CompleteSystem, T: CompleteSystem) -> SystemMap | None:
    """Exhaustive search for a sort-preserving embedding S -> T."""
    for s in S.sorts:
        if len(S.elements_of(s)) > len(T.elements_of(s)):
            log.debug(f"No embedding: {s} has {len(S.elements_of(s))} elements against {len(T.elements_of(s))}")
            return None
    ids = S.element_ids
    assignment: dict[str, str] = {}
    used: set[str] = set()

    def fits(x: str, fx: str) -> bool:
        for y, fy in assignment.items():
            if S.le(x, y) != T.le(fx, fy) or S.le(y, x) != T.le(fy, fx):
                return False
            if (y in S.c_out[x]) != (fy in T.c_out[fx]) or (x in S.c_out[y]) != (fx in T.c_out[fy]):
                return False
        if S.le(x, x) != T.le(fx, fx) or (x in S.c_out[x]) != (fx in T.c_out[fx]):
            return False
        same_sort = [(y, fy) for y, fy in assignment.items() if S.home[y] == S.home[x]] + [(x, fx)]
        for u, fu in same_sort:
            for v, fv in same_sort:
                for w, fw in same_sort:
                    if x not in (u, v, w):
                        continue
                    if ((u, v, w) in S.p_rel) != ((fu, fv, fw) in T.p_rel):
                        return False
        return True

    def extend(depth: int) -> bool:
        if depth == len(ids):
            return True
        x = ids[depth]
        for fx in T.elements_of(S.home[x]):
            if fx not in used and fits(x, fx):
                assignment[x] = fx
                used.add(fx)
                if extend(depth + 1):
                    return True
                del assignment[x]
                used.discard(fx)
        return False

    if any(s not in T.by_sort for s in S.sorts):
        return None
    if extend(0):
        return make_system_map(S, T, assignment)
    return None


if __name__ == "__main__":
    from ..corpus import standard_sorted_group

    logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - [%(name)s] - %(message)s')
    log.info("--- Running duality.py test ---")
    for name in ("Z2", "Z4", "V4", "S3"):
        report = check_alpha_beta(standard_sorted_group(name))
        print(f"{name}: {'PASS' if report.passed else 'FAIL'} {report.quantities}")
