"""Finite sorted complete systems.

A system is a finite multi-sorted structure over sorts m(k, J) carrying the
order ``leq``, the projection relation ``c_rel`` and the group relation
``p_rel``. Elements are string ids; each lives in exactly one sort.
"""
import logging
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from ..algebra.groups import FiniteGroup, GroupMap, make_group_map, validate_group
from ..algebra.sorts import base_sorts, format_tuple, j_star_cap, j_star_sub, make_tuple, support, tuple_key
from ..errors import CompleteSystemError, GroupError, SortError, UnsupportedTargetError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Sort:
    k: int
    J: tuple

    def __post_init__(self):
        if not isinstance(self.k, int) or isinstance(self.k, bool) or self.k < 1:
            raise CompleteSystemError(f"Sort degree must be a positive integer, got {self.k!r}")
        try:
            object.__setattr__(self, "J", make_tuple(self.J))
        except SortError as e:
            raise CompleteSystemError(f"Invalid sort tuple: {e}") from e

    def key(self) -> tuple:
        return (self.k, tuple_key(self.J))

    def __str__(self) -> str:
        return f"m({self.k};{format_tuple(self.J)})"


@dataclass(frozen=True)
class Resolution:
    """How demands for undeclared sorts are mapped onto declared ones.

    ``tail``: all degrees k >= tail denote the same sort.
    ``collapse``: J only matters through the base sorts of its code closure.
    """
    tail: int | None = None
    collapse: bool = False

    def key(self, k: int, J: tuple) -> tuple:
        degree = min(k, self.tail) if self.tail else k
        if self.collapse:
            return (degree, tuple(sorted(base_sorts(J))))
        return (degree, tuple_key(J))


def _natural_key(element_id: str) -> tuple:
    return tuple(int(part) if part.isdigit() else part for part in re.split(r"(\d+)", element_id))


@dataclass(frozen=True)
class CompleteSystem:
    sorts: tuple  # declared Sorts in canonical order
    homes: tuple  # ((element id, Sort), ...) in canonical element order
    leq: frozenset
    c_rel: frozenset
    p_rel: frozenset
    resolution: Resolution = field(default_factory=Resolution)

    @cached_property
    def home(self) -> dict[str, Sort]:
        return dict(self.homes)

    @cached_property
    def element_ids(self) -> tuple[str, ...]:
        return tuple(element_id for element_id, _ in self.homes)

    @cached_property
    def position(self) -> dict[str, int]:
        return {element_id: i for i, element_id in enumerate(self.element_ids)}

    @cached_property
    def by_sort(self) -> dict[Sort, tuple[str, ...]]:
        grouped: dict[Sort, list[str]] = {s: [] for s in self.sorts}
        for element_id, s in self.homes:
            grouped[s].append(element_id)
        return {s: tuple(ids) for s, ids in grouped.items()}

    @cached_property
    def _resolution_index(self) -> dict[tuple, Sort]:
        index: dict[tuple, Sort] = {}
        for s in self.sorts:
            index.setdefault(self.resolution.key(s.k, s.J), s)
        return index

    @cached_property
    def up(self) -> dict[str, frozenset]:
        above: dict[str, set] = {x: set() for x in self.element_ids}
        for x, y in self.leq:
            above[x].add(y)
        return {x: frozenset(ys) for x, ys in above.items()}

    @cached_property
    def c_out(self) -> dict[str, frozenset]:
        targets: dict[str, set] = {x: set() for x in self.element_ids}
        for x, y in self.c_rel:
            targets[x].add(y)
        return {x: frozenset(ys) for x, ys in targets.items()}

    @cached_property
    def products(self) -> dict[tuple[str, str], list[str]]:
        table: dict[tuple[str, str], list[str]] = {}
        for x, y, z in self.p_rel:
            table.setdefault((x, y), []).append(z)
        return table

    @cached_property
    def tilde(self) -> "TildeClasses":
        return tilde_classes(self)

    @cached_property
    def _memo(self) -> dict:
        return {}

    def le(self, x: str, y: str) -> bool:
        return y in self.up[x]

    def sim(self, x: str, y: str) -> bool:
        return self.le(x, y) and self.le(y, x)

    def elements_of(self, s: Sort) -> tuple[str, ...]:
        return self.by_sort.get(s, ())

    def __len__(self) -> int:
        return len(self.homes)


def make_system(
    sorts: Iterable[Sort],
    elements: Iterable[tuple[str, Sort]],
    leq: Iterable[tuple[str, str]] = (),
    c_rel: Iterable[tuple[str, str]] = (),
    p_rel: Iterable[tuple[str, str, str]] = (),
    resolution: Resolution | None = None,
) -> CompleteSystem:
    sorts = sorted(set(sorts), key=Sort.key)
    declared = set(sorts)
    home: dict[str, Sort] = {}
    for element_id, s in elements:
        if not isinstance(element_id, str) or not element_id:
            raise CompleteSystemError(f"Element ids must be nonempty strings, got {element_id!r}")
        if element_id in home:
            raise CompleteSystemError(f"Duplicate element id '{element_id}'")
        if s not in declared:
            raise CompleteSystemError(f"Element '{element_id}' lives in undeclared sort {s}")
        home[element_id] = s

    def known(*ids):
        for element_id in ids:
            if element_id not in home:
                raise CompleteSystemError(f"Relation refers to unknown element '{element_id}'")
        return tuple(ids)

    leq = frozenset(known(x, y) for x, y in leq)
    c_rel = frozenset(known(x, y) for x, y in c_rel)
    p_triples = frozenset(known(x, y, z) for x, y, z in p_rel)
    for x, y, z in p_triples:
        if not home[x] == home[y] == home[z]:
            raise CompleteSystemError(f"P triple ({x}, {y}, {z}) mixes sorts")

    ordered = sorted(home.items(), key=lambda item: (item[1].key(), _natural_key(item[0])))
    if resolution is not None and resolution.tail is not None and resolution.tail < 1:
        raise CompleteSystemError("Resolution tail must be positive")
    return CompleteSystem(tuple(sorts), tuple(ordered), leq, c_rel, p_triples, resolution or Resolution())


def sort_label(s: Sort) -> str:
    return str(s)


def resolve_sort(S: CompleteSystem, k: int, J: tuple) -> Sort | None:
    """The declared sort standing for m(k, J), or None when S does not carry it."""
    exact = Sort(k, J)
    if exact in S.by_sort:
        return exact
    return S._resolution_index.get(S.resolution.key(k, exact.J))


def meet_sort(S: CompleteSystem, s1: Sort, s2: Sort) -> Sort | None:
    return resolve_sort(S, s1.k * s2.k, j_star_cap(s1.J, s2.J))


def join_sort(S: CompleteSystem, s1: Sort, s2: Sort) -> Sort | None:
    return resolve_sort(S, s1.k * s2.k, j_star_sub(s1.k, s1.J))


@dataclass(frozen=True)
class TildeClasses:
    classes: tuple  # frozensets of ids ordered by their first element
    is_equivalence: bool
    witness: tuple = ()

    @cached_property
    def index(self) -> dict[str, int]:
        return {x: i for i, members in enumerate(self.classes) for x in members}

    def __len__(self) -> int:
        return len(self.classes)


def tilde_classes(S: CompleteSystem) -> TildeClasses:
    parent = {x: x for x in S.element_ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for x, y in S.leq:
        if x != y and S.le(y, x):
            rx, ry = find(x), find(y)
            if rx != ry:
                if S.position[rx] < S.position[ry]:
                    rx, ry = ry, rx
                parent[rx] = ry

    grouped: dict[str, list[str]] = {}
    for x in S.element_ids:
        grouped.setdefault(find(x), []).append(x)
    classes = sorted((tuple(members) for members in grouped.values()), key=lambda c: S.position[c[0]])

    witness: tuple = ()
    for x in S.element_ids:
        if not S.le(x, x):
            witness = (x,)
            break
    if not witness:
        for members in classes:
            bad = next(((x, y) for x in members for y in members if not S.sim(x, y)), None)
            if bad:
                witness = bad
                break
    if witness:
        log.warning(f"Mutual order is not an equivalence; witness {witness}")
    return TildeClasses(tuple(frozenset(c) for c in classes), not witness, witness)


def class_of(S: CompleteSystem, a: str) -> frozenset:
    tilde = S.tilde
    return tilde.classes[tilde.index[a]]


def piece(S: CompleteSystem, a: str) -> tuple[str, ...]:
    """[a]_{k,J}: the ∼-class of a inside a's own sort, canonically ordered."""
    members = class_of(S, a)
    return tuple(x for x in S.elements_of(S.home[a]) if x in members)


def pieces(S: CompleteSystem) -> list[tuple[str, ...]]:
    seen: set[str] = set()
    result = []
    for x in S.element_ids:
        if x not in seen:
            p = piece(S, x)
            seen.update(p)
            result.append(p)
    return result


@dataclass(frozen=True)
class ClassGroup:
    """The group carried by a piece; ``members[i]`` is group element i."""
    members: tuple
    group: FiniteGroup

    @cached_property
    def index(self) -> dict[str, int]:
        return {x: i for i, x in enumerate(self.members)}

    @property
    def identity(self) -> str:
        return self.members[0]

    def mul(self, x: str, y: str) -> str:
        return self.members[self.group.mul(self.index[x], self.index[y])]

    def inv(self, x: str) -> str:
        return self.members[self.group.inv(self.index[x])]


def class_group(S: CompleteSystem, a: str) -> ClassGroup:
    members = piece(S, a)
    memo_key = ("group", members[0])
    if memo_key in S._memo:
        return S._memo[memo_key]
    inside = set(members)
    product: dict[tuple[str, str], str] = {}
    for x in members:
        for y in members:
            zs = [z for z in S.products.get((x, y), ()) if z in inside]
            if len(zs) != 1:
                raise CompleteSystemError(
                    f"P does not define a product of {x} and {y} on the class of {a} ({len(zs)} results)")
            product[x, y] = zs[0]
    identity = next((e for e in members if all(product[e, x] == x == product[x, e] for x in members)), None)
    if identity is None:
        raise CompleteSystemError(f"P has no identity on the class of {a}")
    ordered = (identity,) + tuple(x for x in members if x != identity)
    position = {x: i for i, x in enumerate(ordered)}
    group = FiniteGroup([[position[product[x, y]] for y in ordered] for x in ordered])
    failures = validate_group(group).failures()
    if failures:
        raise CompleteSystemError(f"P is not a group on the class of {a}: {failures[0].name} fails")
    result = ClassGroup(ordered, group)
    S._memo[memo_key] = result
    return result


@dataclass(frozen=True)
class Projection:
    source: ClassGroup
    target: ClassGroup
    map: GroupMap

    def __call__(self, x: str) -> str:
        return self.target.members[self.map(self.source.index[x])]

    def kernel(self) -> frozenset[str]:
        return frozenset(self.source.members[g] for g in self.map.kernel())


def projection(S: CompleteSystem, a: str, b: str) -> Projection:
    if not S.le(a, b):
        raise CompleteSystemError(f"Projection needs {a} <= {b}")
    source, target = class_group(S, a), class_group(S, b)
    memo_key = ("projection", source.members[0], target.members[0])
    if memo_key in S._memo:
        return S._memo[memo_key]
    inside = set(target.members)
    images = []
    for x in source.members:
        ys = [y for y in S.c_out[x] if y in inside]
        if len(ys) != 1:
            raise CompleteSystemError(f"C does not send {x} to exactly one element of the class of {b}")
        images.append(target.index[ys[0]])
    try:
        group_map = make_group_map(source.group, target.group, images)
    except GroupError as e:
        raise CompleteSystemError(f"C between {a} and {b}: {e}") from e
    if not group_map.is_epimorphism:
        raise CompleteSystemError(f"C between {a} and {b} is not onto")
    result = Projection(source, target, group_map)
    S._memo[memo_key] = result
    return result


def _phi_inf(S: CompleteSystem, a: str, b: str, candidates: tuple[str, ...], x: str) -> bool:
    if not (S.le(x, a) and S.le(x, b)):
        return False
    return all(S.le(y, x) for y in candidates if S.le(y, a) and S.le(y, b))


def _phi_sup(S: CompleteSystem, a: str, b: str, candidates: tuple[str, ...], x: str) -> bool:
    if not (S.le(a, x) and S.le(b, x)):
        return False
    return all(S.le(x, y) for y in candidates if S.le(a, y) and S.le(b, y))


def inf_realizer(S: CompleteSystem, a: str, b: str) -> str | None:
    target = meet_sort(S, S.home[a], S.home[b])
    if target is None:
        raise UnsupportedTargetError(f"Meet of {a} and {b} needs an undeclared sort")
    candidates = S.elements_of(target)
    return next((x for x in candidates if _phi_inf(S, a, b, candidates, x)), None)


def sup_realizer(S: CompleteSystem, a: str, b: str) -> str | None:
    target = join_sort(S, S.home[a], S.home[b])
    if target is None:
        raise UnsupportedTargetError(f"Join of {a} and {b} needs an undeclared sort")
    candidates = S.elements_of(target)
    return next((x for x in candidates if _phi_sup(S, a, b, candidates, x)), None)


def class_meet(S: CompleteSystem, a: str, b: str) -> frozenset:
    x = inf_realizer(S, a, b)
    if x is None:
        raise CompleteSystemError(f"No element realizes the meet of {a} and {b}")
    return class_of(S, x)


def class_join(S: CompleteSystem, a: str, b: str) -> frozenset:
    x = sup_realizer(S, a, b)
    if x is None:
        raise CompleteSystemError(f"No element realizes the join of {a} and {b}")
    return class_of(S, x)


def saturate(S: CompleteSystem, targets: Iterable[tuple[int, tuple]]) -> CompleteSystem:
    """Adds requested sorts, filling each with ∼-copies of the classes it must hold.

    A class is copied into m(k, J) when it has a piece of size at most k in a
    sort m(k0, J0) with ||J0|| contained in ||J||.
    """
    new_sorts = [s for s in (Sort(k, J) for k, J in targets) if s not in S.by_sort]
    if not new_sorts:
        return S
    origin = {x: x for x in S.element_ids}
    homes = list(S.homes)
    for target in sorted(set(new_sorts), key=Sort.key):
        copied: set[int] = set()
        for s in S.sorts:
            if not support(s.J) <= support(target.J):
                continue
            for x in S.elements_of(s):
                class_index = S.tilde.index[x]
                if class_index in copied:
                    continue
                members = piece(S, x)
                if len(members) > target.k:
                    if s.k <= target.k:
                        raise CompleteSystemError(
                            f"Class of {x} has {len(members)} elements in {s}, more than its degree allows")
                    continue
                copied.add(class_index)
                for y in members:
                    copy_id = f"{y}~{target.k}:{format_tuple(target.J)}"
                    origin[copy_id] = y
                    homes.append((copy_id, target))
    ids = list(origin)
    leq = [(u, v) for u in ids for v in ids if S.le(origin[u], origin[v])]
    c_rel = [(u, v) for u in ids for v in ids if origin[v] in S.c_out[origin[u]]]
    p_rel = list(S.p_rel)
    by_home: dict[Sort, list[str]] = {}
    for copy_id, s in homes:
        if copy_id not in S.home:
            by_home.setdefault(s, []).append(copy_id)
    for members in by_home.values():
        for u in members:
            for v in members:
                for w in members:
                    if origin[w] in S.products.get((origin[u], origin[v]), ()):
                        p_rel.append((u, v, w))
    log.info(f"Saturation added {len(ids) - len(S)} element(s) in {len(new_sorts)} sort(s)")
    return make_system(list(S.sorts) + new_sorts, homes, leq, c_rel, p_rel, S.resolution)
