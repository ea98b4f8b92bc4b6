"""Finite groups given by Cayley tables.

Elements are indices ``0..n-1`` with the identity at index 0. Subgroups are
frozensets of indices.
"""
import logging
import os
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Callable, Hashable, Iterable, Sequence

from ..errors import GroupError
from ..reports import AxiomReport, check

log = logging.getLogger(__name__)

DEFAULT_MAX_GROUP_ORDER = 64


def max_group_order() -> int:
    return int(os.getenv("GDL_MAX_GROUP_ORDER", str(DEFAULT_MAX_GROUP_ORDER)))


@dataclass(frozen=True)
class FiniteGroup:
    cayley: tuple

    def __post_init__(self):
        try:
            table = tuple(tuple(int(x) for x in row) for row in self.cayley)
        except (TypeError, ValueError) as e:
            raise GroupError(f"Cayley table must hold integers: {e}") from e
        n = len(table)
        if n == 0:
            raise GroupError("A group needs at least one element")
        for i, row in enumerate(table):
            if len(row) != n:
                raise GroupError(f"Cayley row {i} has {len(row)} entries, expected {n}")
            for x in row:
                if not 0 <= x < n:
                    raise GroupError(f"Cayley row {i} refers to element {x} outside 0..{n - 1}")
        object.__setattr__(self, "cayley", table)

    @property
    def order(self) -> int:
        return len(self.cayley)

    @property
    def elements(self) -> range:
        return range(self.order)

    def mul(self, a: int, b: int) -> int:
        return self.cayley[a][b]

    @cached_property
    def _inverses(self) -> tuple[int, ...]:
        inverses = []
        for a in self.elements:
            row = self.cayley[a]
            try:
                inverses.append(row.index(0))
            except ValueError:
                raise GroupError(f"Element {a} has no inverse") from None
        return tuple(inverses)

    def inv(self, a: int) -> int:
        return self._inverses[a]

    def conjugate(self, a: int, g: int) -> int:
        return self.mul(self.mul(g, a), self.inv(g))

    def element_order(self, a: int) -> int:
        x, n = a, 1
        while x != 0:
            x = self.mul(x, a)
            n += 1
        return n

    def generate(self, generators: Iterable[int]) -> frozenset[int]:
        """Subgroup generated by ``generators``."""
        generators = set(generators)
        found = {0}
        frontier = [0]
        while frontier:
            x = frontier.pop()
            for s in generators:
                y = self.mul(x, s)
                if y not in found:
                    found.add(y)
                    frontier.append(y)
        return frozenset(found)

    def normal_closure(self, elements: Iterable[int]) -> frozenset[int]:
        conjugates = {self.conjugate(a, g) for a in elements for g in self.elements}
        return self.generate(conjugates)

    def is_subgroup(self, elements: frozenset[int]) -> bool:
        if 0 not in elements:
            return False
        return all(self.mul(a, self.inv(b)) in elements for a, b in product(elements, repeat=2))

    def is_normal(self, elements: frozenset[int]) -> bool:
        return self.is_subgroup(elements) and all(
            self.conjugate(a, g) in elements for a in elements for g in self.elements
        )

    def is_abelian(self) -> bool:
        return all(self.mul(a, b) == self.mul(b, a) for a, b in product(self.elements, repeat=2))

    def is_cyclic(self) -> bool:
        return any(self.element_order(a) == self.order for a in self.elements)


@dataclass(frozen=True)
class NormalSubgroup:
    parent: FiniteGroup
    elements: frozenset

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def index(self) -> int:
        return self.parent.order // len(self.elements)

    def key(self) -> tuple:
        return (len(self.elements), tuple(sorted(self.elements)))

    def __le__(self, other: "NormalSubgroup") -> bool:
        return self.elements <= other.elements

    def __str__(self) -> str:
        return "{" + ",".join(str(x) for x in sorted(self.elements)) + "}"


def make_normal_subgroup(G: FiniteGroup, elements: Iterable[int]) -> NormalSubgroup:
    elements = frozenset(elements)
    if not all(0 <= x < G.order for x in elements):
        raise GroupError(f"Subgroup elements {sorted(elements)} lie outside the group")
    if not G.is_normal(elements):
        raise GroupError(f"{sorted(elements)} is not a normal subgroup")
    return NormalSubgroup(G, elements)


def trivial_subgroup(G: FiniteGroup) -> NormalSubgroup:
    return NormalSubgroup(G, frozenset({0}))


def whole_group(G: FiniteGroup) -> NormalSubgroup:
    return NormalSubgroup(G, frozenset(G.elements))


@dataclass(frozen=True)
class GroupMap:
    source: FiniteGroup
    target: FiniteGroup
    images: tuple

    def __call__(self, g: int) -> int:
        return self.images[g]

    @property
    def is_epimorphism(self) -> bool:
        return set(self.images) == set(self.target.elements)

    def kernel(self) -> frozenset[int]:
        return frozenset(g for g in self.source.elements if self.images[g] == 0)

    def preimage(self, subset: Iterable[int]) -> frozenset[int]:
        subset = set(subset)
        return frozenset(g for g in self.source.elements if self.images[g] in subset)

    def is_bijective(self) -> bool:
        return self.source.order == self.target.order and self.is_epimorphism


def homomorphism_failures(source: FiniteGroup, target: FiniteGroup, images: Sequence[int]):
    for a, b in product(source.elements, repeat=2):
        if images[source.mul(a, b)] != target.mul(images[a], images[b]):
            yield (a, b)


def make_group_map(source: FiniteGroup, target: FiniteGroup, images: Iterable[int]) -> GroupMap:
    images = tuple(int(x) for x in images)
    if len(images) != source.order:
        raise GroupError(f"Map lists {len(images)} images for a group of order {source.order}")
    if any(not 0 <= x < target.order for x in images):
        raise GroupError("Map images fall outside the target group")
    witness = next(homomorphism_failures(source, target, images), None)
    if witness is not None:
        raise GroupError(f"Not a homomorphism: product of {witness[0]} and {witness[1]} is not preserved")
    return GroupMap(source, target, images)


def identity_map(G: FiniteGroup) -> GroupMap:
    return GroupMap(G, G, tuple(G.elements))


def compose_maps(outer: GroupMap, inner: GroupMap) -> GroupMap:
    """``outer ∘ inner``."""
    if inner.target != outer.source:
        raise GroupError("Cannot compose maps whose groups do not match")
    return GroupMap(inner.source, outer.target, tuple(outer(inner(g)) for g in inner.source.elements))


def validate_group(G: FiniteGroup) -> AxiomReport:
    """Identity, inverses and associativity. Closure is not a separate entry:
    FiniteGroup already rejects entries outside 0..n-1."""
    n = G.order
    table = G.cayley

    def identity_failures():
        for x in G.elements:
            if table[0][x] != x or table[x][0] != x:
                yield (0, x)

    def inverse_failures():
        for x in G.elements:
            if not any(table[x][y] == 0 and table[y][x] == 0 for y in range(n)):
                yield (x,)

    def associativity_failures():
        for a, b, c in product(range(n), repeat=3):
            if table[a][table[b][c]] != table[table[a][b]][c]:
                yield (a, b, c)

    entries = (
        check("identity", identity_failures(), "element 0 is the identity"),
        check("inverses", inverse_failures()),
        check("associativity", associativity_failures()),
    )
    return AxiomReport("group", entries, {"order": n})


def _check_order_cap(G: FiniteGroup) -> None:
    cap = max_group_order()
    if G.order > cap:
        raise GroupError(f"Group of order {G.order} exceeds the enumeration cap {cap} (GDL_MAX_GROUP_ORDER)")


def normal_subgroups(G: FiniteGroup) -> list[NormalSubgroup]:
    """All normal subgroups ordered by (size, sorted elements)."""
    _check_order_cap(G)
    trivial = frozenset({0})
    found = {trivial}
    frontier = [trivial]
    while frontier:
        N = frontier.pop()
        for g in G.elements:
            if g in N:
                continue
            M = G.normal_closure(N | {g})
            if M not in found:
                found.add(M)
                frontier.append(M)
    result = sorted((NormalSubgroup(G, N) for N in found), key=NormalSubgroup.key)
    log.debug(f"Group of order {G.order} has {len(result)} normal subgroups")
    return result


def subgroups(G: FiniteGroup) -> list[frozenset[int]]:
    _check_order_cap(G)
    trivial = frozenset({0})
    found = {trivial}
    frontier = [trivial]
    while frontier:
        H = frontier.pop()
        for g in G.elements:
            if g not in H:
                K = G.generate(H | {g})
                if K not in found:
                    found.add(K)
                    frontier.append(K)
    return sorted(found, key=lambda H: (len(H), sorted(H)))


def cosets(G: FiniteGroup, H: Iterable[int]) -> list[frozenset[int]]:
    """Left cosets gH ordered by their minimal element."""
    H = frozenset(H)
    seen: set[int] = set()
    result = []
    for g in G.elements:
        if g in seen:
            continue
        coset = frozenset(G.mul(g, h) for h in H)
        seen |= coset
        result.append(coset)
    return result


def quotient(G: FiniteGroup, N: NormalSubgroup) -> tuple[FiniteGroup, GroupMap]:
    if N.parent != G or not G.is_normal(N.elements):
        raise GroupError(f"Cannot form a quotient by non-normal subgroup {N}")
    classes = cosets(G, N.elements)
    position = {g: i for i, coset in enumerate(classes) for g in coset}
    reps = [min(coset) for coset in classes]
    table = [[position[G.mul(a, b)] for b in reps] for a in reps]
    Q = FiniteGroup(table)
    return Q, GroupMap(G, Q, tuple(position[g] for g in G.elements))


def meet_join(N1: NormalSubgroup, N2: NormalSubgroup) -> tuple[NormalSubgroup, NormalSubgroup]:
    if N1.parent != N2.parent:
        raise GroupError("meet_join needs subgroups of the same group")
    G = N1.parent
    meet = N1.elements & N2.elements
    join = frozenset(G.mul(a, b) for a in N1.elements for b in N2.elements)
    return NormalSubgroup(G, meet), NormalSubgroup(G, join)


def generating_set(G: FiniteGroup) -> list[int]:
    gens: list[int] = []
    span = frozenset({0})
    for g in G.elements:
        if g not in span:
            gens.append(g)
            span = G.generate(gens)
    return gens


def find_isomorphism(G: FiniteGroup, H: FiniteGroup) -> GroupMap | None:
    """Exhaustive search over images of a generating set."""
    if G.order != H.order:
        return None
    gens = generating_set(G)
    candidates = [
        [h for h in H.elements if H.element_order(h) == G.element_order(g)] for g in gens
    ]
    for choice in product(*candidates):
        images = _extend_on_generators(G, H, gens, choice)
        if images is None or len(set(images)) != G.order:
            continue
        if next(homomorphism_failures(G, H, images), None) is None:
            return GroupMap(G, H, tuple(images))
    return None


def _extend_on_generators(G, H, gens, choice) -> list[int] | None:
    images: dict[int, int] = {0: 0}
    frontier = [0]
    while frontier:
        x = frontier.pop()
        for s, t in zip(gens, choice):
            y, image = G.mul(x, s), H.mul(images[x], t)
            if y not in images:
                images[y] = image
                frontier.append(y)
            elif images[y] != image:
                return None
    return [images[g] for g in G.elements]


def group_from_elements(
    elements: Sequence[Hashable], mul: Callable, identity: Hashable
) -> tuple[FiniteGroup, list]:
    """Cayley table of a concrete multiplication, identity moved to index 0.

    Returns the group and the element labels in index order.
    """
    labels = [identity] + [e for e in elements if e != identity]
    position = {e: i for i, e in enumerate(labels)}
    try:
        table = [[position[mul(a, b)] for b in labels] for a in labels]
    except KeyError as e:
        raise GroupError(f"Product {e} leaves the element list") from None
    return FiniteGroup(table), labels


def cyclic_group(n: int) -> FiniteGroup:
    if n < 1:
        raise GroupError(f"Cyclic group order must be positive, got {n}")
    return FiniteGroup([[(a + b) % n for b in range(n)] for a in range(n)])


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    """Element (a, b) has index ``a * |H| + b``."""
    m = H.order
    table = [
        [G.mul(x // m, y // m) * m + H.mul(x % m, y % m) for y in range(G.order * m)]
        for x in range(G.order * m)
    ]
    return FiniteGroup(table)


def permutation_group(generators: Iterable[Sequence[int]]) -> tuple[FiniteGroup, list[tuple]]:
    """Closure of permutations given as image tuples, in lexicographic order."""
    generators = [tuple(p) for p in generators]
    degree = len(generators[0])
    identity = tuple(range(degree))

    def compose(p, q):  # apply q first
        return tuple(p[q[i]] for i in range(degree))

    found = {identity}
    frontier = [identity]
    while frontier:
        x = frontier.pop()
        for s in generators:
            y = compose(x, s)
            if y not in found:
                found.add(y)
                frontier.append(y)
    return group_from_elements(sorted(found), compose, identity)
