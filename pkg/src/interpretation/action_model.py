"""Finite Galois-action models.

A model is a finite group ``gamma`` acting on finitely many blocks of points,
each block living in a base sort. A point is the pair (block index, point
index); a tuple of points lives in the tuple sort of its blocks' sorts and is
acted on coordinatewise. The definable closure of a set is the set of points
fixed by its pointwise stabilizer.
"""
import logging
import os
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product
from typing import Iterable, Iterator, Sequence

from ..algebra.groups import FiniteGroup, NormalSubgroup, cosets, normal_subgroups
from ..algebra.sorted_group import SortedFiniteGroup, saturate_sorting
from ..algebra.sorts import Base, SortFamily, SortTuple, make_tuple
from ..errors import ModelError
from ..reports import AxiomReport, check

log = logging.getLogger(__name__)

DEFAULT_TUPLE_LENGTH = 4
DEFAULT_ENUMERATION_LIMIT = 4096
DEFAULT_LEMMA_TUPLE_LENGTH = 3

Point = tuple[int, int]


def tuple_length_bound() -> int:
    return int(os.getenv("GDL_TUPLE_LENGTH", str(DEFAULT_TUPLE_LENGTH)))


def enumeration_limit() -> int:
    return int(os.getenv("GDL_ENUMERATION_LIMIT", str(DEFAULT_ENUMERATION_LIMIT)))


def lemma_tuple_length() -> int:
    return int(os.getenv("GDL_LEMMA_TUPLE_LENGTH", str(DEFAULT_LEMMA_TUPLE_LENGTH)))


@dataclass(frozen=True)
class OrbitBlock:
    sort: Base
    size: int
    action: tuple  # action[g][x] is the image of point x under g

    def __post_init__(self):
        if not isinstance(self.sort, Base):
            raise ModelError(f"Model points must live in base sorts, got {self.sort}")
        if not isinstance(self.size, int) or self.size < 1:
            raise ModelError(f"Block size must be a positive integer, got {self.size!r}")
        rows = tuple(tuple(int(x) for x in row) for row in self.action)
        for g, row in enumerate(rows):
            if len(row) != self.size:
                raise ModelError(f"Action row {g} has {len(row)} entries, expected {self.size}")
            if any(not 0 <= x < self.size for x in row):
                raise ModelError(f"Action row {g} leaves the block 0..{self.size - 1}")
        object.__setattr__(self, "action", rows)


@dataclass(frozen=True)
class GaloisActionModel:
    gamma: FiniteGroup
    orbits: tuple[OrbitBlock, ...]

    def __post_init__(self):
        if not self.orbits:
            raise ModelError("A model needs at least one block of points")
        for i, block in enumerate(self.orbits):
            if len(block.action) != self.gamma.order:
                raise ModelError(
                    f"Block {i} has {len(block.action)} action rows for a group of order {self.gamma.order}"
                )
        object.__setattr__(self, "orbits", tuple(self.orbits))

    @cached_property
    def points(self) -> tuple[Point, ...]:
        return tuple((b, x) for b, block in enumerate(self.orbits) for x in range(block.size))

    @cached_property
    def sort_names(self) -> tuple[str, ...]:
        return tuple(sorted({block.sort.name for block in self.orbits}))

    @cached_property
    def points_by_sort(self) -> dict[str, tuple[Point, ...]]:
        result: dict[str, list[Point]] = {}
        for b, x in self.points:
            result.setdefault(self.orbits[b].sort.name, []).append((b, x))
        return {name: tuple(points) for name, points in result.items()}

    @cached_property
    def _point_stabilizers(self) -> dict[Point, frozenset[int]]:
        return {
            (b, x): frozenset(g for g in self.gamma.elements if self.orbits[b].action[g][x] == x)
            for b, x in self.points
        }

    @cached_property
    def _normal(self) -> list[NormalSubgroup]:
        return normal_subgroups(self.gamma)


def make_model(gamma: FiniteGroup, blocks: Iterable[OrbitBlock]) -> GaloisActionModel:
    return GaloisActionModel(gamma, tuple(blocks))


def coset_block(gamma: FiniteGroup, H: Iterable[int], sort: str | Base = "A") -> OrbitBlock:
    """gamma acting by left multiplication on its left cosets of ``H``."""
    H = frozenset(H)
    if not gamma.is_subgroup(H):
        raise ModelError(f"{sorted(H)} is not a subgroup")
    classes = cosets(gamma, H)
    position = {g: i for i, coset in enumerate(classes) for g in coset}
    reps = [min(coset) for coset in classes]
    action = tuple(tuple(position[gamma.mul(g, r)] for r in reps) for g in gamma.elements)
    sort = Base(sort) if isinstance(sort, str) else sort
    return OrbitBlock(sort, len(classes), action)


def act(model: GaloisActionModel, g: int, point: Point) -> Point:
    b, x = point
    return (b, model.orbits[b].action[g][x])


def act_tuple(model: GaloisActionModel, g: int, a: Sequence[Point]) -> tuple[Point, ...]:
    return tuple(act(model, g, p) for p in a)


def sort_of(model: GaloisActionModel, a: Sequence[Point]) -> SortTuple:
    return tuple(model.orbits[b].sort for b, _ in a)


def stabilizer(model: GaloisActionModel, A: Iterable[Point]) -> frozenset[int]:
    result = frozenset(model.gamma.elements)
    for p in A:
        result &= model._point_stabilizers[tuple(p)]
    return result


def fixed_points(model: GaloisActionModel, H: Iterable[int]) -> frozenset[Point]:
    H = frozenset(H)
    return frozenset(p for p in model.points if H <= model._point_stabilizers[p])


def dcl(model: GaloisActionModel, A: Iterable[Point]) -> frozenset[Point]:
    return fixed_points(model, stabilizer(model, A))


def orbit(model: GaloisActionModel, a: Sequence[Point]) -> list[tuple[Point, ...]]:
    """The gamma-orbit of a tuple, sorted."""
    return sorted({act_tuple(model, g, a) for g in model.gamma.elements})


def conj(model: GaloisActionModel, tuples: Sequence[Sequence[Point]]) -> bool:
    """True iff the tuples are pairwise distinct and form exactly one orbit."""
    tuples = [tuple(a) for a in tuples]
    if not tuples:
        return False
    sort = sort_of(model, tuples[0])
    for a in tuples[1:]:
        if sort_of(model, a) != sort:
            raise ModelError("conj needs tuples of a single sort")
    if len(set(tuples)) != len(tuples):
        return False
    return sorted(tuples) == orbit(model, tuples[0])


def is_n_primitive(model: GaloisActionModel, a: Sequence[Point], n: int) -> bool:
    members = orbit(model, a)
    if len(members) != n:
        return False
    alpha = tuple(p for member in members for p in member)
    return len(orbit(model, alpha)) == n


def tuples_of_sort(model: GaloisActionModel, J: SortTuple) -> Iterator[tuple[Point, ...]]:
    J = make_tuple(J)
    for term in J:
        if not isinstance(term, Base):
            raise ModelError(f"Sort {term} has no carrier in an action model")
    pools = [model.points_by_sort.get(term.name, ()) for term in J]
    return product(*pools)


def sort_size(model: GaloisActionModel, J: SortTuple) -> int:
    size = 1
    for term in make_tuple(J):
        if not isinstance(term, Base):
            raise ModelError(f"Sort {term} has no carrier in an action model")
        size *= len(model.points_by_sort.get(term.name, ()))
    return size


def _identity_failures(model: GaloisActionModel):
    for b, block in enumerate(model.orbits):
        for x in range(block.size):
            if block.action[0][x] != x:
                yield (b, x)


def _permutation_failures(model: GaloisActionModel):
    for b, block in enumerate(model.orbits):
        for g, row in enumerate(block.action):
            if len(set(row)) != block.size:
                yield (b, g)


def _compatibility_failures(model: GaloisActionModel):
    G = model.gamma
    for b, block in enumerate(model.orbits):
        for g, h in product(G.elements, repeat=2):
            gh = G.mul(g, h)
            for x in range(block.size):
                if block.action[gh][x] != block.action[g][block.action[h][x]]:
                    yield (b, g, h, x)
                    break


def _faithfulness_failures(model: GaloisActionModel):
    seen: dict[frozenset, NormalSubgroup] = {}
    for N in model._normal:
        fixed = fixed_points(model, N.elements)
        if fixed in seen:
            yield (str(seen[fixed]), str(N))
        seen.setdefault(fixed, N)


def _rational_point_failures(model: GaloisActionModel):
    fixed = fixed_points(model, model.gamma.elements)
    for name in model.sort_names:
        if not any(p in fixed for p in model.points_by_sort[name]):
            yield (name,)


def validate_model(model: GaloisActionModel) -> AxiomReport:
    entries = (
        check("action.identity", _identity_failures(model)),
        check("action.permutations", _permutation_failures(model)),
        check("action.compatibility", _compatibility_failures(model), "(gh)x = g(hx)"),
        check("galois-faithful", _faithfulness_failures(model), "N -> Fix(N) injective on normal subgroups"),
        check("rational-points", _rational_point_failures(model), "every sort has a gamma-fixed point"),
    )
    quantities = {
        "gamma_order": model.gamma.order,
        "blocks": len(model.orbits),
        "points": len(model.points),
    }
    return AxiomReport("action-model", entries, quantities)


def require_valid(model: GaloisActionModel) -> None:
    report = validate_model(model)
    if not report.passed:
        failing = ", ".join(f"{e.name} {e.witnesses[0]}" for e in report.failures())
        raise ModelError(f"Model is not a Galois-faithful action: {failing}")


def joint_stabilizer_of_fixed(model: GaloisActionModel, N: NormalSubgroup, names: Iterable[str]) -> frozenset[int]:
    fixed = fixed_points(model, N.elements)
    return stabilizer(model, (p for name in names for p in model.points_by_sort.get(name, ()) if p in fixed))


def derived_sorted_group(model: GaloisActionModel) -> SortedFiniteGroup:
    """F(N) is generated by the minimal sets of base sorts whose N-fixed points
    have joint stabilizer exactly N; saturated afterwards."""
    names = model.sort_names
    sorting = []
    for N in model._normal:
        generators: list[frozenset[str]] = []
        for size in range(1, len(names) + 1):
            for subset in combinations(names, size):
                if any(g <= set(subset) for g in generators):
                    continue
                if joint_stabilizer_of_fixed(model, N, subset) == N.elements:
                    generators.append(frozenset(subset))
        family = SortFamily(frozenset(frozenset(Base(n) for n in g) for g in generators))
        log.debug(f"Derived family at {N}: {family}")
        sorting.append((N.elements, family))
    return saturate_sorting(SortedFiniteGroup(model.gamma, tuple(sorting)))


def primitive_representative(
    model: GaloisActionModel, J: SortTuple, N: NormalSubgroup
) -> tuple[Point, ...] | None:
    """A tuple of sort ``J`` with stabilizer exactly ``N``, or None.

    Each coordinate first takes the N-fixed point of its sort that shrinks
    the running stabilizer most. When that misses N, tuples of length up to
    GDL_LEMMA_TUPLE_LENGTH are searched one orbit representative at a time.
    """
    fixed = fixed_points(model, N.elements)
    candidates: list[list[Point]] = []
    for term in make_tuple(J):
        if not isinstance(term, Base):
            raise ModelError(f"Sort {term} has no carrier in an action model")
        points = [p for p in model.points_by_sort.get(term.name, ()) if p in fixed]
        if not points:
            return None
        candidates.append(points)
    current = frozenset(model.gamma.elements)
    chosen: list[Point] = []
    for points in candidates:
        best = min(points, key=lambda p: len(current & model._point_stabilizers[p]))
        current &= model._point_stabilizers[best]
        chosen.append(best)
    if current == N.elements:
        return tuple(chosen)
    if len(candidates) > lemma_tuple_length():
        log.debug(f"No greedy representative of {N} in sort of length {len(candidates)}")
        return None
    seen: set = set()
    for a in product(*candidates):
        if a in seen:
            continue
        seen.update(orbit(model, a))
        if stabilizer(model, a) == N.elements:
            return a
    return None
