"""Ultraproducts of coset systems at a principal ultrafilter.

Sequences are identified when they agree on a set in the ultrafilter, and a
relation holds on classes when it holds coordinatewise on such a set. The
map phi reads a class off at the level where its index stabilizes, which for
a principal ultrafilter is the generating coordinate.
"""
import logging
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from ..algebra.sorted_group import SortedFiniteGroup
from ..errors import DualityError
from ..reports import AxiomReport, check
from .complete_system import CompleteSystem, Sort, make_system, piece
from .duality import SystemMap, check_system_map, faithful_support, make_system_map, system_of_group

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PrincipalUltrafilter:
    size: int
    index: int

    def __post_init__(self):
        if not 0 <= self.index < self.size:
            raise DualityError(f"Index {self.index} is outside 0..{self.size - 1}")

    def contains(self, indices: Iterable[int]) -> bool:
        return self.index in set(indices)


def ultraproduct_of_systems(
    systems: Sequence[CompleteSystem], ultrafilter: PrincipalUltrafilter
) -> tuple[CompleteSystem, dict[str, tuple]]:
    """The ultraproduct and a representative sequence per class.

    A sequence is a tuple of (coordinate, element id) pairs over the
    coordinates where its sort is nonempty.
    """
    sorts = sorted({s for S in systems for s in S.sorts}, key=Sort.key)
    representatives: dict[str, tuple] = {}
    homes = []
    for s in sorts:
        domain = [i for i, S in enumerate(systems) if S.elements_of(s)]
        if not ultrafilter.contains(domain):
            continue
        reps: list[tuple] = []
        for values in product(*(systems[i].elements_of(s) for i in domain)):
            sequence = tuple(zip(domain, values))
            if not any(ultrafilter.contains(_agreement(sequence, r)) for r in reps):
                reps.append(sequence)
        for sequence in reps:
            class_id = "(" + ";".join(f"{i}:{x}" for i, x in sequence) + ")"
            representatives[class_id] = sequence
            homes.append((class_id, s))

    def holds(relation: str, *classes: str) -> bool:
        coordinates = [dict(representatives[c]) for c in classes]
        common = set.intersection(*(set(c) for c in coordinates))
        satisfied = []
        for i in common:
            values = tuple(c[i] for c in coordinates)
            S = systems[i]
            if relation == "leq" and S.le(*values):
                satisfied.append(i)
            elif relation == "c" and values[1] in S.c_out[values[0]]:
                satisfied.append(i)
            elif relation == "p" and values in S.p_rel:
                satisfied.append(i)
        return ultrafilter.contains(satisfied)

    ids = [class_id for class_id, _ in homes]
    home = dict(homes)
    leq = [(x, y) for x in ids for y in ids if holds("leq", x, y)]
    c_rel = [(x, y) for x in ids for y in ids if holds("c", x, y)]
    p_rel = [
        (x, y, z)
        for x in ids for y in ids for z in ids
        if home[x] == home[y] == home[z] and holds("p", x, y, z)
    ]
    resolution = systems[ultrafilter.index].resolution
    log.info(f"Ultraproduct over {len(systems)} factor(s) has {len(ids)} classes")
    return make_system(sorts, homes, leq, c_rel, p_rel, resolution), representatives


def _agreement(x: tuple, y: tuple) -> list[int]:
    y_values = dict(y)
    return [i for i, value in x if y_values.get(i) == value]


def phi_map(
    systems: Sequence[CompleteSystem],
    ultrafilter: PrincipalUltrafilter,
    ultraproduct: CompleteSystem,
    representatives: dict[str, tuple],
) -> SystemMap:
    target = systems[ultrafilter.index]
    images = {}
    for class_id in ultraproduct.element_ids:
        sequence = dict(representatives[class_id])
        levels: dict[int, list[int]] = {}
        for i, x in sequence.items():
            levels.setdefault(len(piece(systems[i], x)), []).append(i)
        level = next((k for k, coordinates in levels.items() if ultrafilter.contains(coordinates)), None)
        if level is None:
            raise DualityError(f"Class {class_id} has no index level on a large set")
        image = sequence[ultrafilter.index]
        if len(piece(target, image)) != level:
            raise DualityError(f"Class {class_id} leaves its index level at the limit coordinate")
        images[class_id] = image
    return make_system_map(ultraproduct, target, images)


def principal_ultraproduct(
    factors: Sequence[SortedFiniteGroup], i0: int, support: Iterable[Sort] | None = None
) -> AxiomReport:
    if not factors:
        raise DualityError("Ultraproduct needs at least one factor")
    ultrafilter = PrincipalUltrafilter(len(factors), i0)
    if support is None:
        support = sorted({s for SG in factors for s in faithful_support(SG)}, key=Sort.key)
    support = list(support)
    systems = [system_of_group(SG, support) for SG in factors]
    ultraproduct, representatives = ultraproduct_of_systems(systems, ultrafilter)
    try:
        phi = phi_map(systems, ultrafilter, ultraproduct, representatives)
    except DualityError as e:
        entries = (check("phi.levels", [(str(e),)]),)
    else:
        entries = (check("phi.levels", ()),) + tuple(check_system_map(phi, "phi", require_surjective=True))
    quantities = {
        "factors": [SG.group.order for SG in factors],
        "index": i0,
        "classes": len(ultraproduct),
        "target_elements": len(systems[i0]),
    }
    return AxiomReport("principal-ultraproduct", entries, quantities)
