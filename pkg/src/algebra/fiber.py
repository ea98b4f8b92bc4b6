"""Triples of automorphisms agreeing on common restrictions.

Given epimorphisms from G_AB, G_AC, G_BC onto G_A, G_B, G_C, the fiber
product is the subgroup of G_AB x G_AC x G_BC whose components agree after
restriction to each shared factor.
"""
import logging
from dataclasses import dataclass
from itertools import product

from ..errors import GroupError
from .groups import FiniteGroup, GroupMap

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FiberProduct:
    factors: tuple[FiniteGroup, FiniteGroup, FiniteGroup]
    elements: tuple[tuple[int, int, int], ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, x: tuple, y: tuple) -> tuple:
        return tuple(G.mul(a, b) for G, a, b in zip(self.factors, x, y))

    def inv(self, x: tuple) -> tuple:
        return tuple(G.inv(a) for G, a in zip(self.factors, x))

    def is_subgroup(self) -> bool:
        members = set(self.elements)
        if (0, 0, 0) not in members:
            return False
        return all(self.mul(x, self.inv(y)) in members for x, y in product(self.elements, repeat=2))

    def as_group(self) -> FiniteGroup:
        position = {x: i for i, x in enumerate(self.elements)}
        return FiniteGroup([[position[self.mul(x, y)] for y in self.elements] for x in self.elements])


def _require_epimorphism(name: str, f: GroupMap) -> None:
    if not f.is_epimorphism:
        raise GroupError(f"{name} is not an epimorphism")


def fiber_triple(
    pAB_A: GroupMap,
    pAB_B: GroupMap,
    pAC_A: GroupMap,
    pAC_C: GroupMap,
    pBC_B: GroupMap,
    pBC_C: GroupMap,
) -> FiberProduct:
    maps = {
        "pAB_A": pAB_A, "pAB_B": pAB_B, "pAC_A": pAC_A,
        "pAC_C": pAC_C, "pBC_B": pBC_B, "pBC_C": pBC_C,
    }
    for name, f in maps.items():
        _require_epimorphism(name, f)

    if pAB_A.source != pAB_B.source or pAC_A.source != pAC_C.source or pBC_B.source != pBC_C.source:
        raise GroupError("Maps out of the same pair group must share their source")
    if pAB_A.target != pAC_A.target:
        raise GroupError("pAB_A and pAC_A must share the target G_A")
    if pAB_B.target != pBC_B.target:
        raise GroupError("pAB_B and pBC_B must share the target G_B")
    if pAC_C.target != pBC_C.target:
        raise GroupError("pAC_C and pBC_C must share the target G_C")

    G_AB, G_AC, G_BC = pAB_A.source, pAC_A.source, pBC_B.source
    elements = tuple(
        (s1, s2, s3)
        for s1, s2, s3 in product(G_AB.elements, G_AC.elements, G_BC.elements)
        if pAB_A(s1) == pAC_A(s2) and pAB_B(s1) == pBC_B(s3) and pAC_C(s2) == pBC_C(s3)
    )
    log.info(f"Fiber product has order {len(elements)} inside a product of order "
             f"{G_AB.order * G_AC.order * G_BC.order}")
    return FiberProduct((G_AB, G_AC, G_BC), elements)
