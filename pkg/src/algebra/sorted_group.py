"""Sorted finite groups: a finite group with a sort family for every normal
subgroup, plus the closure conditions relating the families."""
import logging
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from ..errors import SortingError
from ..reports import AxiomReport, check, satisfied
from .groups import FiniteGroup, GroupMap, NormalSubgroup, normal_subgroups
from .sorts import (
    SortFamily,
    canonical_tuple,
    family_add,
    family_contains,
    family_includes,
    format_tuple,
    j_star_cap,
    j_star_sub,
    maximal_family,
)

log = logging.getLogger(__name__)

DEFAULT_SATURATION_ROUNDS = 32


@dataclass(frozen=True)
class SortedFiniteGroup:
    group: FiniteGroup
    sorting: tuple  # ((subgroup elements, SortFamily), ...) in normal_subgroups order

    @cached_property
    def _families(self) -> dict[frozenset, SortFamily]:
        return dict(self.sorting)

    def family(self, N: NormalSubgroup | frozenset) -> SortFamily:
        key = N.elements if isinstance(N, NormalSubgroup) else frozenset(N)
        try:
            return self._families[key]
        except KeyError:
            raise SortingError(f"No sort family for subgroup {sorted(key)}") from None

    def subgroups(self) -> list[NormalSubgroup]:
        return [NormalSubgroup(self.group, elements) for elements, _ in self.sorting]

    def items(self) -> list[tuple[NormalSubgroup, SortFamily]]:
        return [(NormalSubgroup(self.group, elements), F) for elements, F in self.sorting]


def make_sorted_group(
    group: FiniteGroup, families: Mapping[frozenset | NormalSubgroup, SortFamily]
) -> SortedFiniteGroup:
    keyed = {}
    for N, F in families.items():
        elements = N.elements if isinstance(N, NormalSubgroup) else frozenset(N)
        if not group.is_normal(elements):
            raise SortingError(f"Sorting names {sorted(elements)}, which is not a normal subgroup")
        keyed[elements] = F
    sorting = []
    for N in normal_subgroups(group):
        if N.elements not in keyed:
            raise SortingError(f"Sorting is not total: subgroup {N} has no family")
        sorting.append((N.elements, keyed[N.elements]))
    return SortedFiniteGroup(group, tuple(sorting))


def maximal_sorting(group: FiniteGroup, base_names: Iterable[str] = ("A",)) -> SortedFiniteGroup:
    F = maximal_family(base_names)
    return SortedFiniteGroup(group, tuple((N.elements, F) for N in normal_subgroups(group)))


def _subgroup_failures(SG: SortedFiniteGroup):
    items = SG.items()
    for N1, F1 in items:
        for N2, F2 in items:
            if not N1.elements <= N2.elements:
                continue
            for g in F1.ordered():
                J = canonical_tuple(g)
                if not family_contains(F2, j_star_sub(N1.index, J)):
                    yield (str(N1), str(N2), format_tuple(J))


def _intersection_failures(SG: SortedFiniteGroup):
    items = SG.items()
    for N1, F1 in items:
        for N2, F2 in items:
            F_meet = SG.family(N1.elements & N2.elements)
            for g1 in F1.ordered():
                for g2 in F2.ordered():
                    J = j_star_cap(canonical_tuple(g1), canonical_tuple(g2))
                    if not family_contains(F_meet, J):
                        yield (str(N1), str(N2), format_tuple(J))


def check_sorted_axioms(SG: SortedFiniteGroup) -> AxiomReport:
    present = {elements for elements, _ in SG.sorting}
    for N in normal_subgroups(SG.group):
        if N.elements not in present:
            raise SortingError(f"Sorting is not total: subgroup {N} has no family")
    entries = (
        satisfied("1.support-closure", "satisfied by representation"),
        satisfied("2.permutation-invariance", "satisfied by representation"),
        check("3.subgroup-sorts", _subgroup_failures(SG), "k = [G:N1] for N1 contained in N2"),
        check("4.intersection-sorts", _intersection_failures(SG)),
    )
    return AxiomReport("sorted-group", entries, {"order": SG.group.order, "normal_subgroups": len(SG.sorting)})


def _require_epimorphism_between(pi: GroupMap, SG1: SortedFiniteGroup, SG2: SortedFiniteGroup) -> None:
    if pi.source != SG1.group or pi.target != SG2.group:
        raise SortingError("Morphism does not run between the given sorted groups")
    if not pi.is_epimorphism:
        raise SortingError("Morphism of sorted groups must be an epimorphism")


def is_sorted_morphism(pi: GroupMap, SG1: SortedFiniteGroup, SG2: SortedFiniteGroup) -> bool:
    _require_epimorphism_between(pi, SG1, SG2)
    for N, F2 in SG2.items():
        if not family_includes(SG1.family(pi.preimage(N.elements)), F2):
            log.debug(f"Family of {N} is not covered by the family of its preimage")
            return False
    return True


def pullback_sorting(pi: GroupMap, SG1: SortedFiniteGroup) -> SortedFiniteGroup:
    """Sorting on the target whose family at N is the family at the preimage of N."""
    if pi.source != SG1.group or not pi.is_epimorphism:
        raise SortingError("Pullback needs an epimorphism out of the sorted group")
    return SortedFiniteGroup(
        pi.target,
        tuple((N.elements, SG1.family(pi.preimage(N.elements))) for N in normal_subgroups(pi.target)),
    )


def saturate_sorting(SG: SortedFiniteGroup, max_rounds: int | None = None) -> SortedFiniteGroup:
    if max_rounds is None:
        max_rounds = int(os.getenv("GDL_SATURATION_ROUNDS", str(DEFAULT_SATURATION_ROUNDS)))
    families = dict(SG.sorting)
    subgroups = SG.subgroups()
    for round_number in range(1, max_rounds + 1):
        changed = False
        for N1 in subgroups:
            for N2 in subgroups:
                if N1.elements <= N2.elements:
                    for g in families[N1.elements].ordered():
                        J = j_star_sub(N1.index, canonical_tuple(g))
                        if not family_contains(families[N2.elements], J):
                            families[N2.elements] = family_add(families[N2.elements], J)
                            changed = True
                meet = N1.elements & N2.elements
                for g1 in families[N1.elements].ordered():
                    for g2 in families[N2.elements].ordered():
                        J = j_star_cap(canonical_tuple(g1), canonical_tuple(g2))
                        if not family_contains(families[meet], J):
                            families[meet] = family_add(families[meet], J)
                            changed = True
        if not changed:
            log.debug(f"Sorting saturated after {round_number} round(s)")
            return SortedFiniteGroup(SG.group, tuple((N.elements, families[N.elements]) for N in subgroups))
    raise SortingError(f"Sorting saturation did not converge within {max_rounds} rounds")
