"""Reference structures: the hidden-axiom counterexample, a small library of
named finite groups with preset sortings, and canonical action models."""
import logging
import os
import re
from dataclasses import dataclass, field
from typing import Any

from .algebra.groups import (
    FiniteGroup,
    GroupMap,
    cyclic_group,
    direct_product,
    group_from_elements,
    make_group_map,
    normal_subgroups,
    permutation_group,
)
from .algebra.sorted_group import SortedFiniteGroup, maximal_sorting, pullback_sorting, saturate_sorting
from .algebra.sorts import Base, base_sorts, canonical_tuple
from .errors import GroupError, SortingError
from .interpretation.action_model import GaloisActionModel, OrbitBlock, coset_block, make_model
from .systems.complete_system import CompleteSystem, Resolution, Sort, make_system

log = logging.getLogger(__name__)

DEFAULT_KCAP = 4
PRESETS = ("maximal-one-sort", "pullback(chain)")
STANDARD_GROUPS = tuple(f"Z{n}" for n in range(1, 17)) + ("V4", "S3", "D4", "Q8")


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    payload: Any
    expected: dict = field(default_factory=dict)


# Hidden-axiom example: blocks X0 (Z/4), X1 and X2 (Z/2), X3 (trivial), placed
# diagonally into the sorts m(k) of a single base sort.
_BLOCK_SIZES = (4, 2, 2, 1)


def _block_leq(i: int, j: int) -> bool:
    return not (i > j or {i, j} == {1, 2})


def _block_c(i: int, p: int, j: int, q: int) -> bool:
    if i > j or {i, j} == {1, 2}:
        return False
    if i == 0 and j in (1, 2):
        return p % 2 == q % 2
    if i == j:
        return p == q
    return True


def _blocks_in_degree(k: int) -> tuple[int, ...]:
    if k == 1:
        return (3,)
    if k in (2, 3):
        return (1, 2, 3)
    return (0, 1, 2, 3)


def kcap_from_env() -> int:
    return int(os.getenv("GDL_KCAP", str(DEFAULT_KCAP)))


def hidden_axiom_example(kcap: int | None = None) -> CompleteSystem:
    if kcap is None:
        kcap = kcap_from_env()
    if kcap < 4:
        raise ValueError(f"The hidden-axiom example needs k-cap >= 4, got {kcap}")
    J = (Base("A"),)
    sorts = [Sort(k, J) for k in range(1, kcap + 1)]
    elements = []  # (id, sort, block, index)
    for s in sorts:
        for i in _blocks_in_degree(s.k):
            for p in range(_BLOCK_SIZES[i]):
                elements.append((f"m{s.k}:x{i}_{p}", s, i, p))
    leq, c_rel, p_rel = [], [], []
    for x, _, i, p in elements:
        for y, _, j, q in elements:
            if _block_leq(i, j):
                leq.append((x, y))
            if _block_c(i, p, j, q):
                c_rel.append((x, y))
    by_sort_block: dict[tuple, dict[int, str]] = {}
    for x, s, i, p in elements:
        by_sort_block.setdefault((s, i), {})[p] = x
    for (s, i), members in by_sort_block.items():
        n = _BLOCK_SIZES[i]
        for p in range(n):
            for q in range(n):
                p_rel.append((members[p], members[q], members[(p + q) % n]))
    log.debug(f"Hidden-axiom example with k-cap {kcap}: {len(elements)} elements")
    return make_system(sorts, [(x, s) for x, s, _, _ in elements], leq, c_rel, p_rel,
                       Resolution(tail=kcap, collapse=True))


def _quaternion_group() -> FiniteGroup:
    def mul(x, y):
        a1, b1, c1, d1 = x
        a2, b2, c2, d2 = y
        return (
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )

    units = []
    for axis in range(4):
        for sign in (1, -1):
            q = [0, 0, 0, 0]
            q[axis] = sign
            units.append(tuple(q))
    group, _ = group_from_elements(units, mul, (1, 0, 0, 0))
    return group


def standard_group(name: str) -> FiniteGroup:
    match = re.fullmatch(r"Z(\d+)", name)
    if match and 1 <= int(match.group(1)) <= 16:
        return cyclic_group(int(match.group(1)))
    if name == "V4":
        return direct_product(cyclic_group(2), cyclic_group(2))
    if name == "S3":
        return permutation_group([(1, 0, 2), (1, 2, 0)])[0]
    if name == "D4":
        return permutation_group([(1, 2, 3, 0), (0, 3, 2, 1)])[0]
    if name == "Q8":
        return _quaternion_group()
    raise GroupError(f"Unknown standard group '{name}'; known: {', '.join(STANDARD_GROUPS)}")


def reduction_map(n: int, m: int) -> GroupMap:
    """Z/n -> Z/m, x -> x mod m."""
    if n % m:
        raise GroupError(f"Z/{m} is not a quotient of Z/{n}")
    return make_group_map(cyclic_group(n), cyclic_group(m), [x % m for x in range(n)])


def cyclic_chain(orders: tuple[int, ...] = (8, 4, 2)) -> tuple[list[SortedFiniteGroup], list[GroupMap]]:
    """Z/n1 -> Z/n2 -> ... with the maximal one-sort sorting on top, pulled back
    along the reduction maps."""
    top = saturate_sorting(maximal_sorting(cyclic_group(orders[0])))
    groups, maps = [top], []
    for n, m in zip(orders, orders[1:]):
        pi = reduction_map(n, m)
        maps.append(pi)
        groups.append(saturate_sorting(pullback_sorting(pi, groups[-1])))
    return groups, maps


def standard_sorted_group(name: str, preset: str = "maximal-one-sort") -> SortedFiniteGroup:
    if preset == "maximal-one-sort":
        return saturate_sorting(maximal_sorting(standard_group(name)))
    if preset == "pullback(chain)":
        G = standard_group(name)
        if not G.is_cyclic():
            raise SortingError(f"Preset {preset} needs a cyclic group, got {name}")
        groups, _ = cyclic_chain((2 * G.order, G.order))
        return groups[-1]
    raise SortingError(f"Unknown sorting preset '{preset}'; known: {', '.join(PRESETS)}")


def _orbit_sort(SG: SortedFiniteGroup, elements: frozenset) -> str:
    generators = SG.family(elements).ordered()
    if not generators:
        return "A"
    return min(base_sorts(canonical_tuple(generators[0])) or {"A"})


def regular_model(SG: SortedFiniteGroup) -> GaloisActionModel:
    """One orbit gamma/N per normal N, in a base sort of the first generator of F(N)."""
    G = SG.group
    blocks = [coset_block(G, N.elements, _orbit_sort(SG, N.elements)) for N in normal_subgroups(G)]
    rational = {block.sort for block in blocks if block.size == 1}
    for sort in sorted({block.sort for block in blocks} - rational, key=str):
        blocks.append(OrbitBlock(sort, 1, tuple((0,) for _ in G.elements)))
    return make_model(G, blocks)


def s3_coset_model() -> GaloisActionModel:
    """Regular model of S3 plus its action on the three cosets of a transposition."""
    SG = standard_sorted_group("S3")
    model = regular_model(SG)
    transposition = next(g for g in SG.group.elements if g and SG.group.element_order(g) == 2)
    return make_model(model.gamma, model.orbits + (coset_block(model.gamma, {0, transposition}, "A"),))


_NORMAL_COUNTS = {"V4": 5, "S3": 3, "D4": 6, "Q8": 6}


def _divisor_count(n: int) -> int:
    return sum(1 for d in range(1, n + 1) if n % d == 0)


def corpus_entries() -> list[CorpusEntry]:
    entries = [
        CorpusEntry("hidden-axiom", hidden_axiom_example(),
                    {"tilde_classes": 4, "dual_tilde_classes": 3, "limit_order": 4}),
    ]
    for name in STANDARD_GROUPS:
        G = standard_group(name)
        count = _NORMAL_COUNTS.get(name) or _divisor_count(G.order)
        entries.append(CorpusEntry(name, standard_sorted_group(name), {"order": G.order, "normal_subgroups": count}))
    for name in ("Z2", "Z4", "V4", "S3", "D4"):
        SG = standard_sorted_group(name)
        entries.append(CorpusEntry(f"{name}-regular-model", regular_model(SG), {"gamma_order": SG.group.order}))
    entries.append(CorpusEntry("S3-coset-model", s3_coset_model(), {"gamma_order": 6}))
    return entries


if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - [%(name)s] - %(message)s')
    log.info("--- Running corpus.py test ---")
    entries = corpus_entries()
    print("\n--- Corpus Summary ---")
    for entry in entries:
        print(f"{entry.name}: {entry.expected}")
    print(f"{len(entries)} entries")
