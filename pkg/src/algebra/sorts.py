"""Sort terms of the many-sorted language and the sort families attached to
normal subgroups.

A sort tuple ``J`` is a nonempty tuple of terms. A family is stored as an
antichain of generator supports; ``J`` belongs to the family when some
generator lies inside the code closure of ``||J||``.
"""
import re
from dataclasses import dataclass
from typing import Iterable, Union

from ..errors import SortError

_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class Base:
    name: str

    def __post_init__(self):
        if not isinstance(self.name, str) or not _NAME.match(self.name):
            raise SortError(f"Invalid base sort name: {self.name!r}")

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class SetCode:
    """Sort of codes for ``n``-element sets of tuples of sort ``inner``."""
    n: int
    inner: tuple

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise SortError(f"SetCode arity must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "inner", make_tuple(self.inner))

    def __str__(self) -> str:
        return f"Set{self.n}({format_tuple(self.inner)})"


SortTerm = Union[Base, SetCode]
SortTuple = tuple
Support = frozenset


def make_tuple(terms: Iterable) -> SortTuple:
    terms = tuple(Base(t) if isinstance(t, str) else t for t in terms)
    if not terms:
        raise SortError("Sort tuples must be nonempty")
    for term in terms:
        if not isinstance(term, (Base, SetCode)):
            raise SortError(f"Not a sort term: {term!r}")
    return terms


def term_key(term: SortTerm) -> tuple:
    if isinstance(term, Base):
        return (0, term.name)
    return (1, term.n, tuple(term_key(t) for t in term.inner))


def tuple_key(terms: Iterable[SortTerm]) -> tuple:
    return tuple(term_key(t) for t in terms)


def support_key(generator: Support) -> tuple:
    return (len(generator), tuple(sorted(term_key(t) for t in generator)))


def format_tuple(terms: SortTuple) -> str:
    return ",".join(str(t) for t in terms)


def support(J: SortTuple) -> Support:
    return frozenset(make_tuple(J))


def in_sqrt(Jp: SortTuple, J: SortTuple) -> bool:
    return support(Jp) >= support(J)


def j_star_cap(J1: SortTuple, J2: SortTuple) -> SortTuple:
    return make_tuple(J1) + make_tuple(J2)


def j_star_sub(k: int, J: SortTuple) -> SortTuple:
    if k < 1:
        raise SortError(f"j_star_sub needs k >= 1, got {k}")
    J = make_tuple(J)
    return tuple(SetCode(i, J) for i in range(1, k + 1))


def code_closure(terms: Iterable[SortTerm]) -> Support:
    """Adds the support of X for every SetCode(1, X), recursively.

    A code of a one-element set is interdefinable with its element.
    """
    closed = set(terms)
    pending = list(closed)
    while pending:
        term = pending.pop()
        if isinstance(term, SetCode) and term.n == 1:
            for inner in term.inner:
                if inner not in closed:
                    closed.add(inner)
                    pending.append(inner)
    return frozenset(closed)


def base_sorts(J: SortTuple) -> frozenset[str]:
    return frozenset(t.name for t in code_closure(support(J)) if isinstance(t, Base))


def canonical_tuple(generator: Support) -> SortTuple:
    return tuple(sorted(generator, key=term_key))


@dataclass(frozen=True)
class SortFamily:
    generators: frozenset = frozenset()

    def __post_init__(self):
        generators = frozenset(frozenset(g) for g in self.generators)
        if any(not g for g in generators):
            raise SortError("Empty-support generators are not allowed")
        object.__setattr__(self, "generators", _normalize(generators))

    def ordered(self) -> list[Support]:
        return sorted(self.generators, key=support_key)

    def __contains__(self, J) -> bool:
        return family_contains(self, J)

    def __str__(self) -> str:
        gens = ["{" + format_tuple(canonical_tuple(g)) + "}" for g in self.ordered()]
        return "<" + " ".join(gens) + ">"


def _subsumes(h: Support, g: Support) -> bool:
    return h <= code_closure(g)


def _normalize(generators: frozenset) -> frozenset:
    kept = set()
    for g in generators:
        dominated = False
        for h in generators:
            if h == g or not _subsumes(h, g):
                continue
            # h and g may subsume each other; the smaller key survives
            if not _subsumes(g, h) or support_key(h) < support_key(g):
                dominated = True
                break
        if not dominated:
            kept.add(g)
    return frozenset(kept)


def family_contains(F: SortFamily, J: SortTuple) -> bool:
    closure = code_closure(support(J))
    return any(g <= closure for g in F.generators)


def family_add(F: SortFamily, J: SortTuple) -> SortFamily:
    if family_contains(F, J):
        return F
    return SortFamily(F.generators | {support(J)})


def family_union(F1: SortFamily, F2: SortFamily) -> SortFamily:
    return SortFamily(F1.generators | F2.generators)


def family_includes(F1: SortFamily, F2: SortFamily) -> bool:
    """True when every tuple of ``F2`` belongs to ``F1``."""
    return all(family_contains(F1, canonical_tuple(g)) for g in F2.generators)


def maximal_family(base_names: Iterable[str]) -> SortFamily:
    return SortFamily(frozenset(frozenset({Base(name)}) for name in base_names))
