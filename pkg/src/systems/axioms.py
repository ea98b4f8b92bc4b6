"""The axiom schemes of sorted complete systems, checked on a finite system.

Each scheme becomes one report entry named ``<axiom>.<scheme>``. Existential
demands aimed at sorts the system does not carry are graded ``unsupported``.
"""
import logging
from itertools import permutations

from ..algebra.groups import normal_subgroups
from ..algebra.sorts import j_star_sub, support
from ..errors import CompleteSystemError
from ..reports import AxiomReport, CheckEntry, check, unsupported
from .complete_system import (
    CompleteSystem,
    Sort,
    class_group,
    join_sort,
    meet_sort,
    piece,
    pieces,
    projection,
    resolve_sort,
    sort_label,
)

log = logging.getLogger(__name__)


class _Demands:
    """Counts existential demands that fell outside the declared sorts."""

    def __init__(self):
        self.missing: list[str] = []

    def resolve(self, S: CompleteSystem, target: Sort | None, description: str) -> Sort | None:
        if target is None:
            self.missing.append(description)
        return target

    def entry(self, name: str, failures, detail: str = "") -> CheckEntry:
        result = check(name, failures, detail)
        if result.status == "pass" and self.missing:
            return unsupported(name, f"{len(self.missing)} demand(s) target undeclared sorts, "
                                     f"first: {self.missing[0]}")
        return result


def _order_failures(S: CompleteSystem):
    for x in S.element_ids:
        if not S.le(x, x):
            yield (x, x)
    for x in S.element_ids:
        for y in sorted(S.up[x], key=S.position.__getitem__):
            for z in sorted(S.up[y], key=S.position.__getitem__):
                if not S.le(x, z):
                    yield (x, y, z)


def _maximal_one_failures(S: CompleteSystem):
    for s in S.sorts:
        if s.k == 1 and len(S.elements_of(s)) != 1:
            yield (sort_label(s), len(S.elements_of(s)))


def _maximal_two_failures(S: CompleteSystem):
    for s in S.sorts:
        if s.k != 1:
            continue
        for x in S.elements_of(s):
            for y in S.element_ids:
                if not S.le(y, x):
                    yield (y, x)


def _extending_failures(S: CompleteSystem):
    for a in S.element_ids:
        s = S.home[a]
        for t in S.sorts:
            if t.k >= s.k and support(s.J) <= support(t.J):
                if not any(S.sim(a, b) for b in S.elements_of(t)):
                    yield (a, sort_label(t))


def _permutation_failures(S: CompleteSystem, demands: _Demands):
    for a in S.element_ids:
        s = S.home[a]
        for J in sorted(set(permutations(s.J)), key=lambda J: [str(t) for t in J]):
            target = demands.resolve(S, resolve_sort(S, s.k, J), f"m({s.k};permuted {s.J})")
            if target is not None and not any(S.sim(a, b) for b in S.elements_of(target)):
                yield (a, sort_label(Sort(s.k, J)))


def _finiteness_failures(S: CompleteSystem):
    for a in S.element_ids:
        if len(piece(S, a)) > S.home[a].k:
            yield (a, len(piece(S, a)))


def _reducing_failures(S: CompleteSystem, demands: _Demands):
    for a in S.element_ids:
        s = S.home[a]
        for n in range(len(piece(S, a)), s.k):
            target = demands.resolve(S, resolve_sort(S, n, s.J), f"m({n};{s.J}) for {a}")
            if target is not None and not any(S.sim(a, b) for b in S.elements_of(target)):
                yield (a, n)


def _intersection_failures(S: CompleteSystem, demands: _Demands):
    for x in S.element_ids:
        for y in S.element_ids:
            target = demands.resolve(S, meet_sort(S, S.home[x], S.home[y]), f"meet sort of {x}, {y}")
            if target is None:
                continue
            between = [w for w in S.elements_of(target) if S.le(w, x) and S.le(w, y)]
            for z in S.element_ids:
                if S.le(z, x) and S.le(z, y) and not any(S.le(z, w) for w in between):
                    yield (x, y, z)


def _subgroup_failures(S: CompleteSystem, demands: _Demands):
    for x in S.element_ids:
        s = S.home[x]
        target = demands.resolve(S, resolve_sort(S, s.k, j_star_sub(s.k, s.J)), f"subgroup sort of {x}")
        if target is None:
            continue
        for y in sorted(S.up[x], key=S.position.__getitem__):
            if not any(S.sim(y, w) for w in S.elements_of(target)):
                yield (x, y)


def _inf_failures(S: CompleteSystem, demands: _Demands):
    for a in S.element_ids:
        for b in S.element_ids:
            target = demands.resolve(S, meet_sort(S, S.home[a], S.home[b]), f"meet sort of {a}, {b}")
            if target is None:
                continue
            candidates = S.elements_of(target)
            lower = [y for y in candidates if S.le(y, a) and S.le(y, b)]
            if not any(all(S.le(y, x) for y in lower) for x in lower):
                yield (a, b)


def _sup_failures(S: CompleteSystem, demands: _Demands):
    for a in S.element_ids:
        for b in S.element_ids:
            target = demands.resolve(S, join_sort(S, S.home[a], S.home[b]), f"join sort of {a}, {b}")
            if target is None:
                continue
            candidates = S.elements_of(target)
            upper = [y for y in candidates if S.le(a, y) and S.le(b, y)]
            if not any(all(S.le(x, y) for y in upper) for x in upper):
                yield (a, b)


class _ClassLattice:
    """S/∼ with its order, read off class representatives."""

    def __init__(self, S: CompleteSystem):
        self.S = S
        self.reps = [min(c, key=S.position.__getitem__) for c in S.tilde.classes]
        n = len(self.reps)
        self.le = [[S.le(self.reps[i], self.reps[j]) for j in range(n)] for i in range(n)]

    def meet(self, i: int, j: int) -> int | None:
        lower = [c for c in range(len(self.reps)) if self.le[c][i] and self.le[c][j]]
        return next((c for c in lower if all(self.le[d][c] for d in lower)), None)

    def join(self, i: int, j: int) -> int | None:
        upper = [c for c in range(len(self.reps)) if self.le[i][c] and self.le[j][c]]
        return next((c for c in upper if all(self.le[c][d] for d in upper)), None)


def _lattice_failures(L: _ClassLattice):
    n = len(L.reps)
    for i in range(n):
        for j in range(n):
            if L.meet(i, j) is None or L.join(i, j) is None:
                yield (L.reps[i], L.reps[j])


def _modular_failures(L: _ClassLattice):
    n = len(L.reps)
    for a in range(n):
        for b in range(n):
            if not L.le[a][b]:
                continue
            for c in range(n):
                cb = L.meet(c, b)
                ac = L.join(a, c)
                if cb is None or ac is None:
                    continue
                left, right = L.join(a, cb), L.meet(ac, b)
                if left is None or right is None or left != right:
                    yield (L.reps[a], L.reps[b], L.reps[c])


def _group_structure_failures(S: CompleteSystem):
    for x, y, z in sorted(S.p_rel, key=lambda t: tuple(S.position[e] for e in t)):
        members = set(piece(S, x))
        if y not in members or z not in members:
            yield (x, y, z)
    for members in pieces(S):
        a = members[0]
        try:
            G = class_group(S, a)
        except CompleteSystemError as e:
            log.debug(f"Group structure fails on the class of {a}: {e}")
            yield (a,)
            continue
        if G.group.order > S.home[a].k:
            yield (a, G.group.order)


def _c_leq_failures(S: CompleteSystem):
    for x, y in sorted(S.c_rel, key=lambda t: (S.position[t[0]], S.position[t[1]])):
        if not S.le(x, y):
            yield (x, y)


def _safe_projection(S: CompleteSystem, a: str, b: str):
    try:
        return projection(S, a, b)
    except CompleteSystemError:
        return None


def _piece_pairs(S: CompleteSystem):
    reps = [p[0] for p in pieces(S)]
    for a in reps:
        for b in reps:
            if S.le(a, b):
                yield a, b


def _projection_failures(S: CompleteSystem):
    for a, b in _piece_pairs(S):
        if _safe_projection(S, a, b) is None:
            yield (a, b)


def _identity_failures(S: CompleteSystem):
    for members in pieces(S):
        a = members[0]
        if not S.le(a, a):
            continue
        pi = _safe_projection(S, a, a)
        if pi is None:
            continue
        for x in members:
            if pi(x) != x:
                yield (a, x)
                break


def _composition_failures(S: CompleteSystem):
    reps = [p[0] for p in pieces(S)]
    for a in reps:
        for b in reps:
            if not S.le(a, b):
                continue
            for c in reps:
                if not S.le(b, c) or not S.le(a, c):
                    continue
                ab, bc, ac = (_safe_projection(S, *pair) for pair in ((a, b), (b, c), (a, c)))
                if ab is None or bc is None or ac is None:
                    continue
                for x in ab.source.members:
                    if bc(ab(x)) != ac(x):
                        yield (a, b, c, x)
                        break


def _normal_subgroup_failures(S: CompleteSystem, demands: _Demands):
    for a in S.element_ids:
        s = S.home[a]
        try:
            G = class_group(S, a)
        except CompleteSystemError:
            continue
        target = demands.resolve(S, resolve_sort(S, s.k, j_star_sub(s.k, s.J)), f"normal-subgroup sort of {a}")
        if target is None:
            continue
        a_inv = G.inv(a)
        for N in normal_subgroups(G.group):
            wanted = frozenset(G.members[g] for g in N.elements)
            found = False
            for b in S.elements_of(target):
                if b not in S.c_out[a]:
                    continue
                kernel = frozenset(G.mul(a_inv, c) for c in G.members if b in S.c_out[c])
                if kernel == wanted:
                    found = True
                    break
            if not found:
                yield (a, "{" + ",".join(sorted(wanted, key=S.position.__getitem__)) + "}")


def _hidden_axiom_failures(S: CompleteSystem):
    for a in S.element_ids:
        above = sorted(S.up[a], key=S.position.__getitem__)
        kernels = []
        for b in above:
            pi = _safe_projection(S, a, b)
            if pi is not None:
                kernels.append((b, pi.kernel()))
        for i, (b, kernel_b) in enumerate(kernels):
            for c, kernel_c in kernels[i + 1:]:
                if kernel_b == kernel_c and not S.sim(b, c):
                    yield (a, b, c)


def check_axioms(S: CompleteSystem) -> AxiomReport:
    log.info(f"Checking axioms on a system of {len(S)} elements in {len(S.sorts)} sorts")
    tilde = S.tilde
    lattice = _ClassLattice(S)
    permutation_demands, reducing_demands = _Demands(), _Demands()
    intersection_demands, subgroup_demands = _Demands(), _Demands()
    inf_demands, sup_demands, normal_demands = _Demands(), _Demands(), _Demands()

    entries = [
        check("1.order", _order_failures(S)),
        check("1.maximal-elements-1", _maximal_one_failures(S)),
        check("1.maximal-elements-2", _maximal_two_failures(S)),
        check("2.equivalence", [tilde.witness] if not tilde.is_equivalence else ()),
        check("2.extending-tuples", _extending_failures(S), "over declared target sorts"),
        permutation_demands.entry("2.permutations", _permutation_failures(S, permutation_demands)),
        check("2.finiteness", _finiteness_failures(S)),
        reducing_demands.entry("2.reducing-degree", _reducing_failures(S, reducing_demands)),
        intersection_demands.entry("3.intersection", _intersection_failures(S, intersection_demands)),
        subgroup_demands.entry("3.subgroup", _subgroup_failures(S, subgroup_demands)),
        inf_demands.entry("3.inf", _inf_failures(S, inf_demands)),
        sup_demands.entry("3.sup", _sup_failures(S, sup_demands)),
        check("4.lattice", _lattice_failures(lattice), "glb and lub on S/~"),
        check("4.modular-law", _modular_failures(lattice)),
        check("5.group-structure", _group_structure_failures(S)),
        check("6.c-implies-leq", _c_leq_failures(S)),
        check("6.projections", _projection_failures(S)),
        check("6.compatible-system-1", _identity_failures(S)),
        check("6.compatible-system-2", _composition_failures(S)),
        normal_demands.entry("7.normal-subgroups", _normal_subgroup_failures(S, normal_demands),
                             "existence of the quotient element"),
        check("8.hidden-axiom", _hidden_axiom_failures(S)),
    ]
    quantities = {"elements": len(S), "sorts": len(S.sorts), "tilde_classes": len(tilde)}
    report = AxiomReport("complete-system", tuple(entries), quantities)
    log.info(f"Axiom check finished with {len(report.failures())} failing scheme(s)")
    return report
