"""JSON structure files: groups, sorted groups, complete systems, action
models, fiber triples and ultraproduct factor lists.

Loading failures raise StructureFormatError carrying ``path:line:col`` for
syntax errors and a ``$.a[3].b`` path for schema errors.
"""
import json
import logging
from pathlib import Path
from typing import Any

import rfc8785

from ..algebra.groups import FiniteGroup, GroupMap, make_group_map, validate_group
from ..algebra.sorted_group import SortedFiniteGroup, make_sorted_group, maximal_sorting, saturate_sorting
from ..algebra.sorts import Base, SetCode, SortFamily, canonical_tuple, make_tuple
from ..errors import GaloisDualityError, StructureFormatError
from ..interpretation.action_model import GaloisActionModel, OrbitBlock, make_model
from ..systems.complete_system import CompleteSystem, Resolution, Sort, make_system

log = logging.getLogger(__name__)

FIBER_MAPS = ("pAB_A", "pAB_B", "pAC_A", "pAC_C", "pBC_B", "pBC_C")


def load_json(path: str | Path) -> Any:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise StructureFormatError(e.msg, f"{path}:{e.lineno}:{e.colno}") from e


def canonical_json(data: Any) -> str:
    return rfc8785.dumps(data).decode("utf-8")


def _require(obj: Any, kind: type | tuple, loc: str) -> Any:
    if not isinstance(obj, kind) or isinstance(obj, bool) and kind is int:
        names = kind.__name__ if isinstance(kind, type) else " or ".join(k.__name__ for k in kind)
        raise StructureFormatError(f"expected {names}, got {type(obj).__name__}", loc)
    return obj


def _field(obj: dict, name: str, loc: str) -> Any:
    if name not in obj:
        raise StructureFormatError(f"missing field '{name}'", loc)
    return obj[name]


def _wrap(loc: str, build, *args):
    try:
        return build(*args)
    except GaloisDualityError as e:
        if isinstance(e, StructureFormatError):
            raise
        raise StructureFormatError(str(e), loc) from e


def parse_term(obj: Any, loc: str = "$"):
    if isinstance(obj, str):
        return _wrap(loc, Base, obj)
    obj = _require(obj, dict, loc)
    n = _require(_field(obj, "set", loc), int, f"{loc}.set")
    inner = parse_tuple(_field(obj, "of", loc), f"{loc}.of")
    return _wrap(loc, SetCode, n, inner)


def parse_tuple(obj: Any, loc: str = "$") -> tuple:
    items = _require(obj, list, loc)
    terms = [parse_term(t, f"{loc}[{i}]") for i, t in enumerate(items)]
    return _wrap(loc, make_tuple, terms)


def dump_term(term) -> Any:
    if isinstance(term, Base):
        return term.name
    return {"set": term.n, "of": dump_tuple(term.inner)}


def dump_tuple(terms) -> list:
    return [dump_term(t) for t in terms]


def parse_group(obj: Any, loc: str = "$") -> FiniteGroup:
    obj = _require(obj, dict, loc)
    order = _require(_field(obj, "order", loc), int, f"{loc}.order")
    cayley = _require(_field(obj, "cayley", loc), list, f"{loc}.cayley")
    if len(cayley) != order:
        raise StructureFormatError(f"order {order} but {len(cayley)} Cayley rows", f"{loc}.cayley")
    for i, row in enumerate(cayley):
        for j, x in enumerate(_require(row, list, f"{loc}.cayley[{i}]")):
            _require(x, int, f"{loc}.cayley[{i}][{j}]")
    return _wrap(f"{loc}.cayley", FiniteGroup, cayley)


def parse_valid_group(obj: Any, loc: str = "$") -> FiniteGroup:
    """parse_group, then the group laws; a failing law is a schema error here."""
    G = parse_group(obj, loc)
    report = validate_group(G)
    if not report.passed:
        failure = report.failures()[0]
        raise StructureFormatError(f"not a group: {failure.name} fails at {failure.witnesses[0]}", f"{loc}.cayley")
    return G


def dump_group(G: FiniteGroup) -> dict:
    return {"order": G.order, "cayley": [list(row) for row in G.cayley]}


def parse_sorted_group(obj: Any, loc: str = "$") -> SortedFiniteGroup:
    """Group block plus an optional "sorting"; without one the maximal
    one-sort sorting is used."""
    G = parse_valid_group(obj, loc)
    if "sorting" not in obj:
        return saturate_sorting(maximal_sorting(G))
    families = {}
    for i, item in enumerate(_require(obj["sorting"], list, f"{loc}.sorting")):
        at = f"{loc}.sorting[{i}]"
        item = _require(item, dict, at)
        subgroup = _require(_field(item, "subgroup", at), list, f"{at}.subgroup")
        for j, x in enumerate(subgroup):
            _require(x, int, f"{at}.subgroup[{j}]")
        generators = _require(_field(item, "generators", at), list, f"{at}.generators")
        supports = [frozenset(parse_tuple(g, f"{at}.generators[{j}]")) for j, g in enumerate(generators)]
        families[frozenset(subgroup)] = _wrap(at, SortFamily, frozenset(supports))
    return _wrap(f"{loc}.sorting", make_sorted_group, G, families)


def dump_sorted_group(SG: SortedFiniteGroup) -> dict:
    data = dump_group(SG.group)
    data["sorting"] = [
        {"subgroup": sorted(N.elements), "generators": [dump_tuple(canonical_tuple(g)) for g in F.ordered()]}
        for N, F in SG.items()
    ]
    return data


def parse_sort(obj: Any, loc: str = "$") -> Sort:
    obj = _require(obj, dict, loc)
    k = _require(_field(obj, "k", loc), int, f"{loc}.k")
    J = parse_tuple(_field(obj, "J", loc), f"{loc}.J")
    return _wrap(loc, Sort, k, J)


def dump_sort(s: Sort) -> dict:
    return {"k": s.k, "J": dump_tuple(s.J)}


def _id_rows(obj: Any, width: int, loc: str) -> list[tuple]:
    rows = []
    for i, row in enumerate(_require(obj, list, loc)):
        row = _require(row, list, f"{loc}[{i}]")
        if len(row) != width:
            raise StructureFormatError(f"expected {width} ids, got {len(row)}", f"{loc}[{i}]")
        rows.append(tuple(_require(x, str, f"{loc}[{i}][{j}]") for j, x in enumerate(row)))
    return rows


def parse_system(obj: Any, loc: str = "$") -> CompleteSystem:
    obj = _require(obj, dict, loc)
    sorts = [parse_sort(s, f"{loc}.sorts[{i}]") for i, s in enumerate(_require(_field(obj, "sorts", loc), list, f"{loc}.sorts"))]
    elements = []
    for i, item in enumerate(_require(_field(obj, "elements", loc), list, f"{loc}.elements")):
        at = f"{loc}.elements[{i}]"
        item = _require(item, dict, at)
        elements.append((_require(_field(item, "id", at), str, f"{at}.id"), parse_sort(_field(item, "sort", at), f"{at}.sort")))
    leq = _id_rows(obj.get("leq", []), 2, f"{loc}.leq")
    c_rel = _id_rows(obj.get("c", []), 2, f"{loc}.c")
    p_rel = _id_rows(obj.get("p", []), 3, f"{loc}.p")
    resolution = None
    if "resolution" in obj:
        block = _require(obj["resolution"], dict, f"{loc}.resolution")
        tail = block.get("tail")
        if tail is not None:
            _require(tail, int, f"{loc}.resolution.tail")
        resolution = Resolution(tail=tail, collapse=bool(block.get("collapse", False)))
    return _wrap(loc, make_system, sorts, elements, leq, c_rel, p_rel, resolution)


def dump_system(S: CompleteSystem) -> dict:
    data = {
        "sorts": [dump_sort(s) for s in S.sorts],
        "elements": [{"id": x, "sort": dump_sort(s)} for x, s in S.homes],
        "leq": sorted([list(pair) for pair in S.leq]),
        "c": sorted([list(pair) for pair in S.c_rel]),
        "p": sorted([list(triple) for triple in S.p_rel]),
    }
    if S.resolution.tail is not None or S.resolution.collapse:
        data["resolution"] = {"tail": S.resolution.tail, "collapse": S.resolution.collapse}
    return data


def parse_model(obj: Any, loc: str = "$") -> GaloisActionModel:
    obj = _require(obj, dict, loc)
    G = parse_valid_group(_field(obj, "group", loc), f"{loc}.group")
    blocks = []
    for i, item in enumerate(_require(_field(obj, "orbits", loc), list, f"{loc}.orbits")):
        at = f"{loc}.orbits[{i}]"
        item = _require(item, dict, at)
        sort = parse_term(_field(item, "sort", at), f"{at}.sort")
        size = _require(_field(item, "size", at), int, f"{at}.size")
        action = _require(_field(item, "action", at), list, f"{at}.action")
        blocks.append(_wrap(at, OrbitBlock, sort, size, action))
    return _wrap(loc, make_model, G, blocks)


def dump_model(model: GaloisActionModel) -> dict:
    return {
        "group": dump_group(model.gamma),
        "orbits": [
            {"sort": dump_term(b.sort), "size": b.size, "action": [list(row) for row in b.action]}
            for b in model.orbits
        ],
    }


def parse_group_map(obj: Any, groups: dict[str, FiniteGroup], loc: str = "$") -> GroupMap:
    obj = _require(obj, dict, loc)
    source = _require(_field(obj, "source", loc), str, f"{loc}.source")
    target = _require(_field(obj, "target", loc), str, f"{loc}.target")
    for name, at in ((source, "source"), (target, "target")):
        if name not in groups:
            raise StructureFormatError(f"unknown group '{name}'", f"{loc}.{at}")
    images = _require(_field(obj, "images", loc), list, f"{loc}.images")
    return _wrap(f"{loc}.images", make_group_map, groups[source], groups[target], images)


def parse_fiber(obj: Any, loc: str = "$") -> dict[str, GroupMap]:
    """{"groups": {name: group}, "maps": {"pAB_A": {source, target, images}, ...}}"""
    obj = _require(obj, dict, loc)
    raw_groups = _require(_field(obj, "groups", loc), dict, f"{loc}.groups")
    groups = {name: parse_valid_group(g, f"{loc}.groups.{name}") for name, g in raw_groups.items()}
    raw_maps = _require(_field(obj, "maps", loc), dict, f"{loc}.maps")
    return {name: parse_group_map(_field(raw_maps, name, f"{loc}.maps"), groups, f"{loc}.maps.{name}")
            for name in FIBER_MAPS}


def parse_factors(obj: Any, loc: str = "$") -> list[SortedFiniteGroup]:
    obj = _require(obj, dict, loc)
    factors = _require(_field(obj, "factors", loc), list, f"{loc}.factors")
    if not factors:
        raise StructureFormatError("at least one factor is needed", f"{loc}.factors")
    return [parse_sorted_group(f, f"{loc}.factors[{i}]") for i, f in enumerate(factors)]


def parse_support(text: str) -> list[Sort]:
    """``"k:J;k:J"`` with J a comma-separated list of base sort names."""
    result = []
    for i, part in enumerate(p for p in text.split(";") if p.strip()):
        k, sep, names = part.partition(":")
        if not sep or not k.strip().isdigit():
            raise StructureFormatError(f"expected 'k:J', got '{part}'", f"--support[{i}]")
        J = [name.strip() for name in names.split(",")]
        result.append(_wrap(f"--support[{i}]", Sort, int(k), J))
    if not result:
        raise StructureFormatError("empty support", "--support")
    return result


_PARSERS = {
    "table": parse_group,
    "group": parse_sorted_group,
    "system": parse_system,
    "model": parse_model,
    "fiber": parse_fiber,
    "factors": parse_factors,
}


def load_structure(path: str | Path, kind: str):
    data = load_json(path)
    log.debug(f"Parsing {path} as {kind}")
    return _PARSERS[kind](data)
