import dataclasses
import logging
import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .algebra.fiber import fiber_triple
from .algebra.groups import validate_group
from .algebra.sorted_group import check_sorted_axioms
from .corpus import hidden_axiom_example
from .errors import GaloisDualityError, StructureFormatError
from .format_adapters import report_formats
from .format_adapters.structure_files import (
    dump_sorted_group,
    dump_system,
    load_json,
    load_structure,
    parse_group,
    parse_sorted_group,
    parse_support,
)
from .interpretation.interpret import check_interpretation, dcl_iff_primitive
from .reports import AxiomReport, check, merge_reports
from .systems.axioms import check_axioms
from .systems.complete_system import projection, tilde_classes
from .systems.duality import (
    check_alpha_beta,
    faithful_support,
    find_embedding,
    limit_of_system,
    system_of_group,
)
from .systems.ultraproduct import principal_ultraproduct

log = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_MALFORMED = 2

DEFAULT_MAX_WORKERS = 4

COMMANDS = (
    "check-system", "check-group", "dualize", "roundtrip",
    "counterexample", "interpret", "fiber", "ultraproduct",
)


@dataclass(frozen=True)
class RunConfig:
    command: str
    paths: tuple[str, ...] = ()
    direction: str | None = None  # dualize: s2g | g2s
    support: str | None = None
    fmt: str = "text"
    kcap: int | None = None
    index: int | None = None
    verbosity: int = 0


def _support(config: RunConfig, default):
    return parse_support(config.support) if config.support else default


def _check_system(config: RunConfig, path: str) -> AxiomReport:
    return check_axioms(load_structure(path, "system"))


def _check_group(config: RunConfig, path: str) -> AxiomReport:
    data = load_json(path)
    group_report = validate_group(parse_group(data))
    if not group_report.passed:
        log.warning(f"{path} holds a table that is not a group; sorting not checked")
        return merge_reports("sorted-group-file", [group_report])
    return merge_reports("sorted-group-file", [group_report, check_sorted_axioms(parse_sorted_group(data))])


def _dualize(config: RunConfig, path: str) -> AxiomReport:
    if config.direction == "s2g":
        S = load_structure(path, "system")
        axioms = dataclasses.replace(check_axioms(S), subject="system")
        if not axioms.passed:
            log.warning(f"{path} fails {len(axioms.failures())} axiom check(s); its limit is still computed")
        limit = limit_of_system(S)
        dual = check_sorted_axioms(limit.sorted_group)
        dual = dataclasses.replace(dual, subject="dual-group", quantities=dict(
            dual.quantities, structure=dump_sorted_group(limit.sorted_group), pieces=len(limit.pieces)))
        return merge_reports("dualize", [axioms, dual])
    if config.direction == "g2s":
        SG = load_structure(path, "group")
        S = system_of_group(SG, _support(config, faithful_support(SG)))
        report = check_axioms(S)
        return dataclasses.replace(report, subject="dual-system",
                                   quantities=dict(report.quantities, structure=dump_system(S)))
    raise StructureFormatError(f"dualize needs s2g or g2s, got {config.direction!r}", "direction")


def _roundtrip(config: RunConfig, path: str) -> AxiomReport:
    SG = load_structure(path, "group")
    support = _support(config, faithful_support(SG))
    return merge_reports("roundtrip", [
        check_sorted_axioms(SG),
        check_axioms(system_of_group(SG, support)),
        check_alpha_beta(SG, support),
    ])


def _interpret(config: RunConfig, path: str) -> AxiomReport:
    model = load_structure(path, "model")
    support = parse_support(config.support) if config.support else None
    return merge_reports("interpret", [check_interpretation(model, support), dcl_iff_primitive(model)])


def _fiber(config: RunConfig, path: str) -> AxiomReport:
    maps = load_structure(path, "fiber")
    product = fiber_triple(**maps)
    group_report = validate_group(product.as_group()) if product.is_subgroup() else None
    entries = [check("fiber.subgroup", () if product.is_subgroup() else [("not closed",)])]
    if group_report is not None:
        entries.extend(dataclasses.replace(e, name=f"fiber.group.{e.name}") for e in group_report.entries)
    factors = [maps["pAB_A"].source, maps["pAC_A"].source, maps["pBC_B"].source]
    quantities = {"order": product.order, "product_order": factors[0].order * factors[1].order * factors[2].order}
    return AxiomReport("fiber-triple", tuple(entries), quantities)


def _ultraproduct(config: RunConfig, path: str) -> AxiomReport:
    if config.index is None:
        raise StructureFormatError("ultraproduct needs --index", "--index")
    factors = load_structure(path, "factors")
    support = parse_support(config.support) if config.support else None
    return principal_ultraproduct(factors, config.index, support)


def counterexample_report(kcap: int | None = None) -> AxiomReport:
    """Axioms 1-7 must hold and 8 must fail; the dual system has fewer classes
    and admits no embedding of the example."""
    S = hidden_axiom_example(kcap)
    report = check_axioms(S)
    limit = limit_of_system(S)
    dual = system_of_group(limit.sorted_group, S.sorts)
    entries = report.entries + (
        check("dual.limit-order", () if limit.group.order == 4 and limit.group.is_cyclic()
              else [(f"order {limit.group.order}",)], "G(S) is cyclic of order 4"),
        check("dual.no-embedding", () if find_embedding(S, dual) is None else [("embedding found",)]),
    )
    quantities = dict(report.quantities)
    hidden = report.entry("8.hidden-axiom")
    if hidden.witnesses:
        a, b, c = hidden.witnesses[0]
        common = projection(S, a, b).kernel() & projection(S, a, c).kernel()
        quantities["common_kernel"] = sorted(common, key=S.position.__getitem__)
    quantities.update({
        "tilde_classes": len(tilde_classes(S)),
        "dual_tilde_classes": len(tilde_classes(dual)),
        "limit_order": limit.group.order,
    })
    return AxiomReport("counterexample", entries, quantities, frozenset({"8.hidden-axiom"}))


_PER_FILE: dict[str, Callable[[RunConfig, str], AxiomReport]] = {
    "check-system": _check_system,
    "check-group": _check_group,
    "dualize": _dualize,
    "roundtrip": _roundtrip,
    "interpret": _interpret,
    "fiber": _fiber,
    "ultraproduct": _ultraproduct,
}


def _max_workers() -> int:
    return int(os.getenv("GDL_MAX_WORKERS", str(DEFAULT_MAX_WORKERS)))


def _run_files(config: RunConfig, handler) -> AxiomReport:
    paths = list(config.paths)
    if not paths:
        raise StructureFormatError(f"{config.command} needs at least one file", "paths")
    for path in paths:
        if not Path(path).is_file():
            raise FileNotFoundError(path)
    if len(paths) == 1:
        return handler(config, paths[0])

    reports: dict[str, AxiomReport] = {}
    with ThreadPoolExecutor(max_workers=_max_workers()) as executor:
        future_to_path = {executor.submit(handler, config, path): path for path in paths}
        for future in as_completed(future_to_path):
            path = future_to_path[future]
            reports[path] = dataclasses.replace(future.result(), subject=path)
    return merge_reports(config.command, [reports[path] for path in paths])


def build_report(config: RunConfig) -> AxiomReport:
    if config.command == "counterexample":
        return counterexample_report(config.kcap)
    if config.command not in _PER_FILE:
        raise StructureFormatError(f"unknown command '{config.command}'", "command")
    return _run_files(config, _PER_FILE[config.command])


def run(config: RunConfig) -> tuple[int, str]:
    """Runs one command; returns the exit code and the rendered report."""
    log.info(f"--- Running '{config.command}' on {len(config.paths)} file(s) ---")
    try:
        report = build_report(config)
    except FileNotFoundError as e:
        log.error(f"Input file not found: {e}")
        return EXIT_MALFORMED, f"error: file not found: {e}\n"
    except StructureFormatError as e:
        log.error(f"Malformed input: {e}")
        return EXIT_MALFORMED, f"error: {e}\n"
    except (GaloisDualityError, ValueError) as e:
        log.error(f"Input rejected: {e}")
        return EXIT_MALFORMED, f"error: {e}\n"

    code = EXIT_PASS if report.passed else EXIT_FAIL
    if code == EXIT_FAIL:
        log.warning(f"{len(report.failures())} check(s) failed for '{config.command}'")
    return code, report_formats.render(report, config.fmt)


if __name__ == "__main__":
    from dotenv import load_dotenv

    logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - [%(name)s] - %(message)s')
    load_dotenv()

    log.info("--- Running manager.py test ---")
    code, output = run(RunConfig("counterexample"))
    print(output)
    print(f"counterexample exited with {code}")

    corpus_files = sorted(str(p) for p in Path("corpus").glob("*.group.json"))
    if corpus_files:
        code, output = run(RunConfig("roundtrip", tuple(corpus_files)))
        print(output)
        print(f"roundtrip over {len(corpus_files)} file(s) exited with {code}")
    else:
        log.error("No group files found in 'corpus'. Run from the repository root.")
