import argparse
import logging
import os
import sys

from dotenv import load_dotenv

from src import manager

log = logging.getLogger(__name__)


def _setup_logging(verbosity: int) -> None:
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    if "K_SERVICE" in os.environ:
        import google.cloud.logging
        google.cloud.logging.Client().setup_logging(log_level=level)
    else:
        logging.basicConfig(
            level=level,
            format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            stream=sys.stderr,
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="galois-duality",
        description="Check sorted finite groups and sorted complete systems and the duality between them.",
    )
    parser.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
    parser.add_argument("--support", help='declared sorts as "k:J;k:J", J a comma-separated list of sort names')
    parser.add_argument("--kcap", type=int, help="k-cap of the hidden-axiom example (overrides GDL_KCAP)")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    commands = parser.add_subparsers(dest="command", required=True)

    for name in ("check-system", "check-group", "roundtrip", "interpret", "fiber"):
        commands.add_parser(name).add_argument("paths", nargs="+")
    dualize = commands.add_parser("dualize")
    dualize.add_argument("direction", choices=("s2g", "g2s"))
    dualize.add_argument("paths", nargs="+")
    ultraproduct = commands.add_parser("ultraproduct")
    ultraproduct.add_argument("paths", nargs="+")
    ultraproduct.add_argument("--index", type=int, required=True)
    commands.add_parser("counterexample")
    return parser


def main(argv: list[str] | None = None) -> int:
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return manager.EXIT_MALFORMED if e.code else manager.EXIT_PASS
    _setup_logging(args.verbose)

    config = manager.RunConfig(
        command=args.command,
        paths=tuple(getattr(args, "paths", ())),
        direction=getattr(args, "direction", None),
        support=args.support,
        fmt=args.fmt,
        kcap=args.kcap,
        index=getattr(args, "index", None),
        verbosity=args.verbose,
    )
    try:
        code, output = manager.run(config)
    except Exception as e:
        log.critical(f"An unhandled exception occurred in the manager: {e}", exc_info=True)
        return manager.EXIT_MALFORMED
    sys.stdout.write(output)
    return code


if __name__ == "__main__":
    sys.exit(main())
