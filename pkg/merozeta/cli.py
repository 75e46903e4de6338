"""
Command-line front end for merozeta

Exit codes: 0 success, 1 violation or audit failure, 2 input error,
3 unsupported input (irrational centers, blowup limit).
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from . import __version__
from .config import DEFAULT_FORMAT, ResolveConfig, setup_logging
from .errors import BlowupLimitExceeded, MerozetaError, NonLinearDenominator, NonRationalCenter
from .germs import EXAMPLES, GermPair, example_germ, parse_germ, shift_value
from .render import (
    render_audit,
    render_conjecture,
    render_graph,
    render_poles,
    render_validate,
    render_zeta,
)
from .reports import (
    audit_report,
    conjecture_report,
    full_report,
    poles_report,
    resolve_report,
    validate_report,
    zeta_report,
)
from .resgraph import ResolutionGraph, parse_graph, serialize_graph
from .resolve import ChartState, ResolutionEngine

logger = logging.getLogger(__name__)

COMMANDS = ("resolve", "zeta", "poles", "check", "validate", "audit", "report")

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2
EXIT_UNSUPPORTED = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="merozeta",
        description="Zeta functions and the monodromy conjecture for plane meromorphic germs",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="overrides MEROZETA_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    for command in COMMANDS:
        p = sub.add_parser(command)
        source = p.add_mutually_exclusive_group(required=True)
        if command != "resolve":
            source.add_argument("--graph", type=Path, help="graph file")
        source.add_argument("--germ", type=Path, help="germ file (resolved first)")
        source.add_argument("--example", choices=sorted(EXAMPLES), help="built-in germ")
        p.add_argument("--at", default=None, help="resolve f - a instead of f")
        p.add_argument("--format", choices=("text", "structured"), default=DEFAULT_FORMAT)
        p.add_argument("--out", type=Path, default=None, help="write output here instead of stdout")
        if command in ("zeta", "report"):
            p.add_argument("--global", dest="include_global", action="store_true")
        if command in ("audit", "report"):
            p.add_argument("--d", type=int, default=None, help="C_d audit for this d only")
    return parser


def _load_germ(args) -> GermPair:
    if args.example:
        germ = example_germ(args.example)
    else:
        germ = parse_germ(args.germ.read_text())
    if args.at is not None:
        germ = shift_value(germ, args.at)
    return germ


def _load(args) -> Tuple[ResolutionGraph, Optional[ChartState]]:
    if getattr(args, "graph", None) is not None:
        if args.at is not None:
            raise ValueError("--at needs a germ: a graph carries the data of one fibre only")
        return parse_graph(args.graph.read_text()), None
    state = ResolutionEngine(ResolveConfig()).run(_load_germ(args))
    return state.graph, state


def run_command(args) -> Tuple[int, str]:
    """Run one command, returning (exit status, output text)"""
    structured = args.format == "structured"
    graph, state = _load(args)

    if args.command == "resolve":
        if structured:
            return EXIT_OK, resolve_report(state).model_dump_json(indent=2)
        return EXIT_OK, serialize_graph(graph).rstrip("\n")

    if args.command == "zeta":
        report = zeta_report(graph, include_global=args.include_global)
        return EXIT_OK, report.model_dump_json(indent=2) if structured else render_zeta(report)

    if args.command == "poles":
        report = poles_report(graph)
        return EXIT_OK, report.model_dump_json(indent=2) if structured else render_poles(report)

    if args.command == "check":
        report = conjecture_report(graph)
        status = EXIT_OK if report.certified else EXIT_VIOLATION
        return status, report.model_dump_json(indent=2) if structured else render_conjecture(report)

    if args.command == "validate":
        report = validate_report(graph)
        status = EXIT_OK if report.passed else EXIT_VIOLATION
        return status, report.model_dump_json(indent=2) if structured else render_validate(report)

    if args.command == "audit":
        report = audit_report(graph, args.d)
        status = EXIT_OK if report.passed else EXIT_VIOLATION
        return status, report.model_dump_json(indent=2) if structured else render_audit(report)

    if structured:
        report = full_report(graph, args.d, include_global=args.include_global)
        ok = report["conjecture"]["certified"] and report["validate"]["passed"]
        ok = ok and report["audit"]["passed"]
        return EXIT_OK if ok else EXIT_VIOLATION, json.dumps(report, indent=2)

    conjecture = conjecture_report(graph)
    relations = validate_report(graph)
    audit = audit_report(graph, args.d)
    ok = conjecture.certified and relations.passed and audit.passed
    sections = [
        render_graph(graph),
        render_zeta(zeta_report(graph, include_global=args.include_global)),
        render_poles(poles_report(graph)),
        render_conjecture(conjecture),
        render_validate(relations),
        render_audit(audit),
    ]
    return EXIT_OK if ok else EXIT_VIOLATION, "\n\n".join(sections)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)

    try:
        status, output = run_command(args)
    except (NonRationalCenter, BlowupLimitExceeded, NonLinearDenominator) as e:
        logger.error(f"Unsupported input: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (MerozetaError, ValueError, OSError) as e:
        logger.error(f"Input error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT

    if args.out is not None:
        args.out.write_text(output + "\n")
        logger.info(f"Wrote {args.command} output to {args.out}")
    else:
        print(output)
    return status


if __name__ == "__main__":
    sys.exit(main())
