"""Command-line entry point: ``indvar run FILE`` and ``indvar catalog``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import catalog
from .dsl import DslError, parse_spec
from .ideal import DEFAULT_STEP_LIMIT
from .report import emit_report, exit_code, run_checks


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="indvar", description="Truncated certificates for affine ind-varieties.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the check directives of a spec file")
    run.add_argument("file", help="path to a .ind file, or catalog:NAME for a shipped example")
    run.add_argument("--depth", type=_positive, help="override every check's depth")
    run.add_argument("--degbound", type=_positive, help="override every check's degree bound")
    run.add_argument("--seed", type=int, help="override every check's seed")
    run.add_argument("--steps", type=_positive, default=DEFAULT_STEP_LIMIT, help="reduction-step budget per Groebner computation")
    run.add_argument("--report", choices=("text", "structured"), default="text")
    run.add_argument("--jobs", type=_positive, default=1, help="run independent checks in this many processes")
    run.add_argument("--no-timing", action="store_true", help="omit timings so reruns are byte-identical")
    run.add_argument("-o", "--output", help="write the report here instead of stdout")
    cat = sub.add_parser("catalog", help="list shipped examples or print one")
    cat.add_argument("name", nargs="?")
    return parser


def _load(target: str) -> tuple[bytes, str]:
    if target.startswith("catalog:"):
        p = catalog.path(target.split(":", 1)[1])
        return p.read_bytes(), p.name
    return Path(target).read_bytes(), target


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "catalog":
        if args.name is None:
            for name in catalog.NAMES:
                print(f"{name:18s} {catalog.path(name)}")
        else:
            try:
                sys.stdout.write(catalog.read(args.name))
            except KeyError as exc:
                print(f"indvar: {exc.args[0]}", file=sys.stderr)
                return 2
        return 0
    try:
        data, source = _load(args.file)
    except (OSError, KeyError) as exc:
        print(f"indvar: cannot read {args.file}: {exc}", file=sys.stderr)
        return 2
    try:
        spec = parse_spec(data)
    except DslError as exc:
        print(f"{source}:{exc.line}:{exc.col}: {exc}", file=sys.stderr)
        return 2
    overrides = {"depth": args.depth, "degbound": args.degbound, "seed": args.seed}
    report = run_checks(spec, overrides, jobs=args.jobs, steps=args.steps, source=source)
    out = emit_report(report, args.report, timing=not args.no_timing)
    if args.output:
        Path(args.output).write_bytes(out)
    else:
        sys.stdout.buffer.write(out)
        sys.stdout.flush()
    return exit_code(report)


if __name__ == "__main__":
    sys.exit(main())
