"""Command-line entry point."""

from __future__ import annotations

import argparse
import sys

from .frontend import make_session, repl, run_batch, serve_streams, serve_tcp


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cocproof",
        description="Proof checker and tactic engine for the Calculus of "
        "Constructions with existential context variables.",
    )
    parser.add_argument("scripts", nargs="*", help="script files to check in order")
    parser.add_argument(
        "--fuel", type=int, default=1_000_000, metavar="N",
        help="reduction-step budget per command (default %(default)s)",
    )
    parser.add_argument(
        "--no-auto-solve", action="store_true",
        help="disable automatic first-order constraint solving",
    )
    parser.add_argument(
        "--apply-strict", action="store_true",
        help="Apply targets only the front goal instead of first-fit",
    )
    parser.add_argument(
        "--serve", nargs="?", const="stdio", metavar="PORT",
        help="run the JSON-lines session service (stdio, or TCP on PORT)",
    )
    parser.add_argument(
        "--quiet", action="store_true", help="suppress per-command displays"
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    session = make_session(
        fuel=args.fuel,
        auto_solve=not args.no_auto_solve,
        apply_strict=args.apply_strict,
    )
    if args.serve is not None:
        if args.serve == "stdio":
            serve_streams(sys.stdin, sys.stdout, session)
        else:
            serve_tcp(int(args.serve), session)
        return 0
    if not args.scripts:
        repl(session)
        return 0
    for path in args.scripts:
        status = run_batch(path, session=session, quiet=args.quiet)
        if status:
            return status
    return 0


if __name__ == "__main__":
    sys.exit(main())
