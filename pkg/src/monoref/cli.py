"""Command-line entry point.

Subcommands: `check` (typecheck and print the type), `compile` (print the
lowered IR), `run` (execute under either semantics), and `diff` (run both
semantics and report agreement).

Exit codes: 0 success or a value; 1 cast error; 2 stuck; 3 timeout;
4 type error; 5 parse error or unreadable input. `--trace` streams one
tab-separated record per machine transition to standard error. The
default fuel is 1000000 and can be set with MONOREF_FUEL or --fuel.
"""

from __future__ import annotations

import argparse
import os
import sys

from .guarded import run_g
from .lang import (
    OCastError,
    OCon,
    OPair,
    OStuck,
    OTimeOut,
    IntC,
    Observable,
)
from .machine import DEFAULT_FUEL, format_trace, run
from .surface import (
    ParseError,
    elaborate,
    parse_surface,
    stmt_to_sexpr,
    ty_to_sexpr,
    typecheck_surface,
)
from .typecheck import TypeCheckError

EXIT_OK = 0
EXIT_CAST_ERROR = 1
EXIT_STUCK = 2
EXIT_TIMEOUT = 3
EXIT_TYPE_ERROR = 4
EXIT_PARSE_ERROR = 5


def render_observable(obs: Observable) -> str:
    """Canonical rendering; injective up to address/function/injection opacity."""
    if isinstance(obs, OCon):
        if isinstance(obs.const, IntC):
            return str(obs.const.value)
        return "#t" if obs.const.value else "#f"
    if isinstance(obs, OPair):
        return f"(pair {render_observable(obs.fst)} {render_observable(obs.snd)})"
    if isinstance(obs, OCastError):
        return "error: cast"
    if isinstance(obs, OStuck):
        return "error: stuck"
    if isinstance(obs, OTimeOut):
        return "timeout"
    name = type(obs).__name__
    return {"OFun": "#fun", "OAddr": "#addr", "OInj": "#inj"}[name]


def observable_exit_code(obs: Observable) -> int:
    if isinstance(obs, OCastError):
        return EXIT_CAST_ERROR
    if isinstance(obs, OStuck):
        return EXIT_STUCK
    if isinstance(obs, OTimeOut):
        return EXIT_TIMEOUT
    return EXIT_OK


def _load(path: str):
    """Parse and typecheck a source file; returns (surface AST, type)."""
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE_ERROR) from None
    try:
        ast = parse_surface(text)
    except ParseError as exc:
        print(f"{path}:{exc}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE_ERROR) from None
    try:
        ty = typecheck_surface((), ast)
    except TypeCheckError as exc:
        print(f"{path}: type error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_TYPE_ERROR) from None
    return ast, ty


def _default_fuel() -> int:
    raw = os.environ.get("MONOREF_FUEL")
    if raw is None:
        return DEFAULT_FUEL
    try:
        fuel = int(raw)
    except ValueError:
        print(f"error: MONOREF_FUEL={raw!r} is not an integer", file=sys.stderr)
        raise SystemExit(EXIT_PARSE_ERROR) from None
    return fuel


def cmd_check(args) -> int:
    _, ty = _load(args.file)
    print(ty_to_sexpr(ty))
    return EXIT_OK


def cmd_compile(args) -> int:
    ast, _ = _load(args.file)
    print(stmt_to_sexpr(elaborate(ast)))
    return EXIT_OK


def _trace_to_stderr(record) -> None:
    print(format_trace(record), file=sys.stderr)


def cmd_run(args) -> int:
    ast, _ = _load(args.file)
    program = elaborate(ast)
    trace = _trace_to_stderr if args.trace else None
    if args.semantics == "guarded":
        obs = run_g(program, fuel=args.fuel, trace=trace)
    else:
        obs = run(program, fuel=args.fuel, trace=trace)
    print(render_observable(obs))
    return observable_exit_code(obs)


def cmd_diff(args) -> int:
    ast, _ = _load(args.file)
    program = elaborate(ast)
    mono = run(program, fuel=args.fuel)
    guard = run_g(program, fuel=args.fuel)
    print(f"monotonic: {render_observable(mono)}")
    print(f"guarded: {render_observable(guard)}")
    print("AGREE" if mono == guard else "DIFFER")
    return EXIT_OK


def _positive_int(raw: str) -> int:
    value = int(raw)
    if value < 1:
        raise argparse.ArgumentTypeError("fuel must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="monoref",
        description="Typecheck, compile, and run gradually typed programs "
                    "under monotonic or guarded reference semantics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="typecheck a program")
    p_check.add_argument("file")
    p_check.set_defaults(handler=cmd_check)

    p_compile = sub.add_parser("compile", help="print the lowered IR")
    p_compile.add_argument("file")
    p_compile.set_defaults(handler=cmd_compile)

    p_run = sub.add_parser("run", help="execute a program")
    p_run.add_argument("file")
    p_run.add_argument("--semantics", choices=("monotonic", "guarded"),
                       default="monotonic")
    p_run.add_argument("--fuel", type=_positive_int, default=None)
    p_run.add_argument("--trace", action="store_true")
    p_run.set_defaults(handler=cmd_run)

    p_diff = sub.add_parser("diff", help="run both semantics and compare")
    p_diff.add_argument("file")
    p_diff.add_argument("--fuel", type=_positive_int, default=None)
    p_diff.set_defaults(handler=cmd_diff)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "fuel", None) is None and hasattr(args, "fuel"):
            args.fuel = _default_fuel()
        return args.handler(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_PARSE_ERROR


if __name__ == "__main__":
    sys.exit(main())
