"""Command line front end.

Exit codes: 0 FINITE (or success), 1 INFINITE (or NOT FOUND for ``derive``),
2 input or usage error, 3 search budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .engine import BudgetExhausted, NotFound, decide_finiteness, find_derivation
from .export import export_derivation, to_dot, verdict_to_dict
from .itypes import TypeFormatError, parse_full_type, rho
from .oracle import (DEFAULT_DEPTH_FUEL, DEFAULT_STEP_FUEL, bohm_expand, growth_report,
                     language_upto, render_partial, report_lines)
from .syntax import scheme_to_term
from .terms import TermError
from .unfold import complexity
from .validation import check_scheme

log = logging.getLogger("finlang")

EXIT_FINITE, EXIT_INFINITE, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if n <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {n}")
    return n


def _schedule(text: str) -> list[int]:
    return [_positive(s) for s in text.split(",") if s.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="scheme file, or - for stdin")
    common.add_argument("--format", choices=("text", "json", "dot"), default="text")
    common.add_argument("--budget", type=_positive, default=None,
                        help="cap on saturation work (default: unbounded)")
    common.add_argument("--threads", type=_positive, default=1)
    common.add_argument("--max-size", type=_positive, default=10)
    common.add_argument("--depth-fuel", type=_positive, default=None)
    common.add_argument("--step-fuel", type=_positive, default=DEFAULT_STEP_FUEL)
    common.add_argument("--min-counter", type=int, default=0)
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = argparse.ArgumentParser(prog="finlang",
                                description="Finiteness of tree languages of higher-order schemes.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="decide finiteness")
    d = sub.add_parser("derive", parents=[common], help="search for a type derivation")
    d.add_argument("--target", default=None,
                   help="full type such as '(2,{},{},o)'; defaults to the root type of the term")
    d.add_argument("--nonterminal", default=None, help="derive for this nonterminal instead of start")
    sub.add_parser("enumerate", parents=[common], help="list small trees of the language")
    sub.add_parser("bohm", parents=[common], help="print a Böhm tree prefix")
    g = sub.add_parser("growth", parents=[common], help="largest tree found per size bound")
    g.add_argument("--schedule", type=_schedule, default=[4, 10, 20],
                   help="comma separated size bounds (default 4,10,20)")
    return p


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False)


def cmd_check(args, term) -> int:
    t0 = time.perf_counter()
    v = decide_finiteness(term, args.budget, args.threads)
    elapsed = time.perf_counter() - t0
    code = EXIT_INFINITE if v.infinite else EXIT_FINITE
    if args.format == "json":
        _emit(_dumps(verdict_to_dict(v)))
        return code
    if args.format == "dot":
        if v.witness is not None:
            _emit(to_dot(v.witness.derivation, "witness"))
        elif v.max_counter is not None:
            d = find_derivation(term, rho(v.m), v.max_counter, args.budget, args.threads)
            _emit(to_dot(d, "maximal"))
        else:
            _emit('digraph "empty" {\n  label="no derivation of the root type";\n}')
        return code
    _emit(v.kind)
    _emit(f"complexity: {v.m}")
    if v.witness is not None:
        w = v.witness
        section = w.derivation.at(w.ancestor).conclusion.skeleton
        _emit(f"witness: counter {w.derivation.counter}, pumpable section gains {w.gain} "
              f"between depth {len(w.ancestor)} and {len(w.descendant)}")
        _emit(f"  repeated judgment: {section}")
    else:
        mx = "none" if v.max_counter is None else v.max_counter
        bound = "unknown" if v.size_bound == -1 else v.size_bound
        _emit(f"max counter: {mx}, tree size bound: {bound}")
    if args.verbose:
        _emit("stats: " + ", ".join(f"{k} {val}" for k, val in sorted(v.stats.items())))
    _emit(f"time: {elapsed:.3f}s")
    return code


def cmd_derive(args, term) -> int:
    if args.target is None:
        target = rho(complexity(term))
    else:
        target = parse_full_type(args.target)
    try:
        d = find_derivation(term, target, args.min_counter, args.budget, args.threads)
    except NotFound:
        _emit("NOT FOUND")
        return EXIT_INFINITE
    _emit(export_derivation(d, args.format))
    return EXIT_FINITE


def cmd_enumerate(args, term) -> int:
    depth = args.depth_fuel or max(DEFAULT_DEPTH_FUEL, 2 * args.max_size)
    en = language_upto(term, args.max_size, depth, args.step_fuel)
    if args.format == "json":
        _emit(_dumps({"complete": en.complete, "max_size": args.max_size,
                      "sizes": en.sizes, "trees": [t.sexpr() for t in en.trees]}))
    else:
        for t in en.trees:
            _emit(t.sexpr())
        state = "complete" if en.complete else "possibly incomplete (fuel ran out)"
        print(f"# {len(en.trees)} trees up to size {args.max_size}, {state}", file=sys.stderr)
    return EXIT_FINITE


def cmd_bohm(args, term) -> int:
    tree = bohm_expand(term, args.depth_fuel or 8, args.step_fuel)
    text = render_partial(tree)
    _emit(_dumps({"tree": text}) if args.format == "json" else text)
    return EXIT_FINITE


def cmd_growth(args, term) -> int:
    sched = [(n, args.depth_fuel, args.step_fuel) if args.depth_fuel else (n, max(DEFAULT_DEPTH_FUEL, 2 * n), args.step_fuel)
             for n in args.schedule]
    rows = growth_report(term, sched)
    if args.format == "json":
        for line in report_lines(rows):
            _emit(line)
    else:
        for r in rows:
            _emit(f"max size {r['max_size']:>4}: largest {r['largest']:>4}, found {r['found']}, "
                  f"{'complete' if r['complete'] else 'incomplete'}")
        _emit("strictly increasing" if rows and rows[-1]["increasing"] else "not strictly increasing")
    return EXIT_FINITE


COMMANDS = {"check": cmd_check, "derive": cmd_derive, "enumerate": cmd_enumerate,
            "bohm": cmd_bohm, "growth": cmd_growth}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose > 1 else
                        logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.format == "dot" and args.command not in ("check", "derive"):
        parser.error(f"--format dot is not available for {args.command}")
    if args.command == "derive" and args.target is not None:
        try:
            parse_full_type(args.target)
        except TypeFormatError as e:
            parser.error(f"bad --target: {e}")
    try:
        g = check_scheme(_read(args.input))
        nonterminal = getattr(args, "nonterminal", None)
        term = scheme_to_term(g, nonterminal)
        log.info("%s: %d rules, term of complexity %d", args.input, len(g.rules), complexity(term))
    except (OSError, TermError, ValueError) as e:
        print(f"finlang: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return COMMANDS[args.command](args, term)
    except BudgetExhausted as e:
        print(f"finlang: search budget exhausted: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (TermError, ValueError) as e:
        print(f"finlang: error: {e}", file=sys.stderr)
        return EXIT_INPUT
