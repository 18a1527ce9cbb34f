"""Command-line interface.

Exit codes: 0 Sat (or success), 1 Unsat (or a failed check), 2 unknown
within bounds or a resource limit, 3 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import deadline
from . import formula as fm
from . import generate as gen
from . import skolem
from .automata import tree as ta
from .automata import word as wa
from .errors import BqltlError, FormulaSyntaxError, ResourceExceeded
from .skolem import SAT, UNSAT
from .solver import SEMANTICS, Budgets, close_formula, solve, validate_witness

EXIT_SAT, EXIT_UNSAT, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {v}")
    return v


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _read_formula(args) -> fm.QuantifiedFormula:
    if (args.formula is None) == (args.file is None):
        raise UsageError("give exactly one of an inline formula or --file")
    text = args.formula if args.formula is not None else Path(args.file).read_text()
    return fm.parse(text)


def _budgets(args) -> Budgets:
    return Budgets(state_cap=args.state_cap, tree_state_cap=args.tree_state_cap, time_cap=args.timeout)


def _add_input(p):
    p.add_argument("formula", nargs="?", help="inline formula, e.g. 'A{x} E{y} G (y <-> x)'")
    p.add_argument("--file", help="read the formula from a file")


def _add_budgets(p):
    p.add_argument("--state-cap", type=_positive_int, default=wa.DEFAULT_STATE_CAP)
    p.add_argument("--tree-state-cap", type=_positive_int, default=ta.DEFAULT_TREE_STATE_CAP,
                   help="state cap for alternation removal")
    p.add_argument("--timeout", type=_positive_float, default=None, help="wall-clock cap in seconds")


def _emit_witness(w, fmt, out):
    if w is None:
        return
    if fmt == "dot":
        out.write(w.to_dot() if hasattr(w, "to_dot") else json.dumps(w.to_json()))
    else:
        out.write(json.dumps(w.to_json(), indent=2, sort_keys=True))
    out.write("\n")


def cmd_check(args, out, err) -> int:
    f = _read_formula(args)
    v = solve(f, args.sem, _budgets(args))
    if args.format == "json":
        out.write(json.dumps(v.to_json(), indent=2, sort_keys=True) + "\n")
    else:
        # with a witness requested, stdout carries only the witness so it can
        # be fed back to "validate"
        status = err if args.witness else out
        status.write(f"{v.status} ({v.semantics})\n")
        if v.note:
            status.write(f"note: {v.note}\n")
        if args.witness:
            _emit_witness(v.witness, args.witness, out)
    return EXIT_SAT if v.status == SAT else EXIT_UNSAT if v.status == UNSAT else EXIT_UNKNOWN


def cmd_oracle(args, out, err) -> int:
    f = close_formula(_read_formula(args))
    mode = skolem.BEHAVIORAL if args.mode == "behavioral" else skolem.WEAK_BEHAVIORAL
    with deadline.time_limit(args.timeout):
        r = skolem.enumerate_oracle(f, mode, args.memory, args.max_candidates)
    err.write(f"{r.status} (oracle, {args.mode}, memory <= {args.memory}, {r.candidates} candidates)\n")
    if r.status == SAT:
        _emit_witness(r.witness, args.witness or "json", out)
        return EXIT_SAT
    return EXIT_UNKNOWN


def _vars(text):
    return frozenset(v.strip() for v in text.split(",") if v.strip())


def cmd_gen(args, out, err) -> int:
    m = fm.parse_matrix(args.matrix)
    if args.kind == "conformant":
        f = gen.conformant(m, _vars(args.y), _vars(args.x))
    elif args.kind == "fond":
        f = gen.fond(m, _vars(args.x), _vars(args.y))
    else:
        if args.x2 is None:
            raise UsageError("pond needs --x2 for the hidden environment variables")
        f = gen.pond(m, _vars(args.x), _vars(args.y), _vars(args.x2))
    text = fm.to_text(f) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        out.write(text)
    return EXIT_SAT


def cmd_suite(args, out, err) -> int:
    from .suite import PROPERTIES, run_suite
    props = [p.strip() for p in args.props.split(",")] if args.props else list(PROPERTIES)
    bad = set(props) - set(PROPERTIES)
    if bad:
        raise UsageError(f"unknown properties {sorted(bad)}; choose from {', '.join(PROPERTIES)}")
    report = run_suite(args.seed, args.n, props, _budgets(args), args.max_candidates)
    out.write(report.to_json() + "\n")
    if args.report:
        from .report import write_report
        write_report(report, args.report)
    return EXIT_SAT if report.ok else EXIT_UNSAT


def cmd_validate(args, out, err) -> int:
    data = json.loads(Path(args.witness).read_text())
    f = fm.parse(args.formula_text)
    ok = validate_witness(f, data, args.sem, _budgets(args))
    out.write("valid\n" if ok else "invalid\n")
    return EXIT_SAT if ok else EXIT_UNSAT


def cmd_export(args, out, err) -> int:
    f = close_formula(_read_formula(args))
    cap = args.state_cap
    nbw = wa.trim(wa.ltl_to_nbw(f.matrix, f.all_vars, cap))
    if args.kind == "nbw":
        a = nbw
    elif args.kind == "dpw":
        a = wa.nbw_to_dpw(nbw, cap)
    else:
        if [b.kind for b in f.prefix] != [fm.FORALL, fm.EXISTS]:
            raise UsageError("the synthesis automaton needs a prefix A{X} E{Y}")
        a = ta.build_synthesis_apt(wa.nbw_to_dpw(nbw, cap), f.prefix[0].vars, f.prefix[1].vars)
    out.write((a.to_dot() if args.format == "dot" else json.dumps(a.to_json(), indent=2, sort_keys=True)) + "\n")
    return EXIT_SAT


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bqltl", description="Satisfiability of prenex QLTL under classic, behavioral "
                                          "and weak-behavioral semantics.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    c = sub.add_parser("check", help="decide a formula")
    _add_input(c)
    c.add_argument("--sem", choices=SEMANTICS, default="classic")
    c.add_argument("--witness", choices=("json", "dot"))
    c.add_argument("--format", choices=("text", "json"), default="text")
    _add_budgets(c)
    c.set_defaults(run=cmd_check)

    o = sub.add_parser("oracle", help="bounded search for a finite-memory witness")
    _add_input(o)
    o.add_argument("--mode", choices=("behavioral", "weak"), default="behavioral")
    o.add_argument("--memory", type=_positive_int, default=2)
    o.add_argument("--max-candidates", type=_positive_int, default=50_000)
    o.add_argument("--witness", choices=("json", "dot"))
    _add_budgets(o)
    o.set_defaults(run=cmd_oracle)

    g = sub.add_parser("gen", help="wrap a goal matrix in a planning prefix")
    g.add_argument("kind", choices=sorted(gen.PLANNING))
    g.add_argument("matrix", help="quantifier-free LTL goal")
    g.add_argument("--x", required=True, help="environment variables, comma separated")
    g.add_argument("--y", required=True, help="agent variables, comma separated")
    g.add_argument("--x2", help="hidden environment variables (pond)")
    g.add_argument("--output", help="write the formula to this file")
    g.set_defaults(run=cmd_gen)

    s = sub.add_parser("suite", help="randomized property suite")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--n", type=_positive_int, default=20)
    s.add_argument("--props", help="comma-separated property names")
    s.add_argument("--max-candidates", type=_positive_int, default=20_000)
    s.add_argument("--report", help="directory for CSV tables and PNG figures")
    _add_budgets(s)
    s.set_defaults(run=cmd_suite)

    v = sub.add_parser("validate", help="re-check a witness file against a formula")
    v.add_argument("witness", help="JSON witness or verdict file")
    v.add_argument("formula_text", metavar="formula")
    v.add_argument("--sem", choices=SEMANTICS)
    _add_budgets(v)
    v.set_defaults(run=cmd_validate)

    e = sub.add_parser("export-automaton", help="print the word or synthesis automaton")
    _add_input(e)
    e.add_argument("--kind", choices=("nbw", "dpw", "apt"), default="nbw")
    e.add_argument("--format", choices=("json", "dot"), default="json")
    _add_budgets(e)
    e.set_defaults(run=cmd_export)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing command")
        return args.run(args, out, err)
    except UsageError as e:
        err.write(f"usage error: {e}\n")
        return EXIT_USAGE
    except FormulaSyntaxError as e:
        err.write(f"parse error: {e}\n")
        return EXIT_USAGE
    except ResourceExceeded as e:
        err.write(f"resource limit: {e}\n")
        return EXIT_UNKNOWN
    except (BqltlError, ValueError, OSError) as e:
        err.write(f"error: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
