"""Command line front end: ``mground FILE`` and ``mground oracle FILE``."""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .aggregates import DEFAULT_SUBSET_SUM_CAP, AggregateOverflow
from .analysis import SafetyError, check_program, instantiation_sequence, refine_sequence
from .formulas import render_ground
from .ground import Interp4, strip_certain, well_founded_model
from .grounder import BudgetExhausted, ComponentTrace, ground_program
from .oracle import OracleLimit, enumerate_foid_stable, enumerate_stable, naive_ground, wf_oracle
from .syntax import ParseError, Program, format_atoms, parse_program

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_BUDGET = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _ground_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mground", description="Ground an aggregate program.")
    p.add_argument("file", help="input program (UTF-8)")
    p.add_argument("--trace", action="store_true", help="print per-component certain/possible atoms to stderr")
    p.add_argument("--print-components", action="store_true", help="print the refined instantiation sequence")
    p.add_argument("--simplify", action="store_true", help="drop body literals decided by the approximate model")
    p.add_argument("--exact-agg", action="store_true", help="search = and != aggregates exactly without a size cap")
    p.add_argument("--max-steps", type=int, default=None, metavar="N", help="bound on rule instantiation calls")
    return p


def _oracle_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mground oracle", description="Brute-force semantics of a small program.")
    p.add_argument("file", help="input program (UTF-8)")
    p.add_argument("--trace", action="store_true", help="print well-founded operator applications")
    p.add_argument("--foid", action="store_true", help="also list fixed points of the stable operator")
    return p


def _load(path: str) -> Program:
    with open(path, encoding="utf-8") as fh:
        program = parse_program(fh.read())
    check_program(program)
    return program


def _label(index: Sequence[int]) -> str:
    return ".".join(str(i) for i in index)


def _print_components(program: Program, out) -> None:
    seq = instantiation_sequence(program)
    refined = {c.index: c for c in refine_sequence(seq)}
    for comp in seq:
        flag = "stratified" if comp.stratified else "unstratified"
        parts = []
        for j, sub in enumerate(comp.refined, start=1):
            rc = refined[comp.index + (j,)]
            ext = "{" + ", ".join(f"{n}/{a}" for n, a in sorted(rc.external)) + "}"
            rules = " ".join(str(program.rules[k]) for k in sub)
            parts.append(f"[{_label(rc.index)} E={ext} {rules}]")
        print(f"{_label(comp.index)} {flag} {' '.join(parts)}", file=out)


def _trace_component(entry: ComponentTrace) -> None:
    label = _label(entry.index)
    print(f"I{label} = {format_atoms(entry.certain)}", file=sys.stderr)
    print(f"J{label} = {format_atoms(entry.possible)}", file=sys.stderr)


def _run_ground(args) -> int:
    program = _load(args.file)
    if args.print_components:
        _print_components(program, sys.stdout)
        return EXIT_OK
    cap = None if args.exact_agg else DEFAULT_SUBSET_SUM_CAP
    out = ground_program(
        program,
        cap=cap,
        max_steps=args.max_steps,
        on_component=_trace_component if args.trace else None,
    )
    rules = out.rules
    if args.simplify:
        rules = strip_certain(rules, out.model.certain, out.model.possible)
    sys.stdout.write(render_ground(rules))
    return EXIT_OK


def _run_oracle(args) -> int:
    program = _load(args.file)
    rules = naive_ground(program)
    if args.trace:
        previous = [format_atoms(()), "Sigma"]

        def show(step: Interp4) -> None:
            certain, possible = format_atoms(step.certain), format_atoms(step.possible)
            print(f"S({previous[1]}) = {certain}", file=sys.stderr)
            print(f"S({previous[0]}) = {possible}", file=sys.stderr)
            previous[:] = [certain, possible]

        well_founded_model(rules, trace=show)
    wf = wf_oracle(rules)
    print(f"% well-founded: certain={format_atoms(wf.certain)} possible={format_atoms(wf.possible)}")
    models = sorted((sorted(map(str, m)) for m in enumerate_stable(rules)))
    for k, m in enumerate(models, start=1):
        print(f"% stable {k}: {{{', '.join(m)}}}")
    if args.foid:
        foid = sorted((sorted(map(str, m)) for m in enumerate_foid_stable(rules)))
        for k, m in enumerate(foid, start=1):
            print(f"% foid-stable {k}: {{{', '.join(m)}}}")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    oracle = bool(argv) and argv[0] == "oracle"
    parser = _oracle_parser() if oracle else _ground_parser()
    args = parser.parse_args(argv[1:] if oracle else argv)
    try:
        return _run_oracle(args) if oracle else _run_ground(args)
    except (OSError, ParseError, SafetyError, AggregateOverflow, OracleLimit) as exc:
        print(f"mground: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExhausted as exc:
        print(f"mground: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
