#!/usr/bin/env python3

# SPDX-FileCopyrightText: 2026 The bcflip authors
#
# SPDX-License-Identifier: MIT

import argparse
import contextlib
import logging
import math
import sys

from . import analysis
from . import consts
from . import enums
from . import linalg
from . import protocol
from . import report_output
from . import strategies

PACKAGE_ERRORS = (
    linalg.LinalgError,
    protocol.ProtocolError,
    strategies.StrategyError,
    analysis.AnalysisError,
)

OUTPUTS = {
    "csv": report_output.BiasTableOutput,
    "json": report_output.JSONOutput,
}


@contextlib.contextmanager
def _open_output(args):
    if not args.output:
        yield sys.stdout
        return
    with open(args.output, "w", newline="") as fp:
        yield fp


def _emit(args, doc, fmt: str) -> None:
    with _open_output(args) as fp:
        OUTPUTS[fmt](fp).output(doc)


def _single_eps(args) -> float:
    grid = analysis.parse_eps_grid(args.eps)
    if len(grid) != 1:
        raise analysis.AnalysisError(f"expected a single eps value, got {args.eps!r}")
    return grid[0]


def _single_n(args) -> int:
    ns = analysis.parse_n_range(args.n)
    if len(ns) != 1:
        raise analysis.AnalysisError(f"expected a single n, got {args.n!r}")
    return ns[0]


def _require_angles(args, family: enums.Family):
    if args.alpha is None:
        raise protocol.ProtocolError(f"--alpha is required for the {family.name.lower()} protocol")
    if family == enums.Family.FIVE and args.beta is None:
        raise protocol.ProtocolError("--beta is required for the five protocol")


def _build_spec(args) -> protocol.ProtocolSpec:
    family = enums.Family[args.protocol.upper()]
    if family == enums.Family.PN:
        spec = protocol.build_pn(_single_n(args), _single_eps(args))
    else:
        _require_angles(args, family)
        if family == enums.Family.THREE:
            spec = protocol.build_three_round(args.alpha)
        else:
            spec = protocol.build_five_round(args.alpha, args.beta)
    if args.purified:
        spec = protocol.purify(spec)
    return spec


def cmd_table(args) -> int:
    rows = analysis.bias_table(
        analysis.parse_n_range(args.n),
        analysis.parse_eps_grid(args.eps),
        simulate=args.simulate,
        max_amplitudes=args.max_amplitudes,
        max_rounds=args.max_rounds,
    )
    if args.out == "csv":
        _emit(args, rows, "csv")
    else:
        _emit(args, [row.as_dict() for row in rows], "json")
    mismatched = [
        row
        for row in rows
        if row.a_sim is not None
        and max(row.a_abs_err, row.b_abs_err) > consts.DEFAULT_TOLERANCES.simulation
    ]
    for row in mismatched:
        print(
            f"simulation disagrees with the closed form at n={row.n} eps={row.eps}",
            file=sys.stderr,
        )
    return 1 if mismatched else 0


def cmd_attack(args) -> int:
    family = enums.Family[args.protocol.upper()]
    n, eps = 1, None
    if family == enums.Family.PN:
        n, eps = _single_n(args), _single_eps(args)
    else:
        _require_angles(args, family)
    report = strategies.attack(
        family,
        enums.Party[args.cheater.upper()],
        n=n,
        eps=eps,
        alpha=args.alpha,
        beta=args.beta,
        generic=args.generic,
        max_amplitudes=args.max_amplitudes,
        max_rounds=args.max_rounds,
    )
    _emit(args, report.as_dict(), "json")
    tol = consts.DEFAULT_TOLERANCES.simulation
    # The generic attack only promises its product lower bound.
    ok = report.gap >= -tol if args.generic else abs(report.gap) <= tol
    return 0 if ok else 1


def cmd_verify(args) -> int:
    report = analysis.run_suite(
        enums.Suite[args.suite.upper()],
        seed=args.seed,
        trials=args.trials,
        max_amplitudes=args.max_amplitudes,
        max_rounds=args.max_rounds,
    )
    _emit(args, report.as_dict(), "json")
    for check in report.checks:
        if not check.passed:
            print(f"check {check.name} failed: {check.detail}", file=sys.stderr)
    return 0 if report.passed else 1


def cmd_optimize_eps(args) -> int:
    optima = [analysis.optimize_eps(n) for n in analysis.parse_n_range(args.n)]
    _emit(args, [opt.as_dict() for opt in optima], "json")
    return 0


def cmd_dump_protocol(args) -> int:
    spec = _build_spec(args)
    doc = spec.as_dict()
    doc["honest"] = protocol.run_honest(spec).as_dict()
    _emit(args, doc, "json")
    return 0


COMMANDS = {
    "table": (cmd_table, "Closed-form (and optionally simulated) cheating probabilities of P_n as CSV."),
    "attack": (cmd_attack, "Run one cheating strategy and print its report as JSON."),
    "verify": (cmd_verify, "Run a verification suite; exit status 1 if any check fails."),
    "optimize-eps": (cmd_optimize_eps, "Find the eps minimizing the larger cheating probability of P_n."),
    "dump-protocol": (cmd_dump_protocol, "Print a protocol description as JSON."),
}


def _angle(text: str) -> float:
    """Accept plain radians or multiples of pi such as "pi/3" and "2pi/3"."""
    text = text.strip().lower()
    if "pi" not in text:
        return float(text)
    num, _, den = text.partition("/")
    coeff = num.replace("pi", "").strip()
    value = (float(coeff) if coeff else 1.0) * math.pi
    return value / float(den) if den else value


def _parse_args(args):
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", default="1", help='Round count, range or list: "3", "1..5" or "1,3,5".')
    common.add_argument(
        "--eps",
        default="0.5",
        help='Weak-commitment parameter: a value or an inclusive sweep "start:stop:step".',
    )
    common.add_argument("--alpha", type=_angle, help='First angle of the three/five round protocols, e.g. "pi/3".')
    common.add_argument("--beta", type=_angle, help="Second angle of the five round protocol.")
    common.add_argument("--protocol", choices=["pn", "three", "five"], default="pn")
    common.add_argument("--cheater", choices=["alice", "bob"], default="alice")
    common.add_argument("--generic", action="store_true", help="Use the generic crossing-round attack.")
    common.add_argument("--purified", action="store_true", help="Dump the purified protocol.")
    common.add_argument("--simulate", action="store_true", help="Also simulate the explicit attacks.")
    common.add_argument("--suite", choices=["lemmas", "attacks", "schedules"], default="lemmas")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=1000)
    common.add_argument(
        "--max-amplitudes",
        type=int,
        default=consts.DEFAULT_MAX_AMPLITUDES,
        help="Largest state vector a simulation may allocate.",
    )
    common.add_argument(
        "--max-rounds",
        type=int,
        default=consts.DEFAULT_MAX_ROUNDS,
        help="Largest n for which P_n attacks are simulated.",
    )
    common.add_argument("--out", choices=sorted(OUTPUTS), help="Output format (table only offers csv and json).")
    common.add_argument("--output", help="Path to write the output to instead of stdout.")
    common.add_argument("-v", "--verbose", action="store_true", help="Log at DEBUG level.")

    argparser = argparse.ArgumentParser(prog="bcflip")
    subparsers = argparser.add_subparsers(dest="command")
    for name, (_, help_text) in COMMANDS.items():
        subparsers.add_parser(name, parents=[common], help=help_text, description=help_text)
    return argparser, argparser.parse_args(args)


def cli_main(raw_args):
    argparser, args = _parse_args(raw_args)
    if not args.command:
        argparser.print_help()
        return 2
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if args.command == "table":
        args.out = args.out or "csv"
    elif args.out == "csv":
        print(f"{args.command} only produces JSON", file=sys.stderr)
        return 2

    try:
        return COMMANDS[args.command][0](args)
    except PACKAGE_ERRORS as e:
        print(f"{args.command}: {e}", file=sys.stderr)
        return 2


def main():
    sys.exit(cli_main(sys.argv[1:]) or 0)


if __name__ == "__main__":
    main()
