"""Command line interface: ``equalshares <command> ELECTION.pb [options]``.

Exit codes: 0 success, 2 certificate rejected, 3 EJR violation found,
4 bad input (parse or validation error), 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .adaptive import STRATEGIES, NotStable, complete, next_unstable_budget
from .ames import ames
from .core import ElectionError, to_rational
from .ejr import TooLarge, ejr_check
from .experiment import decimal_str, experiment_topup
from .mes import mes
from .pabulib import PabulibError, read_pabulib, read_tie_order
from .solution import MalformedSolution, price
from .stability import StabilityCertificate, verify, verify_certificate

EXIT_REJECTED = 2
EXIT_EJR_VIOLATION = 3
EXIT_BAD_INPUT = 4
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _frac(x: Fraction) -> str:
    return str(x)


def _load(args):
    election = read_pabulib(args.election, drop_unapproved=args.drop_unapproved)
    if args.tie_order:
        election = election.with_priority(read_tie_order(args.tie_order))
    if args.budget is not None:
        election = election.with_budget(to_rational(args.budget))
    return election


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def _outcome_text(election, solution) -> str:
    lines = []
    for p in election.projects:
        if p.id in solution:
            lines.append(f"{p.id}\tcost={p.cost}\tsupporters={len(solution.supporters[p.id])}"
                         f"\tprice={price(p.id, solution, election)}")
    lines.append(f"selected {len(solution.outcome)} projects, total cost {election.total_cost(solution.outcome)}"
                 f" of budget {election.budget}")
    return "\n".join(lines)


def cmd_run(args) -> int:
    election = _load(args)
    solution, trace = ames(election)
    if args.trace:
        Path(args.trace).write_text(trace.to_json() + "\n", encoding="utf-8")
    payload = {
        "outcome": sorted(solution.outcome),
        "supporters": {p: sorted(v) for p, v in solution.supporters.items()},
        "steps": len(trace),
        "total_cost": _frac(election.total_cost(solution.outcome)),
    }
    _emit(args, payload, _outcome_text(election, solution))
    return 0


def cmd_mes(args) -> int:
    election = _load(args)
    W, loads = mes(election)
    payload = {"outcome": sorted(W), "total_cost": _frac(election.total_cost(W))}
    text = "\n".join(sorted(W)) + f"\nselected {len(W)} projects, total cost {election.total_cost(W)}"
    _emit(args, payload, text)
    return 0


def cmd_complete(args) -> int:
    election = _load(args)
    result = complete(election, args.strategy, to_rational(args.step))
    if args.json:
        print(result.to_json())
    else:
        print(f"strategy {result.strategy}: virtual budget {result.virtual_budget} "
              f"after {len(result.iterations)} iterations")
        print(f"outcome ({len(result.outcome)} projects, cost {election.total_cost(result.outcome)}, "
              f"exhaustive={result.exhaustive}): {', '.join(sorted(result.outcome))}")
    return 0


def cmd_certify(args) -> int:
    election = _load(args)
    solution, _ = ames(election)
    result = verify(solution, election)
    text = result.certificate.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        _emit(args, {"stable": result.stable, "certificate": args.out},
              f"certificate written to {args.out} (stable={result.stable})")
    else:
        print(text)
    return 0


def cmd_verify(args) -> int:
    election = _load(args)
    try:
        cert = StabilityCertificate.from_json(Path(args.certificate).read_text(encoding="utf-8"))
    except (MalformedSolution, json.JSONDecodeError) as exc:
        _emit(args, {"accepted": False, "reason": "MalformedSolution", "detail": str(exc)},
              f"reject: MalformedSolution ({exc})")
        return EXIT_REJECTED
    verdict = verify_certificate(cert, election)
    payload = {"accepted": verdict.accepted, "reason": verdict.reason, "detail": verdict.detail}
    if verdict.voter is not None:
        payload["voter"] = verdict.voter
    if verdict.position is not None:
        payload["position"] = verdict.position
    if verdict.witness is not None:
        payload["witness"] = {"project": verdict.witness.project, "t": verdict.witness.t}
    if verdict.accepted:
        _emit(args, payload, "accept: solution is stable, hence provides EJR")
        return 0
    extra = f" ({verdict.detail})" if verdict.detail else ""
    if verdict.witness is not None:
        extra = f" (project {verdict.witness.project}, t={verdict.witness.t})"
    _emit(args, payload, f"reject: {verdict.reason}{extra}")
    return EXIT_REJECTED


def cmd_skip(args) -> int:
    election = _load(args)
    solution, _ = ames(election)
    nxt = next_unstable_budget(solution, election, lexicographic=args.lexicographic)
    payload = {"budget": _frac(election.budget), "next_unstable_budget": None if nxt is None else _frac(nxt)}
    _emit(args, payload, "never" if nxt is None else str(nxt))
    return 0


def cmd_ejr(args) -> int:
    election = _load(args)
    if args.outcome is not None:
        outcome = {x for x in args.outcome.split(",") if x}
    else:
        outcome = ames(election)[0].outcome
    violation = ejr_check(election, outcome, args.max_projects)
    if violation is None:
        _emit(args, {"ejr": True, "outcome": sorted(outcome)}, "outcome provides EJR")
        return 0
    payload = {
        "ejr": False,
        "outcome": sorted(outcome),
        "T": list(violation.projects),
        "group": sorted(violation.group),
        "max_utility": violation.max_utility,
    }
    _emit(args, payload, f"EJR violated: T={{{', '.join(violation.projects)}}}, group of "
                         f"{len(violation.group)} voters, best utility {violation.max_utility} < {violation.required}")
    return EXIT_EJR_VIOLATION


def cmd_experiment(args) -> int:
    election = _load(args)
    result = experiment_topup(election, args.runs, to_rational(args.step))
    csv_text = result.to_csv(timing=not args.no_timing)
    if args.out:
        Path(args.out).write_text(csv_text, encoding="utf-8")
    else:
        sys.stdout.write(csv_text)
    if args.out or args.json:
        _emit(args, {
            "runs": args.runs,
            "mean_outcome_size": decimal_str(result.mean_outcome_size),
            "mean_change_metric": decimal_str(result.mean_change),
        }, f"mean outcome size {decimal_str(result.mean_outcome_size)}, "
           f"mean change {decimal_str(result.mean_change)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="equalshares", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("election", help="Pabulib .pb file (approval ballots)")
    common.add_argument("--budget", help="override the total budget (exact decimal or fraction)")
    common.add_argument("--tie-order", help="file with one project id per line, highest priority first")
    common.add_argument("--drop-unapproved", action="store_true", help="ignore projects nobody approves")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", parents=[common], help="run AMES from scratch")
    p.add_argument("--trace", help="write the update trace as JSON to this file")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("mes", parents=[common], help="run the Method of Equal Shares")
    p.set_defaults(func=cmd_mes)

    p = sub.add_parser("complete", parents=[common], help="complete the outcome by raising a virtual budget")
    p.add_argument("--strategy", choices=STRATEGIES, default="adaptive-ames")
    p.add_argument("--step", default="1", help="per-voter budget increment (default 1)")
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("certify", parents=[common], help="run AMES and emit a stability certificate")
    p.add_argument("--out", help="certificate file (default: stdout)")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("verify", parents=[common], help="check a stability certificate")
    p.add_argument("--certificate", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("skip", parents=[common], help="smallest budget at which the AMES outcome changes stability")
    p.add_argument("--lexicographic", action="store_true", help="use project-dependent capacities")
    p.set_defaults(func=cmd_skip)

    p = sub.add_parser("ejr", parents=[common], help="brute-force EJR check")
    p.add_argument("--outcome", help="comma-separated project ids (default: AMES outcome)")
    p.add_argument("--max-projects", type=int, help="enumeration limit (env AMES_MAX_ORACLE_PROJECTS)")
    p.set_defaults(func=cmd_ejr)

    p = sub.add_parser("experiment", parents=[common], help="budget top-up experiment, CSV output")
    p.add_argument("--runs", type=int, default=50)
    p.add_argument("--step", default="1", help="per-voter top-up per run (default 1)")
    p.add_argument("--out", help="CSV file (default: stdout)")
    p.add_argument("--no-timing", action="store_true", help="leave the millis column empty (reproducible output)")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PabulibError, ElectionError, OSError, TooLarge, NotStable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
