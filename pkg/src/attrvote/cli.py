"""Command-line interface.

Batch subcommands over election files; every report is a single JSON
document on standard output (``--pretty`` indents it).  Exit codes are a
stable contract: 0 success/holds, 1 property violated or nothing found,
2 input error, 3 enumeration-budget refusal.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from fractions import Fraction
from typing import Optional

from . import __version__
from .axioms import (
    axiom_suite,
    check_cjr,
    check_sjr,
    check_strong_unanimity,
    check_weak_unanimity,
)
from .gav import GavStage, TieBreakMode, gav_select
from .instances import GeneratorParams, generate_random
from .model import (
    Committee,
    CommitteeError,
    Election,
    ElectionFormatError,
    Verdict,
    load_election,
    save_election,
    validate,
)
from .rules import (
    DEFAULT_BUDGET,
    BudgetExceededError,
    RuleId,
    SelectionResult,
    av_select,
    rav_select,
    sav_select,
)
from . import solvers

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3


# -- payload serialization ---------------------------------------------------


def _frac(value: Optional[Fraction]) -> Optional[str]:
    return None if value is None else str(Fraction(value))


def _stage_payload(record) -> dict:
    payload = {
        "stage": record.stage,
        "chosen": list(record.chosen),
        "score": _frac(record.score),
    }
    if isinstance(record, GavStage):
        payload.update(
            {
                "attribute": {"dimension": record.attribute[0], "value": record.attribute[1]},
                "approvals": record.approvals,
                "removed": list(record.removed),
                "reset": record.reset,
            }
        )
    return payload


def _selection_payload(result: SelectionResult) -> dict:
    return {
        "rule": str(result.rule),
        "committee": list(result.committee.members),
        "objective": _frac(result.objective),
        "trace": [_stage_payload(r) for r in result.trace],
    }


def _verdict_payload(verdict: Verdict) -> dict:
    payload = {"holds": verdict.holds, "reason": verdict.reason}
    if verdict.witness is not None:
        payload["witness"] = dict(verdict.witness)
    return payload


def _search_payload(report: solvers.SearchReport) -> dict:
    return {
        "objective": report.objective,
        "best": list(report.best.members) if report.best else None,
        "best_value": _frac(report.best_value),
        "examined": report.examined,
        "exhausted": report.exhausted,
        "decision": report.decision,
        "note": report.note,
    }


def _digest(path: str) -> str:
    with open(path, "rb") as fh:
        return "sha256:" + hashlib.sha256(fh.read()).hexdigest()


def _emit(args, subcommand: str, parameters: dict, result, input_digest=None, started=None):
    report = {
        "tool": "attrvote",
        "version": __version__,
        "subcommand": subcommand,
        "parameters": parameters,
        "input_digest": input_digest,
        "result": result,
        "wall_time_s": round(time.perf_counter() - started, 6) if started else None,
    }
    indent = 2 if args.pretty else None
    print(json.dumps(report, indent=indent, ensure_ascii=False))


def _load_validated(path: str) -> Election:
    election = load_election(path)
    verdict = validate(election)
    if not verdict:
        raise ElectionFormatError(f"invalid election: {verdict.reason}")
    return election


# -- subcommands ---------------------------------------------------------------


def cmd_select(args) -> int:
    started = time.perf_counter()
    election = _load_validated(args.input)
    rule = RuleId(args.rule)
    if rule is RuleId.AV:
        result = av_select(election)
    elif rule is RuleId.SAV:
        result = sav_select(election, args.budget)
    elif rule is RuleId.RAV:
        result = rav_select(election)
    elif rule is RuleId.GAV:
        result = gav_select(election, TieBreakMode(args.tie_break))
    elif rule is RuleId.PAV:
        result = solvers.pav_exact(election, args.budget)
    else:
        result = solvers.mav_exact(election, args.budget)
    _emit(
        args,
        "select",
        {"rule": args.rule, "tie_break": args.tie_break, "budget": args.budget},
        _selection_payload(result),
        input_digest=_digest(args.input),
        started=started,
    )
    return EXIT_OK


_PROPERTIES = {
    "weak-unanimity": check_weak_unanimity,
    "strong-unanimity": check_strong_unanimity,
    "sjr": check_sjr,
    "cjr": check_cjr,
}


def cmd_verify(args) -> int:
    started = time.perf_counter()
    election = _load_validated(args.input)
    if len(args.committee) != election.k:
        raise CommitteeError(
            f"committee has {len(args.committee)} members, expected k={election.k}"
        )
    committee = Committee.from_ids(election, args.committee)
    verdict = _PROPERTIES[args.property](election, committee)
    _emit(
        args,
        "verify",
        {"property": args.property, "committee": list(args.committee)},
        _verdict_payload(verdict),
        input_digest=_digest(args.input),
        started=started,
    )
    return EXIT_OK if verdict.holds else EXIT_VIOLATED


def cmd_search(args) -> int:
    started = time.perf_counter()
    election = _load_validated(args.input)
    tau = Fraction(args.tau) if args.tau is not None else None
    if args.objective == "cjr-exists":
        report = solvers.cjr_exists(election, args.budget)
        payload = _search_payload(report)
        code = EXIT_OK if report.decision else EXIT_VIOLATED
    elif args.objective == "max-av-justified":
        report = solvers.max_av_justified(election, tau, args.budget)
        payload = _search_payload(report)
        code = EXIT_OK if report.decision else EXIT_VIOLATED
    elif args.objective == "pav-opt":
        payload = _selection_payload(solvers.pav_exact(election, args.budget))
        code = EXIT_OK
    else:  # mav-opt
        payload = _selection_payload(solvers.mav_exact(election, args.budget))
        code = EXIT_OK
    _emit(
        args,
        "search",
        {"objective": args.objective, "tau": args.tau, "budget": args.budget},
        payload,
        input_digest=_digest(args.input),
        started=started,
    )
    return code


def cmd_gen(args) -> int:
    started = time.perf_counter()
    params = GeneratorParams(
        seed=args.seed,
        voters=args.voters,
        candidates=args.candidates,
        dimensions=args.dims,
        domain_size=args.domain_size,
        approval_prob=args.approval_prob,
        k=args.k,
        plant_unanimous=(0,) if args.plant_unanimous else (),
        plant_bloc=args.plant_bloc,
    )
    election = generate_random(params)
    save_election(election, args.output)
    _emit(
        args,
        "gen",
        {
            "seed": args.seed,
            "voters": args.voters,
            "candidates": args.candidates,
            "dims": args.dims,
            "domain_size": args.domain_size,
            "approval_prob": args.approval_prob,
            "k": args.k,
            "plant_unanimous": args.plant_unanimous,
            "plant_bloc": args.plant_bloc,
        },
        {"path": args.output, "digest": _digest(args.output)},
        started=started,
    )
    return EXIT_OK


def cmd_axioms(args) -> int:
    started = time.perf_counter()
    if args.trials < 1:
        raise ValueError("trials must be >= 1")
    report = axiom_suite(
        RuleId(args.rule),
        trials=args.trials,
        seed=args.seed,
        k_max=args.k_max,
        budget=args.budget,
        threads=args.threads,
    )
    _emit(
        args,
        "axioms",
        {
            "rule": args.rule,
            "trials": args.trials,
            "seed": args.seed,
            "k_max": args.k_max,
        },
        report,
        started=started,
    )
    return EXIT_OK


def cmd_reduce(args) -> int:
    started = time.perf_counter()
    with open(args.input, encoding="utf-8") as fh:
        instance = solvers.setcover_from_dict(json.load(fh))
    result: dict = {"target": args.target}
    if args.target == "cjr":
        election = solvers.reduce_setcover_to_cjr(instance, args.k)
    else:
        election, tau = solvers.reduce_setcover_to_max_av_justified(
            instance, args.k, args.d
        )
        result["tau"] = _frac(tau)
    save_election(election, args.output)
    result["path"] = args.output
    result["digest"] = _digest(args.output)
    result["voters"] = election.n
    result["candidates"] = election.m

    code = EXIT_OK
    if args.check:
        cover_answer, _ = solvers.solve_set_cover(
            solvers.SetCoverInstance(instance.universe, instance.subsets, args.k)
        )
        if args.target == "cjr":
            reduced_answer = bool(solvers.cjr_exists(election, args.budget).decision)
        else:
            reduced_answer = bool(
                solvers.max_av_justified(election, tau, args.budget).decision
            )
        result["check"] = {
            "setcover": cover_answer,
            "reduced": reduced_answer,
            "agreement": cover_answer == reduced_answer,
        }
        if cover_answer != reduced_answer:
            code = EXIT_VIOLATED
    _emit(
        args,
        "reduce",
        {"target": args.target, "k": args.k, "d": args.d, "check": args.check},
        result,
        input_digest=_digest(args.input),
        started=started,
    )
    return code


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="attrvote",
        description="Committee selection from attribute-approval ballots.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--pretty", action="store_true", help="indent JSON output")
    parser.add_argument(
        "--threads",
        type=int,
        default=os.cpu_count() or 1,
        help="worker cap for trial batches; results are thread-count invariant",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("select", help="run a selection rule on an election file")
    p.add_argument("-i", "--input", required=True)
    p.add_argument(
        "--rule", required=True, choices=[r.value for r in RuleId]
    )
    p.add_argument(
        "--tie-break",
        default="by-index",
        choices=[m.value for m in TieBreakMode],
        help="greedy-rule tie handling",
    )
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("verify", help="check a committee against a property")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--committee", nargs="+", required=True, metavar="ID")
    p.add_argument("--property", required=True, choices=sorted(_PROPERTIES))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", help="exhaustive committee searches")
    p.add_argument("-i", "--input", required=True)
    p.add_argument(
        "--objective",
        required=True,
        choices=["max-av-justified", "cjr-exists", "pav-opt", "mav-opt"],
    )
    p.add_argument("--tau", default=None, help="decision threshold (integer or p/q)")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("gen", help="generate a random election file")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--voters", type=int, required=True)
    p.add_argument("--candidates", type=int, required=True)
    p.add_argument("--dims", type=int, required=True)
    p.add_argument("--domain-size", type=int, required=True)
    p.add_argument("--approval-prob", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--plant-unanimous", action="store_true")
    p.add_argument("--plant-bloc", action="store_true")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("axioms", help="metamorphic rule-axiom harness")
    p.add_argument("--rule", required=True, choices=[r.value for r in RuleId])
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k-max", type=int, default=4)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_axioms)

    p = sub.add_parser("reduce", help="build an election from a set-cover instance")
    p.add_argument("-i", "--input", required=True, help="set-cover JSON file")
    p.add_argument("--target", required=True, choices=["cjr", "max-av-justified"])
    p.add_argument("-k", type=int, required=True)
    p.add_argument("-d", type=int, default=2)
    p.add_argument("--check", action="store_true", help="run both oracles and compare")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_reduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(
            json.dumps(
                {"error": "budget-exceeded", "message": str(exc), "required": exc.required}
            )
        )
        return EXIT_BUDGET
    except (
        ElectionFormatError,
        CommitteeError,
        FileNotFoundError,
        ValueError,
        KeyError,
    ) as exc:
        print(json.dumps({"error": "input", "message": str(exc)}))
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
