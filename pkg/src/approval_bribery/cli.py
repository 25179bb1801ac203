"""Command-line front end.

Exit codes: 0 success, 1 semantic failure (bad input content, invalid plan),
2 usage error or refused solver dispatch, 3 resource cap exceeded.  Errors
are reported as one JSON object on standard error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import io as fmt
from .core import DomainKind, Mode, verify_solution
from .errors import BriberyError, FormatSyntaxError, InputError, ResourceError
from .exact import bb_solve, bb_solve_deletions, oracle_solve
from .generators import gen_cubic_graph, gen_random_instance, gen_rx3c
from .poly_solvers import POLY_SOLVERS, solver_for
from .reductions import (
    build_plan_from_cover_del_ci,
    build_plan_from_cover_swap_vi,
    build_plan_from_independent_set,
    reduce_cubic_is_to_swap_ci,
    reduce_rx3c_to_del_ci,
    reduce_rx3c_to_swap_vi,
)
from .structure import recognize_ci, recognize_vi

EXIT_OK, EXIT_SEMANTIC, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3

NP_HARD = {
    (Mode.DELETE, DomainKind.CI): "deletions under a candidate axis are NP-hard",
    (Mode.SWAP, DomainKind.CI): "swaps under a candidate axis are NP-hard",
    (Mode.SWAP, DomainKind.VI): "priced swaps under a voter order are NP-hard",
}

SOLVER_CHOICES = ["auto", *sorted(POLY_SOLVERS), "oracle", "bb-del", "bb"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit_error(kind, message, code, **extra):
    payload = {"error": {"type": kind, "message": message, "exit_code": code}}
    payload["error"].update({k: v for k, v in extra.items() if v is not None})
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def _read(path):
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(text, path=None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _run_solver(instance, name, max_states):
    if name == "oracle":
        return oracle_solve(instance, max_states)
    if name == "bb-del":
        return bb_solve_deletions(instance, max_states)
    if name == "bb":
        return bb_solve(instance, max_states)
    return POLY_SOLVERS[name](instance)


def cmd_solve(args):
    instance = fmt.parse_instance(_read(args.instance))
    name = args.solver
    if name == "auto":
        name = solver_for(instance)
        if name is None:
            key = (instance.mode, instance.witness.kind)
            reason = NP_HARD.get(key, "no polynomial-time solver covers this mode and domain")
            raise UsageError(f"refusing to dispatch: {reason}; pass --solver oracle or --solver bb explicitly")
    outcome = _run_solver(instance, name, args.max_states)
    _write(fmt.canonical_json(fmt.outcome_to_doc(outcome, instance.election, name)), args.out)
    return EXIT_OK


def cmd_oracle(args):
    instance = fmt.parse_instance(_read(args.instance))
    outcome = oracle_solve(instance, args.max_states)
    _write(fmt.canonical_json(fmt.outcome_to_doc(outcome, instance.election, "oracle")), args.out)
    return EXIT_OK


def cmd_verify(args):
    instance = fmt.parse_instance(_read(args.instance))
    plan = fmt.parse_plan(_read(args.plan), instance.election)
    report = verify_solution(instance, plan)
    cost = report.cost
    doc = {
        "ops_applicable": report.ops_applicable,
        "cost_within_budget": report.cost_within_budget,
        "structure_preserved": report.structure_preserved,
        "p_wins": report.p_wins,
        "swaps_target_p": report.swaps_target_p,
        "cost": cost if isinstance(cost, int) else fmt.FORBIDDEN_LITERAL,
        "valid": report.valid,
        "messages": list(report.messages),
    }
    _write(fmt.canonical_json(doc), args.out)
    return EXIT_OK if report.valid else EXIT_SEMANTIC


def cmd_recognize(args):
    election = fmt.parse_election(_read(args.election))
    if args.kind == "ci":
        order = recognize_ci(election)
        names = election.candidates
    else:
        order = recognize_vi(election)
        names = election.voters
    witness = "none" if order is None else {"kind": args.kind, "order": [names[i] for i in order]}
    _write(fmt.canonical_json({"witness": witness}), args.out)
    return EXIT_OK


def _roles_doc(bundle):
    e = bundle.instance.election

    def label(role):
        return ":".join(str(x) for x in role)

    return {
        "candidates": {e.candidates[i]: label(r) for i, r in enumerate(bundle.candidate_roles)},
        "voters": {e.voters[i]: label(r) for i, r in enumerate(bundle.voter_roles)},
        "params": {k: v for k, v in bundle.params.items() if isinstance(v, int)},
    }


def _index_list(text):
    if text is None:
        return None
    text = text.strip()
    if not text:
        return []
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"--solution must be comma-separated integers, got {text!r}") from None


def cmd_reduce(args):
    doc = fmt.load_json(_read(args.source))
    if isinstance(doc, dict) and args.h is None and "h" in doc:
        args.h = doc["h"]
    src = fmt.source_from_doc(doc)
    solution = _index_list(args.solution)
    if args.reduction == "rx3c-delci":
        bundle = reduce_rx3c_to_del_ci(src)
        build = build_plan_from_cover_del_ci
    elif args.reduction == "rx3c-swapvi":
        bundle = reduce_rx3c_to_swap_vi(src)
        build = build_plan_from_cover_swap_vi
    else:
        if args.h is None:
            raise UsageError("cis-swapci needs --h (or an 'h' field in the source file)")
        bundle = reduce_cubic_is_to_swap_ci(src, args.h)
        build = build_plan_from_independent_set
    _write(fmt.serialize_instance(bundle.instance, _roles_doc(bundle)), args.out)
    if solution is not None:
        plan = build(bundle, solution)
        text = fmt.serialize_plan(plan, bundle.instance.election)
        if args.plan_out:
            _write(text, args.plan_out)
        else:
            sys.stderr.write(text)
    return EXIT_OK


def cmd_gen(args):
    if args.what == "rx3c":
        doc = fmt.source_to_doc(gen_rx3c(args.n, args.seed))
        text = fmt.canonical_json(doc)
    elif args.what == "cubic":
        doc = fmt.source_to_doc(gen_cubic_graph(args.n, args.seed))
        if args.h is not None:
            doc["h"] = args.h
        text = fmt.canonical_json(doc)
    else:
        instance = gen_random_instance(
            args.m,
            args.n,
            args.mode,
            args.domain,
            args.seed,
            density=args.density,
            max_budget=args.max_budget,
            contested=args.contested,
        )
        text = fmt.serialize_instance(instance)
    _write(text, args.out)
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="approval-bribery", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="optimal bribery for an instance file")
    p.add_argument("--instance", required=True)
    p.add_argument("--solver", choices=SOLVER_CHOICES, default="auto")
    p.add_argument("--max-states", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a plan against an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--plan", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("recognize", help="find a CI axis or VI voter order")
    p.add_argument("--election", required=True)
    p.add_argument("--kind", choices=["ci", "vi"], required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("reduce", help="build a hardness gadget from a source instance")
    p.add_argument("--from", dest="reduction", choices=["rx3c-delci", "cis-swapci", "rx3c-swapvi"], required=True)
    p.add_argument("--source", required=True)
    p.add_argument("--h", type=int, default=None, help="independent set size (cis-swapci)")
    p.add_argument("--solution", help="cover set indices or independent vertices, comma separated")
    p.add_argument("--plan-out", help="where to write the forward plan for --solution")
    p.add_argument("--out")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("gen", help="generate a source problem or a random instance")
    p.add_argument("--what", choices=["rx3c", "cubic", "election"], required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--h", type=int, default=None)
    p.add_argument("--mode", choices=[m.value for m in Mode], default="add")
    p.add_argument("--domain", choices=[d.value for d in DomainKind], default="ci")
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--max-budget", type=int, default=4)
    p.add_argument("--contested", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("oracle", help="exact profile search (small instances)")
    p.add_argument("--instance", required=True)
    p.add_argument("--max-states", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)
    return parser


def cli_main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        return _emit_error("UsageError", str(exc), EXIT_USAGE)
    except ResourceError as exc:
        return _emit_error("ResourceError", str(exc), EXIT_RESOURCE, cap=exc.cap)
    except FormatSyntaxError as exc:
        return _emit_error(
            "FormatSyntaxError", str(exc), EXIT_SEMANTIC, line=exc.line, column=exc.column, field=exc.field
        )
    except (InputError, BriberyError) as exc:
        return _emit_error(type(exc).__name__, str(exc), EXIT_SEMANTIC, field=getattr(exc, "field", None))


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
