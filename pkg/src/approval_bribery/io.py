"""JSON file formats for instances, elections, plans, outcomes and sources.

Files refer to candidates and voters by name.  Serialization is canonical:
sorted keys, two-space indent, trailing newline, lists in index order.
"""

from __future__ import annotations

import json

from .core import (
    FORBIDDEN,
    BriberyInstance,
    BriberyPlan,
    CostModel,
    DomainKind,
    DomainWitness,
    Election,
    Mode,
    OpKind,
    SolveOutcome,
    UnitOperation,
    op_kind_for,
)
from .errors import FormatSemanticError, FormatSyntaxError, InputError
from .generators import CubicGraph, Rx3cInstance

FORBIDDEN_LITERAL = "forbidden"


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_json(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatSyntaxError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            line=exc.lineno,
            column=exc.colno,
        ) from None


def _field(doc, name, kind, where="document", default=...):
    if not isinstance(doc, dict):
        raise FormatSyntaxError(f"{where} must be an object", field=where)
    if name not in doc:
        if default is not ...:
            return default
        raise FormatSyntaxError(f"{where} is missing field '{name}'", field=name)
    value = doc[name]
    if kind is int and isinstance(value, bool):
        raise FormatSyntaxError(f"field '{name}' must be an integer", field=name)
    if not isinstance(value, kind):
        expected = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise FormatSyntaxError(f"field '{name}' must be of type {expected}", field=name)
    return value


def _lookup(index, name, what, field):
    if not isinstance(name, str):
        raise FormatSyntaxError(f"{what} reference in '{field}' must be a name string", field=field)
    try:
        return index[name]
    except KeyError:
        raise FormatSemanticError(f"unknown {what} '{name}' in '{field}'", field=field) from None


def _cost_from_json(value, field):
    if value == FORBIDDEN_LITERAL:
        return FORBIDDEN
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise FormatSyntaxError(
            f"cost in '{field}' must be a nonnegative integer or \"forbidden\"", field=field
        )
    return value


def _cost_to_json(cost):
    return FORBIDDEN_LITERAL if cost is FORBIDDEN else cost


# -- elections ------------------------------------------------------------------


def election_from_doc(doc) -> Election:
    names = _field(doc, "candidates", list)
    for c in names:
        if not isinstance(c, str):
            raise FormatSyntaxError("candidate names must be strings", field="candidates")
    if len(set(names)) != len(names):
        raise FormatSemanticError("duplicate candidate name", field="candidates")
    index = {c: i for i, c in enumerate(names)}
    voters = _field(doc, "voters", list)
    voter_names, ballots = [], []
    for q, entry in enumerate(voters):
        where = f"voters[{q}]"
        name = _field(entry, "name", str, where)
        approves = _field(entry, "approves", list, where)
        voter_names.append(name)
        ballots.append(frozenset(_lookup(index, c, "candidate", f"{where}.approves") for c in approves))
    if len(set(voter_names)) != len(voter_names):
        raise FormatSemanticError("duplicate voter name", field="voters")
    try:
        return Election(tuple(names), tuple(ballots), tuple(voter_names))
    except InputError as exc:
        raise FormatSemanticError(str(exc)) from None


def election_to_doc(election: Election) -> dict:
    names = election.candidates
    return {
        "candidates": list(names),
        "voters": [
            {"name": v, "approves": [names[c] for c in sorted(b)]}
            for v, b in zip(election.voters, election.ballots)
        ],
    }


def parse_election(text) -> Election:
    return election_from_doc(load_json(text))


def serialize_election(election: Election) -> str:
    return canonical_json(election_to_doc(election))


# -- instances ------------------------------------------------------------------


def _witness_from_doc(doc, election):
    wdoc = _field(doc, "witness", dict)
    kind_name = _field(wdoc, "kind", str, "witness")
    try:
        kind = DomainKind(kind_name)
    except ValueError:
        raise FormatSemanticError(f"unknown witness kind '{kind_name}'", field="witness.kind") from None
    if kind is DomainKind.UNRESTRICTED:
        return DomainWitness.unrestricted()
    order = _field(wdoc, "order", list, "witness")
    if kind is DomainKind.CI:
        index = {c: i for i, c in enumerate(election.candidates)}
        what = "candidate"
    else:
        index = {v: i for i, v in enumerate(election.voters)}
        what = "voter"
    positions = [_lookup(index, name, what, "witness.order") for name in order]
    if sorted(positions) != list(range(len(index))):
        raise FormatSemanticError(f"witness order is not a permutation of all {what}s", field="witness.order")
    return DomainWitness(kind, tuple(positions))


def _costs_from_doc(doc, election, mode):
    cdoc = _field(doc, "costs", dict, default={})
    default = _cost_from_json(cdoc.get("default_cost", 1), "costs.default_cost")
    entries = _field(cdoc, "entries", list, "costs", default=[])
    cand = {c: i for i, c in enumerate(election.candidates)}
    vot = {v: i for i, v in enumerate(election.voters)}
    swap = op_kind_for(mode) is OpKind.SWAP
    table = {}
    for q, entry in enumerate(entries):
        where = f"costs.entries[{q}]"
        if not isinstance(entry, dict):
            raise FormatSyntaxError(f"{where} must be an object", field=where)
        v = _lookup(vot, entry.get("voter"), "voter", f"{where}.voter")
        if swap:
            key = (
                v,
                _lookup(cand, entry.get("from"), "candidate", f"{where}.from"),
                _lookup(cand, entry.get("to"), "candidate", f"{where}.to"),
            )
        else:
            key = (v, _lookup(cand, entry.get("candidate"), "candidate", f"{where}.candidate"))
        if "cost" not in entry:
            raise FormatSyntaxError(f"{where} is missing field 'cost'", field=f"{where}.cost")
        table[key] = _cost_from_json(entry["cost"], f"{where}.cost")
    return CostModel(mode, table, default)


def instance_from_doc(doc) -> BriberyInstance:
    election = election_from_doc(doc)
    witness = _witness_from_doc(doc, election)
    mode_name = _field(doc, "mode", str)
    try:
        mode = Mode(mode_name)
    except ValueError:
        raise FormatSemanticError(f"unknown mode '{mode_name}'", field="mode") from None
    costs = _costs_from_doc(doc, election, mode)
    k = _field(doc, "k", int)
    budget = _field(doc, "budget", int)
    p = _lookup({c: i for i, c in enumerate(election.candidates)}, _field(doc, "p", str), "candidate", "p")
    try:
        return BriberyInstance(election, witness, k, p, budget, costs)
    except InputError as exc:
        raise FormatSemanticError(str(exc)) from None


def instance_to_doc(instance: BriberyInstance) -> dict:
    e = instance.election
    doc = election_to_doc(e)
    w = instance.witness
    if w.kind is DomainKind.UNRESTRICTED:
        doc["witness"] = {"kind": w.kind.value}
    else:
        names = e.candidates if w.kind is DomainKind.CI else e.voters
        doc["witness"] = {"kind": w.kind.value, "order": [names[i] for i in w.order]}
    entries = []
    for key in sorted(instance.costs.table):
        cost = _cost_to_json(instance.costs.table[key])
        if len(key) == 3:
            entries.append({"voter": e.voters[key[0]], "from": e.candidates[key[1]], "to": e.candidates[key[2]], "cost": cost})
        else:
            entries.append({"voter": e.voters[key[0]], "candidate": e.candidates[key[1]], "cost": cost})
    doc["costs"] = {"default_cost": _cost_to_json(instance.costs.default_cost), "entries": entries}
    doc["k"] = instance.k
    doc["p"] = e.candidates[instance.p]
    doc["budget"] = instance.budget
    doc["mode"] = instance.mode.value
    return doc


def parse_instance(text) -> BriberyInstance:
    """Instance from its JSON text; an optional ``roles`` section is ignored."""
    return instance_from_doc(load_json(text))


def serialize_instance(instance: BriberyInstance, roles=None) -> str:
    doc = instance_to_doc(instance)
    if roles is not None:
        doc["roles"] = roles
    return canonical_json(doc)


# -- plans and outcomes ---------------------------------------------------------


def plan_to_doc(plan: BriberyPlan, election: Election) -> dict:
    names, voters = election.candidates, election.voters
    ops = []
    for op in plan.ops:
        if op.kind is OpKind.SWAP:
            ops.append({"kind": "swap", "voter": voters[op.voter], "from": names[op.source], "to": names[op.target]})
        else:
            ops.append({"kind": op.kind.value, "voter": voters[op.voter], "candidate": names[op.candidate]})
    return {"ops": ops, "total_cost": plan.total_cost}


def plan_from_doc(doc, election: Election, costs: CostModel = None):
    """Plan from a document; ``total_cost`` is recomputed when ``costs`` is given."""
    raw = _field(doc, "ops", list)
    cand = {c: i for i, c in enumerate(election.candidates)}
    vot = {v: i for i, v in enumerate(election.voters)}
    ops = []
    for q, entry in enumerate(raw):
        where = f"ops[{q}]"
        kind_name = _field(entry, "kind", str, where)
        try:
            kind = OpKind(kind_name)
        except ValueError:
            raise FormatSemanticError(f"unknown operation kind '{kind_name}'", field=f"{where}.kind") from None
        v = _lookup(vot, entry.get("voter"), "voter", f"{where}.voter")
        if kind is OpKind.SWAP:
            a = _lookup(cand, entry.get("from"), "candidate", f"{where}.from")
            b = _lookup(cand, entry.get("to"), "candidate", f"{where}.to")
            try:
                ops.append(UnitOperation.swap(v, a, b))
            except InputError as exc:
                raise FormatSemanticError(f"{where}: {exc}", field=where) from None
        else:
            c = _lookup(cand, entry.get("candidate"), "candidate", f"{where}.candidate")
            ops.append(UnitOperation(kind, v, candidate=c))
    total = _field(doc, "total_cost", int, default=0)
    return BriberyPlan(tuple(ops), total)


def parse_plan(text, election: Election) -> BriberyPlan:
    return plan_from_doc(load_json(text), election)


def serialize_plan(plan: BriberyPlan, election: Election) -> str:
    return canonical_json(plan_to_doc(plan, election))


def outcome_to_doc(outcome: SolveOutcome, election: Election, solver: str) -> dict:
    return {
        "feasible": outcome.feasible,
        "optimal_cost": outcome.optimal_cost,
        "plan": plan_to_doc(outcome.plan, election) if outcome.plan is not None else None,
        "solver_used": solver,
        "unconstrained_cost": outcome.unconstrained_cost,
    }


# -- source problems ------------------------------------------------------------


def source_to_doc(src) -> dict:
    if isinstance(src, Rx3cInstance):
        return {"kind": "rx3c", "n": src.n, "sets": [sorted(s) for s in src.sets]}
    if isinstance(src, CubicGraph):
        return {"kind": "cubic", "n": src.n, "edges": [list(e) for e in src.edges]}
    raise InputError(f"cannot serialize {type(src).__name__}")


def source_from_doc(doc):
    kind = _field(doc, "kind", str)
    try:
        if kind == "rx3c":
            return Rx3cInstance(_field(doc, "n", int), tuple(_field(doc, "sets", list)))
        if kind == "cubic":
            return CubicGraph(_field(doc, "n", int), tuple(tuple(e) for e in _field(doc, "edges", list)))
    except (TypeError, InputError) as exc:
        if isinstance(exc, FormatSyntaxError):
            raise
        raise FormatSemanticError(str(exc)) from None
    raise FormatSemanticError(f"unknown source kind '{kind}'", field="kind")


def parse_source(text):
    return source_from_doc(load_json(text))
