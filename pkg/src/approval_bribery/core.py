"""Election model, approval scores, unit operations and plan verification.

Candidates and voters are addressed by index everywhere in the library;
names exist only for serialization and display.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .errors import InputError, PlanError


class _Forbidden:
    """Sentinel cost of an operation that may never be performed."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "FORBIDDEN"

    def __reduce__(self):
        return (_Forbidden, ())


FORBIDDEN = _Forbidden()

Cost = Union[int, _Forbidden]


def add_costs(a: Cost, b: Cost) -> Cost:
    if a is FORBIDDEN or b is FORBIDDEN:
        return FORBIDDEN
    return a + b


class Mode(str, enum.Enum):
    ADD = "add"
    DELETE = "delete"
    SWAP = "swap"
    SWAP_TO_P = "swap-to-p"


class OpKind(str, enum.Enum):
    ADD = "add"
    DELETE = "delete"
    SWAP = "swap"


class DomainKind(str, enum.Enum):
    CI = "ci"
    VI = "vi"
    UNRESTRICTED = "unrestricted"


_MODE_KIND = {
    Mode.ADD: OpKind.ADD,
    Mode.DELETE: OpKind.DELETE,
    Mode.SWAP: OpKind.SWAP,
    Mode.SWAP_TO_P: OpKind.SWAP,
}


def op_kind_for(mode: Mode) -> OpKind:
    return _MODE_KIND[Mode(mode)]


@dataclass(frozen=True)
class Election:
    """Approval election: ordered candidates and one ballot per voter.

    ``ballots[v]`` is the frozenset of candidate indices voter ``v`` approves.
    Voter names default to ``v0, v1, ...``.
    """

    candidates: tuple
    ballots: tuple
    voters: tuple = None

    def __post_init__(self):
        cands = tuple(self.candidates)
        ballots = tuple(frozenset(b) for b in self.ballots)
        voters = tuple(self.voters) if self.voters is not None else tuple(
            f"v{i}" for i in range(len(ballots))
        )
        object.__setattr__(self, "candidates", cands)
        object.__setattr__(self, "ballots", ballots)
        object.__setattr__(self, "voters", voters)
        if not cands:
            raise InputError("an election needs at least one candidate")
        if not ballots:
            raise InputError("an election needs at least one voter")
        if len(set(cands)) != len(cands):
            raise InputError("candidate names must be unique")
        if len(voters) != len(ballots):
            raise InputError("number of voter names differs from number of ballots")
        if len(set(voters)) != len(voters):
            raise InputError("voter names must be unique")
        m = len(cands)
        for v, ballot in enumerate(ballots):
            for c in ballot:
                if not isinstance(c, int) or not 0 <= c < m:
                    raise InputError(f"ballot of voter {v} references unknown candidate {c!r}")

    @classmethod
    def from_names(cls, candidates: Sequence[str], approvals: Mapping[str, Iterable[str]]):
        """Build from candidate names and a ``{voter_name: [candidate names]}`` mapping."""
        index = {c: i for i, c in enumerate(candidates)}
        ballots = []
        for voter, names in approvals.items():
            try:
                ballots.append(frozenset(index[c] for c in names))
            except KeyError as exc:
                raise InputError(f"voter {voter!r} approves unknown candidate {exc.args[0]!r}")
        return cls(tuple(candidates), tuple(ballots), tuple(approvals))

    @property
    def m(self) -> int:
        return len(self.candidates)

    @property
    def n(self) -> int:
        return len(self.ballots)

    def scores(self) -> list:
        counts = [0] * self.m
        for ballot in self.ballots:
            for c in ballot:
                counts[c] += 1
        return counts

    def supporters(self, c: int) -> list:
        """Indices of the voters approving candidate ``c``, ascending."""
        return [v for v, ballot in enumerate(self.ballots) if c in ballot]

    def with_ballots(self, ballots) -> "Election":
        return Election(self.candidates, tuple(ballots), self.voters)

    def transpose(self) -> "Election":
        """Swap the roles of voters and candidates (used for VI recognition)."""
        ballots = [frozenset(self.supporters(c)) for c in range(self.m)]
        return Election(self.voters, tuple(ballots), self.candidates)


@dataclass(frozen=True)
class DomainWitness:
    """Candidate axis (CI), voter order (VI), or no structure (unrestricted)."""

    kind: DomainKind
    order: tuple = None

    def __post_init__(self):
        kind = DomainKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is DomainKind.UNRESTRICTED:
            if self.order is not None:
                raise InputError("an unrestricted witness carries no order")
        else:
            if self.order is None:
                raise InputError(f"a {kind.value} witness needs an order")
            object.__setattr__(self, "order", tuple(self.order))

    @classmethod
    def ci(cls, axis):
        return cls(DomainKind.CI, tuple(axis))

    @classmethod
    def vi(cls, order):
        return cls(DomainKind.VI, tuple(order))

    @classmethod
    def unrestricted(cls):
        return cls(DomainKind.UNRESTRICTED)

    def check_against(self, election: Election) -> None:
        if self.kind is DomainKind.UNRESTRICTED:
            return
        size = election.m if self.kind is DomainKind.CI else election.n
        if sorted(self.order) != list(range(size)):
            what = "candidate" if self.kind is DomainKind.CI else "voter"
            raise InputError(f"{self.kind.value} witness is not a permutation of all {what} indices")


@dataclass(frozen=True)
class UnitOperation:
    """One add, delete, or swap of a single approval in one ballot.

    Add/Delete use ``candidate``; Swap uses ``source`` (removed) and
    ``target`` (added).
    """

    kind: OpKind
    voter: int
    candidate: int = None
    source: int = None
    target: int = None

    def __post_init__(self):
        kind = OpKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is OpKind.SWAP:
            if self.candidate is not None or self.source is None or self.target is None:
                raise InputError("a swap needs source and target and no candidate")
            if self.source == self.target:
                raise InputError("a swap needs distinct source and target")
        elif self.candidate is None or self.source is not None or self.target is not None:
            raise InputError(f"an {kind.value} operation needs exactly a candidate")

    @classmethod
    def add(cls, voter, candidate):
        return cls(OpKind.ADD, voter, candidate=candidate)

    @classmethod
    def delete(cls, voter, candidate):
        return cls(OpKind.DELETE, voter, candidate=candidate)

    @classmethod
    def swap(cls, voter, source, target):
        return cls(OpKind.SWAP, voter, source=source, target=target)

    @property
    def sort_key(self):
        if self.kind is OpKind.SWAP:
            return (self.voter, self.source, self.target)
        return (self.voter, self.candidate, -1)

    @property
    def cost_key(self):
        if self.kind is OpKind.SWAP:
            return (self.voter, self.source, self.target)
        return (self.voter, self.candidate)

    def __str__(self):
        if self.kind is OpKind.SWAP:
            return f"swap(v{self.voter}: {self.source}->{self.target})"
        return f"{self.kind.value}(v{self.voter}, {self.candidate})"


@dataclass(frozen=True)
class CostModel:
    """Per-operation prices for one bribery mode.

    ``table`` maps ``(voter, candidate)`` (add/delete) or
    ``(voter, source, target)`` (swap modes) to a nonnegative integer or
    ``FORBIDDEN``; unlisted operations cost ``default_cost``.
    """

    mode: Mode
    table: Mapping = field(default_factory=dict)
    default_cost: Cost = 1

    def __post_init__(self):
        mode = Mode(self.mode)
        object.__setattr__(self, "mode", mode)
        width = 3 if op_kind_for(mode) is OpKind.SWAP else 2
        table = {}
        for key, cost in dict(self.table).items():
            key = tuple(key)
            if len(key) != width:
                raise InputError(f"cost key {key!r} does not fit mode {mode.value}")
            table[key] = _check_cost(cost)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "default_cost", _check_cost(self.default_cost))

    @classmethod
    def unit(cls, mode):
        return cls(mode, {}, 1)

    def __hash__(self):
        return hash((self.mode, tuple(sorted(self.table.items(), key=repr)), self.default_cost))

    def lookup(self, key) -> Cost:
        return self.table.get(key, self.default_cost)

    def cost_of(self, op: UnitOperation) -> Cost:
        if op.kind is not op_kind_for(self.mode):
            raise InputError(f"operation {op} does not match cost mode {self.mode.value}")
        return self.lookup(op.cost_key)

    def is_voter_uniform(self, voter: int) -> bool:
        """True when no entry of the table mentions ``voter``."""
        return all(key[0] != voter for key in self.table)


def _check_cost(cost):
    if cost is FORBIDDEN:
        return cost
    if isinstance(cost, bool) or not isinstance(cost, int) or cost < 0:
        raise InputError(f"costs must be nonnegative integers or FORBIDDEN, got {cost!r}")
    return cost


@dataclass(frozen=True)
class BriberyInstance:
    election: Election
    witness: DomainWitness
    k: int
    p: int
    budget: int
    costs: CostModel

    def __post_init__(self):
        from .structure import validate

        e = self.election
        if not 1 <= self.k <= e.m:
            raise InputError(f"committee size {self.k} outside [1, {e.m}]")
        if not 0 <= self.p < e.m:
            raise InputError(f"preferred candidate index {self.p} out of range")
        if isinstance(self.budget, bool) or not isinstance(self.budget, int) or self.budget < 0:
            raise InputError("budget must be a nonnegative integer")
        self.witness.check_against(e)
        if not validate(e, self.witness).ok:
            raise InputError(f"election does not satisfy its {self.witness.kind.value} witness")

    @property
    def mode(self) -> Mode:
        return self.costs.mode

    def replace(self, **changes) -> "BriberyInstance":
        fields = dict(
            election=self.election,
            witness=self.witness,
            k=self.k,
            p=self.p,
            budget=self.budget,
            costs=self.costs,
        )
        fields.update(changes)
        return BriberyInstance(**fields)


@dataclass(frozen=True)
class BriberyPlan:
    ops: tuple = ()
    total_cost: int = 0

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))

    @classmethod
    def from_ops(cls, ops: Iterable[UnitOperation], costs: CostModel) -> "BriberyPlan":
        ops = tuple(ops)
        total = plan_cost_of_ops(ops, costs)
        if total is FORBIDDEN:
            raise InputError("plan contains a forbidden operation")
        return cls(ops, total)

    def __len__(self):
        return len(self.ops)


@dataclass(frozen=True)
class SolveOutcome:
    """Result of a solver.

    ``optimal_cost`` and ``plan`` are present iff ``feasible`` (a plan within
    budget exists). Solvers that know the cheapest cost regardless of budget
    put it in ``unconstrained_cost`` (``None`` when unknown or impossible).
    """

    feasible: bool
    optimal_cost: int = None
    plan: BriberyPlan = None
    unconstrained_cost: int = None

    @classmethod
    def infeasible(cls, unconstrained_cost=None):
        return cls(False, None, None, unconstrained_cost)

    @classmethod
    def from_best(cls, best_cost, plan, budget):
        """Wrap an unconstrained optimum (or ``None``) with the budget verdict."""
        if best_cost is None:
            return cls.infeasible()
        if best_cost > budget:
            return cls.infeasible(best_cost)
        return cls(True, best_cost, plan, best_cost)


@dataclass(frozen=True)
class VerificationReport:
    ops_applicable: bool
    cost_within_budget: bool
    structure_preserved: bool
    p_wins: bool
    swaps_target_p: bool = True
    cost: object = None
    messages: tuple = ()

    @property
    def valid(self) -> bool:
        return (
            self.ops_applicable
            and self.cost_within_budget
            and self.structure_preserved
            and self.p_wins
            and self.swaps_target_p
        )


def approval_score(election: Election, c: int) -> int:
    if not 0 <= c < election.m:
        raise InputError(f"candidate index {c} out of range")
    return sum(1 for ballot in election.ballots if c in ballot)


def candidates_above(scores: Sequence[int], p: int) -> int:
    target = scores[p]
    return sum(1 for c, s in enumerate(scores) if c != p and s > target)


def can_join_winning_committee(election: Election, k: int, p: int) -> bool:
    """Whether ``p`` is in at least one winning AV committee of size ``k``."""
    if not 1 <= k <= election.m:
        raise InputError(f"committee size {k} outside [1, {election.m}]")
    if not 0 <= p < election.m:
        raise InputError(f"candidate index {p} out of range")
    return candidates_above(election.scores(), p) <= k - 1


def apply_op(ballot: frozenset, op: UnitOperation) -> frozenset:
    """Apply one operation to one ballot; raises ``PlanError`` when inapplicable."""
    if op.kind is OpKind.ADD:
        if op.candidate in ballot:
            raise PlanError(f"{op}: candidate already approved")
        return ballot | {op.candidate}
    if op.kind is OpKind.DELETE:
        if op.candidate not in ballot:
            raise PlanError(f"{op}: candidate not approved")
        return ballot - {op.candidate}
    if op.source not in ballot:
        raise PlanError(f"{op}: source not approved")
    if op.target in ballot:
        raise PlanError(f"{op}: target already approved")
    return (ballot - {op.source}) | {op.target}


def apply_plan(election: Election, plan) -> Election:
    """Execute the plan's operations in order on a copy of the election."""
    ops = plan.ops if isinstance(plan, BriberyPlan) else tuple(plan)
    ballots = list(election.ballots)
    for i, op in enumerate(ops):
        if not 0 <= op.voter < election.n:
            raise PlanError(f"operation {i} ({op}): voter out of range", index=i)
        touched = (op.candidate,) if op.kind is not OpKind.SWAP else (op.source, op.target)
        if any(not 0 <= c < election.m for c in touched):
            raise PlanError(f"operation {i} ({op}): candidate out of range", index=i)
        try:
            ballots[op.voter] = apply_op(ballots[op.voter], op)
        except PlanError as exc:
            raise PlanError(f"operation {i}: {exc}", index=i) from None
    return election.with_ballots(ballots)


def plan_cost_of_ops(ops: Iterable[UnitOperation], costs: CostModel) -> Cost:
    total = 0
    for op in ops:
        total = add_costs(total, costs.cost_of(op))
    return total


def plan_cost(plan, costs: CostModel) -> Cost:
    """Sum of per-operation costs; ``FORBIDDEN`` if any operation is forbidden."""
    ops = plan.ops if isinstance(plan, BriberyPlan) else tuple(plan)
    return plan_cost_of_ops(ops, costs)


def verify_solution(instance: BriberyInstance, plan) -> VerificationReport:
    """Check a plan as a certificate for the bribery decision problem."""
    from .structure import validate

    ops = plan.ops if isinstance(plan, BriberyPlan) else tuple(plan)
    messages = []

    try:
        cost = plan_cost_of_ops(ops, instance.costs)
    except InputError as exc:
        cost = FORBIDDEN
        messages.append(str(exc))
    if cost is FORBIDDEN:
        within = False
        if not messages:
            messages.append("plan contains a forbidden operation")
    else:
        within = cost <= instance.budget
        if not within:
            messages.append(f"cost {cost} exceeds budget {instance.budget}")

    to_p = True
    if instance.mode is Mode.SWAP_TO_P:
        bad = [op for op in ops if op.kind is OpKind.SWAP and op.target != instance.p]
        if bad:
            to_p = False
            messages.append(f"swap {bad[0]} does not move an approval to p")

    try:
        after = apply_plan(instance.election, ops)
    except PlanError as exc:
        messages.append(str(exc))
        return VerificationReport(False, within, False, False, to_p, cost, tuple(messages))

    check = validate(after, instance.witness)
    if not check.ok:
        messages.append(f"structure broken: {check}")
    wins = can_join_winning_committee(after, instance.k, instance.p)
    if not wins:
        messages.append("preferred candidate is not in any winning committee")
    return VerificationReport(True, within, check.ok, wins, to_p, cost, tuple(messages))
