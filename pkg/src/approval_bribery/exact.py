"""Exact solvers for every bribery variant at small scale.

``oracle_solve`` is the reference: a least-cost search over whole ballot
profiles.  ``bb_solve`` is a faster exact engine that picks a final ballot
for each voter independently and prunes with score and cost bounds; it is
what makes the hardness gadgets checkable.

Both treat structure as a property of the final profile only: the witness
must hold after the bribery, intermediate profiles are unconstrained.
"""

from __future__ import annotations

import heapq
import itertools
import os

from .core import (
    FORBIDDEN,
    BriberyInstance,
    BriberyPlan,
    DomainKind,
    Mode,
    OpKind,
    SolveOutcome,
    UnitOperation,
    candidates_above,
    op_kind_for,
)
from .errors import InputError, ResourceError
from .structure import is_interval_on, validate

DEFAULT_MAX_STATES = 10**7
ENV_MAX_STATES = "BRIBERY_MAX_STATES"


def resolve_cap(max_states=None) -> int:
    if max_states is not None:
        return int(max_states)
    env = os.environ.get(ENV_MAX_STATES)
    if env:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"{ENV_MAX_STATES} must be an integer, got {env!r}") from None
    return DEFAULT_MAX_STATES


def _moves(ballot, mode, p, m):
    """Unit operations applicable to one ballot, in a fixed order."""
    kind = op_kind_for(mode)
    if kind is OpKind.ADD:
        return [(c,) for c in range(m) if c not in ballot]
    if kind is OpKind.DELETE:
        return [(c,) for c in sorted(ballot)]
    targets = [p] if mode is Mode.SWAP_TO_P else range(m)
    return [(a, b) for a in sorted(ballot) for b in targets if b not in ballot]


def _make_op(kind, v, move):
    if kind is OpKind.SWAP:
        return UnitOperation.swap(v, move[0], move[1])
    return UnitOperation(kind, v, candidate=move[0])


def _step(ballot, kind, move):
    if kind is OpKind.ADD:
        return ballot | {move[0]}
    if kind is OpKind.DELETE:
        return ballot - {move[0]}
    return (ballot - {move[0]}) | {move[1]}


def oracle_solve(instance: BriberyInstance, max_states=None) -> SolveOutcome:
    """Cheapest plan by uniform-cost search over ballot profiles.

    Profiles are deduplicated; paths costing more than the budget are cut.
    Raises ``ResourceError`` once more than ``max_states`` profiles have
    been discovered (default from ``BRIBERY_MAX_STATES`` or 10**7).
    """
    cap = resolve_cap(max_states)
    e, p, k, costs = instance.election, instance.p, instance.k, instance.costs
    mode = instance.mode
    kind = op_kind_for(mode)
    key_width = 3 if kind is OpKind.SWAP else 2
    start = e.ballots
    dist = {start: 0}
    parent = {start: None}
    heap = [(0, 0, start)]
    tick = itertools.count(1)
    # per-(voter, move) cost is looked up once
    price = {}

    def goal(profile):
        after = e.with_ballots(profile)
        if candidates_above(after.scores(), p) > k - 1:
            return False
        return validate(after, instance.witness).ok

    while heap:
        d, _, state = heapq.heappop(heap)
        if d > dist[state]:
            continue
        if goal(state):
            ops = []
            node = state
            while parent[node] is not None:
                node, op = parent[node]
                ops.append(op)
            ops.reverse()
            plan = BriberyPlan.from_ops(ops, costs)
            return SolveOutcome.from_best(d, plan, instance.budget)
        for v, ballot in enumerate(state):
            for move in _moves(ballot, mode, p, e.m):
                key = (v,) + move if key_width == 3 else (v, move[0])
                w = price.get(key)
                if w is None:
                    w = price[key] = costs.lookup(key)
                if w is FORBIDDEN:
                    continue
                nd = d + w
                if nd > instance.budget:
                    continue
                nxt = state[:v] + (_step(ballot, kind, move),) + state[v + 1 :]
                if nd < dist.get(nxt, nd + 1):
                    if nxt not in dist and len(dist) >= cap:
                        raise ResourceError(f"oracle exceeded the state cap of {cap}", cap=cap)
                    dist[nxt] = nd
                    parent[nxt] = (state, _make_op(kind, v, move))
                    heapq.heappush(heap, (nd, next(tick), nxt))
    return SolveOutcome.infeasible()


# -- per-voter branch and bound ---------------------------------------------------


def _interval_sets(axis, size=None, within=None, containing=None):
    """Contiguous candidate sets on ``axis`` filtered by size / subset / superset."""
    m = len(axis)
    out = [frozenset()] if size in (None, 0) else []
    for i in range(m):
        for j in range(i, m):
            if size is not None and j - i + 1 != size:
                continue
            s = frozenset(axis[i : j + 1])
            if within is not None and not s <= within:
                continue
            if containing is not None and not containing <= s:
                continue
            out.append(s)
    if containing:
        out = [s for s in out if containing <= s]
    return out


def _uniform_option(v, ballot, final, kind, unit):
    """Cost and ops turning ``ballot`` into ``final`` when every op costs ``unit``."""
    gone = sorted(ballot - final)
    came = sorted(final - ballot)
    if kind is OpKind.ADD:
        ops = [UnitOperation.add(v, c) for c in came]
    elif kind is OpKind.DELETE:
        ops = [UnitOperation.delete(v, c) for c in gone]
    else:
        ops = [UnitOperation.swap(v, a, b) for a, b in zip(gone, came)]
    if not ops:
        return 0, ops
    if unit is FORBIDDEN:
        return None
    return unit * len(ops), ops


def _per_voter_reach(instance, v, limit):
    """Every ballot voter ``v`` can reach within ``limit``: ``{ballot: (cost, ops)}``."""
    e, p, costs, mode = instance.election, instance.p, instance.costs, instance.mode
    kind = op_kind_for(mode)
    start = e.ballots[v]
    best = {start: 0}
    path = {start: ()}
    heap = [(0, 0, start)]
    tick = itertools.count(1)
    done = {}
    while heap:
        d, _, ballot = heapq.heappop(heap)
        if ballot in done:
            continue
        done[ballot] = (d, list(path[ballot]))
        for move in _moves(ballot, mode, p, e.m):
            key = (v,) + move if kind is OpKind.SWAP else (v, move[0])
            w = costs.lookup(key)
            if w is FORBIDDEN or d + w > limit:
                continue
            nxt = _step(ballot, kind, move)
            if nxt not in done and d + w < best.get(nxt, d + w + 1):
                best[nxt] = d + w
                path[nxt] = path[ballot] + (_make_op(kind, v, move),)
                heapq.heappush(heap, (d + w, next(tick), nxt))
    return done


def voter_options(instance: BriberyInstance, v: int, limit: int):
    """Sorted ``[(cost, final_ballot, ops)]`` of the final ballots open to voter ``v``.

    Under a CI witness only interval ballots are kept.  Voters whose prices
    are uniform get a closed-form enumeration; others a per-voter search.
    """
    e, p, costs, mode = instance.election, instance.p, instance.costs, instance.mode
    kind = op_kind_for(mode)
    ballot = e.ballots[v]
    ci = instance.witness.kind is DomainKind.CI
    axis = instance.witness.order if ci else None
    out = []
    if mode is Mode.SWAP_TO_P:
        out.append((0, ballot, []))
        if p not in ballot:
            for c in sorted(ballot):
                w = costs.lookup((v, c, p))
                if w is not FORBIDDEN and w <= limit:
                    out.append((w, (ballot - {c}) | {p}, [UnitOperation.swap(v, c, p)]))
    elif ci and costs.is_voter_uniform(v):
        if kind is OpKind.DELETE:
            finals = _interval_sets(axis, within=ballot)
        elif kind is OpKind.ADD:
            finals = _interval_sets(axis, containing=ballot)
        else:
            finals = _interval_sets(axis, size=len(ballot))
        for final in finals:
            priced = _uniform_option(v, ballot, final, kind, costs.default_cost)
            if priced is not None and priced[0] <= limit:
                out.append((priced[0], final, priced[1]))
    else:
        for final, (cost, ops) in _per_voter_reach(instance, v, limit).items():
            out.append((cost, final, ops))
    if ci:
        pos = {c: q for q, c in enumerate(axis)}
        out = [o for o in out if is_interval_on([pos[c] for c in o[1]])]
    out.sort(key=lambda o: (o[0], sorted(o[1]), [op.sort_key for op in o[2]]))
    return out


class _Search:
    def __init__(self, instance, options, order, vi_order, cap):
        self.instance = instance
        self.p = instance.p
        self.k = instance.k
        self.m = instance.election.m
        self.options = options
        self.order = order
        self.vi = vi_order is not None
        self.cap = cap
        self.nodes = 0
        self.best = None
        self.best_choice = None
        n_steps = len(order)
        m = self.m
        # suffix bounds on membership and cost
        self.suf_min = [[0] * m for _ in range(n_steps + 1)]
        self.suf_max = [[0] * m for _ in range(n_steps + 1)]
        self.suf_cost = [0] * (n_steps + 1)
        self.extra = [[None] * m for _ in range(n_steps)]
        for i in range(n_steps - 1, -1, -1):
            opts = options[order[i]]
            base = opts[0][0]
            self.suf_cost[i] = self.suf_cost[i + 1] + base
            for c in range(m):
                has = [c in o[1] for o in opts]
                self.suf_min[i][c] = self.suf_min[i + 1][c] + (1 if all(has) else 0)
                self.suf_max[i][c] = self.suf_max[i + 1][c] + (1 if any(has) else 0)
                without = [o[0] for o in opts if c not in o[1]]
                self.extra[i][c] = (min(without) - base) if without else None

    def lower_bound(self, i, scores):
        """Admissible bound on the cost of voters ``order[i:]``, or None if hopeless."""
        p, k, m = self.p, self.k, self.m
        p_max = scores[p] + self.suf_max[i][p]
        high = []
        for c in range(m):
            if c == p:
                continue
            if scores[c] + self.suf_min[i][c] > p_max:
                high.append(c)
        if len(high) >= k:
            return None
        over = [c for c in range(m) if c != p and scores[c] + self.suf_max[i][c] > p_max]
        q = len(over) - (k - 1)
        bound = self.suf_cost[i]
        if q <= 0:
            return bound
        demote = []
        for c in over:
            need = scores[c] + self.suf_max[i][c] - p_max
            deltas = sorted(
                self.extra[j][c]
                for j in range(i, len(self.order))
                if self.extra[j][c] is not None and c in self.options[self.order[j]][0][1]
            )
            # voters whose cheapest option already omits c cost nothing extra
            free = sum(
                1
                for j in range(i, len(self.order))
                if any(c in o[1] for o in self.options[self.order[j]])
                and c not in self.options[self.order[j]][0][1]
            )
            paid = need - free
            if paid <= 0:
                demote.append(0)
            elif paid > len(deltas):
                demote.append(None)
            else:
                demote.append(sum(deltas[:paid]))
        finite = sorted(d for d in demote if d is not None)
        if len(finite) < q:
            return None
        return bound + finite[q - 1]

    def run(self, scores, cols):
        self._dfs(0, scores, cols, 0, [])
        return self.best, self.best_choice

    def _dfs(self, i, scores, cols, cost, choice):
        self.nodes += 1
        if self.nodes > self.cap:
            raise ResourceError(f"branch and bound exceeded the node cap of {self.cap}", cap=self.cap)
        limit = self.instance.budget if self.best is None else self.best - 1
        lb = self.lower_bound(i, scores)
        if lb is None or cost + lb > limit:
            return
        if i == len(self.order):
            if candidates_above(scores, self.p) <= self.k - 1:
                self.best = cost
                self.best_choice = list(choice)
            return
        v = self.order[i]
        for opt in self.options[v]:
            c_opt, final, _ = opt
            if cost + c_opt > limit:
                break
            new_cols = cols
            if self.vi:
                new_cols = _advance_columns(cols, final)
                if new_cols is None:
                    continue
            for c in final:
                scores[c] += 1
            choice.append(opt)
            self._dfs(i + 1, scores, new_cols, cost + c_opt, choice)
            choice.pop()
            for c in final:
                scores[c] -= 1
            limit = self.instance.budget if self.best is None else self.best - 1


def _advance_columns(cols, final):
    """Column states (0 unseen, 1 open, 2 closed) after the next voter in order."""
    new = list(cols)
    for c, state in enumerate(cols):
        if c in final:
            if state == 2:
                return None
            new[c] = 1
        elif state == 1:
            new[c] = 2
    return tuple(new)


def _score_range(options, c, spare):
    """Lowest and highest final score of ``c`` reachable with ``spare`` extra cost."""
    base = 0
    gain, drop = [], []
    for opts in options:
        cheapest = opts[0][0]
        if c in opts[0][1]:
            base += 1
            out = [o[0] - cheapest for o in opts if c not in o[1]]
            if out:
                drop.append(min(out))
        else:
            into = [o[0] - cheapest for o in opts if c in o[1]]
            if into:
                gain.append(min(into))

    def affordable(extras):
        total, count = 0, 0
        for x in sorted(extras):
            if total + x > spare:
                break
            total += x
            count += 1
        return count

    return base - affordable(drop), base + affordable(gain)


def _relevant_candidates(options, m, p, limit):
    """Candidates whose side of ``p`` is not settled by the budget alone."""
    spare = limit - sum(opts[0][0] for opts in options)
    ranges = [_score_range(options, c, spare) for c in range(m)]
    p_lo, p_hi = ranges[p]
    return frozenset(
        c for c in range(m) if c != p and not ranges[c][0] > p_hi and not ranges[c][1] <= p_lo
    )


def _prune_dominated(options, p, relevant):
    """Drop options no better for ``p`` than a cheaper one (non-VI only)."""
    kept = []
    seen = []
    for opt in options:
        cost, final, _ = opt
        has_p = p in final
        rel = final & relevant
        if any(c2 <= cost and (hp2 or not has_p) and r2 <= rel for c2, hp2, r2 in seen):
            continue
        seen.append((cost, has_p, rel))
        kept.append(opt)
    return kept


def bb_solve(instance: BriberyInstance, max_nodes=None, dominance: bool = True) -> SolveOutcome:
    """Exact optimum by choosing one final ballot per voter with pruning.

    ``dominance=False`` keeps every per-voter option (slower; used to
    cross-check the pruning).
    """
    cap = resolve_cap(max_nodes)
    e, p = instance.election, instance.p
    limit = instance.budget
    options = [voter_options(instance, v, limit) for v in range(e.n)]
    vi_order = instance.witness.order if instance.witness.kind is DomainKind.VI else None

    if vi_order is None and dominance:
        for _ in range(3):
            relevant = _relevant_candidates(options, e.m, p, limit)
            options = [_prune_dominated(opts, p, relevant) for opts in options]

    scores = [0] * e.m
    fixed = []
    if vi_order is None:
        branching = []
        for v, opts in enumerate(options):
            if len(opts) == 1:
                fixed.append(opts[0])
                for c in opts[0][1]:
                    scores[c] += 1
            else:
                branching.append(v)
        order = sorted(branching, key=lambda v: (len(options[v]), v))
    else:
        order = list(vi_order)

    base = sum(o[0] for o in fixed)
    inner = instance.replace(budget=limit - base) if base <= limit else None
    if inner is None:
        return SolveOutcome.infeasible()
    search = _Search(inner, options, order, vi_order, cap)
    best, choice = search.run(scores, tuple([0] * e.m))
    if best is None:
        return SolveOutcome.infeasible()
    ops = [op for opt in fixed + choice for op in opt[2]]
    ops.sort(key=lambda op: op.voter)
    plan = BriberyPlan.from_ops(ops, instance.costs)
    return SolveOutcome.from_best(best + base, plan, instance.budget)


def bb_solve_deletions(instance: BriberyInstance, max_nodes=None) -> SolveOutcome:
    """Branch and bound restricted to deletion instances."""
    if instance.mode is not Mode.DELETE:
        raise InputError(f"bb_solve_deletions needs mode delete, got {instance.mode.value}")
    return bb_solve(instance, max_nodes)
