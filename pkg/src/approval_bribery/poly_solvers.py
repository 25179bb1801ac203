"""Optimal polynomial-time bribery for the tractable CI/VI variants.

Every solver returns a :class:`SolveOutcome` whose ``unconstrained_cost`` is
the cheapest successful bribery regardless of budget (``None`` if none
exists); ``feasible`` is the budget verdict.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from .core import (
    FORBIDDEN,
    BriberyInstance,
    BriberyPlan,
    DomainKind,
    Mode,
    SolveOutcome,
    UnitOperation,
    candidates_above,
)
from .errors import InputError
from .structure import is_interval_on

INF = float("inf")


def _require(instance: BriberyInstance, mode: Mode, kind: DomainKind, name: str):
    if instance.mode is not mode:
        raise InputError(f"{name} needs mode {mode.value}, got {instance.mode.value}")
    if instance.witness.kind is not kind:
        raise InputError(f"{name} needs a {kind.value} witness, got {instance.witness.kind.value}")


def _finish(instance, best):
    """``best`` is ``None`` or ``(cost, ops)``."""
    if best is None:
        return SolveOutcome.infeasible()
    cost, ops = best
    ops = sorted(ops, key=lambda op: op.sort_key)
    plan = BriberyPlan.from_ops(ops, instance.costs)
    assert plan.total_cost == cost, (plan.total_cost, cost)
    return SolveOutcome.from_best(cost, plan, instance.budget)


def _better(candidate, best):
    """Order plans by cost, then lexicographically by operation keys."""
    if best is None:
        return True
    ckey = (candidate[0], sorted(op.sort_key for op in candidate[1]))
    bkey = (best[0], sorted(op.sort_key for op in best[1]))
    return ckey < bkey


def _sum_costs(costs, keys):
    total = 0
    for key in keys:
        c = costs.lookup(key)
        if c is FORBIDDEN:
            return None
        total += c
    return total


def missing_approvals(scores, p, k):
    """Fewest extra approvals ``p`` needs to join a winning committee, or None."""
    others = sorted((s for c, s in enumerate(scores) if c != p), reverse=True)
    # p needs at most k-1 candidates strictly above it
    if len(others) <= k - 1:
        return 0
    return max(0, others[k - 1] - scores[p])


# -- adding approvals, voter interval ------------------------------------------


def solve_add_vi(instance: BriberyInstance) -> SolveOutcome:
    """Extend ``p``'s voter interval by the cheapest split of the missing approvals."""
    _require(instance, Mode.ADD, DomainKind.VI, "solve_add_vi")
    e, p, costs = instance.election, instance.p, instance.costs
    order = instance.witness.order
    n = e.n
    scores = e.scores()
    s = missing_approvals(scores, p, instance.k)
    if scores[p] + s > n:
        return SolveOutcome.infeasible()
    if s == 0:
        return _finish(instance, (0, []))

    position = {v: q for q, v in enumerate(order)}
    column = sorted(position[v] for v in e.supporters(p))
    windows = []
    if column:
        i, j = column[0], column[-1]
        for left in range(s + 1):
            right = s - left
            if i - left >= 0 and j + right <= n - 1:
                windows.append(list(range(i - left, i)) + list(range(j + 1, j + right + 1)))
    else:
        for a in range(n - s + 1):
            windows.append(list(range(a, a + s)))

    best = None
    for positions in windows:
        voters = [order[q] for q in positions]
        cost = _sum_costs(costs, [(v, p) for v in voters])
        if cost is None:
            continue
        cand = (cost, [UnitOperation.add(v, p) for v in voters])
        if _better(cand, best):
            best = cand
    return _finish(instance, best)


# -- adding approvals, candidate interval ----------------------------------------


@dataclass
class SidePartition:
    """Voters grouped by where their ballot sits relative to ``p`` on the axis.

    ``left_buckets[i - 1]`` holds the voters whose ballot lies left of ``p``
    and ends exactly at the i-th candidate left of ``p`` (likewise right).
    Each bucket entry is ``(extension_cost, voter)`` sorted ascending; voters
    whose extension includes a forbidden addition are dropped.
    """

    left: list
    right: list
    with_p: list = field(default_factory=list)
    empty: list = field(default_factory=list)
    left_buckets: list = field(default_factory=list)
    right_buckets: list = field(default_factory=list)


def side_partition(instance: BriberyInstance) -> SidePartition:
    e, p, costs = instance.election, instance.p, instance.costs
    axis = instance.witness.order
    pos = {c: q for q, c in enumerate(axis)}
    pp = pos[p]
    left = [axis[pp - i] for i in range(1, pp + 1)]
    right = [axis[pp + i] for i in range(1, len(axis) - pp)]
    part = SidePartition(left, right)
    part.left_buckets = [[] for _ in left]
    part.right_buckets = [[] for _ in right]
    for v, ballot in enumerate(e.ballots):
        if p in ballot:
            part.with_p.append(v)
            continue
        if not ballot:
            cost = _sum_costs(costs, [(v, p)])
            if cost is not None:
                part.empty.append((cost, v))
            continue
        places = [pos[c] for c in ballot]
        if max(places) < pp:
            i = pp - max(places)
            fill = left[: i - 1] + [p]
            cost = _sum_costs(costs, [(v, c) for c in fill])
            if cost is not None:
                part.left_buckets[i - 1].append((cost, v))
        else:
            i = min(places) - pp
            fill = right[: i - 1] + [p]
            cost = _sum_costs(costs, [(v, c) for c in fill])
            if cost is not None:
                part.right_buckets[i - 1].append((cost, v))
    part.empty.sort()
    for bucket in part.left_buckets + part.right_buckets:
        bucket.sort()
    return part


def _prefix(bucket):
    out = [0]
    for cost, _ in bucket:
        out.append(out[-1] + cost)
    return out


class SideTable:
    """Bottom-up table of the cheapest way to extend ``e`` ballots on one side.

    ``f[i][e][t]`` is the cheapest cost of extending exactly ``e`` voters from
    buckets ``1..i`` so that at most ``t`` of the first ``i`` candidates on
    this side finish strictly above ``p``, where ``p`` ends with
    ``offset + e`` approvals counted at level ``i``.
    """

    def __init__(self, buckets, side_scores, offset, max_t):
        self.buckets = buckets
        self.scores = side_scores
        self.offset = offset
        self.max_t = max_t
        self.max_e = sum(len(b) for b in buckets)
        self.prefix = [_prefix(b) for b in buckets]
        self.f, self.choice = self._fill()

    def chi(self, i, e):
        return 1 if self.scores[i - 1] > self.offset + e else 0

    def _fill(self):
        E, T = self.max_e, self.max_t
        f = [[[INF] * (T + 1) for _ in range(E + 1)]]
        for t in range(T + 1):
            f[0][0][t] = 0
        choice = [None]
        for i in range(1, len(self.buckets) + 1):
            size = len(self.buckets[i - 1])
            pre = self.prefix[i - 1]
            row = [[INF] * (T + 1) for _ in range(E + 1)]
            pick = [[0] * (T + 1) for _ in range(E + 1)]
            prev = f[i - 1]
            for e in range(E + 1):
                x = self.chi(i, e)
                for t in range(x, T + 1):
                    best, arg = INF, 0
                    for ep in range(min(e, size) + 1):
                        val = pre[ep] + prev[e - ep][t - x]
                        if val < best:
                            best, arg = val, ep
                    row[e][t] = best
                    pick[e][t] = arg
            f.append(row)
            choice.append(pick)
        return f, choice

    def value(self, e, t):
        if e > self.max_e:
            return INF
        return self.f[len(self.buckets)][e][min(t, self.max_t)]

    def chosen_voters(self, e, t):
        """Voters extended by an optimal solution for ``value(e, t)``."""
        voters = []
        for i in range(len(self.buckets), 0, -1):
            ep = self.choice[i][e][t]
            voters.extend((i, v) for _, v in self.buckets[i - 1][:ep])
            t -= self.chi(i, e)
            e -= ep
        assert e == 0
        return voters


def side_table_topdown(buckets, side_scores, offset, max_t):
    """Memoized recursive evaluation of the same table (cross-check only)."""
    prefix = [_prefix(b) for b in buckets]

    @lru_cache(maxsize=None)
    def f(i, e, t):
        if t < 0:
            return INF
        if i == 0:
            return 0 if e == 0 else INF
        x = 1 if side_scores[i - 1] > offset + e else 0
        size = len(buckets[i - 1])
        return min(prefix[i - 1][ep] + f(i - 1, e - ep, t - x) for ep in range(min(e, size) + 1))

    return f


def solve_add_ci(instance: BriberyInstance) -> SolveOutcome:
    """Dynamic program over ballots ending at each candidate left/right of ``p``."""
    _require(instance, Mode.ADD, DomainKind.CI, "solve_add_ci")
    e, p, k = instance.election, instance.p, instance.k
    scores = e.scores()
    sp = scores[p]
    part = side_partition(instance)
    left_scores = [scores[c] for c in part.left]
    right_scores = [scores[c] for c in part.right]
    empty_prefix = _prefix(part.empty)
    n_left = sum(len(b) for b in part.left_buckets)
    n_right = sum(len(b) for b in part.right_buckets)
    max_t = k - 1

    tables = {}

    def table(side, offset):
        key = (side, offset)
        if key not in tables:
            if side == "L":
                tables[key] = SideTable(part.left_buckets, left_scores, offset, max_t)
            else:
                tables[key] = SideTable(part.right_buckets, right_scores, offset, max_t)
        return tables[key]

    best = None
    for x0 in range(len(part.empty) + 1):
        for xl in range(n_left + 1):
            for xr in range(n_right + 1):
                tl_table = table("L", sp + xr + x0)
                tr_table = table("R", sp + xl + x0)
                for tl in range(max_t + 1):
                    tr = max_t - tl
                    total = tl_table.value(xl, tl) + tr_table.value(xr, tr) + empty_prefix[x0]
                    if total == INF:
                        continue
                    key = (total, x0, xl, xr, tl)
                    if best is None or key < best:
                        best = key
    if best is None:
        return SolveOutcome.infeasible()
    total, x0, xl, xr, tl = best
    tr = max_t - tl
    ops = [UnitOperation.add(v, p) for _, v in part.empty[:x0]]
    for i, v in table("L", sp + xr + x0).chosen_voters(xl, tl):
        ops.extend(UnitOperation.add(v, c) for c in part.left[: i - 1] + [p])
    for i, v in table("R", sp + xl + x0).chosen_voters(xr, tr):
        ops.extend(UnitOperation.add(v, c) for c in part.right[: i - 1] + [p])
    return _finish(instance, (int(total), ops))


# -- deleting approvals, voter interval ------------------------------------------


def solve_del_vi(instance: BriberyInstance) -> SolveOutcome:
    """Trim the cheapest superior candidates down to ``p``'s score from their ends."""
    _require(instance, Mode.DELETE, DomainKind.VI, "solve_del_vi")
    e, p, k, costs = instance.election, instance.p, instance.k, instance.costs
    order = instance.witness.order
    position = {v: q for q, v in enumerate(order)}
    scores = e.scores()
    s = scores[p]
    superior = [c for c in range(e.m) if c != p and scores[c] > s]
    need = len(superior) - (k - 1)
    if need <= 0:
        return _finish(instance, (0, []))

    priced = []
    for c in superior:
        column = sorted(position[v] for v in e.supporters(c))
        t = scores[c] - s
        best = None
        for front in range(t + 1):
            back = t - front
            positions = column[:front] + column[len(column) - back :]
            voters = [order[q] for q in positions]
            cost = _sum_costs(costs, [(v, c) for v in voters])
            if cost is None:
                continue
            cand = (cost, [UnitOperation.delete(v, c) for v in voters])
            if _better(cand, best):
                best = cand
        if best is not None:
            priced.append((best[0], c, best[1]))
    if len(priced) < need:
        return SolveOutcome.infeasible()
    priced.sort(key=lambda item: (item[0], item[1]))
    chosen = priced[:need]
    return _finish(instance, (sum(item[0] for item in chosen), [op for item in chosen for op in item[2]]))


# -- swapping approvals to p, candidate interval ---------------------------------


def eligible_moves_ci(instance: BriberyInstance):
    """``{donor: [(cost, voter), ...]}`` of single swaps to ``p`` that keep the ballot an interval.

    A voter not approving ``p`` has at most one such swap: either its ballot
    is a single candidate, or it is an interval adjacent to ``p`` and the far
    end moves to ``p``.
    """
    e, p, costs = instance.election, instance.p, instance.costs
    pos = {c: q for q, c in enumerate(instance.witness.order)}
    moves = {}
    for v, ballot in enumerate(e.ballots):
        if p in ballot or not ballot:
            continue
        found = 0
        for c in ballot:
            after = (ballot - {c}) | {p}
            if not is_interval_on([pos[x] for x in after]):
                continue
            found += 1
            cost = costs.lookup((v, c, p))
            if cost is not FORBIDDEN:
                moves.setdefault(c, []).append((cost, v))
        assert found <= 1
    for lst in moves.values():
        lst.sort()
    return moves


def solve_swap_to_p_ci(instance: BriberyInstance) -> SolveOutcome:
    """Guess ``p``'s final score and distribute the moves among donors optimally.

    For a guessed final score ``y`` the plan takes ``j_c`` cheapest moves from
    each donor ``c`` with ``sum(j_c) = y - score(p)``; at least
    ``|S| - (k - 1)`` candidates of ``S`` (those above ``y``) must lose enough
    approvals to drop to ``y``.  A small knapsack over donors picks the
    ``j_c``.
    """
    _require(instance, Mode.SWAP_TO_P, DomainKind.CI, "solve_swap_to_p_ci")
    e, p, k = instance.election, instance.p, instance.k
    scores = e.scores()
    sp = scores[p]
    moves = eligible_moves_ci(instance)
    donors = sorted(moves)
    prefix = {c: _prefix(moves[c]) for c in donors}
    total_moves = sum(len(moves[c]) for c in donors)

    best = None
    for y in range(sp, min(e.n, sp + total_moves) + 1):
        budget_ops = y - sp
        above = [c for c in range(e.m) if c != p and scores[c] > y]
        need = max(0, len(above) - (k - 1))
        above_set = set(above)
        if any(c not in moves for c in above) and need > sum(1 for c in above if c in moves):
            continue
        # state: (ops used, covered capped at need) -> (cost, picks)
        states = {(0, 0): (0, ())}
        for c in donors:
            nxt = {}
            cap = len(moves[c])
            for (used, covered), (cost, picks) in states.items():
                for j in range(min(cap, budget_ops - used) + 1):
                    cov = covered
                    if c in above_set and j >= scores[c] - y:
                        cov = min(need, covered + 1)
                    key = (used + j, cov)
                    val = (cost + prefix[c][j], picks + ((c, j),))
                    if key not in nxt or val < nxt[key]:
                        nxt[key] = val
            states = nxt
        final = states.get((budget_ops, need))
        if final is None:
            continue
        cost, picks = final
        ops = [UnitOperation.swap(v, c, p) for c, j in picks for _, v in moves[c][:j]]
        cand = (cost, ops)
        if _better(cand, best):
            best = cand
    return _finish(instance, best)


# -- swapping approvals to p, voter interval -------------------------------------


@dataclass(frozen=True, order=True)
class SwapViNode:
    """``p`` approved exactly by positions ``a..b``; ``d`` dangerous candidates still above."""

    a: int
    b: int
    d: int


def _columns_by_position(e, order):
    position = {v: q for q, v in enumerate(order)}
    cols = [set() for _ in range(e.m)]
    for v, ballot in enumerate(e.ballots):
        for c in ballot:
            cols[c].add(position[v])
    return cols


def _swap_vi_core(e, order, p, k, costs):
    """Cheapest ``(cost, [(position, donor), ...])`` for a nonempty ``p`` column."""
    n = e.n
    cols = _columns_by_position(e, order)
    scores = [len(col) for col in cols]
    x, y = min(cols[p]), max(cols[p])
    others = [c for c in range(e.m) if c != p]

    def weight(q, c):
        return costs.lookup((order[q], c, p))

    best = None
    for alpha in range(x + 1):
        for beta in range(y, n):
            s = beta - alpha + 1
            dangerous = {c for c in others if scores[c] > s}
            start = SwapViNode(x, y, len(dangerous))
            dist = {start: 0}
            back = {}
            heap = [(0, start)]
            found = None
            while heap:
                du, u = heapq.heappop(heap)
                if du > dist.get(u, INF):
                    continue
                if u.a == alpha and u.b == beta and u.d < k:
                    found = u
                    break
                for c in others:
                    col = cols[c]
                    # grow the left stretch through voters approving c
                    left_opts = [(0, 0)]
                    acc = 0
                    for length in range(1, u.a - alpha + 1):
                        q = u.a - length
                        if q not in col:
                            break
                        w = weight(q, c)
                        if w is FORBIDDEN:
                            break
                        acc += w
                        left_opts.append((length, acc))
                    right_opts = [(0, 0)]
                    acc = 0
                    for length in range(1, beta - u.b + 1):
                        q = u.b + length
                        if q not in col:
                            break
                        w = weight(q, c)
                        if w is FORBIDDEN:
                            break
                        acc += w
                        right_opts.append((length, acc))
                    for ll, lw in left_opts:
                        for rl, rw in right_opts:
                            if ll == 0 and rl == 0:
                                continue
                            removed = set(range(u.a - ll, u.a)) | set(range(u.b + 1, u.b + rl + 1))
                            if not is_interval_on(sorted(col - removed)):
                                continue
                            d = u.d
                            if c in dangerous and scores[c] - ll - rl <= s:
                                d -= 1
                            v = SwapViNode(u.a - ll, u.b + rl, d)
                            nd = du + lw + rw
                            if nd < dist.get(v, INF):
                                dist[v] = nd
                                back[v] = (u, c, ll, rl)
                                heapq.heappush(heap, (nd, v))
            if found is None:
                continue
            moves = []
            node = found
            while node != start:
                prev, c, ll, rl = back[node]
                moves.extend((q, c) for q in range(prev.a - ll, prev.a))
                moves.extend((q, c) for q in range(prev.b + 1, prev.b + rl + 1))
                node = prev
            ops = [UnitOperation.swap(order[q], c, p) for q, c in moves]
            cand = (dist[found], ops)
            if _better(cand, best):
                best = cand
    return best


def solve_swap_to_p_vi(instance: BriberyInstance) -> SolveOutcome:
    """Shortest paths over ``(a, b, d)`` states for every target interval of ``p``."""
    _require(instance, Mode.SWAP_TO_P, DomainKind.VI, "solve_swap_to_p_vi")
    e, p, k, costs = instance.election, instance.p, instance.k, instance.costs
    order = instance.witness.order
    if candidates_above(e.scores(), p) <= k - 1:
        return _finish(instance, (0, []))
    if e.supporters(p):
        return _finish(instance, _swap_vi_core(e, order, p, k, costs))

    # p unapproved: branch over every structure-preserving first swap to p
    cols = _columns_by_position(e, order)
    best = None
    for q, v in enumerate(order):
        for c in sorted(e.ballots[v]):
            if not is_interval_on(sorted(cols[c] - {q})):
                continue
            w = costs.lookup((v, c, p))
            if w is FORBIDDEN:
                continue
            first = UnitOperation.swap(v, c, p)
            ballots = list(e.ballots)
            ballots[v] = (ballots[v] - {c}) | {p}
            after = e.with_ballots(ballots)
            if candidates_above(after.scores(), p) <= k - 1:
                sub = (0, [])
            else:
                sub = _swap_vi_core(after, order, p, k, costs)
            if sub is None:
                continue
            cand = (w + sub[0], [first] + sub[1])
            if _better(cand, best):
                best = cand
    return _finish(instance, best)


POLY_SOLVERS = {
    "add-ci": solve_add_ci,
    "add-vi": solve_add_vi,
    "del-vi": solve_del_vi,
    "swap2p-ci": solve_swap_to_p_ci,
    "swap2p-vi": solve_swap_to_p_vi,
}

DISPATCH = {
    (Mode.ADD, DomainKind.CI): "add-ci",
    (Mode.ADD, DomainKind.VI): "add-vi",
    (Mode.DELETE, DomainKind.VI): "del-vi",
    (Mode.SWAP_TO_P, DomainKind.CI): "swap2p-ci",
    (Mode.SWAP_TO_P, DomainKind.VI): "swap2p-vi",
}


def solver_for(instance: BriberyInstance):
    """Name of the polynomial solver for this (mode, witness) pair, or None."""
    return DISPATCH.get((instance.mode, instance.witness.kind))
