"""Hardness gadgets as instance generators, with forward plans and back-maps.

Three constructions are provided:

* exact cover by 3-sets  ->  priced deletions under a candidate axis,
* cubic independent set  ->  unit-price swaps under a candidate axis,
* exact cover by 3-sets  ->  priced swaps under a voter order (single winner).

Set and element indices are 0-based in code; candidate and voter names use
1-based labels (``x1``, ``s1``, ``c1``) as a reading aid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import (
    FORBIDDEN,
    BriberyInstance,
    BriberyPlan,
    CostModel,
    DomainWitness,
    Election,
    Mode,
    UnitOperation,
    apply_plan,
    verify_solution,
)
from .errors import InputError
from .generators import CubicGraph, Rx3cInstance, exact_covers, independent_sets

__all__ = [
    "ReductionBundle",
    "reduce_rx3c_to_del_ci",
    "build_plan_from_cover_del_ci",
    "extract_cover_del_ci",
    "reduce_cubic_is_to_swap_ci",
    "build_plan_from_independent_set",
    "extract_is_swap_ci",
    "reduce_rx3c_to_swap_vi",
    "build_plan_from_cover_swap_vi",
    "extract_cover_swap_vi",
    "exact_covers",
    "independent_sets",
]


@dataclass(frozen=True)
class ReductionBundle:
    """A generated instance plus the gadget role of every candidate and voter.

    ``params`` holds construction constants (``t``, ``L``, ``P``, ...) that the
    back-maps need.
    """

    instance: BriberyInstance
    candidate_roles: tuple
    voter_roles: tuple
    source: object
    params: dict = field(default_factory=dict)

    def candidate(self, name):
        return self.instance.election.candidates.index(name)

    def voter(self, name):
        return self.instance.election.voters.index(name)


def _check_source(src, kind):
    if not isinstance(src, kind):
        raise InputError(f"expected a {kind.__name__}, got {type(src).__name__}")


def _checked_plan(bundle, plan):
    report = verify_solution(bundle.instance, plan)
    if not report.valid:
        raise InputError("plan does not verify: " + "; ".join(report.messages))
    return apply_plan(bundle.instance.election, plan)


# -- exact cover -> deletions, candidate axis -------------------------------------


def reduce_rx3c_to_del_ci(src: Rx3cInstance) -> ReductionBundle:
    _check_source(src, Rx3cInstance)
    n = src.n
    names = (
        [f"s{j + 1}" for j in range(3 * n)]
        + [f"d{j + 1}" for j in range(2 * n)]
        + [f"x{i + 1}" for i in range(3 * n)]
        + ["p"]
    )
    roles = (
        [("set", j) for j in range(3 * n)]
        + [("dummy", j) for j in range(2 * n)]
        + [("universe", i) for i in range(3 * n)]
        + [("preferred",)]
    )
    set_pos = lambda j: j  # noqa: E731
    elem_pos = lambda i: 5 * n + i  # noqa: E731
    p = 8 * n

    voters, ballots, voter_roles = [], [], []
    table = {}
    for c in list(range(5 * n)) + [p]:
        for copy in "ab":
            voters.append(f"fixed-{names[c]}-{copy}")
            ballots.append(frozenset([c]))
            voter_roles.append(("fixed", c))
    for j, s in enumerate(src.sets):
        for i in sorted(s):
            v = len(ballots)
            lo, hi = set_pos(j), elem_pos(i)
            voters.append(f"sol-s{j + 1}-x{i + 1}")
            ballots.append(frozenset(range(lo, hi + 1)))
            voter_roles.append(("solution", j, i))
            for c in range(lo, hi + 1):
                table[(v, c)] = 1 if c in (lo, hi) else 0

    election = Election(tuple(names), tuple(ballots), tuple(voters))
    instance = BriberyInstance(
        election,
        DomainWitness.ci(range(8 * n + 1)),
        k=n + 1,
        p=p,
        budget=9 * n,
        costs=CostModel(Mode.DELETE, table, FORBIDDEN),
    )
    return ReductionBundle(instance, tuple(roles), tuple(voter_roles), src, {"n": n})


def build_plan_from_cover_del_ci(bundle: ReductionBundle, cover) -> BriberyPlan:
    """Delete every interior approval, then one exterior approval per solution voter."""
    src = bundle.source
    cover = set(cover)
    if not src.is_exact_cover(cover):
        raise InputError(f"{sorted(cover)} is not an exact cover")
    n = src.n
    ops = []
    for v, role in enumerate(bundle.voter_roles):
        if role[0] != "solution":
            continue
        _, j, i = role
        lo, hi = j, 5 * n + i
        drop = hi if j in cover else lo
        for c in range(lo, hi + 1):
            if c not in (lo, hi) or c == drop:
                ops.append(UnitOperation.delete(v, c))
    return BriberyPlan.from_ops(ops, bundle.instance.costs)


def extract_cover_del_ci(bundle: ReductionBundle, plan):
    """Sets whose candidate keeps an approval from an active solution voter.

    A solution voter is active when it lost its universe candidate and kept
    its set candidate.  Returns the sorted set indices if they form an exact
    cover, else ``None``.
    """
    after = _checked_plan(bundle, plan)
    n = bundle.source.n
    chosen = set()
    for v, role in enumerate(bundle.voter_roles):
        if role[0] != "solution":
            continue
        _, j, i = role
        ballot = after.ballots[v]
        if 5 * n + i not in ballot and j in ballot:
            chosen.add(j)
    cover = tuple(sorted(chosen))
    return cover if bundle.source.is_exact_cover(cover) else None


# -- cubic independent set -> swaps, candidate axis -------------------------------


def reduce_cubic_is_to_swap_ci(graph: CubicGraph, h: int) -> ReductionBundle:
    """Swap gadget with budget ``3h`` and ``t = 3h + 1`` fillers between vertices.

    Edge voters approve the whole axis stretch between their endpoints, so a
    vertex can also receive approvals from edges passing over it; padding
    voters top every vertex up to ``L = |E|`` approvals.
    """
    _check_source(graph, CubicGraph)
    n = graph.n
    if not isinstance(h, int) or not 0 <= h <= n:
        raise InputError(f"h must lie in [0, {n}]")
    budget = 3 * h
    t = budget + 1
    L = len(graph.edges)

    names, roles = [], []
    vertex_pos = []
    groups = []
    for g in range(n + 1):
        groups.append(list(range(len(names), len(names) + t)))
        for q in range(t):
            names.append(f"f{g + 1}.{q + 1}")
            roles.append(("filler", g))
        if g < n:
            vertex_pos.append(len(names))
            names.append(f"c{g + 1}")
            roles.append(("vertex", g))
    for q in range(t):
        names.append(f"b{q + 1}")
        roles.append(("dummy", q))
    p = len(names)
    names.append("p")
    roles.append(("preferred",))

    voters, ballots, voter_roles = [], [], []
    coverage = [0] * n
    for a, b in graph.edges:
        lo, hi = vertex_pos[a], vertex_pos[b]
        voters.append(f"edge-c{a + 1}-c{b + 1}")
        ballots.append(frozenset(range(lo, hi + 1)))
        voter_roles.append(("edge", a, b))
        for u in range(n):
            if lo <= vertex_pos[u] <= hi:
                coverage[u] += 1
    for u in range(n):
        pos = vertex_pos[u]
        for q in range(L - coverage[u]):
            voters.append(f"pad-c{u + 1}-{q + 1}")
            ballots.append(frozenset(range(pos - t, pos + t + 1)))
            voter_roles.append(("padding", u))
    for q in range(L - 3):
        voters.append(f"pv{q + 1}")
        ballots.append(frozenset([p]))
        voter_roles.append(("preferred",))
    for g, group in enumerate(groups):
        for q in range(L + 4 * t):
            voters.append(f"fill{g + 1}-{q + 1}")
            ballots.append(frozenset(group))
            voter_roles.append(("filler", g))

    election = Election(tuple(names), tuple(ballots), tuple(voters))
    instance = BriberyInstance(
        election,
        DomainWitness.ci(range(len(names))),
        k=t * (n + 1) + (n - h) + 1,
        p=p,
        budget=budget,
        costs=CostModel.unit(Mode.SWAP),
    )
    params = {"h": h, "t": t, "L": L, "vertex_positions": tuple(vertex_pos)}
    return ReductionBundle(instance, tuple(roles), tuple(voter_roles), graph, params)


def build_plan_from_independent_set(bundle: ReductionBundle, vertices) -> BriberyPlan:
    """Each chosen vertex hands its three edge approvals to the filler past the other end."""
    graph = bundle.source
    chosen = set(vertices)
    if any(not 0 <= u < graph.n for u in chosen):
        raise InputError("vertex index out of range")
    if len(chosen) != bundle.params["h"]:
        raise InputError(f"need exactly {bundle.params['h']} vertices, got {len(chosen)}")
    if not graph.is_independent(chosen):
        raise InputError(f"{sorted(chosen)} is not an independent set")
    pos = bundle.params["vertex_positions"]
    ops = []
    for v, role in enumerate(bundle.voter_roles):
        if role[0] != "edge":
            continue
        _, a, b = role
        if a in chosen:
            ops.append(UnitOperation.swap(v, pos[a], pos[b] + 1))
        elif b in chosen:
            ops.append(UnitOperation.swap(v, pos[b], pos[a] - 1))
    return BriberyPlan.from_ops(ops, bundle.instance.costs)


def extract_is_swap_ci(bundle: ReductionBundle, plan):
    """Vertices left with ``L - 3`` approvals after the plan."""
    after = _checked_plan(bundle, plan)
    scores = after.scores()
    target = bundle.params["L"] - 3
    pos = bundle.params["vertex_positions"]
    return tuple(u for u in range(bundle.source.n) if scores[pos[u]] == target)


# -- exact cover -> swaps, voter order --------------------------------------------


def reduce_rx3c_to_swap_vi(src: Rx3cInstance) -> ReductionBundle:
    """Single-winner swap gadget on voters ``v0..v10n`` in natural order.

    Voter ``v_i`` (``1 <= i <= 3n``) moving ``S''_t -> S'_t`` is free exactly
    when ``x_i`` is *not* in ``S_t``; members of ``S_t`` instead route that
    approval to their content candidate ``y_{t,i}``.
    """
    _check_source(src, Rx3cInstance)
    n = src.n
    P = 7 * n - 1
    n_voters = 10 * n + 1

    names, roles = ["p"], [("preferred",)]
    x_idx = []
    for i in range(3 * n):
        x_idx.append(len(names))
        names.append(f"x{i + 1}")
        roles.append(("universe", i))
    s1_idx, s2_idx, y_idx = [], [], []
    for t, s in enumerate(src.sets):
        s1_idx.append(len(names))
        names.append(f"S{t + 1}'")
        roles.append(("set-primed", t))
        s2_idx.append(len(names))
        names.append(f"S{t + 1}''")
        roles.append(("set-double-primed", t))
        ys = {}
        for i in sorted(s):
            ys[i] = len(names)
            names.append(f"y{t + 1}.{i + 1}")
            roles.append(("content", t, i))
        y_idx.append(ys)
    m = len(names)
    p = 0

    ballots = [set() for _ in range(n_voters)]
    for v in range(1, P + 1):
        ballots[v].add(p)
    for i in range(3 * n):
        # x_{i+1} is approved by v_{i+1} .. v_{i+1+P}
        for v in range(i + 1, i + 2 + P):
            ballots[v].add(x_idx[i])
    for t in range(3 * n):
        for v in range(n_voters):
            ballots[v].add(s2_idx[t])

    table = {}
    for v in range(n_voters):
        for c in range(1, m):
            table[(v, p, c)] = FORBIDDEN
            table[(v, c, p)] = FORBIDDEN
    for t, s in enumerate(src.sets):
        for i in s:
            table[(i + 1, x_idx[i], s1_idx[t])] = 0
            table[(i + 1, s2_idx[t], y_idx[t][i])] = 0
        table[(0, s2_idx[t], s1_idx[t])] = 0
        table[(3 * n + 1, s2_idx[t], s1_idx[t])] = 0
        for i in range(3 * n):
            if i not in s:
                table[(i + 1, s2_idx[t], s1_idx[t])] = 0
        for v in range(P, 10 * n):
            table[(v, s2_idx[t], s1_idx[t])] = 0
        table[(10 * n, s2_idx[t], s1_idx[t])] = 1

    voter_roles = [("voter", v) for v in range(n_voters)]
    election = Election(tuple(names), tuple(frozenset(b) for b in ballots), tuple(f"v{v}" for v in range(n_voters)))
    instance = BriberyInstance(
        election,
        DomainWitness.vi(range(n_voters)),
        k=1,
        p=p,
        budget=2 * n,
        costs=CostModel(Mode.SWAP, table, FORBIDDEN),
    )
    params = {
        "P": P,
        "universe": tuple(x_idx),
        "set_primed": tuple(s1_idx),
        "set_double_primed": tuple(s2_idx),
        "content": tuple(tuple(sorted(d.items())) for d in y_idx),
    }
    return ReductionBundle(instance, tuple(roles), tuple(voter_roles), src, params)


def build_plan_from_cover_swap_vi(bundle: ReductionBundle, cover) -> BriberyPlan:
    """Cover sets drain ``S''`` from the top voters, the rest from the bottom ones."""
    src = bundle.source
    cover = set(cover)
    if not src.is_exact_cover(cover):
        raise InputError(f"{sorted(cover)} is not an exact cover")
    n = src.n
    P = bundle.params["P"]
    x_idx = bundle.params["universe"]
    s1, s2 = bundle.params["set_primed"], bundle.params["set_double_primed"]
    content = [dict(pairs) for pairs in bundle.params["content"]]
    ops = []
    for t, s in enumerate(src.sets):
        if t in cover:
            for v in range(0, 3 * n + 2):
                i = v - 1
                if 0 <= i < 3 * n and i in s:
                    ops.append(UnitOperation.swap(v, x_idx[i], s1[t]))
                    ops.append(UnitOperation.swap(v, s2[t], content[t][i]))
                else:
                    ops.append(UnitOperation.swap(v, s2[t], s1[t]))
        else:
            for v in range(P, 10 * n + 1):
                ops.append(UnitOperation.swap(v, s2[t], s1[t]))
    ops.sort(key=lambda op: op.voter)
    return BriberyPlan.from_ops(ops, bundle.instance.costs)


def extract_cover_swap_vi(bundle: ReductionBundle, plan):
    """Sets whose ``S''`` lost the approval of the first voter; ``None`` if not a cover."""
    after = _checked_plan(bundle, plan)
    s2 = bundle.params["set_double_primed"]
    chosen = tuple(t for t in range(len(s2)) if s2[t] not in after.ballots[0])
    return chosen if bundle.source.is_exact_cover(chosen) else None
