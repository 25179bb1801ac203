"""Seeded generators for source problems and random bribery instances."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .core import (
    FORBIDDEN,
    BriberyInstance,
    CostModel,
    DomainKind,
    DomainWitness,
    Election,
    Mode,
    OpKind,
    op_kind_for,
)
from .errors import InputError


@dataclass(frozen=True)
class Rx3cInstance:
    """Universe ``0..3n-1`` and ``3n`` triples; every element lies in exactly three."""

    n: int
    sets: tuple

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(frozenset(s) for s in self.sets))
        if not isinstance(self.n, int) or self.n < 1:
            raise InputError("RX3C needs n >= 1")
        if len(self.sets) != 3 * self.n:
            raise InputError(f"RX3C needs exactly {3 * self.n} sets, got {len(self.sets)}")
        occurrences = [0] * (3 * self.n)
        for s in self.sets:
            if len(s) != 3:
                raise InputError(f"set {sorted(s)} does not have three elements")
            for x in s:
                if not isinstance(x, int) or not 0 <= x < 3 * self.n:
                    raise InputError(f"element {x!r} outside the universe")
                occurrences[x] += 1
        if any(o != 3 for o in occurrences):
            raise InputError("every element must occur in exactly three sets")

    @property
    def universe(self):
        return tuple(range(3 * self.n))

    def is_exact_cover(self, cover) -> bool:
        cover = list(cover)
        if len(cover) != self.n or len(set(cover)) != self.n:
            return False
        if any(not 0 <= j < len(self.sets) for j in cover):
            return False
        covered = set()
        for j in cover:
            covered |= self.sets[j]
        return len(covered) == 3 * self.n


@dataclass(frozen=True)
class CubicGraph:
    n: int
    edges: tuple

    def __post_init__(self):
        edges = tuple(sorted(tuple(sorted(e)) for e in self.edges))
        object.__setattr__(self, "edges", edges)
        if len(set(edges)) != len(edges):
            raise InputError("cubic graph has a repeated edge")
        degree = [0] * self.n
        for a, b in edges:
            if a == b or not (0 <= a < self.n and 0 <= b < self.n):
                raise InputError(f"bad edge ({a}, {b})")
            degree[a] += 1
            degree[b] += 1
        if any(d != 3 for d in degree):
            raise InputError("every vertex of a cubic graph needs degree 3")

    def neighbors(self, u):
        return sorted({b for a, b in self.edges if a == u} | {a for a, b in self.edges if b == u})

    def is_independent(self, vertices) -> bool:
        vs = set(vertices)
        return not any(a in vs and b in vs for a, b in self.edges)


def exact_covers(src: Rx3cInstance):
    """All exact covers (as sorted index tuples) by exhaustive search."""
    return [
        combo
        for combo in itertools.combinations(range(len(src.sets)), src.n)
        if src.is_exact_cover(combo)
    ]


def independent_sets(graph: CubicGraph, h: int):
    return [
        combo
        for combo in itertools.combinations(range(graph.n), h)
        if graph.is_independent(combo)
    ]


def gen_rx3c(n: int, seed: int, max_tries: int = 10000) -> Rx3cInstance:
    """Random RX3C instance from three shuffled copies of the universe.

    The copies are cut into consecutive triples; draws with a repeated
    element inside a triple are rejected.  No cover is planted, so both yes-
    and no-instances occur.
    """
    if not isinstance(n, int) or n < 1:
        raise InputError("gen_rx3c needs n >= 1")
    rng = random.Random(seed)
    stubs = [x for x in range(3 * n) for _ in range(3)]
    for _ in range(max_tries):
        rng.shuffle(stubs)
        triples = [frozenset(stubs[i : i + 3]) for i in range(0, 9 * n, 3)]
        if all(len(tr) == 3 for tr in triples):
            return Rx3cInstance(n, tuple(triples))
    raise InputError(f"no RX3C instance found in {max_tries} tries")


def gen_cubic_graph(n: int, seed: int, max_tries: int = 10000) -> CubicGraph:
    """Random simple cubic graph via the configuration model with rejection."""
    if not isinstance(n, int) or n < 4 or n % 2:
        raise InputError("cubic graphs need an even vertex count of at least 4")
    rng = random.Random(seed)
    for _ in range(max_tries):
        stubs = [v for v in range(n) for _ in range(3)]
        rng.shuffle(stubs)
        edges = set()
        ok = True
        for a, b in zip(stubs[0::2], stubs[1::2]):
            e = (min(a, b), max(a, b))
            if a == b or e in edges:
                ok = False
                break
            edges.add(e)
        if ok:
            return CubicGraph(n, tuple(sorted(edges)))
    raise InputError(f"no simple cubic graph found in {max_tries} tries")


def _random_interval(rng, items, density):
    length = sum(1 for _ in items if rng.random() < density)
    start = rng.randint(0, len(items) - length)
    return items[start : start + length]


def gen_random_election(m: int, n: int, density: float, domain, seed: int):
    """Random election and witness; ``domain`` is ci, vi or unrestricted."""
    if m < 1 or n < 1:
        raise InputError("need m >= 1 and n >= 1")
    if not 0 < density <= 1:
        raise InputError("density must lie in (0, 1]")
    domain = DomainKind(domain)
    rng = random.Random(seed)
    candidates = tuple(f"c{i}" for i in range(m))
    if domain is DomainKind.CI:
        axis = list(range(m))
        rng.shuffle(axis)
        ballots = [frozenset(_random_interval(rng, axis, density)) for _ in range(n)]
        return Election(candidates, ballots), DomainWitness.ci(axis)
    if domain is DomainKind.VI:
        order = list(range(n))
        rng.shuffle(order)
        ballots = [set() for _ in range(n)]
        for c in range(m):
            for v in _random_interval(rng, order, density):
                ballots[v].add(c)
        return Election(candidates, ballots), DomainWitness.vi(order)
    ballots = [frozenset(c for c in range(m) if rng.random() < density) for _ in range(n)]
    return Election(candidates, ballots), DomainWitness.unrestricted()


def gen_random_costs(election, mode, rng, values=(0, 1, 2, FORBIDDEN), p=None):
    """A cost table pricing every operation of the mode with a random value."""
    mode = Mode(mode)
    table = {}
    cands = range(election.m)
    for v in range(election.n):
        if op_kind_for(mode) is OpKind.SWAP:
            targets = [p] if mode is Mode.SWAP_TO_P else cands
            for a in cands:
                for b in targets:
                    if a != b:
                        table[(v, a, b)] = rng.choice(values)
        else:
            for c in cands:
                table[(v, c)] = rng.choice(values)
    return CostModel(mode, table, FORBIDDEN)


def gen_random_instance(
    m: int,
    n: int,
    mode,
    domain,
    seed: int,
    density: float = 0.5,
    values=(0, 1, 2, FORBIDDEN),
    max_budget: int = 4,
    contested: bool = False,
) -> BriberyInstance:
    """Random instance; ``contested`` picks ``p`` and ``k`` so that ``p`` starts out losing when possible."""
    rng = random.Random(seed)
    election, witness = gen_random_election(m, n, density, domain, rng.randrange(2**31))
    p = rng.randrange(m)
    k = rng.randint(1, m)
    if contested:
        scores = election.scores()
        above = [sum(1 for s in scores if s > scores[c]) for c in range(m)]
        losers = [c for c in range(m) if above[c] >= 1]
        if losers:
            p = rng.choice(losers)
            k = rng.randint(1, above[p])
    costs = gen_random_costs(election, mode, rng, values, p)
    budget = rng.randint(0, max_budget)
    return BriberyInstance(election, witness, k, p, budget, costs)
