"""Validation and recognition of candidate-interval and voter-interval elections.

Recognition reduces both properties to the consecutive-ones problem: find an
ordering of a ground set under which every given subset is contiguous.  The
polynomial recognizer works on overlap components.  Within one component the
arrangement of the component's union is forced up to reversal and is built
incrementally; the unions of different components form a laminar family, and
a smaller union always sits inside a single block of any component whose union
contains it, so the final order is assembled by nesting.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from .core import DomainKind, DomainWitness, Election
from .errors import InputError

BRUTE_FORCE_LIMIT = 8


@dataclass(frozen=True)
class IntervalCertificate:
    """Per ballot (CI) or per candidate (VI) span ``(first, last)`` in witness
    positions, or ``None`` for an empty support."""

    kind: DomainKind
    spans: tuple

    ok = True


@dataclass(frozen=True)
class Violation:
    """First support found with a hole.

    ``index`` is the voter (CI) or candidate (VI) whose support is broken;
    ``gap_position`` is the witness position inside its span that is missing,
    and ``gap_element`` the candidate (CI) or voter (VI) sitting there.
    """

    kind: DomainKind
    index: int
    gap_position: int
    gap_element: int

    ok = False

    def __str__(self):
        if self.kind is DomainKind.CI:
            return f"ballot of voter {self.index} skips candidate {self.gap_element}"
        return f"supporters of candidate {self.index} skip voter {self.gap_element}"


@dataclass(frozen=True)
class _Unrestricted:
    ok = True


def _check_permutation(order, size, what):
    if sorted(order) != list(range(size)):
        raise InputError(f"order is not a permutation of all {size} {what} indices")


def _spans(supports, order, kind):
    position = {x: i for i, x in enumerate(order)}
    spans = []
    for idx, support in enumerate(supports):
        if not support:
            spans.append(None)
            continue
        pos = sorted(position[x] for x in support)
        first, last = pos[0], pos[-1]
        if last - first + 1 != len(pos):
            present = set(pos)
            gap = next(q for q in range(first, last + 1) if q not in present)
            return Violation(kind, idx, gap, order[gap])
        spans.append((first, last))
    return IntervalCertificate(kind, tuple(spans))


def validate_ci(election: Election, axis):
    """Certificate if every ballot is contiguous on ``axis``, else the first violation."""
    axis = tuple(axis)
    _check_permutation(axis, election.m, "candidate")
    return _spans(election.ballots, axis, DomainKind.CI)


def validate_vi(election: Election, order):
    """Certificate if every candidate's supporters are contiguous in ``order``."""
    order = tuple(order)
    _check_permutation(order, election.n, "voter")
    columns = [set() for _ in range(election.m)]
    for v, ballot in enumerate(election.ballots):
        for c in ballot:
            columns[c].add(v)
    return _spans(columns, order, DomainKind.VI)


def validate(election: Election, witness: DomainWitness):
    if witness.kind is DomainKind.CI:
        return validate_ci(election, witness.order)
    if witness.kind is DomainKind.VI:
        return validate_vi(election, witness.order)
    return _Unrestricted()


def is_interval_on(positions) -> bool:
    """True if the given integer positions form one contiguous block (or none)."""
    if not positions:
        return True
    return max(positions) - min(positions) + 1 == len(positions)


# -- consecutive ones ---------------------------------------------------------


def _overlap(a, b):
    return bool(a & b) and not a <= b and not b <= a


def _arrange_component(sets):
    """Ordered partition of the union of an overlap-connected family, or None."""
    first, rest = sets[0], list(sets[1:])
    blocks = [set(first)]
    placed = [first]
    pending = deque(rest)
    stalls = 0
    while pending:
        s = pending.popleft()
        if not any(_overlap(s, t) for t in placed):
            pending.append(s)
            stalls += 1
            if stalls > len(pending):
                raise AssertionError("overlap component is not connected")
            continue
        stalls = 0
        blocks = _insert(blocks, s)
        if blocks is None:
            return None
        placed.append(s)
    return blocks


def _insert(blocks, s):
    union = set().union(*blocks)
    new = s - union
    hit = [i for i, b in enumerate(blocks) if b & s]
    i, j = hit[0], hit[-1]
    if hit != list(range(i, j + 1)):
        return None
    for q in range(i + 1, j):
        if not blocks[q] <= s:
            return None
    last = len(blocks) - 1

    def split_left(q):
        # part outside s goes left, part inside s goes right
        out, inn = blocks[q] - s, blocks[q] & s
        return [b for b in (out, inn) if b]

    def split_right(q):
        inn, out = blocks[q] & s, blocks[q] - s
        return [b for b in (inn, out) if b]

    if not new:
        if i == j:
            return None
        return blocks[:i] + split_left(i) + blocks[i + 1 : j] + split_right(j) + blocks[j + 1 :]

    # s sticks out of the current union, so it must reach one end.
    if j == last and all(blocks[q] <= s for q in range(i + 1, last + 1)):
        return blocks[:i] + split_left(i) + blocks[i + 1 :] + [set(new)]
    if i == 0 and all(blocks[q] <= s for q in range(0, j)):
        return [set(new)] + blocks[:j] + split_right(j) + blocks[j + 1 :]
    return None


def consecutive_ones_order(ground_size: int, sets):
    """An ordering of ``range(ground_size)`` making every set contiguous, or None."""
    family = []
    seen = set()
    for s in sets:
        fs = frozenset(s)
        if len(fs) >= 2 and fs not in seen:
            seen.add(fs)
            family.append(fs)
    family.sort(key=lambda f: (-len(f), sorted(f)))

    # overlap components via union-find
    parent = list(range(len(family)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in itertools.combinations(range(len(family)), 2):
        if _overlap(family[a], family[b]):
            parent[find(a)] = find(b)
    groups = {}
    for idx in range(len(family)):
        groups.setdefault(find(idx), []).append(family[idx])

    components = []
    for members in groups.values():
        blocks = _arrange_component(members)
        if blocks is None:
            return None
        union = frozenset().union(*members)
        components.append((union, len(members), blocks))
    # parents before children; a single-set component wraps an equal union
    components.sort(key=lambda comp: (-len(comp[0]), comp[1], sorted(comp[0])))

    root = (frozenset(range(ground_size)), 0, [set(range(ground_size))])
    nodes = [root] + components
    children = {idx: [] for idx in range(len(nodes))}
    for idx in range(1, len(nodes)):
        union = nodes[idx][0]
        owner = 0
        for cand in range(idx - 1, 0, -1):
            if union <= nodes[cand][0]:
                owner = cand
                break
        children[owner].append(idx)

    def expand(idx):
        _, _, blocks = nodes[idx]
        kids = children[idx]
        order = []
        for block in blocks:
            inside = [k for k in kids if nodes[k][0] <= block]
            covered = set()
            for k in inside:
                order.extend(expand(k))
                covered |= nodes[k][0]
            order.extend(sorted(block - covered))
        return order

    order = expand(0)
    if sorted(order) != list(range(ground_size)):
        return None
    position = {x: i for i, x in enumerate(order)}
    for s in family:
        if not is_interval_on([position[x] for x in s]):
            return None
    return order


def brute_force_consecutive_ones(ground_size: int, sets):
    """Exhaustive permutation search; only for tiny ground sets."""
    if ground_size > BRUTE_FORCE_LIMIT:
        raise InputError(f"brute force limited to {BRUTE_FORCE_LIMIT} elements")
    sets = [frozenset(s) for s in sets]
    for perm in itertools.permutations(range(ground_size)):
        position = {x: i for i, x in enumerate(perm)}
        if all(is_interval_on([position[x] for x in s]) for s in sets):
            return list(perm)
    return None


def recognize_ci(election: Election, brute_force: bool = False):
    """Some candidate axis under which the election is CI, or None."""
    solver = brute_force_consecutive_ones if brute_force else consecutive_ones_order
    order = solver(election.m, election.ballots)
    return tuple(order) if order is not None else None


def recognize_vi(election: Election, brute_force: bool = False):
    """Some voter order under which the election is VI, or None."""
    columns = [election.supporters(c) for c in range(election.m)]
    solver = brute_force_consecutive_ones if brute_force else consecutive_ones_order
    order = solver(election.n, columns)
    return tuple(order) if order is not None else None
