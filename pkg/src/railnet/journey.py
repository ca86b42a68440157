"""Train journeys on the double-track digraph and the functioning property.

A point on a track counts as reached when some journey traverses that track
in either direction.  A network is *functioning* when every starting arc
reaches every track.
"""

from __future__ import annotations

import enum
import hashlib
from collections import deque
from dataclasses import dataclass, field

from railnet.double_track import Arc, DoubleTrackGraph, build_double_track
from railnet.model import EndKind, RailNetwork, Step, Walk, is_railway_line


class PolicyMode(enum.Enum):
    ALWAYS_A = "always_a"
    ALWAYS_B = "always_b"
    FIXED_MAP = "map"
    SEEDED_RANDOM = "random"


@dataclass(frozen=True)
class SwitchPolicy:
    """How a train picks a branch when it arrives through a stem."""

    mode: PolicyMode = PolicyMode.ALWAYS_A
    choices: dict[str, EndKind] | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.mode is PolicyMode.FIXED_MAP and self.choices is None:
            raise ValueError("a fixed-map policy needs a switch -> branch map")
        if self.mode is PolicyMode.SEEDED_RANDOM and self.seed is None:
            raise ValueError("a random policy needs a seed")
        if self.choices is not None:
            for s, k in self.choices.items():
                if k not in (EndKind.BRANCH_A, EndKind.BRANCH_B):
                    raise ValueError(f"switch {s}: {k!r} is not a branch end")

    def branch(self, switch: str, step_index: int) -> EndKind:
        if self.mode is PolicyMode.ALWAYS_A:
            return EndKind.BRANCH_A
        if self.mode is PolicyMode.ALWAYS_B:
            return EndKind.BRANCH_B
        if self.mode is PolicyMode.FIXED_MAP:
            try:
                return self.choices[switch]
            except KeyError:
                raise ValueError(f"policy map has no entry for switch {switch!r}") from None
        # counter-based: the choice depends only on (seed, step index)
        digest = hashlib.blake2b(f"{self.seed}:{step_index}".encode(), digest_size=8).digest()
        return EndKind.BRANCH_A if digest[0] & 1 == 0 else EndKind.BRANCH_B


@dataclass(frozen=True)
class Journey:
    arcs: tuple[Arc, ...]
    # (first index, later index) of the first arc seen twice
    recurrence: tuple[int, int] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.arcs:
            raise ValueError("a journey needs at least one arc")
        for i in range(1, len(self.arcs)):
            if self.arcs[i - 1].head != self.arcs[i].tail:
                raise ValueError(f"arc {i} does not start where arc {i - 1} ends")

    def __len__(self) -> int:
        return len(self.arcs)


def reverse_journey(d: DoubleTrackGraph, j: Journey) -> Journey:
    return Journey(tuple(d.arc(a.index ^ 1) for a in reversed(j.arcs)))


def step(d: DoubleTrackGraph, current: int, policy: SwitchPolicy, step_index: int = 0) -> int:
    """Arc a train on ``current`` moves onto next."""
    v = d.head[current]
    outs = d.out_arcs(v)
    if len(outs) == 1:
        return outs[0]
    kind = policy.branch(d.net.switches[v // 2], step_index)
    return outs[0] if kind is EndKind.BRANCH_A else outs[1]


def simulate(d: DoubleTrackGraph, start: int, policy: SwitchPolicy, max_steps: int) -> Journey:
    """Drive ``max_steps`` arcs from ``start`` and note the first repeated arc."""
    if max_steps < 1:
        raise ValueError("max_steps must be positive")
    arcs = [start]
    first_seen = {start: 0}
    recurrence = None
    cur = start
    for i in range(1, max_steps):
        cur = step(d, cur, policy, i)
        if recurrence is None:
            if cur in first_seen:
                recurrence = (first_seen[cur], i)
            else:
                first_seen[cur] = i
        arcs.append(cur)
    return Journey(tuple(d.arc(x) for x in arcs), recurrence)


def reachable_vertices(d: DoubleTrackGraph, source: int) -> list[bool]:
    seen = [False] * d.n_vertices
    seen[source] = True
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for x in d.out_arcs(v):
            w = d.head[x]
            if not seen[w]:
                seen[w] = True
                queue.append(w)
    return seen


def reachable_arcs(d: DoubleTrackGraph, start: int) -> frozenset[int]:
    """``start`` plus every arc some journey from ``start`` can use."""
    seen = reachable_vertices(d, d.head[start])
    tail = d.tail
    return frozenset([start] + [x for x in range(d.n_arcs) if seen[tail[x]]])


def journey_to_walk(j: Journey) -> Walk:
    return Walk(tuple(Step(a.track, a.tail_end, a.head_end) for a in j.arcs))


def lift_walk(d: DoubleTrackGraph, walk: Walk) -> Journey:
    """The journey driving along ``walk`` in its written direction."""
    if not is_railway_line(walk):
        raise ValueError("walk passes a switch branch-to-branch or stem-to-stem")
    return Journey(tuple(d.arc(d.arc_between(s.exit, s.entry)) for s in walk.steps))


# -- strongly connected components -------------------------------------------


def strongly_connected_components(d: DoubleTrackGraph) -> tuple[list[int], list[list[int]]]:
    """Iterative Tarjan.  Components come out sinks first (reverse topological)."""
    n = d.n_vertices
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    comp = [-1] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    succ = [[d.head[x] for x in d.out_arcs(v)] for v in range(n)]
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            nbrs = succ[v]
            if i < len(nbrs):
                work[-1] = (v, i + 1)
                w = nbrs[i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                members = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = len(comps)
                    members.append(w)
                    if w == v:
                        break
                comps.append(members)
    return comp, comps


# -- functioning --------------------------------------------------------------


class Coverage(enum.Enum):
    ONE_DIRECTION = "one"
    BOTH_DIRECTIONS = "both"
    MIXED = "mixed"


@dataclass(frozen=True)
class FunctioningReport:
    functioning: bool
    unreachable_pairs: list[tuple[int, int]]  # (start arc, unreached track)
    direction_coverage: dict[int, Coverage]
    malfunctioning_starts: int = 0


def _arc_masks(d: DoubleTrackGraph, naive: bool) -> list[int]:
    """Bitmask of arcs available after each start arc (start arc included)."""
    if naive:
        out = []
        for x in range(d.n_arcs):
            m = 0
            for y in reachable_arcs(d, x):
                m |= 1 << y
            out.append(m)
        return out
    comp, comps = strongly_connected_components(d)
    own = [0] * len(comps)
    for x in range(d.n_arcs):
        own[comp[d.tail[x]]] |= 1 << x
    closure = [0] * len(comps)
    # sinks come first, so successor components are already closed
    for c, members in enumerate(comps):
        m = own[c]
        for v in members:
            for x in d.out_arcs(v):
                k = comp[d.head[x]]
                if k != c:
                    m |= closure[k]
        closure[c] = m
    return [closure[comp[d.head[x]]] | (1 << x) for x in range(d.n_arcs)]


def check_functioning(net: RailNetwork, *, naive: bool = False, max_pairs: int | None = None) -> FunctioningReport:
    """Does every start arc reach every track, and in how many directions?

    ``naive`` recomputes each start's closure by its own search instead of
    going through the SCC condensation.  ``max_pairs`` caps the number of
    unreachable (start, track) pairs listed; the verdict is unaffected.
    """
    if max_pairs is not None and max_pairs < 1:
        raise ValueError("max_pairs must be at least 1")
    d = build_double_track(net)
    n_t = net.n_tracks
    even = int("01" * n_t, 2) if n_t else 0  # bit 2t set for every track
    masks = _arc_masks(d, naive)
    pairs: list[tuple[int, int]] = []
    bad_starts = 0
    all_one = all_both = even
    for x, m in enumerate(masks):
        fwd = m & even
        bwd = (m >> 1) & even
        hit = fwd | bwd
        if hit != even:
            bad_starts += 1
            missing = even & ~hit
            while missing and (max_pairs is None or len(pairs) < max_pairs):
                low = missing & -missing
                pairs.append((x, low.bit_length() // 2))
                missing ^= low
        all_one &= fwd ^ bwd
        all_both &= fwd & bwd
    coverage = {}
    for t in range(n_t):
        bit = 1 << (2 * t)
        if all_one & bit:
            coverage[t] = Coverage.ONE_DIRECTION
        elif all_both & bit:
            coverage[t] = Coverage.BOTH_DIRECTIONS
        else:
            coverage[t] = Coverage.MIXED
    return FunctioningReport(bad_starts == 0, pairs, coverage, bad_starts)


def is_functioning(net: RailNetwork) -> bool:
    return check_functioning(net, max_pairs=1).functioning
