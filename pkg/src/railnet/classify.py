"""One-way / two-way classification.

Three independent deciders are provided and cross-checked by :func:`classify`:

* component count of the double-track digraph (one-way iff 2 components);
* parity union-find over switches where cross tracks flip parity (one-way
  iff no cycle has an odd number of cross tracks);
* angle counting over a fundamental cycle basis (one-way iff every basis
  cycle has an even number of angles).

The basis-only check in the angle decider relies on angle parity being
additive over the cycle space (mod 2).  That holds because, on any closed
walk that never leaves a switch through the end it arrived on, the angle
count and the cross-track count have the same parity, and cross-track parity
is a sum over tracks.  The exhaustive oracle in the test-suite guards it.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from railnet.double_track import (
    DoubleTrackGraph,
    Orientation,
    PolarityMap,
    NotUniform,
    build_double_track,
    component_labels,
    orientation_from_labels,
    polarity_of,
)
from railnet.model import EndRef, RailNetwork, Step, Track, Walk, check_walk


class Verdict(enum.Enum):
    ONE_WAY = "OneWay"
    TWO_WAY = "TwoWay"

    def __str__(self) -> str:
        return self.value


class TrackClass(enum.Enum):
    PARALLEL = "parallel"
    CROSS = "cross"


class State(enum.Enum):
    """Symbols of a cycle's state sequence."""

    SIGMA_OUT = "sigma_out"
    SIGMA_IN = "sigma_in"
    BETA_OUT = "beta_out"
    BETA_IN = "beta_in"

    @property
    def side(self) -> int:
        # cross tracks and angles are exactly the moves between the two sides
        return 0 if self in (State.SIGMA_OUT, State.BETA_IN) else 1


class NotClosed(ValueError):
    pass


class MethodDisagreement(AssertionError):
    pass


class TooLarge(ValueError):
    pass


def track_class(t: Track) -> TrackClass:
    return TrackClass.PARALLEL if t.a.kind.is_stem != t.b.kind.is_stem else TrackClass.CROSS


def is_cross_ends(ea: int, eb: int) -> bool:
    return (ea % 3 == 0) == (eb % 3 == 0)


def is_angle(entry: EndRef, exit_: EndRef) -> bool:
    """Entering and leaving a switch through its two different branch ends."""
    return entry != exit_ and not entry.kind.is_stem and not exit_.kind.is_stem


@dataclass(frozen=True)
class CycleAnalysis:
    cycle: Walk
    cross_count: int
    angle_count: int
    state_sequence: tuple[State, ...]

    @property
    def side_changes(self) -> int:
        seq = self.state_sequence
        return sum(seq[i].side != seq[i + 1].side for i in range(len(seq) - 1))


def analyze_cycle(net: RailNetwork, cycle: Walk) -> CycleAnalysis:
    check_walk(net, cycle)
    if not cycle.closed:
        raise NotClosed("walk does not return to its start switch")
    cross = sum(track_class(net.tracks[s.track]) is TrackClass.CROSS for s in cycle.steps)
    angles = sum(is_angle(entry, exit_) for entry, exit_ in cycle.transitions(wrap=True))
    seq: list[State] = []
    for s in cycle.steps:
        seq.append(State.SIGMA_OUT if s.exit.kind.is_stem else State.BETA_OUT)
        seq.append(State.SIGMA_IN if s.entry.kind.is_stem else State.BETA_IN)
    seq.append(seq[0])
    return CycleAnalysis(cycle, cross, angles, tuple(seq))


# -- method 1: components of the double-track digraph -------------------------


@dataclass(frozen=True)
class ComponentResult:
    verdict: Verdict
    component_count: int
    labels: list[int] = field(repr=False)
    graph: DoubleTrackGraph = field(repr=False)


def classify_by_components(net: RailNetwork, d: DoubleTrackGraph | None = None) -> ComponentResult:
    if d is None:
        d = build_double_track(net)
    labels, count = component_labels(d)
    verdict = Verdict.ONE_WAY if count == 2 else Verdict.TWO_WAY
    return ComponentResult(verdict, count, labels, d)


# -- method 2: cross-track parity union-find ----------------------------------


@dataclass(frozen=True)
class ParityResult:
    verdict: Verdict
    witness: Walk | None


def classify_by_parity(net: RailNetwork) -> ParityResult:
    """Union-find with parity; on the first conflict, rebuild an odd cycle."""
    n = net.n_switches
    ends = net.track_end_array
    us = (ends[:, 0] // 3).tolist()
    vs = (ends[:, 1] // 3).tolist()
    ws = ((ends[:, 0] % 3 == 0) == (ends[:, 1] % 3 == 0)).astype(np.int64).tolist()
    parent = list(range(n))
    rank = [0] * n
    # parity of a node relative to its parent; union by rank keeps trees shallow
    rel = [0] * n
    forest: list[int] = []
    for t in range(len(us)):
        ru = us[t]
        pu = 0
        while parent[ru] != ru:
            pu ^= rel[ru]
            ru = parent[ru]
        rv = vs[t]
        pv = 0
        while parent[rv] != rv:
            pv ^= rel[rv]
            rv = parent[rv]
        if ru == rv:
            if pu ^ pv ^ ws[t]:
                return ParityResult(Verdict.TWO_WAY, _odd_cycle(net, forest, t))
            continue
        if rank[ru] < rank[rv]:
            ru, rv = rv, ru
        elif rank[ru] == rank[rv]:
            rank[ru] += 1
        parent[rv] = ru
        rel[rv] = pu ^ pv ^ ws[t]
        forest.append(t)
    return ParityResult(Verdict.ONE_WAY, None)


def _odd_cycle(net: RailNetwork, forest: list[int], closing: int) -> Walk:
    """Closing track plus the forest path between its endpoints."""
    ea, eb = net.track_ends[closing]
    u, v = ea // 3, eb // 3
    adj: dict[int, list[tuple[int, int, int]]] = {}
    for t in forest:
        a, b = net.track_ends[t]
        adj.setdefault(a // 3, []).append((b // 3, a, b))
        adj.setdefault(b // 3, []).append((a // 3, b, a))
    # BFS from v to u so the walk reads u -> ... -> v -> (closing) -> u
    prev: dict[int, tuple[int, int, int]] = {v: (-1, -1, -1)}
    queue = deque([v])
    while queue and u not in prev:
        s = queue.popleft()
        for o, e_here, e_there in adj.get(s, ()):
            if o not in prev:
                prev[o] = (s, e_there, e_here)
                queue.append(o)
    exits: list[int] = []
    s = u
    while s != v:
        nxt, e_exit, _ = prev[s]
        exits.append(e_exit)
        s = nxt
    exits.append(eb)
    steps = []
    for e in exits:
        t = net.end_track[e]
        steps.append(Step(t, net.end_ref(e), net.end_ref(net.mate[e])))
    return Walk(tuple(steps))


# -- method 3: angle parity over a fundamental cycle basis --------------------


class SpanningTree(NamedTuple):
    """Breadth-first spanning tree of the switch multigraph (numpy arrays)."""

    root: int
    order: np.ndarray
    parent: np.ndarray  # -1 at the root
    depth: np.ndarray
    in_end: np.ndarray  # end of v on its parent track
    out_end: np.ndarray  # end of parent(v) on v's parent track
    chords: np.ndarray  # rows (track, end at first switch, end at second)
    prefix_angles: np.ndarray  # angles at switches strictly between root and v


def bfs_tree(net: RailNetwork, root: int = 0) -> SpanningTree:
    """Level-by-level BFS; ties go to the earlier-discovered parent, then stem < branch_a < branch_b.

    This is the same tree a queue-based BFS visiting ends in that order builds.
    """
    n = net.n_switches
    mate = np.asarray(net.mate, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    depth = np.zeros(n, dtype=np.int64)
    in_end = np.full(n, -1, dtype=np.int64)
    out_end = np.full(n, -1, dtype=np.int64)
    prefix = np.zeros(n, dtype=np.int64)
    seen = np.zeros(n, dtype=bool)
    seen[root] = True
    levels = [np.array([root], dtype=np.int64)]
    frontier = levels[0]
    level = 0
    while frontier.size:
        level += 1
        e = (3 * frontier[:, None] + np.arange(3)).ravel()
        f = mate[e]
        child = f // 3
        fresh = ~seen[child]
        e, f, child = e[fresh], f[fresh], child[fresh]
        child_u, first = np.unique(child, return_index=True)
        first.sort()
        e, f, child = e[first], f[first], child[first]
        seen[child] = True
        p = e // 3
        parent[child] = p
        depth[child] = level
        in_end[child] = f
        out_end[child] = e
        if level > 1:
            pe = in_end[p]
            prefix[child] = prefix[p] + ((pe % 3 != 0) & (e % 3 != 0) & (pe != e))
        levels.append(child)
        frontier = child
    order = np.concatenate(levels)
    tree_track = np.zeros(net.n_tracks, dtype=bool)
    end_track = np.asarray(net.end_track, dtype=np.int64)
    tree_track[end_track[out_end[order[1:]]]] = True
    ends = net.track_end_array
    non_tree = np.nonzero(~tree_track)[0]
    ca, cb = ends[non_tree, 0], ends[non_tree, 1]
    # orient each chord from the switch discovered first
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)
    swap = rank[cb // 3] < rank[ca // 3]
    chords = np.stack([non_tree, np.where(swap, cb, ca), np.where(swap, ca, cb)], axis=1)
    return SpanningTree(root, order, parent, depth, in_end, out_end, chords, prefix)


def _is_angle_arr(e, f):
    return (e % 3 != 0) & (f % 3 != 0) & (e != f)


def basis_angle_counts(net: RailNetwork, tree: SpanningTree | None = None) -> np.ndarray:
    """Number of angles on each fundamental cycle, in ``tree.chords`` order."""
    if tree is None:
        tree = bfs_tree(net)
    if not len(tree.chords):
        return np.zeros(0, dtype=np.int64)
    parent, depth = tree.parent, tree.depth
    in_end, out_end, prefix = tree.in_end, tree.out_end, tree.prefix_angles
    eu, ex = tree.chords[:, 1], tree.chords[:, 2]
    u, x = eu // 3, ex // 3

    a, b = u.copy(), x.copy()
    below_a = np.full_like(a, -1)  # last node visited before reaching the LCA
    below_b = np.full_like(b, -1)
    for hi, lo, below in ((a, b, below_a), (b, a, below_b)):
        active = np.nonzero(depth[hi] > depth[lo])[0]
        while active.size:
            below[active] = hi[active]
            hi[active] = parent[hi[active]]
            active = active[depth[hi[active]] > depth[lo[active]]]
    active = np.nonzero(a != b)[0]
    while active.size:
        below_a[active] = a[active]
        a[active] = parent[a[active]]
        below_b[active] = b[active]
        b[active] = parent[b[active]]
        active = active[a[active] != b[active]]

    total = np.zeros(len(eu), dtype=np.int64)
    end_at_lca = []
    for v, e, below in ((u, eu, below_a), (x, ex, below_b)):
        off = below >= 0  # v is not the LCA
        cv = np.where(off, below, 0)
        total += np.where(off, prefix[v] - prefix[cv] + _is_angle_arr(in_end[v], e), 0)
        end_at_lca.append(np.where(off, out_end[cv], e))
    total += _is_angle_arr(end_at_lca[0], end_at_lca[1])
    return total


@dataclass(frozen=True)
class AngleResult:
    verdict: Verdict
    basis_size: int
    odd_cycles: int


def classify_by_angles(net: RailNetwork) -> AngleResult:
    counts = basis_angle_counts(net)
    odd = int(np.count_nonzero(counts & 1))
    return AngleResult(Verdict.TWO_WAY if odd else Verdict.ONE_WAY, len(counts), odd)


def fundamental_cycles(net: RailNetwork, tree: SpanningTree | None = None) -> list[Walk]:
    """Explicit closed walks for every chord of the BFS tree."""
    if tree is None:
        tree = bfs_tree(net)
    parent, out_end, in_end = tree.parent.tolist(), tree.out_end.tolist(), tree.in_end.tolist()
    out = []
    for t, eu, ex in tree.chords.tolist():
        u, x = eu // 3, ex // 3
        up_u, up_x = [u], [x]
        anc_u = {u: 0}
        s = u
        while parent[s] != -1:
            s = parent[s]
            anc_u[s] = len(up_u)
            up_u.append(s)
        s = x
        while s not in anc_u:
            s = parent[s]
            up_x.append(s)
        lca = s
        down = up_u[: anc_u[lca] + 1][::-1]  # lca ... u
        exits = [out_end[w] for w in down[1:]]
        exits.append(eu)
        exits.extend(in_end[w] for w in up_x[:-1])  # x ... child of lca, upward
        steps = [Step(net.end_track[e], net.end_ref(e), net.end_ref(net.mate[e])) for e in exits]
        out.append(Walk(tuple(steps)))
    return out


# -- aggregate report ---------------------------------------------------------


@dataclass(frozen=True)
class ClassificationReport:
    verdict: Verdict
    component_count: int
    orientation_pair: tuple[Orientation, Orientation] | None
    polarity: PolarityMap | None
    witness: CycleAnalysis | None
    method_agreement: dict[str, Verdict]


def classify(net: RailNetwork) -> ClassificationReport:
    comp = classify_by_components(net)
    par = classify_by_parity(net)
    ang = classify_by_angles(net)
    votes = {"components": comp.verdict, "parity": par.verdict, "angles": ang.verdict}
    if len(set(votes.values())) != 1:
        raise MethodDisagreement(f"classifiers disagree: {votes}")
    verdict = comp.verdict
    pair = polarity = witness = None
    if verdict is Verdict.ONE_WAY:
        d = comp.graph
        # canonical member holds the forward arc of the first track
        canon = orientation_from_labels(d, comp.labels, 0)
        pair = (canon, canon.reverse())
        polarity = polarity_of(net, canon, d)
        if isinstance(polarity, NotUniform):
            raise MethodDisagreement(f"one-way orientation is not uniform at {polarity.switch}")
    else:
        witness = analyze_cycle(net, par.witness)
    return ClassificationReport(verdict, comp.component_count, pair, polarity, witness, votes)


# -- brute-force oracle -------------------------------------------------------

DEFAULT_ORACLE_BOUND = 16


def oracle_enumerate(
    net: RailNetwork,
    *,
    bound: int = DEFAULT_ORACLE_BOUND,
    require_reverse: bool = True,
) -> list[Orientation]:
    """Every orientation closed under journeys, found by exhaustive search.

    An orientation passes when no arc in it can be followed by an arc outside
    it.  With ``require_reverse`` (the one-way condition) the reverse
    orientation must pass as well.
    """
    n_t = net.n_tracks
    if n_t > bound:
        raise TooLarge(f"{n_t} tracks exceed the oracle bound of {bound}")
    d = build_double_track(net)
    masks = np.arange(1 << n_t, dtype=np.int64)
    member = [((masks >> (x >> 1)) & 1) == (x & 1) for x in range(d.n_arcs)]
    bad_fwd = np.zeros(len(masks), dtype=bool)
    bad_rev = np.zeros(len(masks), dtype=bool)
    for x in range(d.n_arcs):
        for y in d.successors(x):
            bad_fwd |= member[x] & ~member[y]
            bad_rev |= ~member[x] & member[y]
    ok = ~bad_fwd & ~bad_rev if require_reverse else ~bad_fwd
    found = []
    for m in np.nonzero(ok)[0].tolist():
        found.append(Orientation(tuple((m >> t) & 1 for t in range(n_t))))
    return found


def is_journey_closed(d: DoubleTrackGraph, o: Orientation) -> bool:
    """One-step closure check of a single orientation (no enumeration)."""
    return all(y in o for x in o.arcs for y in d.successors(x))
