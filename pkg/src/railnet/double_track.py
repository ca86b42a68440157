"""Double-track digraph: two directed vertices per switch, two arcs per track.

Vertex ``2*i`` is the converging vertex of switch ``i`` (trains leaving
through the stem) and ``2*i + 1`` the diverging one (trains arriving through
the stem).  Arc ``2*t`` runs along track ``t`` from its ``a`` end to its
``b`` end, arc ``2*t + 1`` the other way, so the reverse of arc ``x`` is
``x ^ 1``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from railnet.model import EndRef, RailNetwork


class InternalInvariantViolation(RuntimeError):
    pass


class NotOneWay(ValueError):
    pass


class Role(enum.Enum):
    CONVERGING = "c"
    DIVERGING = "d"


class DirectedVertex(NamedTuple):
    switch: str
    role: Role

    def __str__(self) -> str:
        return f"{self.role.value}:{self.switch}"


class Arc(NamedTuple):
    index: int
    track: int
    tail: DirectedVertex
    head: DirectedVertex
    tail_end: EndRef
    head_end: EndRef

    @property
    def forward(self) -> bool:
        return self.index % 2 == 0

    def __str__(self) -> str:
        return f"{self.tail}->{self.head} (t{self.track + 1})"


class DoubleTrackGraph:
    """Immutable double-track digraph of a rail network."""

    def __init__(self, net: RailNetwork):
        self.net = net
        ends = net.track_end_array
        # arc 2t runs a -> b, arc 2t+1 runs b -> a
        self.tail_end_arr = ends.ravel()
        self.head_end_arr = ends[:, ::-1].ravel()
        self.tail_arr = 2 * (self.tail_end_arr // 3) + (self.tail_end_arr % 3 != 0)
        self.head_arr = 2 * (self.head_end_arr // 3) + (self.head_end_arr % 3 == 0)
        out_at = np.empty(3 * net.n_switches, dtype=np.int64)
        out_at[self.tail_end_arr] = np.arange(len(self.tail_end_arr))
        self.out_arc_at_end_arr = out_at

    # plain-list views for per-element Python loops
    @cached_property
    def tail(self) -> list[int]:
        return self.tail_arr.tolist()

    @cached_property
    def head(self) -> list[int]:
        return self.head_arr.tolist()

    @cached_property
    def tail_end(self) -> list[int]:
        return self.tail_end_arr.tolist()

    @cached_property
    def head_end(self) -> list[int]:
        return self.head_end_arr.tolist()

    @cached_property
    def out_arc_at_end(self) -> list[int]:
        return self.out_arc_at_end_arr.tolist()

    @property
    def n_vertices(self) -> int:
        return 2 * self.net.n_switches

    @property
    def n_arcs(self) -> int:
        return len(self.tail_arr)

    @staticmethod
    def reverse(arc: int) -> int:
        return arc ^ 1

    def vertex(self, v: int) -> DirectedVertex:
        return DirectedVertex(self.net.switches[v // 2], Role.DIVERGING if v % 2 else Role.CONVERGING)

    def vertex_index(self, v: DirectedVertex) -> int:
        return 2 * self.net.switch_index[v.switch] + (v.role is Role.DIVERGING)

    def arc(self, x: int) -> Arc:
        net = self.net
        return Arc(
            x,
            x // 2,
            self.vertex(self.tail[x]),
            self.vertex(self.head[x]),
            net.end_ref(self.tail_end[x]),
            net.end_ref(self.head_end[x]),
        )

    def arcs(self) -> list[Arc]:
        return [self.arc(x) for x in range(self.n_arcs)]

    def arc_index(self, arc: Arc | int) -> int:
        return arc if isinstance(arc, int) else arc.index

    def arc_between(self, tail_end: EndRef, head_end: EndRef) -> int:
        x = self.out_arc_at_end[self.net.end_index(tail_end)]
        if self.head_end[x] != self.net.end_index(head_end):
            raise ValueError(f"no track joins {tail_end} and {head_end}")
        return x

    def out_arcs(self, v: int) -> list[int]:
        """Arcs leaving vertex ``v``: one from a converging vertex, two from a diverging one."""
        base = 3 * (v // 2)
        if v % 2 == 0:
            return [self.out_arc_at_end[base]]
        return [self.out_arc_at_end[base + 1], self.out_arc_at_end[base + 2]]

    def in_arcs(self, v: int) -> list[int]:
        base = 3 * (v // 2)
        if v % 2 == 0:
            return [self.out_arc_at_end[base + 1] ^ 1, self.out_arc_at_end[base + 2] ^ 1]
        return [self.out_arc_at_end[base] ^ 1]

    def arcs_at(self, v: int) -> list[int]:
        """The three arcs touching ``v`` (a self-loop arc may appear twice)."""
        return self.out_arcs(v) + self.in_arcs(v)

    def successors(self, x: int) -> list[int]:
        """Arcs a train on arc ``x`` can continue onto."""
        return self.out_arcs(self.head[x])

    def degrees(self) -> list[tuple[int, int]]:
        indeg = [0] * self.n_vertices
        outdeg = [0] * self.n_vertices
        for x in range(self.n_arcs):
            outdeg[self.tail[x]] += 1
            indeg[self.head[x]] += 1
        return list(zip(indeg, outdeg))


def build_double_track(net: RailNetwork) -> DoubleTrackGraph:
    return DoubleTrackGraph(net)


def connected_labels(n: int, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Component label (smallest member) of each of ``n`` nodes joined by edges ``u``-``v``.

    Hook-and-jump: every round hooks each root onto the smallest root across
    its edges, then compresses all pointers to roots.  Labels only decrease,
    so no cycles form.
    """
    parent = np.arange(n)
    while True:
        pu, pv = parent[u], parent[v]
        differ = pu != pv
        if not differ.any():
            return parent
        lo = np.minimum(pu[differ], pv[differ])
        hi = np.maximum(pu[differ], pv[differ])
        np.minimum.at(parent, hi, lo)
        while True:
            grand = parent[parent]
            if np.array_equal(grand, parent):
                break
            parent = grand
        # keep only edges that can still merge something
        u, v = u[differ], v[differ]


def component_labels(d: DoubleTrackGraph) -> tuple[list[int], int]:
    """Dense component index per vertex of the underlying undirected graph."""
    roots = connected_labels(d.n_vertices, d.tail_arr, d.head_arr)
    uniq, dense = np.unique(roots, return_inverse=True)
    count = len(uniq)
    if count > 2:
        raise InternalInvariantViolation(f"double-track graph has {count} components")
    return dense.tolist(), count


def underlying_components(d: DoubleTrackGraph) -> list[frozenset[DirectedVertex]]:
    label, count = component_labels(d)
    blocks: list[set[DirectedVertex]] = [set() for _ in range(count)]
    for v, c in enumerate(label):
        blocks[c].add(d.vertex(v))
    return [frozenset(b) for b in blocks]


class Polarity(enum.Enum):
    UPWARD = "up"
    DOWNWARD = "down"

    def opposite(self) -> Polarity:
        return Polarity.DOWNWARD if self is Polarity.UPWARD else Polarity.UPWARD


@dataclass(frozen=True)
class Orientation:
    """One arc per track, stored as a direction bit per track (0 = a to b)."""

    directions: tuple[int, ...]

    @classmethod
    def from_arcs(cls, arcs, n_tracks: int) -> Orientation:
        dirs = [-1] * n_tracks
        for x in arcs:
            t = x // 2
            if dirs[t] not in (-1, x % 2):
                raise ValueError(f"both arcs of track {t + 1} chosen")
            dirs[t] = x % 2
        if -1 in dirs:
            raise ValueError(f"no arc chosen for track {dirs.index(-1) + 1}")
        return cls(tuple(dirs))

    @property
    def arcs(self) -> frozenset[int]:
        return frozenset(2 * t + b for t, b in enumerate(self.directions))

    def __contains__(self, arc: int) -> bool:
        return self.directions[arc // 2] == arc % 2

    def reverse(self) -> Orientation:
        return Orientation(tuple(1 - b for b in self.directions))

    def __len__(self) -> int:
        return len(self.directions)


@dataclass(frozen=True)
class NotUniform:
    """Verdict: ``switch`` is neither upward nor downward under the orientation."""

    switch: str


PolarityMap = dict[str, Polarity]


def orientation_from_labels(d: DoubleTrackGraph, labels, seed_arc: int) -> Orientation:
    lab = np.asarray(labels)
    side = lab[d.tail_arr[seed_arc]]
    forward_tails = d.tail_arr[0::2]
    return Orientation(tuple(np.where(lab[forward_tails] == side, 0, 1).tolist()))


def extract_orientation(d: DoubleTrackGraph, seed_arc: Arc | int) -> Orientation:
    """The orientation made of every arc in the component holding ``seed_arc``."""
    labels, count = component_labels(d)
    if count != 2:
        raise NotOneWay("double-track graph is connected; no one-way orientation exists")
    return orientation_from_labels(d, labels, d.arc_index(seed_arc))


def polarity_of(net: RailNetwork, o: Orientation, d: DoubleTrackGraph | None = None) -> PolarityMap | NotUniform:
    """Upward/downward status of every switch, or the first switch that is neither."""
    if d is None:
        d = build_double_track(net)
    dirs = np.asarray(o.directions, dtype=np.int64)
    out_at = d.out_arc_at_end_arr.reshape(-1, 3)
    # arcs at each converging vertex: out through the stem, in through both branches
    conv = np.stack([out_at[:, 0], out_at[:, 1] ^ 1, out_at[:, 2] ^ 1], axis=1)
    chosen = dirs[conv >> 1] == (conv & 1)
    up = chosen.all(axis=1)
    # no converging arc chosen means all three diverging arcs are
    down = ~chosen.any(axis=1)
    bad = np.nonzero(~(up | down))[0]
    if bad.size:
        return NotUniform(net.switches[int(bad[0])])
    return {name: (Polarity.UPWARD if u else Polarity.DOWNWARD) for name, u in zip(net.switches, up.tolist())}
