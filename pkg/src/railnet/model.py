"""Switches, ends, tracks and rail networks.

A rail network is a connected 3-regular multigraph whose vertices are
Y-shaped switches.  Every switch has one stem end and two branch ends, and
every end is paired with exactly one other end by a track.  Self-loop tracks
and parallel tracks between the same pair of switches are allowed.

Internally every end gets a dense integer index ``3 * switch_index + kind``
so the graph algorithms elsewhere in the package can work on flat lists.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np


class NetworkError(ValueError):
    """Base class for structurally invalid networks."""


class DuplicateEnd(NetworkError):
    pass


class MissingEnd(NetworkError):
    pass


class SelfPairedEnd(NetworkError):
    pass


class Disconnected(NetworkError):
    pass


class OddSwitchCount(NetworkError):
    pass


class UnknownSwitch(NetworkError, KeyError):
    def __str__(self) -> str:
        return ValueError.__str__(self)


class NotAWalk(ValueError):
    pass


class EndKind(enum.IntEnum):
    STEM = 0
    BRANCH_A = 1
    BRANCH_B = 2

    @property
    def label(self) -> str:
        return _KIND_LABELS[self]

    @property
    def is_stem(self) -> bool:
        return self is EndKind.STEM

    @classmethod
    def from_label(cls, label: str) -> EndKind:
        try:
            return _KIND_BY_LABEL[label]
        except KeyError:
            raise ValueError(f"unknown end name {label!r}") from None


_KIND_LABELS = {EndKind.STEM: "stem", EndKind.BRANCH_A: "branch_a", EndKind.BRANCH_B: "branch_b"}
_KIND_BY_LABEL = {v: k for k, v in _KIND_LABELS.items()}


class EndRef(NamedTuple):
    switch: str
    kind: EndKind

    def __str__(self) -> str:
        return f"{self.switch}.{self.kind.label}"


def _as_end(value) -> EndRef:
    if isinstance(value, EndRef):
        return value
    switch, kind = value
    if not isinstance(kind, EndKind):
        kind = EndKind.from_label(kind) if isinstance(kind, str) else EndKind(kind)
    return EndRef(str(switch), kind)


@dataclass(frozen=True, eq=False)
class Track:
    """An unordered pair of distinct ends.

    ``a`` and ``b`` keep the order they were written in, which names the
    forward direction of the track; equality and hashing ignore it.
    """

    a: EndRef
    b: EndRef

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", _as_end(self.a))
        object.__setattr__(self, "b", _as_end(self.b))
        if self.a == self.b:
            raise SelfPairedEnd(f"track pairs end {self.a} with itself")

    def key(self) -> tuple[EndRef, EndRef]:
        return (self.a, self.b) if self.a <= self.b else (self.b, self.a)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Track):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __iter__(self):
        yield self.a
        yield self.b

    @property
    def is_loop(self) -> bool:
        return self.a.switch == self.b.switch

    def other(self, end: EndRef) -> EndRef:
        if end == self.a:
            return self.b
        if end == self.b:
            return self.a
        raise ValueError(f"{end} is not an end of this track")

    def __str__(self) -> str:
        return f"({self.a}, {self.b})"


@dataclass(frozen=True)
class RailNetwork:
    """A validated rail network.

    Build instances with :func:`validate_network`.  ``switches`` is sorted
    lexicographically; ``tracks`` keeps input order and a track's identifier
    is its position in that tuple.
    """

    switches: tuple[str, ...]
    tracks: tuple[Track, ...]
    # Flat integer views, filled in by validate_network.
    switch_index: dict[str, int] = field(repr=False, compare=False)
    track_ends: tuple[tuple[int, int], ...] = field(repr=False, compare=False)
    end_track: tuple[int, ...] = field(repr=False, compare=False)

    @property
    def n_switches(self) -> int:
        return len(self.switches)

    @property
    def n_tracks(self) -> int:
        return len(self.tracks)

    def end_index(self, end: EndRef) -> int:
        try:
            return 3 * self.switch_index[end.switch] + int(end.kind)
        except KeyError:
            raise UnknownSwitch(f"unknown switch {end.switch!r}") from None

    def end_ref(self, index: int) -> EndRef:
        return EndRef(self.switches[index // 3], EndKind(index % 3))

    @cached_property
    def track_end_array(self) -> np.ndarray:
        """``(n_tracks, 2)`` integer array of end indices."""
        return np.asarray(self.track_ends, dtype=np.int64).reshape(-1, 2)

    @cached_property
    def mate(self) -> list[int]:
        """``mate[e]`` is the end index paired with end ``e``."""
        out = [0] * (3 * len(self.switches))
        for ea, eb in self.track_ends:
            out[ea] = eb
            out[eb] = ea
        return out

    def track_at(self, end: EndRef) -> int:
        """Identifier of the track holding ``end``."""
        return self.end_track[self.end_index(end)]

    def incident_tracks(self, switch: str) -> list[int]:
        base = 3 * self.switch_index[switch]
        return [self.end_track[base + k] for k in range(3)]


def validate_network(switches: Iterable[str], tracks: Iterable) -> RailNetwork:
    """Check the rail-network axioms and return an immutable network.

    ``tracks`` may hold :class:`Track` objects or pairs of ``(switch, kind)``
    tuples, where ``kind`` is an :class:`EndKind`, its integer value or its
    label (``"stem"``, ``"branch_a"``, ``"branch_b"``).
    """
    names = [str(s) for s in switches]
    if len(set(names)) != len(names):
        dup = next(s for s in names if names.count(s) > 1)
        raise NetworkError(f"switch {dup!r} listed more than once")
    names.sort()
    if not names:
        raise NetworkError("network has no switches")
    if len(names) % 2:
        raise OddSwitchCount(
            f"{len(names)} switches have {3 * len(names)} ends, which cannot be perfectly paired"
        )
    index = {s: i for i, s in enumerate(names)}

    track_objs: list[Track] = []
    for t in tracks:
        if not isinstance(t, Track):
            a, b = t
            t = Track(_as_end(a), _as_end(b))
        track_objs.append(t)

    n_ends = 3 * len(names)
    end_track = [-1] * n_ends
    track_ends = []
    for ti, t in enumerate(track_objs):
        pair = []
        for end in t:
            si = index.get(end.switch)
            if si is None:
                raise UnknownSwitch(f"track {ti + 1} references unknown switch {end.switch!r}")
            e = 3 * si + int(end.kind)
            if end_track[e] != -1:
                raise DuplicateEnd(f"end {end} appears in tracks {end_track[e] + 1} and {ti + 1}")
            end_track[e] = ti
            pair.append(e)
        track_ends.append((pair[0], pair[1]))

    for e, ti in enumerate(end_track):
        if ti == -1:
            raise MissingEnd(f"end {EndRef(names[e // 3], EndKind(e % 3))} belongs to no track")

    net = RailNetwork(
        switches=tuple(names),
        tracks=tuple(track_objs),
        switch_index=index,
        track_ends=tuple(track_ends),
        end_track=tuple(end_track),
    )
    n_comp = count_switch_components(net)
    if n_comp != 1:
        raise Disconnected(f"underlying multigraph has {n_comp} components")
    return net


def count_switch_components(net: RailNetwork) -> int:
    mate = net.mate
    n = len(net.switches)
    seen = [False] * n
    count = 0
    for root in range(n):
        if seen[root]:
            continue
        count += 1
        seen[root] = True
        queue = deque([root])
        while queue:
            s = queue.popleft()
            for k in range(3):
                o = mate[3 * s + k] // 3
                if not seen[o]:
                    seen[o] = True
                    queue.append(o)
    return count


def branch_swap(net: RailNetwork, switch: str) -> RailNetwork:
    """Exchange the two branch ends of ``switch`` in every track."""
    if switch not in net.switch_index:
        raise UnknownSwitch(f"unknown switch {switch!r}")
    swap = {EndKind.BRANCH_A: EndKind.BRANCH_B, EndKind.BRANCH_B: EndKind.BRANCH_A}

    def flip(end: EndRef) -> EndRef:
        if end.switch == switch and end.kind in swap:
            return EndRef(switch, swap[end.kind])
        return end

    return validate_network(net.switches, [Track(flip(t.a), flip(t.b)) for t in net.tracks])


class Step(NamedTuple):
    """One track traversal of a walk: leave through ``exit``, arrive at ``entry``."""

    track: int
    exit: EndRef
    entry: EndRef


@dataclass(frozen=True)
class Walk:
    steps: tuple[Step, ...]

    def __post_init__(self) -> None:
        if not self.steps:
            raise NotAWalk("a walk needs at least one track")
        object.__setattr__(self, "steps", tuple(Step(*s) for s in self.steps))

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def switches(self) -> tuple[str, ...]:
        return (self.steps[0].exit.switch,) + tuple(s.entry.switch for s in self.steps)

    @property
    def tracks(self) -> tuple[int, ...]:
        return tuple(s.track for s in self.steps)

    @property
    def closed(self) -> bool:
        return self.steps[-1].entry.switch == self.steps[0].exit.switch

    def reversed(self) -> Walk:
        return Walk(tuple(Step(s.track, s.entry, s.exit) for s in reversed(self.steps)))

    def transitions(self, wrap: bool = False) -> list[tuple[EndRef, EndRef]]:
        """(entry end, exit end) pairs at interior switches, in walk order.

        With ``wrap`` the transition through the start switch of a closed
        walk is appended.
        """
        out = [(self.steps[i - 1].entry, self.steps[i].exit) for i in range(1, len(self.steps))]
        if wrap:
            out.append((self.steps[-1].entry, self.steps[0].exit))
        return out

    def __str__(self) -> str:
        parts = [self.steps[0].exit.switch]
        for s in self.steps:
            parts.append(f"-[t{s.track + 1}: {s.exit.kind.label}->{s.entry.kind.label}]-")
            parts.append(s.entry.switch)
        return " ".join(parts)


def check_walk(net: RailNetwork, walk: Walk) -> None:
    """Raise :class:`NotAWalk` unless ``walk`` is a walk of ``net``."""
    for i, step in enumerate(walk.steps):
        if not 0 <= step.track < net.n_tracks:
            raise NotAWalk(f"step {i}: no track {step.track}")
        t = net.tracks[step.track]
        if {step.exit, step.entry} != {t.a, t.b} or (step.exit == step.entry):
            raise NotAWalk(f"step {i}: ends {step.exit}, {step.entry} do not form track {step.track + 1}")
        if i and walk.steps[i - 1].entry.switch != step.exit.switch:
            raise NotAWalk(f"step {i}: does not continue from switch {walk.steps[i - 1].entry.switch}")


def walk_from_ends(net: RailNetwork, exits: Sequence[EndRef]) -> Walk:
    """Build a walk from the end each track is left through."""
    steps = []
    for e in exits:
        ti = net.track_at(e)
        steps.append(Step(ti, e, net.tracks[ti].other(e)))
    walk = Walk(tuple(steps))
    check_walk(net, walk)
    return walk


def is_railway_line(walk: Walk) -> bool:
    """True if every interior switch is passed through its stem end exactly once.

    Only interior transitions are checked; for closed walks the caller must
    check the transition through the start switch separately.
    """
    return all(entry.kind.is_stem != exit_.kind.is_stem for entry, exit_ in walk.transitions())
