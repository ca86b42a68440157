"""Network builders shared by the test modules."""

from __future__ import annotations

import numpy as np

from railnet.model import validate_network
from railnet.randomgen import _pairs_connected, network_from_pairs

S, A, B = "stem", "branch_a", "branch_b"


def net_of(switches, tracks):
    return validate_network(switches, [((a, ka), (b, kb)) for (a, ka), (b, kb) in tracks])


THETA = [(("s1", S), ("s2", S)), (("s1", A), ("s2", A)), (("s1", B), ("s2", B))]
YINYANG = [(("s1", S), ("s2", A)), (("s2", S), ("s1", A)), (("s1", B), ("s2", B))]
DUMBBELL = [(("s1", S), ("s2", S)), (("s1", A), ("s1", B)), (("s2", A), ("s2", B))]


def theta():
    return net_of(["s1", "s2"], THETA)


def yinyang():
    return net_of(["s1", "s2"], YINYANG)


def dumbbell():
    return net_of(["s1", "s2"], DUMBBELL)


def oneway_pairs(n: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Random matching that is one-way by construction (maybe disconnected).

    Colour half the switches 1.  With g(end) = is_stem(end) xor colour, a
    track is cross exactly when its switches' colours differ iff it joins a
    g=0 end to a g=1 end; pairing those two classes bijectively does that.
    """
    colour = np.zeros(n, dtype=np.int64)
    colour[rng.permutation(n)[: n // 2]] = 1
    ends = np.arange(3 * n)
    g = (ends % 3 == 0).astype(np.int64) ^ colour[ends // 3]
    ones = rng.permutation(ends[g == 1])
    zeros = rng.permutation(ends[g == 0])
    return list(zip(ones.tolist(), zeros.tolist()))


def random_oneway_network(n: int, seed: int):
    rng = np.random.default_rng(seed)
    while True:
        pairs = oneway_pairs(n, rng)
        if _pairs_connected(n, pairs):
            return network_from_pairs(n, pairs)


def random_closed_walk(net, rng: np.random.Generator, max_len: int = 200):
    """Closed walk that never leaves a switch through the end it arrived on.

    The closing transition (last entry, first exit) obeys the same rule.
    """
    from railnet.model import walk_from_ends

    mate = net.mate
    n_ends = 3 * net.n_switches
    while True:
        first = int(rng.integers(n_ends))
        exits = [first]
        cur = first
        for _ in range(max_len):
            entry = mate[cur]
            if entry // 3 == first // 3 and entry != first and rng.random() < 0.5:
                return walk_from_ends(net, [net.end_ref(e) for e in exits])
            base = 3 * (entry // 3)
            choices = [base + k for k in range(3) if base + k != entry]
            cur = choices[int(rng.integers(2))]
            exits.append(cur)
