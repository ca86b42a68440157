"""Random and exhaustive rail networks, and the Monte Carlo sweep.

Random networks are uniform perfect matchings on the labelled ends: the
``3n`` ends are shuffled and adjacent pairs become tracks.  Samples are
keyed by ``(seed, switch_count, sample_index)`` through numpy's
``SeedSequence`` so any sample can be regenerated on its own.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from railnet.classify import Verdict, classify
from railnet.journey import is_functioning
from railnet.model import EndKind, EndRef, RailNetwork, Track, validate_network

REJECTION_BUDGET = 1000
ENUMERATION_BOUND = 4


class RejectionBudgetExceeded(RuntimeError):
    pass


class BoundExceeded(ValueError):
    pass


class DisconnectedPolicy(enum.Enum):
    REJECT = "reject"
    KEEP = "keep"


@dataclass(frozen=True)
class GenConfig:
    switch_count: int
    seed: int = 0
    disconnected_policy: DisconnectedPolicy = DisconnectedPolicy.REJECT
    sample_count: int = 1

    def __post_init__(self) -> None:
        if self.switch_count < 2 or self.switch_count % 2:
            raise ValueError(f"switch_count must be even and at least 2, got {self.switch_count}")
        if self.sample_count < 1:
            raise ValueError("sample_count must be at least 1")


def switch_names(n: int) -> list[str]:
    """``s1 .. sn``, zero-padded so lexicographic order is numeric order."""
    width = len(str(n))
    return [f"s{i:0{width}d}" for i in range(1, n + 1)]


def _pairs_connected(n: int, pairs) -> bool:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = n
    for ea, eb in pairs:
        ra, rb = find(ea // 3), find(eb // 3)
        if ra != rb:
            parent[ra] = rb
            comps -= 1
    return comps == 1


def network_from_pairs(n: int, pairs, names: list[str] | None = None) -> RailNetwork:
    """Validated network from ``(end, end)`` integer pairs, end = 3*switch + kind."""
    names = names or switch_names(n)
    kinds = list(EndKind)
    tracks = [
        Track(EndRef(names[a // 3], kinds[a % 3]), EndRef(names[b // 3], kinds[b % 3])) for a, b in pairs
    ]
    return validate_network(names, tracks)


class Sample(NamedTuple):
    pairs: list[tuple[int, int]]
    connected: bool
    redraws: int


def draw_pairs(cfg: GenConfig, sample_index: int) -> Sample:
    """Matching for one sample; redraws disconnected ones under REJECT."""
    n = cfg.switch_count
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, n, sample_index]))
    for redraws in range(REJECTION_BUDGET + 1):
        ends = rng.permutation(3 * n).tolist()
        pairs = list(zip(ends[0::2], ends[1::2]))
        connected = _pairs_connected(n, pairs)
        if connected or cfg.disconnected_policy is DisconnectedPolicy.KEEP:
            return Sample(pairs, connected, redraws)
    raise RejectionBudgetExceeded(
        f"no connected network after {REJECTION_BUDGET} redraws (n={n}, sample {sample_index})"
    )


def random_network(cfg: GenConfig, sample_index: int = 0) -> RailNetwork:
    sample = draw_pairs(cfg, sample_index)
    if not sample.connected:
        raise ValueError("sample is disconnected and cannot form a rail network")
    return network_from_pairs(cfg.switch_count, sample.pairs)


class Matching(NamedTuple):
    pairs: tuple[tuple[int, int], ...]
    connected: bool
    network: RailNetwork | None


def perfect_matchings(items: list[int]) -> Iterator[list[tuple[int, int]]]:
    """Every perfect matching of ``items``, pairing the first item recursively."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for i, partner in enumerate(rest):
        remaining = rest[:i] + rest[i + 1 :]
        for m in perfect_matchings(remaining):
            yield [(first, partner)] + m


def enumerate_networks(switch_count: int, *, bound: int = ENUMERATION_BOUND) -> Iterator[Matching]:
    """All ``(3n - 1)!!`` matchings of the ends, each tagged connected or not."""
    if switch_count < 2 or switch_count % 2:
        raise ValueError("switch_count must be even and at least 2")
    if switch_count > bound:
        raise BoundExceeded(f"switch_count {switch_count} exceeds enumeration bound {bound}")
    names = switch_names(switch_count)
    for pairs in perfect_matchings(list(range(3 * switch_count))):
        if _pairs_connected(switch_count, pairs):
            yield Matching(tuple(pairs), True, network_from_pairs(switch_count, pairs, names))
        else:
            yield Matching(tuple(pairs), False, None)


def double_factorial(k: int) -> int:
    return math.prod(range(k, 0, -2))


# -- Monte Carlo --------------------------------------------------------------


@dataclass(frozen=True)
class SizeRow:
    switch_count: int
    samples_used: int
    rejected_disconnected: int
    p_functioning: float
    p_oneway: float
    p_oneway_given_functioning: float | None
    standard_error: float


@dataclass(frozen=True)
class MonteCarloReport:
    rows: list[SizeRow]

    @property
    def per_size(self) -> list[SizeRow]:
        return self.rows


def evaluate_sample(cfg: GenConfig, sample_index: int) -> tuple[bool, bool, bool, int]:
    """(connected, functioning, one-way, redraws) for one sample."""
    sample = draw_pairs(cfg, sample_index)
    if not sample.connected:
        return False, False, False, sample.redraws
    net = network_from_pairs(cfg.switch_count, sample.pairs)
    oneway = classify(net).verdict is Verdict.ONE_WAY
    return True, is_functioning(net), oneway, sample.redraws


def _evaluate_chunk(args) -> list[tuple[bool, bool, bool, int]]:
    cfg, start, stop = args
    return [evaluate_sample(cfg, i) for i in range(start, stop)]


def summarize(cfg: GenConfig, outcomes: list[tuple[bool, bool, bool, int]]) -> SizeRow:
    """Aggregate per-sample outcomes.

    Under KEEP, disconnected samples count as used but are neither functioning
    nor one-way (they are not rail networks); they are tallied in
    ``rejected_disconnected``.
    """
    used = len(outcomes)
    rejected = sum(r for _, _, _, r in outcomes) + sum(1 for c, *_ in outcomes if not c)
    func = sum(1 for c, f, _, _ in outcomes if c and f)
    oneway = sum(1 for c, _, o, _ in outcomes if c and o)
    both = sum(1 for c, f, o, _ in outcomes if c and f and o)
    p_f = func / used
    return SizeRow(
        switch_count=cfg.switch_count,
        samples_used=used,
        rejected_disconnected=rejected,
        p_functioning=p_f,
        p_oneway=oneway / used,
        p_oneway_given_functioning=(both / func) if func else None,
        standard_error=math.sqrt(p_f * (1 - p_f) / used),
    )


def monte_carlo(configs: list[GenConfig], *, workers: int = 1) -> MonteCarloReport:
    """Estimate functioning and one-way frequencies for each configuration.

    With ``workers > 1`` samples are spread over processes; results are
    gathered in sample order, so the report equals the sequential one.
    """
    rows = []
    for cfg in configs:
        if workers > 1:
            from concurrent.futures import ProcessPoolExecutor

            size = max(1, cfg.sample_count // (4 * workers))
            chunks = [(cfg, s, min(s + size, cfg.sample_count)) for s in range(0, cfg.sample_count, size)]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                outcomes = [o for part in pool.map(_evaluate_chunk, chunks) for o in part]
        else:
            outcomes = [evaluate_sample(cfg, i) for i in range(cfg.sample_count)]
        rows.append(summarize(cfg, outcomes))
    return MonteCarloReport(rows)
