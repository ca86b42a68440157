"""Acceptance criteria, one test each.

Every test appends a PASS/FAIL line to ``RESULTS``; conftest prints them at
the end of the run.
"""

from __future__ import annotations

import contextlib
import math
import resource
import subprocess
import sys
import time
import tracemalloc

import numpy as np
import pytest
from conftest import FIXTURES
from helpers import random_closed_walk, random_oneway_network
from railnet.classify import (
    Verdict,
    analyze_cycle,
    classify,
    classify_by_angles,
    classify_by_components,
    classify_by_parity,
    fundamental_cycles,
    oracle_enumerate,
)
from railnet.double_track import build_double_track, component_labels, extract_orientation
from railnet.io import export_dot, load_network, parse_network, serialize_network
from railnet.journey import check_functioning, reachable_arcs
from railnet.model import EndKind, EndRef, walk_from_ends
from railnet.randomgen import GenConfig, enumerate_networks, monte_carlo, random_network

RESULTS: list[str] = []
MC_SEED = 0


@contextlib.contextmanager
def criterion(label: str):
    start = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        RESULTS.append(f"FAIL  {label}  ({time.perf_counter() - start:.1f}s): {str(exc).splitlines()[0][:120]}")
        raise
    RESULTS.append(f"PASS  {label}  ({time.perf_counter() - start:.1f}s)")


def _enumerated():
    for n in (2, 4):
        for m in enumerate_networks(n):
            if m.connected:
                yield m.network


def _verdicts(net):
    return (
        classify_by_components(net).verdict,
        classify_by_parity(net).verdict,
        classify_by_angles(net).verdict,
    )


@pytest.mark.slow
def test_c1_method_agreement():
    with criterion("C1 three methods agree; enumerated verdicts match oracle; < 120 s"):
        t0 = time.perf_counter()
        checked = 0
        for net in _enumerated():
            v = _verdicts(net)
            assert len(set(v)) == 1, f"disagreement {v} on {serialize_network(net)!r}"
            oracle = Verdict.ONE_WAY if oracle_enumerate(net) else Verdict.TWO_WAY
            assert v[0] is oracle, f"oracle says {oracle} on {serialize_network(net)!r}"
            checked += 1
        assert checked == 15 + 10395 - 675
        for n in (6, 10, 20):
            cfg = GenConfig(n, seed=101)
            for i in range(10_000):
                net = random_network(cfg, i)
                v = _verdicts(net)
                assert len(set(v)) == 1, f"disagreement {v} on n={n} sample {i}"
        assert time.perf_counter() - t0 < 120


def test_c2_oracle_orientation_pairs():
    with criterion("C2 oracle finds 0 or 2 mutually reverse orientations matching extraction"):
        for net in _enumerated():
            found = oracle_enumerate(net)
            assert len(found) in (0, 2)
            d = build_double_track(net)
            _, count = component_labels(d)
            if found:
                a, b = found
                assert a.reverse() == b
                o = extract_orientation(d, 0)
                assert {o, o.reverse()} == {a, b}
            else:
                assert count == 1


@pytest.mark.slow
def test_c3_cross_angle_parity():
    with criterion("C3 cross = angle (mod 2), side changes = cross + angle and even"):
        rng = np.random.default_rng(303)
        cycles = 0
        for k in range(1000):
            n = 2 * int(rng.integers(1, 11))
            net = random_network(GenConfig(n, seed=303), k)
            walks = fundamental_cycles(net) + [random_closed_walk(net, rng) for _ in range(100)]
            for w in walks:
                c = analyze_cycle(net, w)
                assert c.cross_count % 2 == c.angle_count % 2, str(w)
                assert c.side_changes == c.cross_count + c.angle_count, str(w)
                assert c.side_changes % 2 == 0
                cycles += 1
        assert cycles >= 100_000


def test_c4_fixtures():
    with criterion("C4 yin-yang TwoWay (1 cross, 1 angle); all-cross OneWay; added track gives 3/3 and TwoWay"):
        yy = classify(load_network(FIXTURES / "yinyang.railnet"))
        assert yy.verdict is Verdict.TWO_WAY
        assert (yy.witness.cross_count, yy.witness.angle_count) == (1, 1)
        assert classify(load_network(FIXTURES / "allcross.railnet")).verdict is Verdict.ONE_WAY
        plus = load_network(FIXTURES / "allcross_plus.railnet")
        assert classify(plus).verdict is Verdict.TWO_WAY
        ends = [EndRef(s, EndKind.from_label(k)) for s, k in (("x", "branch_a"), ("s2", "branch_b"), ("y", "branch_b"))]
        c = analyze_cycle(plus, walk_from_ends(plus, ends))
        assert (c.cross_count, c.angle_count) == (3, 3)


def test_c5_component_structure():
    with criterion("C5 two components split every switch's c/d and are swapped by reversal"):
        two = 0
        sizes = (2, 4, 6, 8, 10)
        for i in range(10_000):
            n = sizes[i % len(sizes)]
            net = random_network(GenConfig(n, seed=505), i)
            d = build_double_track(net)
            labels, count = component_labels(d)
            if count != 2:
                continue
            two += 1
            for s in range(net.n_switches):
                assert labels[2 * s] != labels[2 * s + 1]
            for x in range(d.n_arcs):
                assert labels[d.tail[x ^ 1]] != labels[d.tail[x]]
                assert labels[d.head[x ^ 1]] != labels[d.head[x]]
        assert two > 100


def test_c6_functioning_directions():
    with criterion("C6 functioning: OneWay sees one direction per (start, track), TwoWay both"):
        seen = {Verdict.ONE_WAY: 0, Verdict.TWO_WAY: 0}
        for net in _enumerated():
            if not check_functioning(net).functioning:
                continue
            verdict = classify(net).verdict
            seen[verdict] += 1
            d = build_double_track(net)
            for x in range(d.n_arcs):
                arcs = reachable_arcs(d, x)
                for t in range(net.n_tracks):
                    dirs = (2 * t in arcs) + (2 * t + 1 in arcs)
                    assert dirs == (1 if verdict is Verdict.ONE_WAY else 2)
        assert seen[Verdict.ONE_WAY] and seen[Verdict.TWO_WAY]


@pytest.mark.slow
def test_c7_monte_carlo():
    with criterion("C7 p_functioning(100) in [0.23, 0.43]; |p - 1/3| non-increasing within 2 SE; < 300 s"):
        t0 = time.perf_counter()
        rep = monte_carlo([GenConfig(n, seed=MC_SEED, sample_count=5000) for n in (10, 30, 100)])
        elapsed = time.perf_counter() - t0
        rows = rep.rows
        for r in rows:
            print(f"n={r.switch_count} p_functioning={r.p_functioning:.4f} se={r.standard_error:.4f}")
        assert 0.23 <= rows[-1].p_functioning <= 0.43
        for a, b in zip(rows, rows[1:]):
            slack = 2 * math.hypot(a.standard_error, b.standard_error)
            assert abs(b.p_functioning - 1 / 3) <= abs(a.p_functioning - 1 / 3) + slack
        assert elapsed < 300


def test_c8_performance():
    with criterion("C8 classify at 100k switches < 1 s and < 1 GB"):
        net = random_network(GenConfig(100_000, seed=808))
        classify(random_oneway_network(100, 1))
        t0 = time.perf_counter()
        rep = classify(net)
        elapsed = time.perf_counter() - t0
        print(f"classify 100k switches: {elapsed:.3f}s, verdict {rep.verdict}")
        assert elapsed < 1.0
        tracemalloc.start()
        classify(net)
        _, peak = tracemalloc.get_traced_memory()
        tracemalloc.stop()
        print(f"peak traced memory: {peak / 2**20:.1f} MiB")
        assert peak < 2**30
        # whole-process high-water mark, KiB on Linux
        assert resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024 < 2**30


def test_c9_determinism_and_format():
    with criterion("C9 montecarlo byte-identical; fixtures round-trip; DOT stable"):
        cmd = [sys.executable, "-m", "railnet.cli", "montecarlo", "--sizes", "10,30", "--samples", "300",
               "--seed", str(MC_SEED), "--csv"]
        outs = [subprocess.run(cmd, capture_output=True, check=True).stdout for _ in range(2)]
        assert outs[0] == outs[1] and outs[0]
        for path in sorted(FIXTURES.glob("*.railnet")):
            net = load_network(path)
            again = parse_network(serialize_network(net))
            assert [(t.a, t.b) for t in again.tracks] == [(t.a, t.b) for t in net.tracks]
            assert serialize_network(again) == serialize_network(net)
            for view in ("network", "double"):
                assert export_dot(net, view) == export_dot(again, view)
        assert export_dot(load_network(FIXTURES / "theta.railnet"), "double") == (
            FIXTURES / "theta.double.dot"
        ).read_text()

