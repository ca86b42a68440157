"""Command-line interface.

Exit codes: 0 success / one-way, 1 file or validation failure, 2 usage
error, 3 two-way, 4 the requested object does not exist (no witness on a
one-way network, no orientation on a two-way one).
"""

from __future__ import annotations

import argparse
import csv
import io as _stdio
import json
import sys

from railnet.classify import (
    DEFAULT_ORACLE_BOUND,
    ClassificationReport,
    TooLarge,
    Verdict,
    analyze_cycle,
    classify,
    classify_by_angles,
    classify_by_components,
    classify_by_parity,
    oracle_enumerate,
)
from railnet.double_track import build_double_track
from railnet.io import DocumentError, export_dot, load_network
from railnet.journey import PolicyMode, SwitchPolicy, check_functioning, journey_to_walk, simulate
from railnet.model import EndKind, NetworkError, RailNetwork, is_railway_line
from railnet.randomgen import DisconnectedPolicy, GenConfig, MonteCarloReport, monte_carlo

EXIT_OK = 0
EXIT_FILE = 1
EXIT_USAGE = 2
EXIT_TWO_WAY = 3
EXIT_ABSENT = 4


class UsageError(Exception):
    pass


def _load(path: str) -> RailNetwork:
    return load_network(path)


def _orientation_text(net: RailNetwork, o) -> list[str]:
    d = build_double_track(net)
    return [f"  {d.arc(2 * t + b)}" for t, b in enumerate(o.directions)]


def report_to_json(report: ClassificationReport, net: RailNetwork) -> dict:
    out = {
        "verdict": str(report.verdict),
        "component_count": report.component_count,
        "methods": {k: str(v) for k, v in report.method_agreement.items()},
    }
    if report.orientation_pair is not None:
        out["orientation"] = list(report.orientation_pair[0].directions)
        out["polarity"] = {s: p.name.lower() for s, p in report.polarity.items()}
    if report.witness is not None:
        out["witness"] = _witness_json(report.witness)
    return out


def _witness_json(w) -> dict:
    return {
        "steps": [
            {"track": s.track + 1, "exit": str(s.exit), "entry": str(s.entry)} for s in w.cycle.steps
        ],
        "cross_count": w.cross_count,
        "angle_count": w.angle_count,
        "state_sequence": [s.value for s in w.state_sequence],
    }


def cmd_validate(args) -> int:
    net = _load(args.file)
    print(f"valid: {net.n_switches} switches, {net.n_tracks} tracks")
    return EXIT_OK


def cmd_classify(args) -> int:
    net = _load(args.file)
    if args.method != "all":
        fn = {"components": classify_by_components, "parity": classify_by_parity, "angles": classify_by_angles}
        result = fn[args.method](net)
        if args.json:
            print(json.dumps({"verdict": str(result.verdict), "method": args.method}))
        else:
            print(result.verdict)
        return EXIT_OK if result.verdict is Verdict.ONE_WAY else EXIT_TWO_WAY
    report = classify(net)
    if args.json:
        print(json.dumps(report_to_json(report, net), indent=1))
    else:
        print(report.verdict)
        print(f"components: {report.component_count}")
        print("methods: " + ", ".join(f"{k}={v}" for k, v in report.method_agreement.items()))
        if report.polarity is not None:
            ups = sum(p.name == "UPWARD" for p in report.polarity.values())
            print(f"polarity: {ups} upward, {len(report.polarity) - ups} downward")
        if report.witness is not None:
            w = report.witness
            print(f"witness: {w.cycle} (cross {w.cross_count}, angles {w.angle_count})")
    return EXIT_OK if report.verdict is Verdict.ONE_WAY else EXIT_TWO_WAY


def cmd_witness(args) -> int:
    net = _load(args.file)
    par = classify_by_parity(net)
    if par.witness is None:
        print("network is one-way: no cycle has an odd number of cross tracks", file=sys.stderr)
        return EXIT_ABSENT
    w = analyze_cycle(net, par.witness)
    if args.json:
        print(json.dumps(_witness_json(w), indent=1))
        return EXIT_OK
    for i, s in enumerate(w.cycle.steps, 1):
        print(f"{i}: t{s.track + 1} {s.exit} -> {s.entry}")
    print(f"cross_count: {w.cross_count}")
    print(f"angle_count: {w.angle_count}")
    print("state_sequence: " + " ".join(s.value for s in w.state_sequence))
    return EXIT_OK


def cmd_orient(args) -> int:
    net = _load(args.file)
    report = classify(net)
    if report.orientation_pair is None:
        print("network is two-way: no one-way orientation exists", file=sys.stderr)
        return EXIT_ABSENT
    print("orientation:")
    print("\n".join(_orientation_text(net, report.orientation_pair[0])))
    print("polarity:")
    for s in net.switches:
        print(f"  {s}: {report.polarity[s].name.lower()}")
    return EXIT_OK


def _parse_start(net: RailNetwork, spec: str) -> int:
    track, _, direction = spec.partition(":")
    track = track.lstrip("t")
    try:
        t = int(track) - 1
    except ValueError:
        raise UsageError(f"bad track in --start {spec!r}") from None
    if not 0 <= t < net.n_tracks:
        raise UsageError(f"--start: no track t{t + 1}")
    if direction not in ("forward", "backward"):
        raise UsageError("--start direction must be 'forward' or 'backward'")
    return 2 * t + (direction == "backward")


def _parse_policy(spec: str, seed: int | None) -> SwitchPolicy:
    if spec in ("a", "always_a"):
        return SwitchPolicy(PolicyMode.ALWAYS_A)
    if spec in ("b", "always_b"):
        return SwitchPolicy(PolicyMode.ALWAYS_B)
    if spec == "random":
        return SwitchPolicy(PolicyMode.SEEDED_RANDOM, seed=0 if seed is None else seed)
    if spec.startswith("map:"):
        choices = {}
        for item in spec[4:].split(","):
            s, _, k = item.partition("=")
            if k not in ("a", "b"):
                raise UsageError(f"bad policy entry {item!r}; use <switch>=a or <switch>=b")
            choices[s] = EndKind.BRANCH_A if k == "a" else EndKind.BRANCH_B
        return SwitchPolicy(PolicyMode.FIXED_MAP, choices=choices)
    raise UsageError(f"unknown policy {spec!r}")


def cmd_simulate(args) -> int:
    net = _load(args.file)
    start = _parse_start(net, args.start)
    policy = _parse_policy(args.policy, args.seed)
    if args.steps < 1:
        raise UsageError("--steps must be positive")
    if policy.mode is PolicyMode.FIXED_MAP:
        missing = sorted(set(net.switches) - set(policy.choices))
        if missing:
            raise UsageError(f"policy map lacks switches: {', '.join(missing)}")
    d = build_double_track(net)
    j = simulate(d, start, policy, args.steps)
    for i, a in enumerate(j.arcs):
        print(f"{i}: {a}")
    walk = journey_to_walk(j)
    print(f"walk: {walk}")
    print(f"railway line: {is_railway_line(walk)}")
    if j.recurrence is not None:
        print(f"first repeated arc: step {j.recurrence[1]} repeats step {j.recurrence[0]}")
    return EXIT_OK


def cmd_functioning(args) -> int:
    net = _load(args.file)
    rep = check_functioning(net, max_pairs=args.max_pairs)
    d = build_double_track(net)
    if args.json:
        print(json.dumps({
            "functioning": rep.functioning,
            "malfunctioning_starts": rep.malfunctioning_starts,
            "unreachable_pairs": [[str(d.arc(x)), t + 1] for x, t in rep.unreachable_pairs],
            "direction_coverage": {f"t{t + 1}": c.value for t, c in rep.direction_coverage.items()},
        }, indent=1))
        return EXIT_OK
    print("functioning" if rep.functioning else "malfunctioning")
    if not rep.functioning:
        print(f"start arcs missing some track: {rep.malfunctioning_starts}")
        for x, t in rep.unreachable_pairs:
            print(f"  from {d.arc(x)} cannot reach t{t + 1}")
    for t, c in rep.direction_coverage.items():
        print(f"t{t + 1}: {c.value}")
    return EXIT_OK


def format_report(report: MonteCarloReport, as_csv: bool) -> str:
    buf = _stdio.StringIO()
    if as_csv:
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["size", "samples", "rejected", "p_functioning", "p_oneway", "p_oneway_given_functioning", "stderr"])
        for r in report.rows:
            pg = "" if r.p_oneway_given_functioning is None else f"{r.p_oneway_given_functioning:.6f}"
            w.writerow([r.switch_count, r.samples_used, r.rejected_disconnected,
                        f"{r.p_functioning:.6f}", f"{r.p_oneway:.6f}", pg, f"{r.standard_error:.6f}"])
        return buf.getvalue()
    buf.write(f"{'size':>6} {'samples':>8} {'rejected':>9} {'p_func':>8} {'p_oneway':>9} {'p_ow|func':>10} {'stderr':>8}\n")
    for r in report.rows:
        pg = "-" if r.p_oneway_given_functioning is None else f"{r.p_oneway_given_functioning:.4f}"
        buf.write(f"{r.switch_count:>6} {r.samples_used:>8} {r.rejected_disconnected:>9} "
                  f"{r.p_functioning:>8.4f} {r.p_oneway:>9.4f} {pg:>10} {r.standard_error:>8.4f}\n")
    return buf.getvalue()


def cmd_montecarlo(args) -> int:
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s]
    except ValueError:
        raise UsageError(f"bad --sizes {args.sizes!r}") from None
    policy = DisconnectedPolicy.KEEP if args.keep_disconnected else DisconnectedPolicy.REJECT
    try:
        configs = [GenConfig(n, args.seed, policy, args.samples) for n in sizes]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = monte_carlo(configs, workers=args.workers)
    sys.stdout.write(format_report(report, args.csv))
    return EXIT_OK


def cmd_dot(args) -> int:
    net = _load(args.file)
    report = classify(net) if args.annotate else None
    text = export_dot(net, "network" if args.view == "network" else "double", report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_oracle(args) -> int:
    net = _load(args.file)
    try:
        found = oracle_enumerate(net, bound=args.bound)
    except TooLarge as exc:
        raise UsageError(str(exc)) from None
    print(f"one-way orientations: {len(found)}")
    for i, o in enumerate(found, 1):
        print(f"orientation {i}:")
        print("\n".join(_orientation_text(net, o)))
    return EXIT_OK if found else EXIT_TWO_WAY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="railnet", description="Analyse toy-railroad networks of Y-switches.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check a network file")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("classify", help="one-way or two-way (exit 0 / 3)")
    s.add_argument("file")
    s.add_argument("--method", choices=["components", "parity", "angles", "all"], default="all")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("witness", help="print a cycle with an odd number of cross tracks")
    s.add_argument("file")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_witness)

    s = sub.add_parser("orient", help="print the canonical one-way orientation and polarities")
    s.add_argument("file")
    s.set_defaults(func=cmd_orient)

    s = sub.add_parser("simulate", help="drive a train")
    s.add_argument("file")
    s.add_argument("--start", required=True, help="<track>:forward|backward, e.g. t1:forward")
    s.add_argument("--policy", default="always_a", help="always_a, always_b, random, or map:s1=a,s2=b,...")
    s.add_argument("--steps", type=int, default=10)
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("functioning", help="can every start reach every track?")
    s.add_argument("file")
    s.add_argument("--json", action="store_true")
    s.add_argument("--max-pairs", type=int, default=20)
    s.set_defaults(func=cmd_functioning)

    s = sub.add_parser("montecarlo", help="estimate functioning / one-way frequencies")
    s.add_argument("--sizes", default="10,30,100")
    s.add_argument("--samples", type=int, default=5000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--csv", action="store_true")
    s.add_argument("--keep-disconnected", action="store_true")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_montecarlo)

    s = sub.add_parser("dot", help="export Graphviz DOT")
    s.add_argument("file")
    s.add_argument("--view", choices=["network", "double"], default="network")
    s.add_argument("--out")
    s.add_argument("--annotate", action="store_true", help="add the verdict as graph label")
    s.set_defaults(func=cmd_dot)

    s = sub.add_parser("oracle", help="brute-force all orientations (small networks)")
    s.add_argument("file")
    s.add_argument("--bound", type=int, default=DEFAULT_ORACLE_BOUND)
    s.set_defaults(func=cmd_oracle)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"railnet: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, DocumentError, NetworkError) as exc:
        print(f"railnet: {exc}", file=sys.stderr)
        return EXIT_FILE


if __name__ == "__main__":
    sys.exit(main())
