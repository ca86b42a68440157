"""``.railnet`` documents and DOT export.

Text form, one record per line, ``#`` starts a comment::

    railnet 1
    switches s1 s2
    track s1.stem s2.stem
    track s1.branch_a s2.branch_a
    track s1.branch_b s2.branch_b

The same schema is accepted as JSON::

    {"format_version": 1, "switches": ["s1", "s2"],
     "tracks": [[["s1", "stem"], ["s2", "stem"]], ...]}

Tracks keep their order (a track's identifier is its position) and each
track's ends keep theirs (the first end names the forward direction).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from railnet.classify import ClassificationReport, TrackClass, track_class
from railnet.double_track import build_double_track, component_labels
from railnet.model import EndKind, EndRef, RailNetwork, Track, validate_network

FORMAT_VERSION = 1
END_NAMES = ("stem", "branch_a", "branch_b")


class DocumentError(ValueError):
    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


class DocumentSyntaxError(DocumentError):
    pass


class SchemaError(DocumentError):
    pass


@dataclass(frozen=True)
class NetworkDocument:
    format_version: int
    switches: tuple[str, ...]
    tracks: tuple[tuple[tuple[str, str], tuple[str, str]], ...]

    def to_network(self) -> RailNetwork:
        return validate_network(
            self.switches,
            [Track(EndRef(a[0], EndKind.from_label(a[1])), EndRef(b[0], EndKind.from_label(b[1]))) for a, b in self.tracks],
        )

    @classmethod
    def from_network(cls, net: RailNetwork) -> NetworkDocument:
        return cls(
            FORMAT_VERSION,
            net.switches,
            tuple(((t.a.switch, t.a.kind.label), (t.b.switch, t.b.kind.label)) for t in net.tracks),
        )


def _check_name(name: str, line: int | None, fld: str) -> str:
    if not name or any(c.isspace() for c in name) or "#" in name:
        raise SchemaError(f"invalid switch identifier {name!r}", line, fld)
    return name


def _parse_end(token: str, line: int, fld: str) -> tuple[str, str]:
    switch, dot, end = token.rpartition(".")
    if not dot or not switch:
        raise DocumentSyntaxError(f"expected <switch>.<end>, got {token!r}", line, fld)
    if end not in END_NAMES:
        raise SchemaError(f"unknown end name {end!r} (expected one of {', '.join(END_NAMES)})", line, fld)
    return _check_name(switch, line, fld), end


def _decode_text(text: str) -> NetworkDocument:
    version = None
    switches: list[str] | None = None
    tracks = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        key = fields[0]
        if version is None:
            if key != "railnet" or len(fields) != 2:
                raise DocumentSyntaxError("document must start with 'railnet <version>'", lineno)
            try:
                version = int(fields[1])
            except ValueError:
                raise DocumentSyntaxError(f"bad version {fields[1]!r}", lineno, "version") from None
            if version != FORMAT_VERSION:
                raise SchemaError(f"unsupported format version {version}", lineno, "version")
        elif key == "switches":
            if switches is not None:
                raise SchemaError("'switches' given twice", lineno)
            switches = [_check_name(s, lineno, "switches") for s in fields[1:]]
        elif key == "track":
            if len(fields) != 3:
                raise DocumentSyntaxError("a track record needs exactly two ends", lineno)
            tracks.append((_parse_end(fields[1], lineno, "a"), _parse_end(fields[2], lineno, "b")))
        else:
            raise DocumentSyntaxError(f"unknown record {key!r}", lineno)
    if version is None:
        raise DocumentSyntaxError("empty document")
    if switches is None:
        raise SchemaError("missing 'switches' record")
    return NetworkDocument(version, tuple(switches), tuple(tracks))


def _decode_json(text: str) -> NetworkDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(exc.msg, exc.lineno) from None
    if not isinstance(data, dict):
        raise SchemaError("top level must be an object")
    for key in ("format_version", "switches", "tracks"):
        if key not in data:
            raise SchemaError("missing key", field=key)
    if data["format_version"] != FORMAT_VERSION:
        raise SchemaError(f"unsupported format version {data['format_version']!r}", field="format_version")
    if not isinstance(data["switches"], list) or not all(isinstance(s, str) for s in data["switches"]):
        raise SchemaError("must be a list of strings", field="switches")
    switches = tuple(_check_name(s, None, "switches") for s in data["switches"])
    tracks = []
    for i, rec in enumerate(data["tracks"]):
        fld = f"tracks[{i}]"
        try:
            (sa, ka), (sb, kb) = rec
        except (TypeError, ValueError):
            raise SchemaError("must be [[switch, end], [switch, end]]", field=fld) from None
        for s, k in ((sa, ka), (sb, kb)):
            if not isinstance(s, str) or not isinstance(k, str):
                raise SchemaError("switch and end must be strings", field=fld)
            if k not in END_NAMES:
                raise SchemaError(f"unknown end name {k!r}", field=fld)
            _check_name(s, None, fld)
        tracks.append(((sa, ka), (sb, kb)))
    return NetworkDocument(FORMAT_VERSION, switches, tuple(tracks))


def decode(text: str) -> NetworkDocument:
    return _decode_json(text) if text.lstrip().startswith("{") else _decode_text(text)


def parse_network(text: str) -> RailNetwork:
    return decode(text).to_network()


def serialize_network(net: RailNetwork, fmt: str = "text") -> str:
    """Canonical rendering: sorted switch list, tracks and ends in stored order."""
    doc = NetworkDocument.from_network(net)
    if fmt == "json":
        payload = {
            "format_version": doc.format_version,
            "switches": list(doc.switches),
            "tracks": [[list(a), list(b)] for a, b in doc.tracks],
        }
        return json.dumps(payload, indent=1) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [f"railnet {doc.format_version}", "switches " + " ".join(doc.switches)]
    lines += [f"track {a[0]}.{a[1]} {b[0]}.{b[1]}" for a, b in doc.tracks]
    return "\n".join(lines) + "\n"


def load_network(path) -> RailNetwork:
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read())


# -- DOT ----------------------------------------------------------------------

_KIND_SHORT = {EndKind.STEM: "S", EndKind.BRANCH_A: "A", EndKind.BRANCH_B: "B"}
_COMPONENT_COLOURS = ("red", "black")


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(net: RailNetwork, view: str = "network", report: ClassificationReport | None = None) -> str:
    """DOT text for the switch multigraph (``network``) or the double-track digraph (``double``)."""
    if view == "network":
        lines = ["graph railnet {", "  node [shape=circle];"]
        if report is not None:
            lines.append(f"  label={_q(str(report.verdict))};")
        for s in net.switches:
            lines.append(f"  {_q(s)};")
        for i, t in enumerate(net.tracks):
            cls = track_class(t)
            style = 'color=red, penwidth=2' if cls is TrackClass.CROSS else 'color=blue'
            lines.append(
                f"  {_q(t.a.switch)} -- {_q(t.b.switch)} [label={_q(f't{i + 1} {cls.value}')}, "
                f"taillabel={_q(_KIND_SHORT[t.a.kind])}, headlabel={_q(_KIND_SHORT[t.b.kind])}, {style}];"
            )
        lines.append("}")
        return "\n".join(lines) + "\n"
    if view == "double":
        d = build_double_track(net)
        labels, count = component_labels(d)
        lines = ["digraph double_track {", "  node [shape=box];"]
        if report is not None:
            lines.append(f"  label={_q(str(report.verdict))};")
        for v in range(d.n_vertices):
            attrs = f" [color={_COMPONENT_COLOURS[labels[v]]}]" if count == 2 else ""
            lines.append(f"  {_q(str(d.vertex(v)))}{attrs};")
        for x in range(d.n_arcs):
            attrs = f"label={_q(f't{x // 2 + 1}')}"
            if count == 2:
                attrs += f", color={_COMPONENT_COLOURS[labels[d.tail[x]]]}"
            lines.append(f"  {_q(str(d.vertex(d.tail[x])))} -> {_q(str(d.vertex(d.head[x])))} [{attrs}];")
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown view {view!r}")
