import json
import re

import pytest
from hypothesis import given, settings

from conftest import FIXTURES, any_networks
from helpers import theta, yinyang
from railnet.classify import classify
from railnet.io import (
    DocumentSyntaxError,
    SchemaError,
    decode,
    export_dot,
    load_network,
    parse_network,
    serialize_network,
)
from railnet.model import DuplicateEnd, MissingEnd

FIXTURE_NAMES = sorted(p.stem for p in FIXTURES.glob("*.railnet"))
THETA_TEXT = """railnet 1
switches s1 s2
track s1.stem s2.stem
track s1.branch_a s2.branch_a
track s1.branch_b s2.branch_b
"""


def test_parse_theta():
    net = parse_network(THETA_TEXT)
    assert net.tracks == theta().tracks
    assert serialize_network(net) == THETA_TEXT


def test_comments_and_blank_lines():
    text = "# header\n\nrailnet 1  # version\n" + THETA_TEXT.split("\n", 1)[1]
    assert parse_network(text).tracks == theta().tracks


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_fixture_round_trip(name):
    net = load_network(FIXTURES / f"{name}.railnet")
    text = serialize_network(net)
    again = parse_network(text)
    assert again.tracks == net.tracks
    assert [(t.a, t.b) for t in again.tracks] == [(t.a, t.b) for t in net.tracks]
    assert serialize_network(again) == text
    js = serialize_network(net, "json")
    assert serialize_network(parse_network(js), "json") == js


def test_json_form():
    js = serialize_network(theta(), "json")
    data = json.loads(js)
    assert data["format_version"] == 1
    assert data["tracks"][0] == [["s1", "stem"], ["s2", "stem"]]
    assert parse_network(js).tracks == theta().tracks


@pytest.mark.parametrize(
    "text, exc",
    [
        ("", DocumentSyntaxError),
        ("railnet x\n", DocumentSyntaxError),
        ("railnet 2\nswitches s1 s2\n", SchemaError),
        ("railnet 1\n", SchemaError),
        ("railnet 1\nswitches s1 s2\ntrack s1.steam s2.stem\n", SchemaError),
        ("railnet 1\nswitches s1 s2\ntrack s1stem s2.stem\n", DocumentSyntaxError),
        ("railnet 1\nswitches s1 s2\ntrack s1.stem\n", DocumentSyntaxError),
        ("railnet 1\nswitches s1 s2\nbogus\n", DocumentSyntaxError),
        ('{"format_version": 1, "switches": ["s1"]}', SchemaError),
        ('{"format_version": 1, "switches": ["s1", "s2"], "tracks": [[["s1", "x"], ["s2", "stem"]]]}', SchemaError),
        ("{not json", DocumentSyntaxError),
    ],
)
def test_document_errors(text, exc):
    with pytest.raises(exc):
        decode(text)


def test_error_reports_line():
    with pytest.raises(SchemaError) as info:
        decode("railnet 1\nswitches s1 s2\ntrack s1.steam s2.stem\n")
    assert info.value.line == 3


def test_network_errors_surface():
    with pytest.raises(MissingEnd):
        parse_network("railnet 1\nswitches s1 s2\ntrack s1.stem s2.stem\n")
    with pytest.raises(DuplicateEnd):
        parse_network(THETA_TEXT + "track s1.stem s2.branch_a\n")


def test_dot_double_golden():
    got = export_dot(theta(), "double")
    assert got == (FIXTURES / "theta.double.dot").read_text()
    assert got.count("->") == 6
    assert sum(line.strip().startswith('"') and "->" not in line for line in got.splitlines()) == 4
    assert set(re.findall(r"color=(\w+)", got)) == {"red", "black"}


def test_dot_network_view():
    got = export_dot(yinyang(), "network")
    assert got.count("cross") == 1 and got.count("parallel") == 2
    assert "label=" in got and "  label=" not in got
    annotated = export_dot(yinyang(), "network", classify(yinyang()))
    assert '  label="TwoWay";' in annotated


def test_dot_unknown_view():
    with pytest.raises(ValueError):
        export_dot(theta(), "tree")


def test_connected_double_view_is_uncoloured():
    got = export_dot(yinyang(), "double")
    assert "color=" not in got


@settings(max_examples=60, deadline=None)
@given(any_networks(max_switches=20))
def test_round_trip_property(net):
    for fmt in ("text", "json"):
        text = serialize_network(net, fmt)
        again = parse_network(text)
        assert [(t.a, t.b) for t in again.tracks] == [(t.a, t.b) for t in net.tracks]
        assert serialize_network(again, fmt) == text
    assert export_dot(net, "double") == export_dot(parse_network(serialize_network(net)), "double")
