import random
from fractions import Fraction as F

import pytest

from equalshares import dump_pabulib, parse_pabulib, read_pabulib
from equalshares.core import UnapprovedProject
from equalshares.pabulib import (
    DuplicateId,
    MalformedRow,
    MissingSection,
    PabulibError,
    UnsupportedVoteType,
    _fmt,
    read_tie_order,
)
from generators import running_example, synthetic_pabulib

SAMPLE = """META
key;value
description;Tiny district
budget;12,5
vote_type;approval
PROJECTS
project_id;cost;name
b7;4.5;Bench
a1;6;Park
c2;2;Lamp
VOTES
voter_id;vote;age
v1;a1,b7;30
v2;c2;41
v3;b7, c2;22
"""


def test_parse_sample():
    e = parse_pabulib(SAMPLE)
    assert e.budget == F(25, 2)
    assert [p.id for p in e.projects] == ["b7", "a1", "c2"]  # file order is priority
    assert e.cost == {"b7": F(9, 2), "a1": 6, "c2": 2}
    assert e.ballots == (frozenset({"a1", "b7"}), frozenset({"c2"}), frozenset({"b7", "c2"}))
    assert e.metadata["voter_ids"] == ["v1", "v2", "v3"]
    assert e.metadata["projects"]["a1"] == {"name": "Park"}
    assert e.metadata["meta"]["description"] == "Tiny district"


def test_byte_order_mark_and_blank_lines():
    e = parse_pabulib("﻿" + SAMPLE.replace("PROJECTS", "\nPROJECTS"))
    assert e.m == 3


def test_roundtrip():
    e = parse_pabulib(SAMPLE)
    text = dump_pabulib(e)
    again = parse_pabulib(text)
    assert again.cost == e.cost and again.ballots == e.ballots and again.budget == e.budget
    assert [p.id for p in again.projects] == [p.id for p in e.projects]
    assert again.metadata["projects"] == e.metadata["projects"]
    assert dump_pabulib(again) == text


def test_dump_plain_election():
    text = dump_pabulib(running_example())
    assert "budget;35" in text and "3;p1,p2,p3,p4,p5" in text


def test_fmt():
    assert _fmt(F(25, 2)) == "12.5"
    assert _fmt(F(1, 8)) == "0.125"
    assert _fmt(F(-3, 20)) == "-0.15"
    with pytest.raises(ValueError):
        _fmt(F(1, 3))


@pytest.mark.parametrize("mutate, error", [
    (lambda s: s.replace("VOTES\n", ""), MissingSection),
    (lambda s: s.replace("vote_type;approval", "vote_type;ordinal"), UnsupportedVoteType),
    (lambda s: s.replace("vote_type;approval\n", ""), PabulibError),
    (lambda s: s.replace("budget;12,5\n", ""), PabulibError),
    (lambda s: s.replace("c2;2;Lamp", "c2;2"), MalformedRow),
    (lambda s: s.replace("c2;2;Lamp", "c2;two;Lamp"), MalformedRow),
    (lambda s: s.replace("c2;2;Lamp", "a1;2;Lamp"), DuplicateId),
    (lambda s: s.replace("v3;", "v1;"), DuplicateId),
    (lambda s: "stray;row\n" + s, MalformedRow),
    (lambda s: s.replace("project_id;cost;name", "id;cost;name"), MalformedRow),
    (lambda s: s + "PROJECTS\nproject_id;cost\n", MalformedRow),
])
def test_errors(mutate, error):
    with pytest.raises(error):
        parse_pabulib(mutate(SAMPLE))


def test_malformed_row_reports_line():
    with pytest.raises(MalformedRow) as info:
        parse_pabulib(SAMPLE.replace("c2;2;Lamp", "c2;2"))
    assert info.value.line == 10


def test_unapproved_projects():
    text = SAMPLE.replace("c2;2;Lamp", "c2;2;Lamp\nz9;1;Nobody")
    with pytest.raises(UnapprovedProject):
        parse_pabulib(text)
    assert "z9" not in parse_pabulib(text, drop_unapproved=True).cost


def test_files(tmp_path):
    (tmp_path / "e.pb").write_text(SAMPLE, encoding="utf-8")
    (tmp_path / "order.txt").write_text("c2\n\na1\nb7\n", encoding="utf-8")
    e = read_pabulib(tmp_path / "e.pb")
    order = read_tie_order(tmp_path / "order.txt")
    assert order == ["c2", "a1", "b7"]
    assert [p.id for p in e.with_priority(order).projects] == order


def test_synthetic_generator_parses():
    e = parse_pabulib(synthetic_pabulib(random.Random(4), n=200, m=40))
    assert (e.n, e.m) == (200, 40)
    assert all(1 <= len(b) for b in e.ballots)
