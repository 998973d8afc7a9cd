import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from equalshares import (
    EqualSharesSolution,
    MalformedSolution,
    ames,
    ames_tie_consistent,
    apply_update,
    find_greedy_step,
    is_lex_stable,
    is_stable,
)
from equalshares.ames import improved_projects
from equalshares.solution import check_solution
from generators import lopsided_start, random_election, random_solution, running_example, tie_example

WORKED_TRACE = [
    # project, t, price, removed (project, price before)
    ("p1", 3, F(2), ()),
    ("p2", 3, F(2), ()),
    ("p3", 3, F(2), (("p4", F(7)),)),
    ("p4", 3, F(7, 3), ()),
    ("p5", 3, F(10, 3), ()),
]


def test_worked_trace():
    e = running_example()
    final, trace = ames(e, lopsided_start())
    assert [(s.project, s.t, s.price, s.removed) for s in trace.steps] == WORKED_TRACE
    assert trace.steps[2].attribution == {2: "p4"}
    assert final == EqualSharesSolution({p: [0, 1, 2] for p in e.cost})
    assert trace.replay() == final


def test_trace_json_schema():
    _, trace = ames(running_example(), lopsided_start())
    doc = json.loads(trace.to_json())
    assert doc[2] == {
        "project": "p3",
        "t": 3,
        "price": [2, 1],
        "removed": [{"project": "p4", "old_price": [7, 1]}],
        "new_supporters": [0, 1, 2],
    }


def test_scratch_on_running_example():
    e = running_example()
    final, trace = ames(e)
    assert [s.price for s in trace.steps] == [2, 2, 2, F(7, 3), F(10, 3)]
    assert final.outcome == set(e.cost)


def test_first_greedy_step():
    c = find_greedy_step(lopsided_start(), running_example())
    assert (c.project, c.t, c.price, c.voters) == ("p1", 3, 2, {0, 1, 2})
    after, step = apply_update(lopsided_start(), c, running_example())
    assert after.supporters["p1"] == {0, 1, 2} and step.removed == ()


def test_no_step_on_stable_solution():
    e = running_example()
    final, _ = ames(e)
    assert find_greedy_step(final, e) is None
    assert ames(e, final)[1].steps == ()


def test_rejects_malformed_start():
    with pytest.raises(MalformedSolution):
        ames(running_example(), EqualSharesSolution({"p1": [0], "p2": [0], "p3": [0]}))


def test_max_steps():
    final, trace = ames(running_example(), max_steps=2)
    assert len(trace) == 2 and not is_stable(final, running_example())


class TestTieExample:
    def test_base_budget(self):
        s, _ = ames(tie_example())
        assert s == EqualSharesSolution({"p1": [0], "p3": [1]})

    def test_restart_plain_vs_tie_consistent(self):
        start, _ = ames(tie_example())
        e6 = tie_example(6)
        plain, _ = ames(e6, start)
        assert plain == start  # still stable at 6, but not what a fresh run yields
        fresh, _ = ames(e6)
        lex, trace = ames_tie_consistent(e6, start)
        assert fresh == lex == EqualSharesSolution({"p1": [0], "p2": [0, 1]})
        assert [(s.project, s.removed) for s in trace.steps] == [("p2", (("p3", F(2)),))]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32), st.booleans())
def test_run_properties(seed, lexicographic):
    rng = random.Random(seed)
    e = random_election(rng)
    start = random_solution(rng, e)
    final, trace = ames(e, start, lexicographic=lexicographic)
    check_solution(final, e)
    assert is_stable(final, e)
    if lexicographic:
        assert is_lex_stable(final, e)
    prices = [s.price for s in trace.steps]
    assert prices == sorted(prices)
    stepped = [s.project for s in trace.steps]
    assert len(stepped) == len(set(stepped))
    assert improved_projects(start, final, e) <= set(stepped) <= final.outcome
    for s in trace.steps:
        assert final.supporters[s.project] == s.new_supporters
    assert trace.replay() == final


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_step_count_from_stable_starts(seed):
    rng = random.Random(seed)
    e = random_election(rng)
    first, trace = ames(e)
    assert len(trace) == len(improved_projects(EqualSharesSolution.empty(), first, e)) == len(first.outcome)
    bigger = e.with_budget(e.budget + rng.randint(1, 40))
    final, trace = ames(bigger, first)
    assert len(trace) == len(improved_projects(first, final, bigger))


def test_removal_then_readd_at_same_price():
    """A removed project can come back at its old price, so it is stepped
    without its price dropping relative to the start."""
    from equalshares import Election

    ballots = [{"p5", "p2", "p8", "p1"}, {"p5", "p6", "p3"}, {"p2", "p8", "p6", "p7", "p3"}, {"p6", "p2", "p8"},
               {"p2", "p7", "p1"}, {"p4", "p2", "p8"}, {"p2", "p4", "p8", "p7", "p3"}]
    costs = {"p1": 6, "p2": 7, "p3": 10, "p4": 8, "p5": 2, "p6": 5, "p7": 10, "p8": 8}
    e = Election.build(costs, ballots, 53)
    start = EqualSharesSolution({"p2": [4, 5], "p3": [1, 2, 6], "p4": [5, 6]})
    final, trace = ames(e, start)
    assert [s.project for s in trace.steps] == ["p5", "p2", "p8", "p6", "p1", "p4"]
    assert trace.steps[1].removed == (("p4", F(4)),)
    assert final.supporters["p4"] == start.supporters["p4"]
    assert len(trace) == len(improved_projects(start, final, e)) + 1


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_tie_consistency(seed):
    rng = random.Random(seed)
    e = random_election(rng)
    low = e.with_budget(rng.randint(1, int(e.budget)))
    start, _ = ames(low)
    assert ames_tie_consistent(e, start)[0] == ames(e)[0]
