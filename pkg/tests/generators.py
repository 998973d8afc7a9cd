"""Random elections and solutions shared by the test modules."""

from __future__ import annotations

import random
from fractions import Fraction

from equalshares import Election, EqualSharesSolution


def random_election(rng: random.Random, n_max: int = 8, m_max: int = 8, cost_max: int = 10,
                    density: float = 0.5, unit_cost: bool = False, budget=None) -> Election:
    n = rng.randint(1, n_max)
    m = rng.randint(1, m_max)
    ids = [f"p{j + 1}" for j in range(m)]
    ballots = [{x for x in ids if rng.random() < density} for _ in range(n)]
    for x in ids:
        if not any(x in b for b in ballots):
            ballots[rng.randrange(n)].add(x)
    costs = {x: 1 if unit_cost else rng.randint(1, cost_max) for x in ids}
    if budget is None:
        budget = rng.randint(1, sum(costs.values()) + 5)
    return Election.build(costs, ballots, budget)


def random_solution(rng: random.Random, election: Election, tries: int = 3) -> EqualSharesSolution:
    """A random priceable equal-shares solution, built project by project."""
    cap = election.per_voter_budget
    load = [Fraction(0)] * election.n
    supporters = {}
    order = list(election.projects)
    rng.shuffle(order)
    for p in order:
        if rng.random() < 0.3:
            continue
        approvers = list(election.approvers[p.id])
        for _ in range(tries):
            t = rng.randint(1, len(approvers))
            group = rng.sample(approvers, t)
            share = p.cost / t
            if all(load[i] + share <= cap for i in group):
                for i in group:
                    load[i] += share
                supporters[p.id] = frozenset(group)
                break
    return EqualSharesSolution(supporters)


def running_example(budget=35) -> Election:
    """Three voters approving all five projects; costs 6, 6, 6, 7, 10."""
    costs = {"p1": 6, "p2": 6, "p3": 6, "p4": 7, "p5": 10}
    return Election.build(costs, [set(costs)] * 3, budget)


def lopsided_start() -> EqualSharesSolution:
    """Voters 0 and 1 share p1..p3 at 3 each; voter 2 pays 7 for p4."""
    return EqualSharesSolution({"p1": {0, 1}, "p2": {0, 1}, "p3": {0, 1}, "p4": {2}})


def tie_example(budget=5) -> Election:
    return Election.build({"p1": 1, "p2": 4, "p3": 2}, [{"p1", "p2"}, {"p2", "p3"}], budget)


def synthetic_pabulib(rng: random.Random, n: int = 5000, m: int = 100, budget_share: float = 0.3) -> str:
    """A district-style approval file: skewed project popularity, costs in
    the tens of thousands, ballots of one to ten projects."""
    ids = [str(100 + j) for j in range(m)]
    costs = {pid: rng.randrange(20_000, 800_000, 100) for pid in ids}
    weights = [1 / (j + 1) ** 0.8 for j in range(m)]
    budget = int(sum(costs.values()) * budget_share) // 1000 * 1000
    lines = ["META", "key;value", "description;synthetic district", "country;Nowhere", "unit;Synthetic",
             f"num_projects;{m}", f"num_votes;{n}", f"budget;{budget}", "vote_type;approval", "rule;greedy",
             "PROJECTS", "project_id;cost;votes;name"]
    ballots = []
    for _ in range(n):
        k = rng.randint(1, 10)
        ballots.append(sorted(set(rng.choices(ids, weights, k=k)), key=ids.index))
    for pid in ids:
        if not any(pid in b for b in ballots):
            ballots[rng.randrange(n)].append(pid)
    for pid in ids:
        lines.append(f"{pid};{costs[pid]};{sum(pid in b for b in ballots)};Project {pid}")
    lines += ["VOTES", "voter_id;vote;age;sex"]
    for v, b in enumerate(ballots):
        lines.append(f"{v + 1};{','.join(b)};{rng.randint(18, 90)};{rng.choice('MF')}")
    return "\n".join(lines) + "\n"
