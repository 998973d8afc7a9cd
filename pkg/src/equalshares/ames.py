"""Greedy update steps and the Adaptive Method of Equal Shares.

Plain mode uses the capacities ``kappa_i``; tie-consistent mode uses
project-dependent capacities, which lets a voter withdraw fully from a
project of lower priority than the candidate.  Both modes share one loop.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .core import Election
from .solution import (
    INF,
    EqualSharesSolution,
    VoterLoads,
    capacities_from_loads,
    check_solution,
    price,
    voter_loads,
)
from .stability import alpha


class InternalInvariantViolation(RuntimeError):
    """An update produced a state that cannot occur for correct inputs."""


@dataclass(frozen=True)
class GreedyCandidate:
    project: str
    t: int
    price: Fraction
    voters: frozenset[int]


@dataclass(frozen=True)
class UpdateStep:
    project: str
    t: int
    price: Fraction
    new_supporters: frozenset[int]
    removed: tuple[tuple[str, Fraction], ...]  # (project, its price before the step)
    attribution: dict[int, str] = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {
            "project": self.project,
            "t": self.t,
            "price": [self.price.numerator, self.price.denominator],
            "removed": [
                {"project": q, "old_price": [pr.numerator, pr.denominator]} for q, pr in self.removed
            ],
            "new_supporters": sorted(self.new_supporters),
        }


@dataclass(frozen=True)
class UpdateTrace:
    start: EqualSharesSolution
    steps: tuple[UpdateStep, ...]
    final: EqualSharesSolution

    def __len__(self):
        return len(self.steps)

    def replay(self) -> EqualSharesSolution:
        """Re-apply the recorded steps to the start solution."""
        sup = dict(self.start.supporters)
        for step in self.steps:
            for q, _ in step.removed:
                del sup[q]
            sup[step.project] = step.new_supporters
        return EqualSharesSolution(sup)

    def to_json(self) -> str:
        return json.dumps([s.to_dict() for s in self.steps], indent=2)


def _sorted_approvers(
    pid: str,
    lists: dict[str, list[int]],
    caps: Sequence[Fraction],
    loads: VoterLoads,
    election: Election,
    lexicographic: bool,
) -> list[tuple[Fraction, int]]:
    """Approvers of ``pid`` as (capacity, voter), capacity non-increasing.

    In tie-consistent mode a voter whose capacity is ``z_i - eps`` is bumped
    to ``z_i`` when her priciest project has lower priority than ``pid``.
    Bumping preserves the relative order of the bumped voters, so the two
    subsequences are merged in linear time.
    """
    voters = lists[pid]
    if not lexicographic:
        return [(caps[i], i) for i in voters]
    rank = election.rank
    r = rank[pid]
    plain, bumped = [], []
    for i in voters:
        z = loads.max_payment[i]
        if z is not None and z > caps[i] and rank[loads.top[i]] > r:
            bumped.append((z, i))
        else:
            plain.append((caps[i], i))
    if not bumped:
        return plain
    return list(heapq.merge(plain, bumped, key=lambda e: e[0], reverse=True))


def _find(solution, election, loads, caps, lexicographic) -> GreedyCandidate | None:
    order = sorted(range(election.n), key=caps.__getitem__, reverse=True)
    lists: dict[str, list[int]] = {p.id: [] for p in election.projects}
    ballots = election.ballots
    for i in order:
        for pid in ballots[i]:
            lists[pid].append(i)
    best = None
    sup = solution.supporters
    for p in election.projects:
        entries = _sorted_approvers(p.id, lists, caps, loads, election, lexicographic)
        current = len(sup.get(p.id, ()))
        if len(entries) <= current:
            continue
        t = alpha(p.cost, [k for k, _ in entries])
        if t is None or t <= current:
            continue
        pr = p.cost / t
        if best is None or pr < best.price:
            best = GreedyCandidate(p.id, t, pr, frozenset(i for _, i in entries[:t]))
    return best


def find_greedy_step(
    solution: EqualSharesSolution, election: Election, lexicographic: bool = False
) -> GreedyCandidate | None:
    """The greedy update step: the project whose per-voter price can be made
    smallest, ties broken by priority.  ``None`` if the solution is stable
    (lexicographically stable in tie-consistent mode)."""
    loads = voter_loads(solution, election)
    caps = capacities_from_loads(loads, election)
    return _find(solution, election, loads, caps, lexicographic)


def _apply(solution, candidate, election, loads) -> tuple[EqualSharesSolution, UpdateStep]:
    pid = candidate.project
    pi = candidate.price
    cap = election.per_voter_budget
    current = solution.supporters.get(pid, frozenset())
    attribution: dict[int, str] = {}
    removed: dict[str, Fraction] = {}
    for i in sorted(candidate.voters):
        if i in current or pi <= cap - loads.load[i]:
            continue
        q = loads.top[i]
        if q is None:
            raise InternalInvariantViolation(f"voter {i} cannot afford {pid} and pays for nothing")
        attribution[i] = q
        if q not in removed:
            removed[q] = price(q, solution, election)
    sup = {q: v for q, v in solution.supporters.items() if q not in removed}
    sup[pid] = candidate.voters
    after = EqualSharesSolution(sup)
    new_loads = voter_loads(after, election).load
    for i, x in enumerate(new_loads):
        if x > cap:
            raise InternalInvariantViolation(f"voter {i} overspends after adding {pid}: {x} > {cap}")
    step = UpdateStep(
        pid,
        candidate.t,
        pi,
        candidate.voters,
        tuple(sorted(removed.items(), key=lambda e: election.rank[e[0]])),
        attribution,
    )
    return after, step


def apply_update(
    solution: EqualSharesSolution, candidate: GreedyCandidate, election: Election
) -> tuple[EqualSharesSolution, UpdateStep]:
    """Add ``candidate.project`` with its new supporters, removing for each new
    contributor who cannot pay from her slack her priciest project (the one
    of lowest priority if several are equally priced)."""
    return _apply(solution, candidate, election, voter_loads(solution, election))


def ames(
    election: Election,
    start: EqualSharesSolution | None = None,
    *,
    lexicographic: bool = False,
    max_steps: int | None = None,
) -> tuple[EqualSharesSolution, UpdateTrace]:
    """Run greedy update steps from ``start`` (default: the empty solution)
    until no step exists.

    Returns the stable solution and the trace of steps taken.  With
    ``lexicographic=True`` this is the tie-consistent variant, whose output
    does not depend on the starting solution.
    """
    current = EqualSharesSolution.empty() if start is None else start
    check_solution(current, election)
    begin = current
    steps: list[UpdateStep] = []
    while max_steps is None or len(steps) < max_steps:
        loads = voter_loads(current, election)
        caps = capacities_from_loads(loads, election)
        candidate = _find(current, election, loads, caps, lexicographic)
        if candidate is None:
            break
        current, step = _apply(current, candidate, election, loads)
        steps.append(step)
    return current, UpdateTrace(begin, tuple(steps), current)


def ames_tie_consistent(
    election: Election, start: EqualSharesSolution | None = None, *, max_steps: int | None = None
) -> tuple[EqualSharesSolution, UpdateTrace]:
    return ames(election, start, lexicographic=True, max_steps=max_steps)


def improved_projects(before: EqualSharesSolution, after: EqualSharesSolution, election: Election) -> set[str]:
    """Projects whose per-voter price went down from ``before`` to ``after``."""
    return {p.id for p in election.projects if price(p.id, after, election) < price(p.id, before, election)}


def changed_projects(before: EqualSharesSolution, after: EqualSharesSolution, election: Election) -> set[str]:
    """Projects whose per-voter price differs between the two solutions."""
    return {p.id for p in election.projects if price(p.id, after, election) != price(p.id, before, election)}


