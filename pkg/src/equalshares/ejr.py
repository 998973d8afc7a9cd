"""Brute-force Extended Justified Representation checks for small elections."""

from __future__ import annotations

import os
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator

from .core import Election

DEFAULT_MAX_PROJECTS = 16


class TooLarge(ValueError):
    def __init__(self, m: int, limit: int):
        super().__init__(f"{m} projects exceed the enumeration limit of {limit}")
        self.m = m
        self.limit = limit


@dataclass(frozen=True)
class EjrViolation:
    projects: tuple[str, ...]  # T
    group: frozenset[int]  # S
    max_utility: int

    @property
    def required(self) -> int:
        return len(self.projects)


def _limit(max_projects: int | None) -> int:
    if max_projects is not None:
        return max_projects
    return int(os.environ.get("AMES_MAX_ORACLE_PROJECTS", DEFAULT_MAX_PROJECTS))


def _subsets(election: Election) -> Iterator[tuple[str, ...]]:
    ids = [p.id for p in election.projects]  # priority order
    for size in range(1, len(ids) + 1):
        yield from combinations(ids, size)


def _common(election: Election, T: tuple[str, ...]) -> set[int]:
    voters = set(election.approvers[T[0]])
    for pid in T[1:]:
        voters.intersection_update(election.approvers[pid])
    return voters


def cohesive_groups(election: Election, max_projects: int | None = None) -> list[tuple[tuple[str, ...], frozenset[int]]]:
    """Every nonempty ``T`` whose full set of common approvers is ``T``-cohesive."""
    limit = _limit(max_projects)
    if election.m > limit:
        raise TooLarge(election.m, limit)
    out = []
    for T in _subsets(election):
        S = _common(election, T)
        if len(S) * election.budget >= election.n * election.total_cost(T):
            out.append((T, frozenset(S)))
    return out


def ejr_check(election: Election, outcome: Iterable[str], max_projects: int | None = None) -> EjrViolation | None:
    """First EJR violation of ``outcome`` (``T`` by size, then priority), or ``None``.

    For a fixed ``T`` it suffices to look at the approvers of ``T`` whose
    utility is below ``|T|``: any violating cohesive group is contained in
    that set, so it is cohesive itself whenever a violation exists.
    """
    limit = _limit(max_projects)
    if election.m > limit:
        raise TooLarge(election.m, limit)
    W = set(outcome)
    utility = [len(b & W) for b in election.ballots]
    for T in _subsets(election):
        unhappy = {i for i in _common(election, T) if utility[i] < len(T)}
        if unhappy and len(unhappy) * election.budget >= election.n * election.total_cost(T):
            return EjrViolation(T, frozenset(unhappy), max(utility[i] for i in unhappy))
    return None


def provides_ejr(election: Election, outcome: Iterable[str], max_projects: int | None = None) -> bool:
    return ejr_check(election, outcome, max_projects) is None
