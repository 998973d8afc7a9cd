"""Election model for approval-based participatory budgeting.

All monetary quantities (costs, budgets, payments) are exact rationals
(:class:`fractions.Fraction`).  Floats are rejected at the boundary.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Iterable, Mapping, Sequence


class ElectionError(ValueError):
    """Base class for invalid election data."""


class UnapprovedProject(ElectionError):
    def __init__(self, project_id):
        super().__init__(f"project {project_id!r} is approved by no voter")
        self.project_id = project_id


class UnknownProjectInBallot(ElectionError):
    def __init__(self, voter, project_id):
        super().__init__(f"voter {voter} approves unknown project {project_id!r}")
        self.voter = voter
        self.project_id = project_id


class NonPositiveCost(ElectionError):
    def __init__(self, project_id):
        super().__init__(f"project {project_id!r} has non-positive cost")
        self.project_id = project_id


class InvalidElection(ElectionError):
    """Structural problems not covered by the specific errors above."""


def to_rational(value) -> Fraction:
    """Convert ints, rationals and decimal strings to an exact Fraction.

    >>> to_rational("12.50")
    Fraction(25, 2)
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not amounts")
    if isinstance(value, float):
        raise TypeError("floating point amounts are not accepted; pass a string or Fraction")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational amount")


@dataclass(frozen=True)
class Project:
    id: str
    cost: Fraction
    priority: int  # smaller rank wins ties


@dataclass(frozen=True, eq=False)
class Election:
    """An approval election ``(N, P, A, b, cost)``.

    Voters are the integers ``0..n-1``; ``ballots[i]`` is the set of project
    ids approved by voter ``i``.  ``projects`` is kept sorted by priority
    rank, so iterating over it visits projects in tie-breaking order.

    Construction does not validate; call :func:`validate` (parsers and
    :meth:`build` do this for you).
    """

    projects: tuple[Project, ...]
    ballots: tuple[frozenset[str], ...]
    budget: Fraction
    metadata: Mapping[str, object] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "projects", tuple(sorted(self.projects, key=lambda p: p.priority)))
        object.__setattr__(self, "ballots", tuple(frozenset(b) for b in self.ballots))
        object.__setattr__(self, "budget", to_rational(self.budget))

    @classmethod
    def build(
        cls,
        costs: Mapping[str, object] | Sequence[tuple[str, object]],
        ballots: Iterable[Iterable[str]],
        budget,
        priority: Sequence[str] | None = None,
        metadata: Mapping[str, object] | None = None,
    ) -> "Election":
        """Build and validate an election from plain data.

        ``costs`` maps project id to cost; its iteration order is the default
        priority order unless ``priority`` (a list of ids, highest priority
        first) is given.
        """
        items = list(costs.items()) if isinstance(costs, Mapping) else list(costs)
        order = list(priority) if priority is not None else [pid for pid, _ in items]
        if sorted(order) != sorted(pid for pid, _ in items):
            raise InvalidElection("priority order must list every project exactly once")
        rank = {pid: r for r, pid in enumerate(order, start=1)}
        projects = tuple(Project(str(pid), to_rational(c), rank[pid]) for pid, c in items)
        election = cls(projects, tuple(frozenset(map(str, b)) for b in ballots), to_rational(budget),
                       dict(metadata or {}))
        validate(election)
        return election

    @property
    def n(self) -> int:
        return len(self.ballots)

    @property
    def m(self) -> int:
        return len(self.projects)

    @property
    def per_voter_budget(self) -> Fraction:
        return self.budget / self.n

    @cached_property
    def project(self) -> dict[str, Project]:
        return {p.id: p for p in self.projects}

    @cached_property
    def cost(self) -> dict[str, Fraction]:
        return {p.id: p.cost for p in self.projects}

    @cached_property
    def rank(self) -> dict[str, int]:
        return {p.id: p.priority for p in self.projects}

    @cached_property
    def approvers(self) -> dict[str, tuple[int, ...]]:
        """Project id -> voters approving it, in increasing voter order."""
        out: dict[str, list[int]] = {p.id: [] for p in self.projects}
        for i, ballot in enumerate(self.ballots):
            for pid in ballot:
                if pid in out:
                    out[pid].append(i)
        return {pid: tuple(v) for pid, v in out.items()}

    @cached_property
    def epsilon(self) -> Fraction:
        return _epsilon(self)

    def total_cost(self, projects: Iterable[str]) -> Fraction:
        cost = self.cost
        return sum((cost[p] for p in projects), Fraction(0))

    def with_budget(self, budget) -> "Election":
        """Same election with another budget; budget-independent caches are shared."""
        other = dataclasses.replace(self, budget=to_rational(budget))
        for name in ("project", "cost", "rank", "approvers", "epsilon"):
            if name in self.__dict__:
                other.__dict__[name] = self.__dict__[name]
        return other

    def with_priority(self, order: Sequence[str]) -> "Election":
        """Same election with a new tie-breaking order (highest priority first)."""
        ids = [p.id for p in self.projects]
        if sorted(order) != sorted(ids):
            raise InvalidElection("priority order must list every project exactly once")
        rank = {pid: r for r, pid in enumerate(order, start=1)}
        projects = tuple(dataclasses.replace(p, priority=rank[p.id]) for p in self.projects)
        other = dataclasses.replace(self, projects=projects)
        if "epsilon" in self.__dict__:
            other.__dict__["epsilon"] = self.__dict__["epsilon"]
        return other

    def __repr__(self):
        return f"Election(n={self.n}, m={self.m}, budget={self.budget})"


def validate(election: Election) -> None:
    """Raise an :class:`ElectionError` unless the election is well formed."""
    if election.n < 1:
        raise InvalidElection("an election needs at least one voter")
    if election.budget <= 0:
        raise InvalidElection("budget must be positive")
    ids = [p.id for p in election.projects]
    if len(set(ids)) != len(ids):
        raise InvalidElection("duplicate project id")
    if sorted(p.priority for p in election.projects) != list(range(1, len(ids) + 1)):
        raise InvalidElection("project priorities must be a permutation of 1..m")
    for p in election.projects:
        if p.cost <= 0:
            raise NonPositiveCost(p.id)
    known = set(ids)
    for i, ballot in enumerate(election.ballots):
        for pid in sorted(ballot):
            if pid not in known:
                raise UnknownProjectInBallot(i, pid)
    for pid, voters in election.approvers.items():
        if not voters:
            raise UnapprovedProject(pid)


def _epsilon(election: Election) -> Fraction:
    # K = {cost(p)/i}; presorting by float keeps the exact sort nearly linear
    values = {p.cost / i for p in election.projects for i in range(1, election.n + 1)}
    ordered = sorted(sorted(values, key=float))
    if len(ordered) == 1:
        return ordered[0]
    return min(b - a for a, b in zip(ordered, ordered[1:]))


def epsilon(election: Election) -> Fraction:
    """Smallest positive gap between two values ``cost(p)/i``, ``i in 1..n``.

    Independent of the budget.  When every quotient coincides the single
    quotient itself is returned.
    """
    return election.epsilon


def is_feasible(outcome: Iterable[str], election: Election) -> bool:
    return election.total_cost(outcome) <= election.budget


def is_exhaustive(outcome: Iterable[str], election: Election) -> bool:
    """Feasible and no unselected project fits into the remaining budget."""
    chosen = set(outcome)
    spent = election.total_cost(chosen)
    if spent > election.budget:
        return False
    left = election.budget - spent
    return all(p.cost > left for p in election.projects if p.id not in chosen)
