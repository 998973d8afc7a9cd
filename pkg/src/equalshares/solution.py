"""Equal-shares solutions, general load distributions, prices and capacities."""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping

from .core import Election


@functools.total_ordering
class _Infinity:
    """Price of an unselected project; compares above every rational."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __hash__(self):
        return hash("equalshares.INF")

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


class MalformedSolution(ValueError):
    """A solution violates one of its structural invariants."""

    def __init__(self, invariant: str, detail: str = ""):
        super().__init__(f"{invariant}: {detail}" if detail else invariant)
        self.invariant = invariant
        self.detail = detail


class EqualSharesSolution:
    """An outcome ``W`` together with the voters paying for each project.

    Each supporter of ``p`` pays exactly ``cost(p) / |supporters(p)|``, so
    payments are never stored.  Instances are treated as immutable values.
    """

    __slots__ = ("_supporters",)

    def __init__(self, supporters: Mapping[str, Iterable[int]] | None = None):
        self._supporters = {str(p): frozenset(v) for p, v in dict(supporters or {}).items()}

    @classmethod
    def empty(cls) -> "EqualSharesSolution":
        return cls()

    @property
    def supporters(self) -> Mapping[str, frozenset[int]]:
        return MappingProxyType(self._supporters)

    @property
    def outcome(self) -> frozenset[str]:
        return frozenset(self._supporters)

    W = outcome

    def __contains__(self, project_id) -> bool:
        return project_id in self._supporters

    def __eq__(self, other):
        if not isinstance(other, EqualSharesSolution):
            return NotImplemented
        return self._supporters == other._supporters

    def __hash__(self):
        return hash(frozenset(self._supporters.items()))

    def __repr__(self):
        body = ", ".join(f"{p}: {sorted(v)}" for p, v in sorted(self._supporters.items()))
        return f"EqualSharesSolution({{{body}}})"

    def payment(self, voter: int, project_id: str, election: Election) -> Fraction:
        payers = self._supporters.get(project_id)
        if not payers or voter not in payers:
            return Fraction(0)
        return election.cost[project_id] / len(payers)

    def to_loads(self, election: Election) -> "LoadDistribution":
        return LoadDistribution.from_solution(self, election)


@dataclass(frozen=True)
class VoterLoads:
    """Per-voter aggregates of an equal-shares solution.

    ``top`` is, for each voter, the lowest-priority project among those on
    which she pays her maximum share (``None`` if she pays nothing).
    """

    load: list[Fraction]
    max_payment: list[Fraction | None]
    top: list[str | None]
    paid: list[list[str]] = field(repr=False)


def voter_loads(solution: EqualSharesSolution, election: Election) -> VoterLoads:
    n = election.n
    load = [Fraction(0)] * n
    zmax: list[Fraction | None] = [None] * n
    top: list[str | None] = [None] * n
    paid: list[list[str]] = [[] for _ in range(n)]
    rank = election.rank
    cost = election.cost
    for pid, payers in solution.supporters.items():
        share = cost[pid] / len(payers)
        for i in payers:
            load[i] += share
            paid[i].append(pid)
            z = zmax[i]
            if z is None or share > z or (share == z and rank[pid] > rank[top[i]]):
                zmax[i] = share
                top[i] = pid
    return VoterLoads(load, zmax, top, paid)


def check_solution(solution: EqualSharesSolution, election: Election) -> None:
    """Raise :class:`MalformedSolution` unless ``solution`` is a priceable
    equal-shares solution for ``election``."""
    known = election.cost
    for pid, payers in solution.supporters.items():
        if pid not in known:
            raise MalformedSolution("UnknownProject", pid)
        if not payers:
            raise MalformedSolution("EmptySupporters", pid)
        for i in payers:
            if not isinstance(i, int) or not 0 <= i < election.n:
                raise MalformedSolution("UnknownVoter", f"{i!r} for {pid}")
            if pid not in election.ballots[i]:
                raise MalformedSolution("SupporterDoesNotApprove", f"voter {i} for {pid}")
    loads = voter_loads(solution, election).load
    cap = election.per_voter_budget
    for i, x in enumerate(loads):
        if x > cap:
            raise MalformedSolution("NotPriceable", f"voter {i} pays {x} > {cap}")


def price(project_id: str, solution: EqualSharesSolution, election: Election):
    """Per-voter price of a project, or :data:`INF` if it is not selected."""
    payers = solution.supporters.get(project_id)
    if not payers:
        return INF
    return election.cost[project_id] / len(payers)


def total_load(voter: int, solution: EqualSharesSolution, election: Election) -> Fraction:
    cost = election.cost
    return sum(
        (cost[p] / len(v) for p, v in solution.supporters.items() if voter in v),
        Fraction(0),
    )


def capacities_from_loads(loads: VoterLoads, election: Election) -> list[Fraction]:
    eps = election.epsilon
    cap = election.per_voter_budget
    out = []
    for x, z in zip(loads.load, loads.max_payment):
        slack = cap - x
        out.append(slack if z is None else max(z - eps, slack))
    return out


def capacities(solution: EqualSharesSolution, election: Election) -> list[Fraction]:
    """``kappa_i = max(z_i - eps, b/n - X_i)`` for every voter ``i``."""
    return capacities_from_loads(voter_loads(solution, election), election)


def price_vector(solution: EqualSharesSolution, election: Election) -> list[tuple[str, object]]:
    """All projects with their prices, ascending, ties by priority rank."""
    entries = [(price(p.id, solution, election), p.priority, p.id) for p in election.projects]
    entries.sort(key=lambda e: (e[0], e[1]))
    return [(pid, pr) for pr, _, pid in entries]


class Comparison(enum.Enum):
    BETTER = "better"
    EQUAL = "equal"
    WORSE = "worse"


def lex_compare(a: EqualSharesSolution, b: EqualSharesSolution, election: Election) -> Comparison:
    """Compare sorted price vectors; a lexicographically smaller vector is better."""
    pa = [pr for _, pr in price_vector(a, election)]
    pb = [pr for _, pr in price_vector(b, election)]
    for x, y in zip(pa, pb):
        if x < y:
            return Comparison.BETTER
        if y < x:
            return Comparison.WORSE
    return Comparison.EQUAL


@dataclass(frozen=True)
class LoadDistribution:
    """Arbitrary sparse payments ``(voter, project) -> amount``.

    Zero entries are dropped.  ``outcome`` may list selected projects
    explicitly; by default it is the set of projects receiving payments.
    """

    payments: Mapping[tuple[int, str], Fraction]
    selected: frozenset[str] | None = None

    def __post_init__(self):
        clean = {(int(i), str(p)): Fraction(x) for (i, p), x in dict(self.payments).items() if x != 0}
        object.__setattr__(self, "payments", MappingProxyType(clean))
        if self.selected is not None:
            object.__setattr__(self, "selected", frozenset(self.selected))

    @property
    def outcome(self) -> frozenset[str]:
        if self.selected is not None:
            return self.selected
        return frozenset(p for _, p in self.payments)

    @classmethod
    def from_solution(cls, solution: EqualSharesSolution, election: Election) -> "LoadDistribution":
        pay = {}
        for pid, payers in solution.supporters.items():
            share = election.cost[pid] / len(payers)
            for i in payers:
                pay[(i, pid)] = share
        return cls(pay, solution.outcome)

    def load(self, voter: int) -> Fraction:
        return sum((x for (i, _), x in self.payments.items() if i == voter), Fraction(0))

    def loads(self, n: int) -> list[Fraction]:
        out = [Fraction(0)] * n
        for (i, _), x in self.payments.items():
            out[i] += x
        return out

    def check(self, election: Election) -> None:
        """Raise :class:`MalformedSolution` if the payments do not pay exactly
        for the outcome using approvers only (non-negative, capped by cost)."""
        W = self.outcome
        paid = {p: Fraction(0) for p in W}
        for (i, p), x in self.payments.items():
            if p not in W:
                raise MalformedSolution("PaymentOutsideOutcome", f"voter {i} pays for {p}")
            if not 0 <= i < election.n or p not in election.ballots[i]:
                raise MalformedSolution("PaymentWithoutApproval", f"voter {i} for {p}")
            if x < 0 or x > election.cost[p]:
                raise MalformedSolution("PaymentOutOfRange", f"voter {i} pays {x} for {p}")
            paid[p] += x
        for p, total in paid.items():
            if total != election.cost[p]:
                raise MalformedSolution("NotFullyPaid", f"{p} receives {total} of {election.cost[p]}")

    def is_priceable(self, election: Election) -> bool:
        cap = election.per_voter_budget
        return all(x <= cap for x in self.loads(election.n))

    def as_equal_shares(self) -> EqualSharesSolution | None:
        """The equivalent equal-shares solution, or ``None`` if some project's
        payers pay different amounts."""
        by_project: dict[str, dict[int, Fraction]] = {p: {} for p in self.outcome}
        for (i, p), x in self.payments.items():
            by_project[p][i] = x
        for shares in by_project.values():
            if len(set(shares.values())) > 1:
                return None
        return EqualSharesSolution({p: shares.keys() for p, shares in by_project.items()})
