"""Method of Equal Shares for approval utilities (baseline)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .core import Election
from .solution import INF, LoadDistribution


def _rho(cost: Fraction, remaining: Sequence[Fraction]):
    """Smallest rho with ``sum(min(rho, r) for r in remaining) == cost``.

    Walks the remaining budgets in ascending order; on each segment the set
    of capped voters is fixed and the equation is linear in rho.
    """
    budgets = sorted(r for r in remaining if r > 0)
    if sum(budgets, Fraction(0)) < cost:
        return INF
    capped = Fraction(0)
    k = len(budgets)
    for j, r in enumerate(budgets):
        rho = (cost - capped) / (k - j)
        if rho <= r:
            return rho
        capped += r
    raise AssertionError("unreachable: total budget covers the cost")


def rho(project_id: str, loads: LoadDistribution, election: Election):
    """Per-voter share MES would charge for ``project_id`` given ``loads``;
    :data:`INF` if its approvers cannot afford it together."""
    spent = loads.loads(election.n)
    cap = election.per_voter_budget
    return _rho(election.cost[project_id], [cap - spent[i] for i in election.approvers[project_id]])


def mes(election: Election) -> tuple[frozenset[str], LoadDistribution]:
    """Select projects one by one by smallest ``rho``, ties by priority.

    Each approver pays ``min(rho, remaining budget)``.  Stops once no
    remaining project is affordable, which may leave budget unspent.
    """
    cap = election.per_voter_budget
    remaining = [cap] * election.n
    payments: dict[tuple[int, str], Fraction] = {}
    selected: list[str] = []
    left = [p for p in election.projects]
    while left:
        best = None
        best_rho = INF
        for p in left:
            r = _rho(p.cost, [remaining[i] for i in election.approvers[p.id]])
            if r < best_rho:
                best, best_rho = p, r
        if best is None:
            break
        for i in election.approvers[best.id]:
            pay = min(best_rho, remaining[i])
            if pay > 0:
                payments[(i, best.id)] = pay
                remaining[i] -= pay
        selected.append(best.id)
        left.remove(best)
    W = frozenset(selected)
    return W, LoadDistribution(payments, W)
