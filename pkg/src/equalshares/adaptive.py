"""Budget-increase drivers: budget skipping and the completion procedure."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .ames import ames
from .core import Election, is_exhaustive, to_rational
from .mes import mes
from .solution import EqualSharesSolution, LoadDistribution, voter_loads


class NotStable(ValueError):
    """The solution is already unstable at the current budget."""


STRATEGIES = ("restart-mes", "adaptive-ames", "skip-ames")


class _KthMarked:
    """Fenwick tree over positions 0..size-1 supporting 'k-th marked position'."""

    def __init__(self, size: int):
        self.size = size
        self.tree = [0] * (size + 1)
        self.log = 1 << max(size.bit_length() - 1, 0)

    def add(self, pos: int, delta: int) -> None:
        pos += 1
        while pos <= self.size:
            self.tree[pos] += delta
            pos += pos & -pos

    def kth(self, k: int) -> int:
        pos = 0
        step = self.log
        while step:
            nxt = pos + step
            if nxt <= self.size and self.tree[nxt] < k:
                pos = nxt
                k -= self.tree[nxt]
            step >>= 1
        return pos


def _base_capacities(solution, election, loads, pid, lexicographic):
    """Budget-independent part of each approver's capacity for ``pid``."""
    eps = election.epsilon
    rank = election.rank
    out = []
    for i in election.approvers[pid]:
        z = loads.max_payment[i]
        if z is None:
            out.append(None)
            continue
        base = z - eps
        if lexicographic:
            r = rank[pid]
            for q in loads.paid[i]:
                if rank[q] > r:
                    x = election.cost[q] / len(solution.supporters[q])
                    if x > base:
                        base = x
        out.append(base)
    return out


def min_topup(solution: EqualSharesSolution, election: Election, lexicographic: bool = False):
    """Smallest per-voter budget increase making the solution (lexicographically)
    unstable, or ``None`` if no increase ever does.

    For a project ``p`` and ``t`` beyond its current supporter count, an
    approver needs no top-up if her budget-independent capacity already
    reaches ``cost(p)/t``, and otherwise ``max(0, cost(p)/t - slack_i)``.
    The ``t``-th smallest need is the top-up that unlocks ``(p, t)``.
    """
    loads = voter_loads(solution, election)
    cap = election.per_voter_budget
    best = None
    for p in election.projects:
        approvers = election.approvers[p.id]
        a = len(approvers)
        current = len(solution.supporters.get(p.id, ()))
        if a <= current:
            continue
        base = _base_capacities(solution, election, loads, p.id, lexicographic)
        slack = [cap - loads.load[i] for i in approvers]
        by_base = sorted((j for j in range(a) if base[j] is not None), key=base.__getitem__, reverse=True)
        by_slack = sorted(range(a), key=slack.__getitem__, reverse=True)
        where = {j: pos for pos, j in enumerate(by_slack)}
        tree = _KthMarked(a)
        for pos in range(a):
            tree.add(pos, 1)
        free = 0  # approvers whose base capacity alone suffices
        ptr = 0
        for t in range(current + 1, a + 1):
            need = p.cost / t
            while ptr < len(by_base) and base[by_base[ptr]] >= need:
                tree.add(where[by_base[ptr]], -1)
                free += 1
                ptr += 1
            if free >= t:
                z = Fraction(0)
            else:
                j = by_slack[tree.kth(t - free)]
                z = max(Fraction(0), need - slack[j])
            if best is None or z < best:
                best = z
    return best


def next_unstable_budget(solution: EqualSharesSolution, election: Election, lexicographic: bool = False):
    """Smallest total budget ``b' > b`` at which ``solution`` stops being stable.

    Returns ``None`` when no budget increase can make it unstable.  Raises
    :class:`NotStable` if it is unstable already at the current budget.
    """
    z = min_topup(solution, election, lexicographic)
    if z is None:
        return None
    if z == 0:
        raise NotStable("solution is unstable at the current budget")
    return election.budget + election.n * z


@dataclass(frozen=True)
class Iteration:
    virtual_budget: Fraction
    steps_performed: int
    outcome_cost: Fraction
    projects: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "virtual_budget": str(self.virtual_budget),
            "steps_performed": self.steps_performed,
            "outcome_cost": str(self.outcome_cost),
            "projects": list(self.projects),
        }


@dataclass(frozen=True)
class CompletionResult:
    strategy: str
    real_budget: Fraction
    virtual_budget: Fraction
    outcome: frozenset[str]
    solution: EqualSharesSolution | LoadDistribution
    exhaustive: bool
    per_voter_virtual_budget: Fraction
    iterations: tuple[Iteration, ...] = field(default=())

    def to_json(self) -> str:
        return json.dumps(
            {
                "real_budget": str(self.real_budget),
                "virtual_budget": str(self.virtual_budget),
                "per_voter_virtual_budget": str(self.per_voter_virtual_budget),
                "strategy": self.strategy,
                "exhaustive": self.exhaustive,
                "iterations": [it.to_dict() for it in self.iterations],
                "final_outcome": sorted(self.outcome),
            },
            indent=2,
        )


def complete(
    election: Election,
    strategy: str = "adaptive-ames",
    step=1,
    *,
    start_budget=None,
    max_iterations: int | None = None,
) -> CompletionResult:
    """Raise a virtual budget until the outcome exhausts the real budget.

    Virtual budgets live on the grid ``start + k * n * step`` (``step`` is per
    voter).  The loop stops at the first exhaustive outcome, or returns the
    last outcome before one whose cost exceeds the real budget.
    ``virtual_budget`` in the result is the total virtual budget reached.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")
    delta = to_rational(step)
    if delta <= 0:
        raise ValueError("step must be positive")
    real = election.budget
    base = real if start_budget is None else to_rational(start_budget)
    if base > real:
        raise ValueError("start budget must not exceed the real budget")
    unit = election.n * delta
    iterations: list[Iteration] = []

    def solve(k, previous):
        e = election.with_budget(base + k * unit)
        if strategy == "restart-mes":
            W, loads = mes(e)
            return W, loads, 0
        sol, trace = ames(e, previous, lexicographic=previous is not None)
        return sol.outcome, sol, len(trace)

    def finish(k, W, sol):
        virtual = base + k * unit
        return CompletionResult(
            strategy, real, virtual, W, sol, is_exhaustive(W, election), virtual / election.n, tuple(iterations)
        )

    k = 0
    W, sol, steps = solve(0, None)
    iterations.append(Iteration(base, steps, election.total_cost(W), tuple(sorted(W))))
    if election.total_cost(W) > real:
        raise ValueError("outcome at the start budget already exceeds the real budget")
    while True:
        if is_exhaustive(W, election):
            return finish(k, W, sol)
        if max_iterations is not None and len(iterations) >= max_iterations:
            raise RuntimeError(f"no exhaustive outcome within {max_iterations} iterations")
        nxt = k + 1
        if strategy == "skip-ames":
            target = next_unstable_budget(sol, election.with_budget(base + k * unit), lexicographic=True)
            if target is None:
                return finish(k, W, sol)
            nxt = max(nxt, math.ceil((target - base) / unit))
        W2, sol2, steps = solve(nxt, sol if strategy != "restart-mes" else None)
        cost = election.total_cost(W2)
        iterations.append(Iteration(base + nxt * unit, steps, cost, tuple(sorted(W2))))
        if cost > real:
            # grid points skipped over all carry the current solution
            return finish(nxt - 1, W, sol)
        k, W, sol = nxt, W2, sol2
