"""Slow reference implementations written straight from the definitions.

Nothing here calls into the package beyond reading election fields, so the
tests compare two independent routes.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations


def eps_oracle(election) -> Fraction:
    values = sorted({p.cost / t for p in election.projects for t in range(1, election.n + 1)})
    if len(values) == 1:
        return values[0]
    return min(b - a for a, b in zip(values, values[1:]))


def payments(solution, election) -> dict[tuple[int, str], Fraction]:
    out = {}
    for pid, payers in solution.supporters.items():
        for i in payers:
            out[i, pid] = election.cost[pid] / len(payers)
    return out


def caps_oracle(solution, election, budget=None, lexicographic_for=None) -> list[Fraction]:
    """kappa_i = max(max_p x_ip - eps, b/n - X_i); with ``lexicographic_for``
    set to a project id, also allow full withdrawal from lower-priority projects."""
    b = election.budget if budget is None else budget
    x = payments(solution, election)
    eps = eps_oracle(election)
    out = []
    for i in range(election.n):
        mine = [v for (j, _), v in x.items() if j == i]
        slack = b / election.n - sum(mine, Fraction(0))
        k = max(max(mine) - eps, slack) if mine else slack
        if lexicographic_for is not None:
            r = election.rank[lexicographic_for]
            lower = [v for (j, q), v in x.items() if j == i and election.rank[q] > r]
            if lower:
                k = max(k, max(lower))
        out.append(k)
    return out


def unstable_oracle(solution, election, budget=None, lexicographic=False, projects=None) -> bool:
    for p in election.projects:
        if projects is not None and p.id not in projects:
            continue
        caps = caps_oracle(solution, election, budget, p.id if lexicographic else None)
        appr = [i for i in range(election.n) if p.id in election.ballots[i]]
        current = len(solution.supporters.get(p.id, ()))
        for t in range(current + 1, len(appr) + 1):
            if sum(1 for i in appr if caps[i] >= p.cost / t) >= t:
                return True
    return False


def next_unstable_oracle(solution, election, lexicographic=False):
    """Re-check stability at every budget where some slack crosses some cost/t."""
    loads = [Fraction(0)] * election.n
    for (i, _), v in payments(solution, election).items():
        loads[i] += v
    candidates = set()
    for p in election.projects:
        for t in range(1, election.n + 1):
            for i in range(election.n):
                c = election.n * (loads[i] + p.cost / t)
                if c > election.budget:
                    candidates.add(c)
    for c in sorted(candidates):
        if unstable_oracle(solution, election, c, lexicographic):
            return c
    return None


def ejr_oracle(election, outcome) -> bool:
    """True iff ``outcome`` provides EJR, by enumerating every voter group."""
    W = set(outcome)
    n, b = election.n, election.budget
    for size in range(1, n + 1):
        for S in combinations(range(n), size):
            common = set.intersection(*(set(election.ballots[i]) for i in S))
            best = max(len(election.ballots[i] & W) for i in S)
            for k in range(best + 1, len(common) + 1):
                for T in combinations(sorted(common), k):
                    if size * b >= n * sum(election.cost[q] for q in T):
                        return False
    return True
