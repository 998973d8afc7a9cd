"""Stability predicates, the sorting verifier and certificate checking.

A solution is *unstable* if some project ``p`` and some ``t > |N_p|`` admit
``t`` approvers of ``p`` whose capacity is at least ``cost(p)/t``.  The
direct predicates here (:func:`is_stable`, :func:`is_weakly_stable`,
:func:`is_lex_stable`) count approvers for every candidate ``t``; the fast
path (:func:`verify`, :func:`verify_certificate`) scans capacity-sorted
approver lists instead.  The two routes are kept separate on purpose.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .core import Election
from .solution import (
    EqualSharesSolution,
    MalformedSolution,
    capacities_from_loads,
    check_solution,
    voter_loads,
)


@dataclass(frozen=True)
class InstabilityWitness:
    project: str
    t: int
    voters: frozenset[int]

    def price(self, election: Election) -> Fraction:
        return election.cost[self.project] / self.t


@dataclass(frozen=True)
class StabilityCertificate:
    projects_selected: tuple[str, ...]
    supporters: Mapping[str, tuple[int, ...]]
    capacities: tuple[tuple[int, Fraction], ...]  # non-increasing in capacity
    epsilon: Fraction

    @property
    def solution(self) -> EqualSharesSolution:
        return EqualSharesSolution({p: self.supporters.get(p, ()) for p in self.projects_selected})

    def to_json(self) -> str:
        doc = {
            "projects_selected": list(self.projects_selected),
            "supporters": {p: sorted(v) for p, v in self.supporters.items()},
            "capacities": [[i, k.numerator, k.denominator] for i, k in self.capacities],
            "epsilon": [self.epsilon.numerator, self.epsilon.denominator],
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "StabilityCertificate":
        doc = json.loads(text)
        try:
            caps = tuple((int(i), Fraction(int(a), int(b))) for i, a, b in doc["capacities"])
            num, den = doc["epsilon"]
            return cls(
                tuple(str(p) for p in doc["projects_selected"]),
                {str(p): tuple(int(i) for i in v) for p, v in doc["supporters"].items()},
                caps,
                Fraction(int(num), int(den)),
            )
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise MalformedSolution("BadCertificateEncoding", str(exc)) from exc


@dataclass(frozen=True)
class VerificationResult:
    stable: bool
    witness: InstabilityWitness | None
    certificate: StabilityCertificate


@dataclass(frozen=True)
class CertificateVerdict:
    accepted: bool
    reason: str | None = None  # BadCapacity, NotSorted, Unstable, MalformedSolution, BadEpsilon
    voter: int | None = None
    position: int | None = None
    witness: InstabilityWitness | None = None
    detail: str = ""

    def __bool__(self):
        return self.accepted


def alpha(cost: Fraction, sorted_caps: Sequence[Fraction]) -> int | None:
    """Largest ``t`` whose ``t``-th largest capacity is at least ``cost/t``.

    ``sorted_caps`` are the capacities of a project's approvers, sorted
    non-increasingly.  Returns ``None`` when no positive ``t`` qualifies.
    """
    for t in range(len(sorted_caps), 0, -1):
        if sorted_caps[t - 1] * t >= cost:
            return t
    return None


def _grouped(order: Iterable[int], caps: Sequence[Fraction], election: Election):
    """Per-project approver lists (voter, capacity), following ``order``."""
    lists: dict[str, list[tuple[int, Fraction]]] = {p.id: [] for p in election.projects}
    ballots = election.ballots
    for i in order:
        k = caps[i]
        for pid in ballots[i]:
            lists[pid].append((i, k))
    return lists


def _best_witness(solution: EqualSharesSolution, election: Election, lists) -> InstabilityWitness | None:
    best = None
    best_price = None
    for p in election.projects:
        entries = lists[p.id]
        t = alpha(p.cost, [k for _, k in entries])
        if t is None or t <= len(solution.supporters.get(p.id, ())):
            continue
        pr = p.cost / t
        if best is None or pr < best_price:
            best_price = pr
            best = InstabilityWitness(p.id, t, frozenset(i for i, _ in entries[:t]))
    return best


def verify(solution: EqualSharesSolution, election: Election) -> VerificationResult:
    """Decide stability in ``O(n log n + mn)`` and emit a certificate.

    Raises :class:`MalformedSolution` if the input is not a priceable
    equal-shares solution.
    """
    check_solution(solution, election)
    caps = capacities_from_loads(voter_loads(solution, election), election)
    order = sorted(range(election.n), key=caps.__getitem__, reverse=True)
    witness = _best_witness(solution, election, _grouped(order, caps, election))
    selected = tuple(p.id for p in election.projects if p.id in solution)
    cert = StabilityCertificate(
        selected,
        {p: tuple(sorted(solution.supporters[p])) for p in selected},
        tuple((i, caps[i]) for i in order),
        election.epsilon,
    )
    return VerificationResult(witness is None, witness, cert)


def verify_certificate(cert: StabilityCertificate, election: Election) -> CertificateVerdict:
    """Check an untrusted certificate in time linear in the election size.

    No sorting happens here: the capacity list is recomputed entry by entry
    and checked to be non-increasing.  ``epsilon`` is compared against the
    election's own value, which is cached per election.
    """
    if len(set(cert.projects_selected)) != len(cert.projects_selected) or set(cert.supporters) != set(
        cert.projects_selected
    ):
        return CertificateVerdict(False, "MalformedSolution", detail="supporters do not match selection")
    solution = cert.solution
    try:
        check_solution(solution, election)
    except MalformedSolution as exc:
        return CertificateVerdict(False, "MalformedSolution", detail=str(exc))
    if cert.epsilon != election.epsilon:
        return CertificateVerdict(False, "BadEpsilon", detail=f"expected {election.epsilon}")
    n = election.n
    if len(cert.capacities) != n:
        return CertificateVerdict(False, "MalformedSolution", detail="capacity list must cover every voter once")
    seen = [False] * n
    for pos, (i, _) in enumerate(cert.capacities):
        if not 0 <= i < n or seen[i]:
            return CertificateVerdict(False, "MalformedSolution", position=pos,
                                      detail="capacity list must cover every voter once")
        seen[i] = True
    actual = capacities_from_loads(voter_loads(solution, election), election)
    for pos, (i, k) in enumerate(cert.capacities):
        if actual[i] != k:
            return CertificateVerdict(False, "BadCapacity", voter=i, position=pos,
                                      detail=f"claimed {k}, actual {actual[i]}")
    for pos in range(1, n):
        if cert.capacities[pos - 1][1] < cert.capacities[pos][1]:
            return CertificateVerdict(False, "NotSorted", position=pos)
    order = [i for i, _ in cert.capacities]
    witness = _best_witness(solution, election, _grouped(order, actual, election))
    if witness is not None:
        return CertificateVerdict(False, "Unstable", witness=witness)
    return CertificateVerdict(True)


def _count_witness(
    solution: EqualSharesSolution,
    election: Election,
    cap_of,
    projects,
) -> InstabilityWitness | None:
    """Direct check of the instability condition by counting, for each project
    and each admissible ``t``, the approvers with enough capacity."""
    best = None
    best_price = None
    for p in projects:
        approvers = election.approvers[p.id]
        current = len(solution.supporters.get(p.id, ()))
        for t in range(len(approvers), current, -1):
            need = p.cost / t
            able = [i for i in approvers if cap_of(i, p.id) >= need]
            if len(able) >= t:
                if best is None or need < best_price:
                    best, best_price = InstabilityWitness(p.id, t, frozenset(able)), need
                break
    return best


def instability_witness(solution: EqualSharesSolution, election: Election) -> InstabilityWitness | None:
    """Minimum-price witness of instability (ties by priority, then largest t)."""
    caps = capacities_from_loads(voter_loads(solution, election), election)
    return _count_witness(solution, election, lambda i, _: caps[i], election.projects)


def is_stable(solution: EqualSharesSolution, election: Election) -> bool:
    return instability_witness(solution, election) is None


def is_weakly_stable(solution: EqualSharesSolution, election: Election) -> bool:
    """No project outside the outcome admits a witness of instability."""
    caps = capacities_from_loads(voter_loads(solution, election), election)
    outside = [p for p in election.projects if p.id not in solution]
    return _count_witness(solution, election, lambda i, _: caps[i], outside) is None


def project_capacity(voter: int, project_id: str, solution: EqualSharesSolution, election: Election,
                     caps: Sequence[Fraction] | None = None) -> Fraction:
    """``max(kappa_i, max{x_{i,q} : q in W, q has lower priority than p})``."""
    if caps is None:
        caps = capacities_from_loads(voter_loads(solution, election), election)
    rank = election.rank[project_id]
    best = caps[voter]
    for q, payers in solution.supporters.items():
        if voter in payers and election.rank[q] > rank:
            best = max(best, election.cost[q] / len(payers))
    return best


def lex_instability_witness(solution: EqualSharesSolution, election: Election) -> InstabilityWitness | None:
    caps = capacities_from_loads(voter_loads(solution, election), election)

    def cap_of(i, pid):
        return project_capacity(i, pid, solution, election, caps)

    return _count_witness(solution, election, cap_of, election.projects)


def is_lex_stable(solution: EqualSharesSolution, election: Election) -> bool:
    """Stability under project-dependent capacities."""
    return lex_instability_witness(solution, election) is None
