"""Budget top-up experiment: how much does the outcome change per top-up?"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass
from fractions import Fraction

from .ames import ames, changed_projects
from .core import Election, to_rational


@dataclass(frozen=True)
class ExperimentRecord:
    run: int
    virtual_per_voter_budget: Fraction
    outcome_size: int
    change_metric: int
    millis: float
    steps: int


@dataclass(frozen=True)
class ExperimentResult:
    records: tuple[ExperimentRecord, ...]

    @property
    def mean_outcome_size(self) -> Fraction:
        return Fraction(sum(r.outcome_size for r in self.records), len(self.records))

    @property
    def mean_change(self) -> Fraction:
        return Fraction(sum(r.change_metric for r in self.records), len(self.records))

    def to_csv(self, timing: bool = True) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["run", "virtual_per_voter_budget", "outcome_size", "change_metric", "millis"])
        for r in self.records:
            w.writerow([
                r.run,
                decimal_str(r.virtual_per_voter_budget),
                r.outcome_size,
                r.change_metric,
                f"{r.millis:.1f}" if timing else "",
            ])
        total = sum(r.millis for r in self.records)
        w.writerow([
            "summary",
            "",
            decimal_str(self.mean_outcome_size),
            decimal_str(self.mean_change),
            f"{total:.1f}" if timing else "",
        ])
        return out.getvalue()


def decimal_str(x: Fraction, places: int = 6) -> str:
    """Exact rational rounded half-up to ``places`` decimals, trailing zeros trimmed."""
    sign = "-" if x < 0 else ""
    scaled = (abs(x) * 10**places * 2 + 1) // 2
    whole, frac = divmod(scaled, 10**places)
    text = f"{whole}.{frac:0{places}d}".rstrip("0").rstrip(".")
    return sign + text


def experiment_topup(election: Election, runs: int = 50, step=1) -> ExperimentResult:
    """Top up every voter's budget by ``step`` ``runs`` times.

    Run 0 is computed from scratch at the real budget; run ``i`` starts the
    tie-consistent method from run ``i-1``.  Each record holds the outcome
    size and the number of projects whose per-voter price changed.
    """
    step = to_rational(step)
    per_voter = election.per_voter_budget
    previous, _ = ames(election)
    records = []
    for i in range(1, runs + 1):
        budget = per_voter + i * step
        e = election.with_budget(budget * election.n)
        t0 = time.perf_counter()
        current, trace = ames(e, previous, lexicographic=True)
        millis = (time.perf_counter() - t0) * 1000
        records.append(
            ExperimentRecord(i, budget, len(current.outcome), len(changed_projects(previous, current, e)), millis,
                             len(trace))
        )
        previous = current
    return ExperimentResult(tuple(records))
