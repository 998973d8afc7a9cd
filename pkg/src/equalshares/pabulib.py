"""Reading and writing Pabulib ``.pb`` files (approval ballots only)."""

from __future__ import annotations

import csv
import io
from fractions import Fraction
from pathlib import Path

from .core import Election, Project, to_rational, validate

SECTIONS = ("META", "PROJECTS", "VOTES")


class PabulibError(ValueError):
    pass


class MissingSection(PabulibError):
    pass


class UnsupportedVoteType(PabulibError):
    pass


class MalformedRow(PabulibError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DuplicateId(PabulibError):
    pass


def _rows(text: str):
    reader = csv.reader(io.StringIO(text), delimiter=";")
    for row in reader:
        yield reader.line_num, [cell.strip() for cell in row]


def parse_pabulib(text: str, *, drop_unapproved: bool = False) -> Election:
    """Parse a Pabulib approval election.

    Project priority follows file order.  Columns other than the ones the
    model needs are kept, uninterpreted, in ``election.metadata``.  With
    ``drop_unapproved`` projects nobody approves are discarded instead of
    rejected.
    """
    sections: dict[str, list[tuple[int, list[str]]]] = {}
    current = None
    for line, row in _rows(text.lstrip("﻿")):
        if not row or all(not c for c in row):
            continue
        if len(row) == 1 and row[0].upper() in SECTIONS:
            current = row[0].upper()
            if current in sections:
                raise MalformedRow(line, f"section {current} repeated")
            sections[current] = []
            continue
        if current is None:
            raise MalformedRow(line, "data before the first section keyword")
        sections[current].append((line, row))
    for name in SECTIONS:
        if name not in sections:
            raise MissingSection(f"missing section {name}")
        if not sections[name]:
            raise MissingSection(f"section {name} has no header row")

    meta: dict[str, str] = {}
    for line, row in sections["META"][1:]:
        if len(row) < 2:
            raise MalformedRow(line, "META rows need a key and a value")
        meta[row[0]] = ";".join(row[1:])
    vote_type = meta.get("vote_type")
    if vote_type is None:
        raise PabulibError("META lacks vote_type")
    if vote_type.lower() != "approval":
        raise UnsupportedVoteType(f"vote_type {vote_type!r} is not supported")
    if "budget" not in meta:
        raise PabulibError("META lacks budget")
    try:
        budget = to_rational(meta["budget"].replace(",", "."))
    except (ValueError, ZeroDivisionError) as exc:
        raise PabulibError(f"bad budget {meta['budget']!r}") from exc

    header_line, header = sections["PROJECTS"][0]
    if "project_id" not in header or "cost" not in header:
        raise MalformedRow(header_line, "PROJECTS header needs project_id and cost")
    pid_col, cost_col = header.index("project_id"), header.index("cost")
    costs: dict[str, Fraction] = {}
    extra_projects: dict[str, dict[str, str]] = {}
    for line, row in sections["PROJECTS"][1:]:
        if len(row) != len(header):
            raise MalformedRow(line, f"expected {len(header)} fields, got {len(row)}")
        pid = row[pid_col]
        if pid in costs:
            raise DuplicateId(f"project {pid!r} listed twice")
        try:
            costs[pid] = to_rational(row[cost_col].replace(",", "."))
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedRow(line, f"bad cost {row[cost_col]!r}") from exc
        extra_projects[pid] = {k: v for k, v in zip(header, row) if k not in ("project_id", "cost")}

    header_line, header = sections["VOTES"][0]
    if "voter_id" not in header or "vote" not in header:
        raise MalformedRow(header_line, "VOTES header needs voter_id and vote")
    vid_col, vote_col = header.index("voter_id"), header.index("vote")
    voter_ids: list[str] = []
    seen: set[str] = set()
    ballots: list[frozenset[str]] = []
    for line, row in sections["VOTES"][1:]:
        if len(row) != len(header):
            raise MalformedRow(line, f"expected {len(header)} fields, got {len(row)}")
        vid = row[vid_col]
        if vid in seen:
            raise DuplicateId(f"voter {vid!r} listed twice")
        seen.add(vid)
        voter_ids.append(vid)
        ballots.append(frozenset(x.strip() for x in row[vote_col].split(",") if x.strip()))

    if drop_unapproved:
        approved = set().union(*ballots) if ballots else set()
        costs = {pid: c for pid, c in costs.items() if pid in approved}
    projects = tuple(Project(pid, c, r) for r, (pid, c) in enumerate(costs.items(), start=1))
    election = Election(
        projects,
        tuple(ballots),
        budget,
        {"meta": meta, "voter_ids": voter_ids, "projects": extra_projects},
    )
    validate(election)
    return election


def read_pabulib(path: str | Path, **kwargs) -> Election:
    return parse_pabulib(Path(path).read_text(encoding="utf-8"), **kwargs)


def _fmt(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    # exact decimal when the denominator has only factors 2 and 5
    d, twos, fives = x.denominator, 0, 0
    while d % 2 == 0:
        d, twos = d // 2, twos + 1
    while d % 5 == 0:
        d, fives = d // 5, fives + 1
    if d != 1:
        raise ValueError(f"{x} has no finite decimal expansion")
    digits = max(twos, fives)
    scaled = x * 10**digits
    sign = "-" if scaled < 0 else ""
    s = str(abs(scaled.numerator)).rjust(digits + 1, "0")
    return f"{sign}{s[:-digits]}.{s[-digits:]}".rstrip("0").rstrip(".")


def dump_pabulib(election: Election) -> str:
    """Serialize an election back to the Pabulib text format."""
    meta = dict(election.metadata.get("meta", {}))
    meta["budget"] = _fmt(election.budget)
    meta["vote_type"] = "approval"
    meta["num_projects"] = str(election.m)
    meta["num_votes"] = str(election.n)
    voter_ids = election.metadata.get("voter_ids") or [str(i + 1) for i in range(election.n)]
    out = io.StringIO()
    w = csv.writer(out, delimiter=";", lineterminator="\n")
    w.writerow(["META"])
    w.writerow(["key", "value"])
    for k, v in meta.items():
        w.writerow([k, v])
    extra = election.metadata.get("projects", {})
    columns = list(dict.fromkeys(k for p in election.projects for k in extra.get(p.id, {})))
    w.writerow(["PROJECTS"])
    w.writerow(["project_id", "cost", *columns])
    for p in election.projects:
        fields = extra.get(p.id, {})
        w.writerow([p.id, _fmt(p.cost), *(fields.get(k, "") for k in columns)])
    w.writerow(["VOTES"])
    w.writerow(["voter_id", "vote"])
    order = {p.id: p.priority for p in election.projects}
    for vid, ballot in zip(voter_ids, election.ballots):
        w.writerow([vid, ",".join(sorted(ballot, key=order.__getitem__))])
    return out.getvalue()


def read_tie_order(path: str | Path) -> list[str]:
    """One project id per line, highest priority first."""
    return [line.strip() for line in Path(path).read_text(encoding="utf-8").splitlines() if line.strip()]
