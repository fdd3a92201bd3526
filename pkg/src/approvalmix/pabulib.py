"""Parser for the Pabulib participatory-budgeting ballot format.

A ``.pb`` file is UTF-8 text made of three sections, each introduced by a
line holding just its name::

    META
    key;value
    description;...
    PROJECTS
    project_id;cost;...
    2;50000;...
    VOTES
    voter_id;vote;...
    101;2,5,9;...

Every section starts with a semicolon-separated header row naming the
fields of its records. Only two fields carry meaning here: ``project_id``
in PROJECTS (the candidate roster, kept in file order) and ``vote`` in
VOTES (comma-separated project ids the voter approves). Costs and all
other metadata are parsed but discarded. An empty ``vote`` field is a
legal ballot approving nobody, and repeated voter ids are kept as
distinct voters.
"""

from __future__ import annotations

from .elections import Election
from .errors import (
    DuplicateProjectId,
    MalformedRecord,
    MissingSection,
    UnknownProjectId,
)

__all__ = ["parse_pabulib"]

_SECTION_NAMES = ("META", "PROJECTS", "VOTES")


def _split_sections(text: str) -> dict[str, list[str]]:
    sections: dict[str, list[str]] = {}
    current: list[str] | None = None
    for raw in text.lstrip("﻿").splitlines():
        line = raw.rstrip("\r")
        if line.strip() in _SECTION_NAMES and ";" not in line:
            name = line.strip()
            if name in sections:
                raise MalformedRecord(f"section {name} appears twice")
            current = sections.setdefault(name, [])
            continue
        if current is None:
            if line.strip() == "":
                continue
            raise MalformedRecord(f"content before first section header: {line!r}")
        current.append(line)
    return sections


def _records(lines: list[str], section: str) -> tuple[list[str], list[list[str]]]:
    """Header fields and records of one section; checks field counts."""
    body = [ln for ln in lines if ln.strip() != ""]
    if not body:
        raise MalformedRecord(f"section {section} has no header row")
    header = [f.strip() for f in body[0].split(";")]
    records = []
    for ln in body[1:]:
        rec = ln.split(";")
        if len(rec) != len(header):
            raise MalformedRecord(
                f"{section} record has {len(rec)} fields, header has {len(header)}: {ln!r}"
            )
        records.append(rec)
    return header, records


def parse_pabulib(text: str) -> Election:
    """Parse Pabulib ``.pb`` text into an :class:`Election`.

    Raises
    ------
    MissingSection
        No PROJECTS or no VOTES section.
    DuplicateProjectId
        A project id declared twice.
    UnknownProjectId
        A vote references an undeclared project id.
    MalformedRecord
        A record's field count disagrees with its section header, or a
        required header field is absent.
    """
    sections = _split_sections(text)
    for required in ("PROJECTS", "VOTES"):
        if required not in sections:
            raise MissingSection(f"no {required} section")

    header, records = _records(sections["PROJECTS"], "PROJECTS")
    if "project_id" not in header:
        raise MalformedRecord("PROJECTS header lacks a project_id field")
    id_col = header.index("project_id")
    project_ids: list[str] = []
    index_of: dict[str, int] = {}
    for rec in records:
        pid = rec[id_col].strip()
        if pid in index_of:
            raise DuplicateProjectId(f"project id {pid!r} declared twice")
        index_of[pid] = len(project_ids)
        project_ids.append(pid)

    header, records = _records(sections["VOTES"], "VOTES")
    if "vote" not in header:
        raise MalformedRecord("VOTES header lacks a vote field")
    vote_col = header.index("vote")
    ballots = []
    for rec in records:
        row = [0] * len(project_ids)
        field = rec[vote_col].strip()
        if field:
            for pid in field.split(","):
                pid = pid.strip()
                if pid not in index_of:
                    raise UnknownProjectId(f"vote references unknown project {pid!r}")
                row[index_of[pid]] = 1
        ballots.append(row)

    return Election(project_ids, ballots)
