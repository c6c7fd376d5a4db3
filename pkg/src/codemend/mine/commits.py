"""Commit-export ingestion and the bug-fix commit heuristic."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable


class MiningError(ValueError):
    pass


#: A commit message mentioning any of these (as a word prefix, so "fixes" and
#: "Fixed" count but "suffix" does not) marks the commit as a bug fix.
BUGFIX_KEYWORDS = (
    "error", "bug", "fix", "issue", "mistake",
    "incorrect", "fault", "defect", "flaw", "type",
)

_WORD_RE = re.compile(r"[a-z]+")


def is_bugfix_commit(message: str) -> bool:
    """True when the commit message contains a bug-fix keyword."""
    if not message:
        return False
    for word in _WORD_RE.findall(message.lower()):
        for kw in BUGFIX_KEYWORDS:
            if word.startswith(kw):
                return True
    return False


@dataclass
class FileChange:
    path: str
    before: str
    after: str


@dataclass
class CommitRecord:
    """One exported commit: message, per-file before/after texts, language."""

    commit_id: str
    message: str
    files: list[FileChange]
    language: str
    project: str = ""

    def __post_init__(self) -> None:
        if self.language not in ("java", "python"):
            raise MiningError(f"unsupported language tag: {self.language!r}")
        for f in self.files:
            if not f.before and not f.after:
                raise MiningError(
                    f"file {f.path!r} in commit {self.commit_id} has neither a "
                    "before nor an after version"
                )


def commit_from_record(record: dict) -> CommitRecord:
    for name in ("commit_id", "message", "files", "language"):
        if name not in record:
            raise MiningError(f"missing field: {name}")
    files = []
    for i, f in enumerate(record["files"]):
        for name in ("path", "before", "after"):
            if name not in f:
                raise MiningError(f"file entry {i}: missing field: {name}")
        files.append(FileChange(f["path"], f["before"], f["after"]))
    return CommitRecord(
        commit_id=record["commit_id"],
        message=record["message"],
        files=files,
        language=record["language"],
        project=record.get("project", ""),
    )


def commit_to_record(commit: CommitRecord) -> dict:
    return {
        "commit_id": commit.commit_id,
        "message": commit.message,
        "files": [{"path": f.path, "before": f.before, "after": f.after} for f in commit.files],
        "language": commit.language,
        "project": commit.project,
    }


def read_commit_export(path: str) -> list[CommitRecord]:
    """Read a newline-delimited JSON commit export with line-numbered errors."""
    commits: list[CommitRecord] = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MiningError(f"line {lineno}: malformed record: {exc.msg}")
            try:
                commits.append(commit_from_record(record))
            except MiningError as exc:
                raise MiningError(f"line {lineno}: {exc}")
    return commits


def write_commit_export(commits: Iterable[CommitRecord], path: str) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as f:
        for c in commits:
            f.write(json.dumps(commit_to_record(c), sort_keys=True))
            f.write("\n")
            n += 1
    return n
