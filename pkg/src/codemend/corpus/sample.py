"""Dataset data model, newline-delimited JSON serialization, and
leakage-free project-level splitting."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..patterns import BugPattern


class DatasetError(ValueError):
    pass


@dataclass
class DebugSample:
    """One function-level sample: the (possibly buggy) source lines, per-line
    labels, the fixed version, and commit provenance.

    Buggy polarity is 1 everywhere: function_label is 1 exactly when at least
    one line label is 1, and a clean sample's after text equals its before
    text (its repair target is empty).
    """

    before_lines: list[str]
    after_lines: list[str]
    line_labels: list[int]
    function_label: int
    pattern: BugPattern | None = None
    project: str = ""
    commit_id: str = ""
    commit_msg: str = ""

    def __post_init__(self) -> None:
        if len(self.line_labels) != len(self.before_lines):
            raise DatasetError(
                f"{len(self.line_labels)} line labels for {len(self.before_lines)} lines"
            )
        if any(l not in (0, 1) for l in self.line_labels):
            raise DatasetError("line labels must be 0 or 1")
        n_buggy = sum(self.line_labels)
        if self.function_label != (1 if n_buggy else 0):
            raise DatasetError(
                f"function_label {self.function_label} inconsistent with "
                f"{n_buggy} positive line labels"
            )
        if self.function_label == 0 and self.after_lines != self.before_lines:
            raise DatasetError("clean sample must have after == before")
        if self.pattern is not None and self.pattern is not BugPattern.UNKNOWN and n_buggy != 1:
            raise DatasetError("pattern tags apply to single-line samples only")
        for name, lines in (("before", self.before_lines), ("after", self.after_lines)):
            if any("\n" in line for line in lines):
                raise DatasetError(f"{name} lines must not contain newline characters")

    @property
    def buggy_line_indices(self) -> list[int]:
        return [i for i, l in enumerate(self.line_labels) if l]

    @property
    def n_lines(self) -> int:
        return len(self.before_lines)

    def before_text(self) -> str:
        return "\n".join(self.before_lines)

    def after_text(self) -> str:
        return "\n".join(self.after_lines)

    def repair_target(self) -> str:
        """The fixed function for buggy samples, empty for clean ones."""
        return self.after_text() if self.function_label == 1 else ""


_REQUIRED_FIELDS = (
    "before", "after", "buggy_lines", "label", "pattern",
    "project", "commit_id", "commit_msg",
)


def sample_to_record(sample: DebugSample) -> dict:
    return {
        "before": sample.before_text(),
        "after": sample.after_text(),
        "buggy_lines": sample.buggy_line_indices,
        "label": sample.function_label,
        "pattern": sample.pattern.value if sample.pattern is not None else None,
        "project": sample.project,
        "commit_id": sample.commit_id,
        "commit_msg": sample.commit_msg,
    }


def sample_from_record(record: dict) -> DebugSample:
    for f in _REQUIRED_FIELDS:
        if f not in record:
            raise DatasetError(f"missing field: {f}")
    before = record["before"].split("\n")
    labels = [0] * len(before)
    for i in record["buggy_lines"]:
        if not 0 <= i < len(before):
            raise DatasetError(f"buggy line index {i} out of range for {len(before)} lines")
        labels[i] = 1
    pattern = None
    if record["pattern"] is not None:
        try:
            pattern = BugPattern(record["pattern"])
        except ValueError:
            raise DatasetError(f"unknown pattern name: {record['pattern']!r}")
    return DebugSample(
        before_lines=before,
        after_lines=record["after"].split("\n"),
        line_labels=labels,
        function_label=int(record["label"]),
        pattern=pattern,
        project=record["project"],
        commit_id=record["commit_id"],
        commit_msg=record["commit_msg"],
    )


def write_dataset(samples: Iterable[DebugSample], path: str) -> int:
    """Write samples as newline-delimited JSON; returns the record count."""
    n = 0
    with open(path, "w", encoding="utf-8") as f:
        for s in samples:
            f.write(json.dumps(sample_to_record(s), sort_keys=True))
            f.write("\n")
            n += 1
    return n


def read_dataset(path: str) -> list[DebugSample]:
    """Read a newline-delimited JSON dataset, reporting 1-based line numbers
    for malformed or incomplete records."""
    samples: list[DebugSample] = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"line {lineno}: malformed record: {exc.msg}")
            try:
                samples.append(sample_from_record(record))
            except DatasetError as exc:
                raise DatasetError(f"line {lineno}: {exc}")
    return samples


def split_by_project(
    samples: list[DebugSample],
    ratios: tuple[float, ...] = (0.8, 0.1, 0.1),
    seed: int = 0,
) -> tuple[list[DebugSample], ...]:
    """Partition samples so every project lands wholly in one split.

    Projects are shuffled deterministically from the seed and sliced by the
    rounded ratios (each split keeps at least one project), so the same
    project set and seed always produce the same split.
    """
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise DatasetError(f"split ratios must sum to 1, got {ratios}")
    projects = sorted({s.project for s in samples})
    if len(projects) < len(ratios):
        raise DatasetError(
            f"{len(projects)} projects cannot fill {len(ratios)} splits"
        )
    rng = np.random.default_rng(seed)
    order = [projects[i] for i in rng.permutation(len(projects))]

    counts = [max(1, int(round(r * len(projects)))) for r in ratios]
    while sum(counts) > len(projects):
        counts[int(np.argmax(counts))] -= 1
    counts[-1] += len(projects) - sum(counts)

    splits: list[list[DebugSample]] = []
    start = 0
    for c in counts:
        chosen = set(order[start:start + c])
        splits.append([s for s in samples if s.project in chosen])
        start += c
    return tuple(splits)


def dataset_stats(splits: dict[str, list[DebugSample]]) -> dict:
    """Per-split project and instance counts plus a pattern histogram."""
    out: dict[str, dict] = {}
    for name, samples in splits.items():
        patterns: dict[str, int] = {}
        for s in samples:
            if s.pattern is not None:
                patterns[s.pattern.value] = patterns.get(s.pattern.value, 0) + 1
        out[name] = {
            "projects": len({s.project for s in samples}),
            "instances": len(samples),
            "buggy": sum(s.function_label for s in samples),
            "patterns": dict(sorted(patterns.items())),
        }
    return out
