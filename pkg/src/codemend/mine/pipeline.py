"""End-to-end mining: commit export -> function pairs -> DebugSamples."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from ..corpus.sample import DebugSample
from ..patterns import BugPattern, classify_pattern
from .commits import CommitRecord, is_bugfix_commit
from .extract import FunctionSpan, extract_functions
from .linediff import diff_lines, normalize_line


@dataclass
class MineStats:
    commits_scanned: int = 0
    bugfix_commits: int = 0
    files_scanned: int = 0
    pairs_compared: int = 0
    samples_emitted: int = 0
    pattern_counts: Counter = field(default_factory=Counter)
    skip_counts: Counter = field(default_factory=Counter)
    parse_warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "commits_scanned": self.commits_scanned,
            "bugfix_commits": self.bugfix_commits,
            "files_scanned": self.files_scanned,
            "pairs_compared": self.pairs_compared,
            "samples_emitted": self.samples_emitted,
            "pattern_counts": dict(sorted(self.pattern_counts.items())),
            "skip_counts": dict(sorted(self.skip_counts.items())),
            "parse_warnings": len(self.parse_warnings),
        }


def pair_functions(
    before_spans: list[FunctionSpan],
    after_spans: list[FunctionSpan],
    stats: MineStats | None = None,
) -> list[tuple[FunctionSpan, FunctionSpan]]:
    """Pair functions across file versions by (name, parameter count).

    Unmatched functions are dropped; a key appearing more than once on either
    side is ambiguous and all its functions are dropped.
    """

    def keyed(spans: list[FunctionSpan]) -> dict:
        by_key: dict[tuple[str, int], list[FunctionSpan]] = {}
        for s in spans:
            by_key.setdefault((s.name, s.n_params), []).append(s)
        return by_key

    before = keyed(before_spans)
    after = keyed(after_spans)
    pairs: list[tuple[FunctionSpan, FunctionSpan]] = []
    for key in sorted(set(before) & set(after)):
        if len(before[key]) > 1 or len(after[key]) > 1:
            if stats is not None:
                stats.skip_counts["ambiguous_overload"] += 1
            continue
        pairs.append((before[key][0], after[key][0]))
    return pairs


def sample_pair_from_functions(
    before: FunctionSpan,
    after: FunctionSpan,
    commit: CommitRecord,
    stats: MineStats,
) -> tuple[DebugSample, DebugSample] | None:
    """Turn one changed function pair into a (buggy, clean) sample pair."""
    if normalize_line(before.body_lines[0]) != normalize_line(after.body_lines[0]):
        stats.skip_counts["signature_changed"] += 1
        return None
    changed_before, changed_after = diff_lines(before.body_lines, after.body_lines)
    if not changed_before and not changed_after:
        stats.skip_counts["identical"] += 1
        return None
    if not changed_before:
        stats.skip_counts["insertion_only"] += 1
        return None

    labels = [0] * len(before.body_lines)
    for i in changed_before:
        labels[i] = 1
    if len(changed_before) == 1 and len(changed_after) == 1:
        pattern = classify_pattern(
            before.body_lines[changed_before[0]], after.body_lines[changed_after[0]]
        )
    else:
        pattern = BugPattern.UNKNOWN
    stats.pattern_counts[pattern.value] += 1

    buggy = DebugSample(
        before_lines=list(before.body_lines),
        after_lines=list(after.body_lines),
        line_labels=labels,
        function_label=1,
        pattern=pattern,
        project=commit.project,
        commit_id=commit.commit_id,
        commit_msg=commit.message,
    )
    clean = DebugSample(
        before_lines=list(after.body_lines),
        after_lines=list(after.body_lines),
        line_labels=[0] * len(after.body_lines),
        function_label=0,
        pattern=None,
        project=commit.project,
        commit_id=commit.commit_id,
        commit_msg=commit.message,
    )
    return buggy, clean


def build_samples(commits: Iterable[CommitRecord]) -> tuple[list[DebugSample], MineStats]:
    """Mine every bug-fix commit into buggy/clean sample pairs.

    Output order is normalized by (commit id, file path, function name), with
    the buggy sample preceding its clean counterpart, so parallel or reordered
    inputs always serialize identically.
    """
    stats = MineStats()
    keyed_pairs: list[tuple[tuple, DebugSample, DebugSample]] = []
    for commit in commits:
        stats.commits_scanned += 1
        if not is_bugfix_commit(commit.message):
            stats.skip_counts["not_bugfix"] += 1
            continue
        stats.bugfix_commits += 1
        for change in commit.files:
            stats.files_scanned += 1
            if not change.before or not change.after:
                stats.skip_counts["added_or_deleted_file"] += 1
                continue
            before_spans = extract_functions(change.before, commit.language, stats.parse_warnings)
            after_spans = extract_functions(change.after, commit.language, stats.parse_warnings)
            for b, a in pair_functions(before_spans, after_spans, stats):
                stats.pairs_compared += 1
                made = sample_pair_from_functions(b, a, commit, stats)
                if made is None:
                    continue
                keyed_pairs.append(((commit.commit_id, change.path, b.name), *made))

    keyed_pairs.sort(key=lambda t: t[0])
    samples: list[DebugSample] = []
    for _, buggy, clean in keyed_pairs:
        samples.extend((buggy, clean))
    stats.samples_emitted = len(samples)
    return samples, stats
