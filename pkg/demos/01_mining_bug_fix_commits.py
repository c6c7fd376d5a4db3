"""Mining bug-fix commits into a line-labeled dataset.

Walks the full mining path on a small in-memory commit export: the keyword
gate on commit messages, function extraction from both file versions,
line-level diffing, and rule-based classification of the single-line change.
"""

from collections import Counter

from codemend.mine import (
    CommitRecord,
    FileChange,
    build_samples,
    diff_lines,
    extract_functions,
    is_bugfix_commit,
)
from codemend.patterns import classify_pattern

# ---------------------------------------------------------------------------
# 1. The keyword gate: which commits even count as bug fixes?
# ---------------------------------------------------------------------------
messages = [
    "Minor fix in polyglot native API",
    "Fixes issue #42 in the scheduler",
    "Add logging support",
    "add suffix support",       # contains "fix" mid-word: not a match
    "Incorrect bounds check",
]
print("== commit message gate ==")
for msg in messages:
    print(f"  {'BUGFIX ' if is_bugfix_commit(msg) else 'skip   '} {msg!r}")

# ---------------------------------------------------------------------------
# 2. A commit changing one line of one method.
# ---------------------------------------------------------------------------
before_file = """\
public class RangeChecker {
    public boolean inRange(int index, int size) {
        if (index <= size) {
            return true;
        }
        return false;
    }
}
"""
after_file = before_file.replace("index <= size", "index < size")

commit = CommitRecord(
    commit_id="9059770c0074",
    message="Fix off-by-one in range check",
    files=[FileChange("RangeChecker.java", before_file, after_file)],
    language="java",
    project="demo/ranges",
)

spans_before = extract_functions(before_file, "java")
spans_after = extract_functions(after_file, "java")
print("\n== extracted functions ==")
for s in spans_before:
    print(f"  {s.name}/{s.n_params} lines {s.start_line}..{s.end_line}")

changed_before, changed_after = diff_lines(
    spans_before[0].body_lines, spans_after[0].body_lines
)
print(f"\n== line diff ==\n  before lines changed: {changed_before}, after: {changed_after}")

pattern = classify_pattern(
    spans_before[0].body_lines[changed_before[0]],
    spans_after[0].body_lines[changed_after[0]],
)
print(f"  single-line change classified as: {pattern.value}")

# ---------------------------------------------------------------------------
# 3. The whole pipeline: one buggy sample + one clean counterpart per pair.
# ---------------------------------------------------------------------------
samples, stats = build_samples([commit])
print("\n== mined samples ==")
for s in samples:
    tag = s.pattern.value if s.pattern else "-"
    print(f"  label={s.function_label} buggy_lines={s.buggy_line_indices} pattern={tag}")
print(f"  stats: {stats.to_dict()}")

# the buggy sample keeps the before text, its repair target is the after text
buggy = samples[0]
print("\n== buggy function ==")
for i, line in enumerate(buggy.before_lines):
    marker = ">>" if buggy.line_labels[i] else "  "
    print(f"  {marker} {line}")

histogram = Counter(s.pattern.value for s in samples if s.pattern)
print(f"\npattern histogram: {dict(histogram)}")
