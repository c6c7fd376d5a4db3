"""Deterministic synthetic corpus of single-line bugs.

Thirteen template families, one per bug pattern: each builds a small Java-ish
function, then corrupts one designated line the way that pattern corrupts
real code.  Clean code follows rigid conventions (loop bounds use `<`, guards
carry both clauses, min/max arguments come low-first, ...), so the corrupted
versions are genuinely learnable, and the corruptions are exactly what the
pattern classifier expects to see, which lets the mining pipeline be
exercised end-to-end without external data.
"""

from __future__ import annotations

import numpy as np

from ..corpus.sample import DebugSample
from ..mine.commits import CommitRecord, FileChange
from ..patterns import BugPattern

_FILLERS = ["int mark = 0;", "int probe = 1;", "tick();"]


def _mutate(lines: list[str], idx: int, replacement: str) -> list[str]:
    out = list(lines)
    out[idx] = replacement
    return out


class _Template:
    """One bug-pattern family: builds (clean_body, buggy_body, buggy_idx)."""

    def __init__(self, pattern: BugPattern, build) -> None:
        self.pattern = pattern
        self.build = build


def _t_change_operator(rng) -> tuple[str, str, list[str], int, str]:
    name = rng.choice(["scanUntil", "countUp"])
    bound = rng.choice(["limit", "bound"])
    body = [
        "int total = 0;",
        f"for (int i = 0; i < {bound}; i++) {{",
        "total += i;",
        "}",
        "return total;",
    ]
    bad = f"for (int i = 0; i > {bound}; i++) {{"
    return name, f"int {bound}", body, 1, bad


def _t_change_operand(rng) -> tuple[str, str, list[str], int, str]:
    name = rng.choice(["pickFirst", "chooseEnd"])
    decoy = rng.choice(["mark", "probe"])
    body = [
        "if (head <= tail) {",
        "return head;",
        "}",
        "return tail;",
    ]
    bad = f"if (head <= {decoy}) {{"
    return name, "int head, int tail", body, 0, bad


_MISSPELLINGS = {"width": "widht", "result": "reslut", "buffer": "bufer"}


def _t_change_identifier(rng) -> tuple[str, str, list[str], int, str]:
    name = rng.choice(["readBack", "fetchValue"])
    var = rng.choice(sorted(_MISSPELLINGS))
    body = [
        f"int {var} = seed;",
        f"return {var};",
    ]
    bad = f"return {_MISSPELLINGS[var]};"
    return name, "int seed", body, 1, bad


_NUMERAL_PAIRS = [("10", "11"), ("100", "99"), ("2", "3")]


def _t_change_numeral(rng) -> tuple[str, str, list[str], int, str]:
    name = rng.choice(["scaleUp", "expand"])
    good, bad_n = _NUMERAL_PAIRS[rng.integers(len(_NUMERAL_PAIRS))]
    body = [
        f"int scaled = raw * {good};",
        "return scaled;",
    ]
    bad = f"int scaled = raw * {bad_n};"
    return name, "int raw", body, 0, bad


_CALLER_PAIRS = [("reader", "writer"), ("input", "output")]


def _t_change_caller(rng) -> tuple[str, str, list[str], int, str]:
    name = rng.choice(["remainingBytes", "pendingBytes"])
    good, decoy = _CALLER_PAIRS[rng.integers(len(_CALLER_PAIRS))]
    body = [f"return {good}.available();"]
    bad = f"return {decoy}.available();"
    return name, "", body, 0, bad


def _t_change_unary(rng) -> tuple[str, str, list[str], int, str]:
    name = rng.choice(["drainIfReady", "flushIfReady"])
    body = [
        "if (!queue.isEmpty()) {",
        "drain();",
        "}",
        "return;",
    ]
    bad = "if (queue.isEmpty()) {"
    return name, "", body, 0, bad


def _t_overload_more_args(rng) -> tuple[str, str, list[str], int, str]:
    name = rng.choice(["noteEvent", "logEvent"])
    body = [
        "tracker.record(event, source);",
        "return;",
    ]
    bad = "tracker.record(event);"
    return name, "int event, int source", body, 0, bad


def _t_overload_deleted_args(rng) -> tuple[str, str, list[str], int, str]:
    name = rng.choice(["clearCache", "wipeCache"])
    body = [
        "cache.reset();",
        "return;",
    ]
    bad = "cache.reset(force);"
    return name, "int force", body, 0, bad


_METHOD_PAIRS = [("getName", "getLabel"), ("getSize", "getCount")]


def _t_different_method(rng) -> tuple[str, str, list[str], int, str]:
    name = rng.choice(["describeHandle", "summarize"])
    good, decoy = _METHOD_PAIRS[rng.integers(len(_METHOD_PAIRS))]
    body = [f"return handle.{good}();"]
    bad = f"return handle.{decoy}();"
    return name, "", body, 0, bad


def _t_more_specific_if(rng) -> tuple[str, str, list[str], int, str]:
    name = rng.choice(["itemAt", "slotAt"])
    body = [
        "if (index >= 0 && index < size) {",
        "return index;",
        "}",
        "return 0;",
    ]
    bad = "if (index < size) {"
    return name, "int index, int size", body, 0, bad


def _t_less_specific_if(rng) -> tuple[str, str, list[str], int, str]:
    name = rng.choice(["isBlank", "isMissing"])
    body = [
        "if (token == null || token.isEmpty()) {",
        "return 1;",
        "}",
        "return 0;",
    ]
    bad = "if (token == null) {"
    return name, "String token", body, 0, bad


def _t_swap_arguments(rng) -> tuple[str, str, list[str], int, str]:
    name = rng.choice(["widerOf", "spanOf"])
    body = [
        "int span = Math.max(low, high);",
        "return span;",
    ]
    bad = "int span = Math.max(high, low);"
    return name, "int low, int high", body, 0, bad


def _t_swap_boolean(rng) -> tuple[str, str, list[str], int, str]:
    name = rng.choice(["applyMode", "enforceMode"])
    body = [
        "config.setStrict(true);",
        "return;",
    ]
    bad = "config.setStrict(false);"
    return name, "Config config", body, 0, bad


_TEMPLATES: list[_Template] = [
    _Template(BugPattern.CHANGE_OPERATOR, _t_change_operator),
    _Template(BugPattern.CHANGE_OPERAND, _t_change_operand),
    _Template(BugPattern.CHANGE_IDENTIFIER, _t_change_identifier),
    _Template(BugPattern.CHANGE_NUMERAL, _t_change_numeral),
    _Template(BugPattern.CHANGE_CALLER_IN_FUNCTION, _t_change_caller),
    _Template(BugPattern.CHANGE_UNARY_OPERATOR, _t_change_unary),
    _Template(BugPattern.OVERLOAD_METHOD_MORE_ARGS, _t_overload_more_args),
    _Template(BugPattern.OVERLOAD_METHOD_DELETED_ARGS, _t_overload_deleted_args),
    _Template(BugPattern.DIFFERENT_METHOD_SAME_ARGS, _t_different_method),
    _Template(BugPattern.MORE_SPECIFIC_IF, _t_more_specific_if),
    _Template(BugPattern.LESS_SPECIFIC_IF, _t_less_specific_if),
    _Template(BugPattern.SWAP_ARGUMENTS, _t_swap_arguments),
    _Template(BugPattern.SWAP_BOOLEAN_LITERAL, _t_swap_boolean),
]


def _wrap(name: str, sig: str, body: list[str]) -> list[str]:
    return [f"public int {name}({sig}) {{"] + ["    " + l for l in body] + ["}"]


def generate_pair(
    rng: np.random.Generator,
    pair_index: int = 0,
    n_projects: int = 8,
    patterns: list[BugPattern] | None = None,
) -> tuple[DebugSample, DebugSample]:
    """One (buggy, clean) sample pair from a random template."""
    pool = (
        _TEMPLATES
        if patterns is None
        else [t for t in _TEMPLATES if t.pattern in patterns]
    )
    template = pool[rng.integers(len(pool))]
    name, sig, clean_body, mut_idx, bad_line = template.build(rng)

    n_lead = int(rng.integers(0, 3))
    lead = [str(rng.choice(_FILLERS)) for _ in range(n_lead)]
    clean_body = lead + clean_body
    buggy_body = _mutate(clean_body, n_lead + mut_idx, bad_line)

    clean_lines = _wrap(name, sig, clean_body)
    buggy_lines = _wrap(name, sig, buggy_body)
    buggy_idx = 1 + n_lead + mut_idx  # +1 for the signature line

    project = f"proj{pair_index % n_projects:02d}"
    commit_id = "".join(rng.choice(list("0123456789abcdef"), size=12))
    message = f"Fix {template.pattern.value.lower().replace('_', ' ')} in {name}"

    labels = [0] * len(buggy_lines)
    labels[buggy_idx] = 1
    buggy = DebugSample(
        before_lines=buggy_lines,
        after_lines=clean_lines,
        line_labels=labels,
        function_label=1,
        pattern=template.pattern,
        project=project,
        commit_id=commit_id,
        commit_msg=message,
    )
    clean = DebugSample(
        before_lines=clean_lines,
        after_lines=clean_lines,
        line_labels=[0] * len(clean_lines),
        function_label=0,
        pattern=None,
        project=project,
        commit_id=commit_id,
        commit_msg=message,
    )
    return buggy, clean


def make_samples(
    n_samples: int,
    seed: int = 0,
    n_projects: int = 8,
    patterns: list[BugPattern] | None = None,
) -> list[DebugSample]:
    """A corpus of n_samples (buggy/clean pairs, so n_samples must be even)."""
    if n_samples % 2:
        raise ValueError("n_samples must be even (samples come in buggy/clean pairs)")
    rng = np.random.default_rng(seed)
    out: list[DebugSample] = []
    for i in range(n_samples // 2):
        out.extend(generate_pair(rng, i, n_projects, patterns))
    return out


def make_commits(
    n_pairs: int,
    seed: int = 0,
    n_projects: int = 8,
    noise_commits: int = 0,
) -> list[CommitRecord]:
    """Synthetic commit export: one bug-fix commit per pair, each changing one
    function inside a small class file; optional no-keyword noise commits."""
    rng = np.random.default_rng(seed)
    commits: list[CommitRecord] = []
    for i in range(n_pairs):
        buggy, clean = generate_pair(rng, i, n_projects)
        holder = f"Holder{i:03d}"
        before = "\n".join([f"public class {holder} {{"] + ["    " + l for l in buggy.before_lines] + ["}"])
        after = "\n".join([f"public class {holder} {{"] + ["    " + l for l in buggy.after_lines] + ["}"])
        commits.append(
            CommitRecord(
                commit_id=buggy.commit_id,
                message=buggy.commit_msg,
                files=[FileChange(f"src/{holder}.java", before, after)],
                language="java",
                project=buggy.project,
            )
        )
    for j in range(noise_commits):
        text = "\n".join([
            f"public class Notes{j} {{",
            "    public int identity(int x) {",
            "        return x;",
            "    }",
            "}",
        ])
        commits.append(
            CommitRecord(
                commit_id=f"noise{j:07d}",
                message="Add documentation notes",
                files=[FileChange(f"src/Notes{j}.java", text, text + "\n")],
                language="java",
                project=f"proj{j % n_projects:02d}",
            )
        )
    return commits
