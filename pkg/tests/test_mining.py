"""Commit mining: keyword gate, function extraction, pairing, sample building."""

import pytest

from codemend.corpus.sample import DebugSample
from codemend.mine import (
    CommitRecord,
    FileChange,
    MiningError,
    build_samples,
    commit_from_record,
    extract_functions,
    is_bugfix_commit,
    pair_functions,
)
from codemend.mine.pipeline import MineStats
from codemend.patterns import BugPattern


# ---------------- keyword heuristic ----------------

def test_real_bugfix_message_detected():
    assert is_bugfix_commit("Minor fix in polyglot native API")


def test_non_bugfix_message_rejected():
    assert not is_bugfix_commit("Add logging support")


def test_prefix_and_case_insensitive_matching():
    assert is_bugfix_commit("Fixes issue #42")
    assert is_bugfix_commit("FIXED race condition")
    assert is_bugfix_commit("incorrect bounds check")
    assert is_bugfix_commit("types cleanup")   # "types" starts with keyword "type"


def test_keyword_must_start_the_word():
    assert not is_bugfix_commit("add suffix support")   # contains "fix" mid-word
    assert not is_bugfix_commit("rebug the recorder")   # contains "bug" mid-word
    assert not is_bugfix_commit("typo in docs")         # "typo" does not start with "type"
    assert is_bugfix_commit("bugfix release")


def test_empty_message_is_not_bugfix():
    assert not is_bugfix_commit("")


def test_case_invariance_property():
    for msg in ("Fix crash", "ERROR path", "Defects galore", "no keywords here"):
        assert is_bugfix_commit(msg) == is_bugfix_commit(msg.upper()) == is_bugfix_commit(msg.lower())


# ---------------- extraction ----------------

JAVA_TWO_METHODS = """\
public class Pair {
    public int first(int a, int b) {
        return a;
    }

    private static String second() throws Exception {
        if (ready) {
            return "x";
        }
        return "y";
    }
}
"""


def test_java_two_top_level_methods():
    spans = extract_functions(JAVA_TWO_METHODS, "java")
    assert [(s.name, s.n_params) for s in spans] == [("first", 2), ("second", 0)]
    assert spans[0].body_lines[0].strip().startswith("public int first")
    assert spans[0].body_lines[-1].strip() == "}"


def test_python_nested_def_reported_separately():
    text = (
        "def outer(a, b):\n"
        "    def inner(c):\n"
        "        return c\n"
        "    return inner(a + b)\n"
    )
    spans = extract_functions(text, "python")
    assert [(s.name, s.n_params) for s in spans] == [("outer", 2), ("inner", 1)]


def test_empty_file_yields_no_spans():
    assert extract_functions("", "java") == []
    assert extract_functions("", "python") == []


def test_unbalanced_braces_warn_but_do_not_abort():
    text = "public class X {\n  int broken(int a) {\n    return a;\n"
    warnings = []
    spans = extract_functions(text, "java", warnings)
    assert spans == []
    assert warnings


def test_java_skips_calls_and_control_flow():
    text = """\
class Y {
    void run() {
        helper(1, 2);
        if (x) {
            while (y) { spin(); }
        }
        obj.chain(a).done();
    }
}
"""
    spans = extract_functions(text, "java")
    assert [s.name for s in spans] == ["run"]


def test_java_string_literals_do_not_confuse_braces():
    text = 'class Z {\n  String f() {\n    return "}{";\n  }\n}\n'
    spans = extract_functions(text, "java")
    assert [s.name for s in spans] == ["f"]
    assert spans[0].end_line == 3


def test_unknown_language_rejected():
    with pytest.raises(ValueError):
        extract_functions("x", "ruby")


# ---------------- pairing ----------------

def _spans(text):
    return extract_functions(text, "java")


def test_pairing_by_name_and_arity():
    before = "class A { int f(int a) { return a; } int g(int a, int b) { return a; } }"
    after = "class A { int f(int a) { return a + 1; } int g(int a, int b) { return b; } }"
    pairs = pair_functions(_spans(before), _spans(after))
    assert [(b.name, a.name) for b, a in pairs] == [("f", "f"), ("g", "g")]


def test_renamed_function_is_unpaired():
    before = "class A { int f(int a) { return a; } }"
    after = "class A { int h(int a) { return a; } }"
    assert pair_functions(_spans(before), _spans(after)) == []


def test_ambiguous_overloads_dropped():
    before = "class A { int f(int a) { return 1; } int f(long a) { return 2; } }"
    after = "class A { int f(int a) { return 3; } int f(long a) { return 4; } }"
    stats = MineStats()
    assert pair_functions(_spans(before), _spans(after), stats) == []
    assert stats.skip_counts["ambiguous_overload"] == 1


def test_arity_change_is_unpaired():
    before = "class A { int f(int a) { return a; } }"
    after = "class A { int f(int a, int b) { return a + b; } }"
    assert pair_functions(_spans(before), _spans(after)) == []


# ---------------- build_samples ----------------

def _commit(before_body, after_body, message="Fix the thing", commit_id="c1"):
    before = f"class W {{\n    int f(int a) {{\n        {before_body}\n    }}\n}}"
    after = f"class W {{\n    int f(int a) {{\n        {after_body}\n    }}\n}}"
    return CommitRecord(
        commit_id, message, [FileChange("W.java", before, after)], "java", project="pr"
    )


def test_one_changed_line_emits_buggy_and_clean_pair():
    samples, stats = build_samples([_commit("return a + 1;", "return a - 1;")])
    assert len(samples) == 2
    buggy, clean = samples
    assert buggy.function_label == 1
    assert buggy.buggy_line_indices == [1]
    assert buggy.pattern is BugPattern.CHANGE_OPERATOR
    assert buggy.after_lines == clean.before_lines
    assert clean.function_label == 0
    assert clean.pattern is None
    assert stats.samples_emitted == 2


def test_non_bugfix_commit_emits_nothing():
    samples, stats = build_samples(
        [_commit("return a + 1;", "return a - 1;", message="Refactor return")]
    )
    assert samples == []
    assert stats.skip_counts["not_bugfix"] == 1


def test_multi_line_change_gets_unknown_pattern():
    before = (
        "class W {\n    int f(int a) {\n        int x = 1;\n        int y = 2;\n"
        "        int z = 3;\n        return x + y + z;\n    }\n}"
    )
    after = (
        "class W {\n    int f(int a) {\n        int x = 9;\n        int y = 8;\n"
        "        int z = 7;\n        return x + y + z;\n    }\n}"
    )
    commit = CommitRecord("c2", "fix constants", [FileChange("W.java", before, after)], "java")
    samples, _ = build_samples([commit])
    buggy = samples[0]
    assert sum(buggy.line_labels) == 3
    assert buggy.pattern is BugPattern.UNKNOWN


def test_identical_pair_skipped():
    samples, stats = build_samples([_commit("return a;", "return a;")])
    assert samples == []
    assert stats.skip_counts["identical"] == 1


def test_every_buggy_sample_has_positive_label_and_clean_has_none():
    commits = [
        _commit("return a + 1;", "return a - 1;", commit_id="a"),
        _commit("int x = 0;\n        return x;", "int x = 1;\n        return x;", commit_id="b"),
    ]
    samples, _ = build_samples(commits)
    for s in samples:
        if s.function_label == 1:
            assert sum(s.line_labels) >= 1
        else:
            assert sum(s.line_labels) == 0


def test_output_order_is_normalized():
    c1 = _commit("return a + 1;", "return a - 1;", commit_id="zz")
    c2 = _commit("return a * 2;", "return a * 3;", commit_id="aa")
    s_fwd, _ = build_samples([c1, c2])
    s_rev, _ = build_samples([c2, c1])
    assert s_fwd == s_rev
    assert s_fwd[0].commit_id == "aa"


def test_commit_record_validation():
    with pytest.raises(MiningError):
        CommitRecord("c", "m", [FileChange("p", "", "")], "java")
    with pytest.raises(MiningError):
        CommitRecord("c", "m", [], "rust")
    with pytest.raises(MiningError, match="missing field: files"):
        commit_from_record({"commit_id": "c", "message": "m", "language": "java"})
