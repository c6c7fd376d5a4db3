"""Bug-pattern classifier: the 13 canonical examples, adversarial near
misses, precedence, and totality."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codemend.patterns import PATTERNS, BugPattern, classify_pattern, lex

# the 13 canonical single-line changes, one per pattern (P0..P12)
CANONICAL_CASES = [
    ("logLevel>=Log.ASSERT", "logLevel<=Log.ASSERT", BugPattern.CHANGE_OPERATOR),
    ("x<=1", "z<=1", BugPattern.CHANGE_OPERAND),
    ("this.userDn", "this.userName", BugPattern.CHANGE_IDENTIFIER),
    ("player.stepHeight=0.5F", "player.stepHeight=0.6F", BugPattern.CHANGE_NUMERAL),
    ("mBlockStream.remaining()", "inStream.remaining()", BugPattern.CHANGE_CALLER_IN_FUNCTION),
    ("!segment.isOk()", "segment.isOk()", BugPattern.CHANGE_UNARY_OPERATOR),
    (
        "Messaging.sendTr(sender,key)",
        "Messaging.sendTr(sender,key,npc.getName())",
        BugPattern.OVERLOAD_METHOD_MORE_ARGS,
    ),
    ("registerCommandsNow(commands)", "registerCommandsNow()", BugPattern.OVERLOAD_METHOD_DELETED_ARGS),
    ("server.getStartedLabel()", "server.getStartedName()", BugPattern.DIFFERENT_METHOD_SAME_ARGS),
    (
        "getIndex()>=arrayLength",
        "arrayLength>0 && getIndex()>=arrayLength",
        BugPattern.MORE_SPECIFIC_IF,
    ),
    ("pluginId==null", "pluginId==null || pluginID.length()==0", BugPattern.LESS_SPECIFIC_IF),
    ("new Duration(DateTime.now(),time)", "new Duration(time, DateTime.now()", BugPattern.SWAP_ARGUMENTS),
    ("doTest(false)", "doTest(true)", BugPattern.SWAP_BOOLEAN_LITERAL),
]

# near-miss fixtures that fit no rule and must fall back to UNKNOWN
ADVERSARIAL_CASES = [
    ("x<=1", "x<=1", "identical lines"),
    ("a>=b", "a<=c", "operator and operand both changed"),
    ("x+y", "x-z", "two token kinds changed"),
    ("f(a)", "g(b)", "callee and argument changed"),
    ("x<=1", "y<=2.5", "operand and numeral both changed"),
    ("x = 1", "y == 1", "operator and operand both changed"),
    ("foo(a, b, c)", "foo(c, a, b)", "three-way argument rotation"),
    ("foo(a, b)", "bar(b, a)", "swap plus renamed callee"),
    ("if (a && b)", "if (b && a)", "clauses reordered, not conjoined"),
    ("if (a)", "if (a && )", "dangling conjunction"),
    ("if (a)", "while (a && b)", "keyword changed with clause"),
    ("!ready()", "~ready()", "negation swapped for bitwise not"),
    ("!x", "- x", "unary swapped for minus"),
    ("run(true)", "run(1)", "boolean replaced by numeral"),
    ("run(true, x)", "run(false, y)", "boolean swap plus operand change"),
    ("a.b()", "a.b.c", "call replaced by field access"),
    ("obj.call(x)", "obj2.call(y)", "caller and argument changed"),
    ("f(a,b)", "f(a,b,c,d) extra", "arg growth with trailing junk"),
    ("x <= 1;", "x <= 1 ;;", "punctuation-only change"),
    ("\"text\"", "\"other\"", "string literal changed"),
]


@pytest.mark.parametrize("before,after,expected", CANONICAL_CASES)
def test_canonical_patterns_classified_exactly(before, after, expected):
    assert classify_pattern(before, after) is expected


def test_all_thirteen_patterns_covered():
    assert {c[2] for c in CANONICAL_CASES} == set(PATTERNS)
    assert len(CANONICAL_CASES) == 13


@pytest.mark.parametrize("before,after,note", ADVERSARIAL_CASES)
def test_near_misses_fall_back_to_unknown(before, after, note):
    got = classify_pattern(before, after)
    assert got is BugPattern.UNKNOWN, f"{note}: got {got}"


def test_adversarial_suite_has_twenty_fixtures():
    assert len(ADVERSARIAL_CASES) == 20


# ---------------- precedence and rule details ----------------

def test_operand_beats_identifier_next_to_operator():
    # every operand change is also an identifier change; the operand rule
    # must fire first
    assert classify_pattern("a>=b", "a>=c") is BugPattern.CHANGE_OPERAND


def test_identifier_without_operator_context():
    assert classify_pattern("return alpha;", "return beta;") is BugPattern.CHANGE_IDENTIFIER


def test_caller_change_beats_operand():
    assert classify_pattern("x.size()", "y.size()") is BugPattern.CHANGE_CALLER_IN_FUNCTION


def test_receiver_rename_without_call_is_identifier_change():
    assert classify_pattern("a.b", "c.b") is BugPattern.CHANGE_IDENTIFIER


def test_boolean_swap_beats_identifieresque_rules():
    assert classify_pattern("setFlag(true);", "setFlag(false);") is BugPattern.SWAP_BOOLEAN_LITERAL


def test_unary_insertion_and_deletion_both_match():
    assert classify_pattern("if (ready()) {", "if (!ready()) {") is BugPattern.CHANGE_UNARY_OPERATOR
    assert classify_pattern("if (!ready()) {", "if (ready()) {") is BugPattern.CHANGE_UNARY_OPERATOR


def test_python_word_operators():
    assert classify_pattern("if not ready:", "if ready:") is BugPattern.CHANGE_UNARY_OPERATOR
    assert classify_pattern("if a:", "if a and b:") is BugPattern.MORE_SPECIFIC_IF
    assert classify_pattern("if a:", "if a or b:") is BugPattern.LESS_SPECIFIC_IF


def test_if_condition_extraction_with_parens():
    assert (
        classify_pattern("if (index < size) {", "if (index >= 0 && index < size) {")
        is BugPattern.MORE_SPECIFIC_IF
    )
    assert (
        classify_pattern("if (token == null) {", "if (token == null || token.isEmpty()) {")
        is BugPattern.LESS_SPECIFIC_IF
    )


def test_swap_arguments_within_statement():
    assert (
        classify_pattern("int s = Math.max(high, low);", "int s = Math.max(low, high);")
        is BugPattern.SWAP_ARGUMENTS
    )


def test_swap_arguments_nested_call():
    assert classify_pattern("f(g(a, b))", "f(g(b, a))") is BugPattern.SWAP_ARGUMENTS


def test_overload_args_with_surrounding_statement():
    assert (
        classify_pattern("tracker.record(event);", "tracker.record(event, source);")
        is BugPattern.OVERLOAD_METHOD_MORE_ARGS
    )
    assert (
        classify_pattern("cache.reset(force);", "cache.reset();")
        is BugPattern.OVERLOAD_METHOD_DELETED_ARGS
    )


def test_numeral_suffixes_lex_as_single_tokens():
    tokens = lex("player.stepHeight=0.5F")
    assert [t.text for t in tokens if t.kind == "num"] == ["0.5F"]
    assert classify_pattern("x = 0x1F;", "x = 0x2F;") is BugPattern.CHANGE_NUMERAL


def test_classifier_is_deterministic():
    for before, after, _ in CANONICAL_CASES:
        assert classify_pattern(before, after) is classify_pattern(before, after)


@settings(max_examples=300, deadline=None)
@given(
    st.text(alphabet=st.characters(min_codepoint=9, max_codepoint=0x2FF), max_size=40),
    st.text(alphabet=st.characters(min_codepoint=9, max_codepoint=0x2FF), max_size=40),
)
def test_classifier_is_total(before, after):
    assert classify_pattern(before, after) in BugPattern
