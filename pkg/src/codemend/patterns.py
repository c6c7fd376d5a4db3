"""Single-line bug-pattern taxonomy and the rule-based classifier behind it.

Thirteen categories of one-line code changes are recognized by lexing the
before/after lines into code tokens and applying matching rules in a fixed
precedence order.  Rules are token-based rather than AST-based, which keeps
them language-light (Java and Python both lex fine) and fully deterministic.
Anything that matches no rule is UNKNOWN; classification never raises.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum


class BugPattern(Enum):
    CHANGE_OPERATOR = "CHANGE_OPERATOR"                      # P0
    CHANGE_OPERAND = "CHANGE_OPERAND"                        # P1
    CHANGE_IDENTIFIER = "CHANGE_IDENTIFIER"                  # P2
    CHANGE_NUMERAL = "CHANGE_NUMERAL"                        # P3
    CHANGE_CALLER_IN_FUNCTION = "CHANGE_CALLER_IN_FUNCTION"  # P4
    CHANGE_UNARY_OPERATOR = "CHANGE_UNARY_OPERATOR"          # P5
    OVERLOAD_METHOD_MORE_ARGS = "OVERLOAD_METHOD_MORE_ARGS"  # P6
    OVERLOAD_METHOD_DELETED_ARGS = "OVERLOAD_METHOD_DELETED_ARGS"  # P7
    DIFFERENT_METHOD_SAME_ARGS = "DIFFERENT_METHOD_SAME_ARGS"      # P8
    MORE_SPECIFIC_IF = "MORE_SPECIFIC_IF"                    # P9
    LESS_SPECIFIC_IF = "LESS_SPECIFIC_IF"                    # P10
    SWAP_ARGUMENTS = "SWAP_ARGUMENTS"                        # P11
    SWAP_BOOLEAN_LITERAL = "SWAP_BOOLEAN_LITERAL"            # P12
    UNKNOWN = "UNKNOWN"

    @property
    def index(self) -> int | None:
        """P-number of the pattern (0..12), or None for UNKNOWN."""
        order = list(type(self))
        i = order.index(self)
        return i if self is not BugPattern.UNKNOWN else None


#: Classifiable patterns in index order P0..P12 (UNKNOWN excluded).
PATTERNS: tuple[BugPattern, ...] = tuple(p for p in BugPattern if p is not BugPattern.UNKNOWN)


# ---------------- lexer ----------------

@dataclass(frozen=True)
class Token:
    kind: str  # ident | num | str | bool | op | punct
    text: str


_TOKEN_RE = re.compile(
    r"""
    (?P<num>0[xX][0-9a-fA-F]+[lL]?
        |\d+\.\d*(?:[eE][+-]?\d+)?[fFdDlL]?
        |\.\d+(?:[eE][+-]?\d+)?[fFdDlL]?
        |\d+(?:[eE][+-]?\d+)?[fFdDlL]?)
    |(?P<str>"(?:\\.|[^"\\])*"|'(?:\\.|[^'\\])*')
    |(?P<ident>[A-Za-z_$][A-Za-z0-9_$]*)
    |(?P<op><<=|>>>=|>>=|>>>|===|!==|<=|>=|==|!=|&&|\|\||->|::|\+\+|--|\+=|-=|\*=|/=|%=|&=|\|=|\^=|<<|>>|\*\*|//
        |[+\-*/%<>=!&|^~?])
    |(?P<punct>[()\[\]{},;.:@#`\\])
    |(?P<space>\s+)
    """,
    re.VERBOSE,
)

_BOOL_WORDS = {"true", "false"}
_WORD_OPS = {"and": "&&", "or": "||", "not": "!"}

#: Operators that can sit between two operands.
BINARY_OPERATORS = frozenset(
    {
        "+", "-", "*", "/", "%", "**", "//",
        "<", ">", "<=", ">=", "==", "!=", "===", "!==",
        "&&", "||", "&", "|", "^", "<<", ">>", ">>>",
        "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=",
    }
)

_UNARY_OPERATORS = frozenset({"!"})

# keyword parens are not call sites
_CONTROL_KEYWORDS = frozenset({"if", "while", "for", "switch", "catch", "return", "elif"})


def lex(line: str) -> list[Token]:
    """Split one source line into code tokens; unknown characters become punct."""
    tokens: list[Token] = []
    pos = 0
    while pos < len(line):
        m = _TOKEN_RE.match(line, pos)
        if m is None:
            tokens.append(Token("punct", line[pos]))
            pos += 1
            continue
        pos = m.end()
        kind = m.lastgroup
        text = m.group()
        if kind == "space":
            continue
        if kind == "ident":
            low = text.lower()
            if low in _BOOL_WORDS:
                tokens.append(Token("bool", text))
            elif text in _WORD_OPS:
                tokens.append(Token("op", _WORD_OPS[text]))
            else:
                tokens.append(Token("ident", text))
        else:
            tokens.append(Token(kind, text))
    return tokens


# ---------------- rule helpers ----------------

def _diff_positions(a: list[Token], b: list[Token]) -> list[int]:
    return [i for i, (x, y) in enumerate(zip(a, b)) if x != y]


def _single_insertion(shorter: list[Token], longer: list[Token]) -> Token | None:
    """The one token whose removal from `longer` yields `shorter`, if any."""
    if len(longer) != len(shorter) + 1:
        return None
    for i in range(len(longer)):
        if longer[:i] + longer[i + 1:] == shorter:
            return longer[i]
    return None


def _matching_paren(tokens: list[Token], open_pos: int) -> int:
    """Index of the ')' closing tokens[open_pos]; len(tokens) if unbalanced."""
    depth = 0
    for i in range(open_pos, len(tokens)):
        if tokens[i].text == "(":
            depth += 1
        elif tokens[i].text == ")":
            depth -= 1
            if depth == 0:
                return i
    return len(tokens)


def _split_args(tokens: list[Token]) -> list[tuple[str, ...]]:
    """Split an argument region at top-level commas; empty region -> no args."""
    args: list[tuple[str, ...]] = []
    cur: list[str] = []
    depth = 0
    for t in tokens:
        if t.text in "([{":
            depth += 1
        elif t.text in ")]}":
            depth -= 1
        if t.text == "," and depth == 0:
            args.append(tuple(cur))
            cur = []
        else:
            cur.append(t.text)
    if cur or args:
        args.append(tuple(cur))
    return args


def _is_subsequence(small: list[str], big: list[str]) -> bool:
    it = iter(big)
    return all(x in it for x in small)


def _call_sites_before(tokens: list[Token], limit: int) -> list[int]:
    """Positions of '(' strictly before `limit`, innermost (latest) first."""
    return [i for i in range(min(limit, len(tokens)) - 1, -1, -1) if tokens[i].text == "("]


def _extract_condition(tokens: list[Token]) -> tuple[list[Token], list[Token], list[Token]]:
    """Split a line into (head, condition, tail) for the if-specialization rules.

    Lines starting with `if (` use the parenthesized condition; Python-style
    `if cond:` uses everything between `if` and the trailing ':'; anything else
    is treated as a bare condition.
    """
    if tokens and tokens[0].text == "if":
        if len(tokens) > 1 and tokens[1].text == "(":
            close = _matching_paren(tokens, 1)
            if close < len(tokens):
                return tokens[:2], tokens[2:close], tokens[close:]
            return tokens[:2], tokens[2:], []
        body = tokens[1:]
        if body and body[-1].text == ":":
            return tokens[:1], body[:-1], body[-1:]
        return tokens[:1], body, []
    return [], tokens, []


# ---------------- individual rules ----------------

def _swapped_boolean(a: list[Token], b: list[Token]) -> bool:
    if len(a) != len(b):
        return False
    diffs = _diff_positions(a, b)
    if len(diffs) != 1:
        return False
    x, y = a[diffs[0]], b[diffs[0]]
    return x.kind == y.kind == "bool" and x.text.lower() != y.text.lower()


def _changed_unary(a: list[Token], b: list[Token]) -> bool:
    extra = _single_insertion(a, b) or _single_insertion(b, a)
    return extra is not None and extra.kind == "op" and extra.text in _UNARY_OPERATORS


def _single_diff(a: list[Token], b: list[Token]) -> int | None:
    if len(a) != len(b):
        return None
    diffs = _diff_positions(a, b)
    return diffs[0] if len(diffs) == 1 else None


def _swapped_arguments(a: list[Token], b: list[Token]) -> bool:
    diffs = [i for i in range(min(len(a), len(b))) if a[i] != b[i]]
    first = diffs[0] if diffs else min(len(a), len(b))
    if first == 0:
        return False
    for p in _call_sites_before(a, first):
        if p == 0 or a[p - 1].kind != "ident" or a[p - 1].text in _CONTROL_KEYWORDS:
            continue
        close_a = _matching_paren(a, p)
        close_b = _matching_paren(b, p)
        # a table-typo'd line may be missing its final ')'; the virtual close
        # at end-of-stream keeps the rule usable
        tail_a = [t.text for t in a[close_a + 1:]]
        tail_b = [t.text for t in b[close_b + 1:]]
        if tail_a != tail_b:
            continue
        args_a = _split_args(a[p + 1:close_a])
        args_b = _split_args(b[p + 1:close_b])
        if len(args_a) != len(args_b) or len(args_a) < 2:
            continue
        moved = [i for i, (x, y) in enumerate(zip(args_a, args_b)) if x != y]
        if len(moved) == 2:
            i, j = moved
            if args_a[i] == args_b[j] and args_a[j] == args_b[i]:
                return True
    return False


def _if_specialized(a: list[Token], b: list[Token], op: str) -> bool:
    head_a, cond_a, tail_a = _extract_condition(a)
    head_b, cond_b, tail_b = _extract_condition(b)
    if head_a != head_b or tail_a != tail_b or not cond_a:
        return False
    n = len(cond_a)
    if len(cond_b) < n + 2:
        return False
    if cond_b[:n] == cond_a and cond_b[n].text == op:
        return len(cond_b) > n + 1
    if cond_b[-n:] == cond_a and cond_b[-n - 1].text == op:
        return len(cond_b) > n + 1
    return False


def _args_grew(a: list[Token], b: list[Token]) -> bool:
    """True when b is a with extra tokens inside one call's argument list."""
    diffs = [i for i in range(min(len(a), len(b))) if a[i] != b[i]]
    first = diffs[0] if diffs else min(len(a), len(b))
    for p in _call_sites_before(a, first + 1):
        if p == 0 or a[p - 1].kind != "ident" or a[p - 1].text in _CONTROL_KEYWORDS:
            continue
        close_a = _matching_paren(a, p)
        close_b = _matching_paren(b, p)
        if close_a >= len(a) or close_b >= len(b):
            continue
        if [t.text for t in a[close_a:]] != [t.text for t in b[close_b:]]:
            continue
        args_a = [t.text for t in a[p + 1:close_a]]
        args_b = [t.text for t in b[p + 1:close_b]]
        if args_a != args_b and _is_subsequence(args_a, args_b):
            return True
    return False


def classify_pattern(before_line: str, after_line: str) -> BugPattern:
    """Classify a single changed line pair into one of the 13 patterns.

    Rules are tried in fixed precedence order and the first match wins, so
    overlapping rules (every operand change is also an identifier change)
    resolve deterministically.  Unmatched or unlexable changes are UNKNOWN.
    """
    try:
        a = lex(before_line)
        b = lex(after_line)
    except Exception:
        return BugPattern.UNKNOWN
    if not a or not b or a == b:
        return BugPattern.UNKNOWN

    if _swapped_boolean(a, b):
        return BugPattern.SWAP_BOOLEAN_LITERAL
    if _changed_unary(a, b):
        return BugPattern.CHANGE_UNARY_OPERATOR

    i = _single_diff(a, b)
    if i is not None:
        x, y = a[i], b[i]
        if x.kind == y.kind == "op" and x.text in BINARY_OPERATORS and y.text in BINARY_OPERATORS:
            return BugPattern.CHANGE_OPERATOR
        if x.kind == y.kind == "num":
            return BugPattern.CHANGE_NUMERAL

    if _swapped_arguments(a, b):
        return BugPattern.SWAP_ARGUMENTS
    if _if_specialized(a, b, "&&"):
        return BugPattern.MORE_SPECIFIC_IF
    if _if_specialized(a, b, "||"):
        return BugPattern.LESS_SPECIFIC_IF
    if _args_grew(a, b):
        return BugPattern.OVERLOAD_METHOD_MORE_ARGS
    if _args_grew(b, a):
        return BugPattern.OVERLOAD_METHOD_DELETED_ARGS

    if i is not None:
        x, y = a[i], b[i]
        if x.kind == y.kind == "ident":
            if i + 1 < len(a) and a[i + 1].text == "." and any(
                t.text == "(" for t in a[i + 2:]
            ):
                return BugPattern.CHANGE_CALLER_IN_FUNCTION
            if i + 1 < len(a) and a[i + 1].text == "(":
                return BugPattern.DIFFERENT_METHOD_SAME_ARGS
            left_op = i > 0 and a[i - 1].kind == "op" and a[i - 1].text in BINARY_OPERATORS
            right_op = i + 1 < len(a) and a[i + 1].kind == "op" and a[i + 1].text in BINARY_OPERATORS
            if left_op or right_op:
                return BugPattern.CHANGE_OPERAND
            return BugPattern.CHANGE_IDENTIFIER

    return BugPattern.UNKNOWN
