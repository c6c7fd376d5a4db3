"""Lightweight function extraction for Java and Python source files.

Java methods are found by a signature heuristic plus brace balancing on a
comment/string-blanked copy of the file; Python functions by `def` headers
plus indentation extent.  Parse problems skip the affected region and record
a warning instead of aborting the file.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


@dataclass
class FunctionSpan:
    """One extracted function: 0-based [start_line, end_line] into the file,
    with body_lines covering the signature through the final line."""

    name: str
    n_params: int
    start_line: int
    end_line: int
    body_lines: list[str]

    def __post_init__(self) -> None:
        assert self.start_line <= self.end_line
        assert self.body_lines


def extract_functions(
    file_text: str, language: str, warnings: list[str] | None = None
) -> list[FunctionSpan]:
    if language == "java":
        return _extract_java(file_text, warnings)
    if language == "python":
        return _extract_python(file_text, warnings)
    raise ValueError(f"unsupported language tag: {language!r}")


def _warn(warnings: list[str] | None, message: str) -> None:
    if warnings is not None:
        warnings.append(message)


# ---------------- structural cleanup ----------------

def _blank_strings_and_comments(text: str) -> str:
    """Replace string/char literal contents and comments with spaces,
    preserving every line break so positions stay aligned."""
    out = []
    i = 0
    n = len(text)
    mode = "code"  # code | line_comment | block_comment | dquote | squote
    while i < n:
        c = text[i]
        if mode == "code":
            if c == "/" and i + 1 < n and text[i + 1] == "/":
                mode = "line_comment"
                out.append("  ")
                i += 2
                continue
            if c == "/" and i + 1 < n and text[i + 1] == "*":
                mode = "block_comment"
                out.append("  ")
                i += 2
                continue
            if c == "#":
                mode = "line_comment"
                out.append(" ")
                i += 1
                continue
            if c == '"':
                mode = "dquote"
                out.append('"')
                i += 1
                continue
            if c == "'":
                mode = "squote"
                out.append("'")
                i += 1
                continue
            out.append(c)
        elif mode == "line_comment":
            if c == "\n":
                mode = "code"
                out.append("\n")
            else:
                out.append(" ")
            i += 1
            continue
        elif mode == "block_comment":
            if c == "*" and i + 1 < n and text[i + 1] == "/":
                mode = "code"
                out.append("  ")
                i += 2
                continue
            out.append("\n" if c == "\n" else " ")
            i += 1
            continue
        else:  # inside a quote
            quote = '"' if mode == "dquote" else "'"
            if c == "\\" and i + 1 < n:
                out.append("  ")
                i += 2
                continue
            if c == quote:
                mode = "code"
                out.append(quote)
            elif c == "\n":
                mode = "code"  # unterminated literal; resync at line end
                out.append("\n")
            else:
                out.append(" ")
            i += 1
            continue
        i += 1
    return "".join(out)


def _count_params(param_text: str) -> int:
    """Count top-level comma-separated parameters in a text between parens."""
    depth = 0
    count = 0
    seen_any = False
    for c in param_text:
        if c in "([{<":
            depth += 1
        elif c in ")]}>":
            depth -= 1
        elif c == "," and depth == 0:
            count += 1
        if not c.isspace():
            seen_any = True
    return count + 1 if seen_any else 0


# ---------------- Java ----------------

_JAVA_HEADER_RE = re.compile(r"(?:^|[\s;{}()])([A-Za-z_$][\w$]*)\s*\(")

_JAVA_BODY_RE = re.compile(r"\s*(?:throws\s+[\w$.\s,<>\[\]]+?)?\{")

_JAVA_NOT_METHOD = {
    "if", "for", "while", "switch", "catch", "return", "new", "do",
    "else", "try", "super", "this", "throw", "assert", "synchronized",
}


def _extract_java(file_text: str, warnings: list[str] | None) -> list[FunctionSpan]:
    structural = _blank_strings_and_comments(file_text)
    lines = file_text.split("\n")
    spans: list[FunctionSpan] = []
    line_start = [0]
    for i, c in enumerate(structural):
        if c == "\n":
            line_start.append(i + 1)

    def line_of(pos: int) -> int:
        lo, hi = 0, len(line_start) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if line_start[mid] <= pos:
                lo = mid
            else:
                hi = mid - 1
        return lo

    pos = 0
    while True:
        m = _JAVA_HEADER_RE.search(structural, pos)
        if m is None:
            break
        name = m.group(1)
        open_paren = m.end() - 1
        pos = m.end()
        if name in _JAVA_NOT_METHOD:
            continue
        prefix = structural[max(0, m.start() - 64):m.start() + 1].rstrip()
        # skip calls/instantiations/annotations: `foo.bar(`, `new Bar(`, `@Bar(`
        if prefix.endswith(".") or prefix.endswith("@") or re.search(r"\bnew\s*$", prefix):
            continue
        # a declaration needs a return type or modifier word before the name
        before_name = structural[line_start[line_of(m.start())]:m.start() + 1]
        if not re.search(r"[\w$>\]]\s+$", before_name):
            continue
        close_paren = _match_char(structural, open_paren, "(", ")")
        if close_paren is None:
            _warn(warnings, f"java: unbalanced parameter list at line {line_of(open_paren) + 1}")
            continue
        # only whitespace or a throws clause may sit between ')' and '{';
        # anything else (';', '=', a call chain, ...) is not a declaration
        tail = _JAVA_BODY_RE.match(structural, close_paren + 1)
        if tail is None:
            continue
        body_open = tail.end() - 1
        body_close = _match_char(structural, body_open, "{", "}")
        if body_close is None:
            _warn(warnings, f"java: unbalanced braces for {name!r} at line {line_of(body_open) + 1}")
            continue
        start = line_of(m.start(1))
        end = line_of(body_close)
        spans.append(
            FunctionSpan(
                name=name,
                n_params=_count_params(structural[open_paren + 1:close_paren]),
                start_line=start,
                end_line=end,
                body_lines=lines[start:end + 1],
            )
        )
        # keep scanning inside the body so nested definitions are reported too

    spans.sort(key=lambda s: (s.start_line, s.end_line))
    return spans


def _match_char(text: str, open_pos: int, open_c: str, close_c: str) -> int | None:
    depth = 0
    for i in range(open_pos, len(text)):
        if text[i] == open_c:
            depth += 1
        elif text[i] == close_c:
            depth -= 1
            if depth == 0:
                return i
    return None


# ---------------- Python ----------------

_PY_DEF_RE = re.compile(r"^(\s*)(?:async\s+)?def\s+([A-Za-z_]\w*)\s*\(")


def _extract_python(file_text: str, warnings: list[str] | None) -> list[FunctionSpan]:
    structural = _blank_strings_and_comments(file_text).split("\n")
    lines = file_text.split("\n")
    spans: list[FunctionSpan] = []

    for i, sline in enumerate(structural):
        m = _PY_DEF_RE.match(sline)
        if m is None:
            continue
        indent = len(m.group(1).expandtabs())
        name = m.group(2)
        # the parameter list may span lines; join until parens balance
        joined = sline[m.end() - 1:]
        header_end = i
        while joined.count("(") > joined.count(")") and header_end + 1 < len(structural):
            header_end += 1
            joined += "\n" + structural[header_end]
        close = _match_char(joined, 0, "(", ")")
        if close is None:
            _warn(warnings, f"python: unbalanced parameter list for {name!r} at line {i + 1}")
            continue
        end = header_end
        for j in range(header_end + 1, len(structural)):
            text = structural[j]
            if not text.strip():
                continue
            if len(text) - len(text.lstrip()) <= indent and not text.lstrip().startswith(")"):
                break
            end = j
        if end == header_end and close == len(joined) - 1 and not sline[m.end() - 1:].strip().endswith(":"):
            # header with nothing after it and no body
            if ":" not in joined[close:]:
                _warn(warnings, f"python: missing body for {name!r} at line {i + 1}")
                continue
        if end < i:
            _warn(warnings, f"python: inconsistent indentation for {name!r} at line {i + 1}")
            continue
        spans.append(
            FunctionSpan(
                name=name,
                n_params=_count_params(joined[1:close]),
                start_line=i,
                end_line=end,
                body_lines=lines[i:end + 1],
            )
        )

    spans.sort(key=lambda s: (s.start_line, s.end_line))
    return spans
