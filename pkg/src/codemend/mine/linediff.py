"""Longest-common-subsequence line diff with whitespace-normalized matching."""

from __future__ import annotations


def normalize_line(line: str) -> str:
    """Collapse whitespace runs and strip ends; comparison key for diffing."""
    return " ".join(line.split())


def diff_lines(
    before_body: list[str], after_body: list[str]
) -> tuple[list[int], list[int]]:
    """Indices of lines on each side that fall outside the LCS alignment.

    Matching is whitespace-normalized; the backtrack is deterministic (ties
    prefer consuming a before-line first), so fixed inputs always produce the
    same answer.
    """
    a = [normalize_line(x) for x in before_body]
    b = [normalize_line(x) for x in after_body]
    n, m = len(a), len(b)

    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        row = dp[i]
        prev = dp[i - 1]
        ai = a[i - 1]
        for j in range(1, m + 1):
            if ai == b[j - 1]:
                row[j] = prev[j - 1] + 1
            else:
                row[j] = prev[j] if prev[j] >= row[j - 1] else row[j - 1]

    matched_a = [False] * n
    matched_b = [False] * m
    i, j = n, m
    while i > 0 and j > 0:
        if a[i - 1] == b[j - 1] and dp[i][j] == dp[i - 1][j - 1] + 1:
            matched_a[i - 1] = True
            matched_b[j - 1] = True
            i -= 1
            j -= 1
        elif dp[i - 1][j] >= dp[i][j - 1]:
            i -= 1
        else:
            j -= 1

    changed_before = [k for k in range(n) if not matched_a[k]]
    changed_after = [k for k in range(m) if not matched_b[k]]
    return changed_before, changed_after
