from .commits import (
    BUGFIX_KEYWORDS,
    CommitRecord,
    FileChange,
    MiningError,
    commit_from_record,
    commit_to_record,
    is_bugfix_commit,
    read_commit_export,
    write_commit_export,
)
from .extract import FunctionSpan, extract_functions
from .linediff import diff_lines, normalize_line
from .pipeline import MineStats, build_samples, pair_functions

__all__ = [
    "BUGFIX_KEYWORDS",
    "CommitRecord",
    "FileChange",
    "FunctionSpan",
    "MineStats",
    "MiningError",
    "build_samples",
    "commit_from_record",
    "commit_to_record",
    "diff_lines",
    "extract_functions",
    "is_bugfix_commit",
    "normalize_line",
    "pair_functions",
    "read_commit_export",
    "write_commit_export",
]
