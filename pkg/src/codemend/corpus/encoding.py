"""Line-sentinel input encoding and model-ready example construction.

Each source line is terminated by a sentinel marker so the encoder exposes
one hidden state per line for the localization head.  Truncation to the
source budget drops whole trailing lines, never splitting a line, so the
sentinel/label alignment always survives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bpe import Tokenizer
from .sample import DebugSample

SENTINEL = "[SEP]"


class EncodingError(ValueError):
    pass


def insert_line_sentinels(lines: list[str]) -> str:
    """Join lines into one string with a sentinel marker ending every line."""
    if not lines:
        raise EncodingError("cannot encode an empty line list")
    for i, line in enumerate(lines):
        if SENTINEL in line:
            raise EncodingError(
                f"line {i} already contains the sentinel marker (corpus contamination)"
            )
    return (" " + SENTINEL + " ").join(lines) + " " + SENTINEL


def split_line_sentinels(text: str) -> list[str]:
    """Inverse of insert_line_sentinels."""
    parts = text.split(SENTINEL)
    if len(parts) < 2:
        raise EncodingError("no sentinel markers in text")
    lines = []
    for i, part in enumerate(parts[:-1]):
        if i > 0 and part.startswith(" "):
            part = part[1:]
        if part.endswith(" "):
            part = part[:-1]
        lines.append(part)
    return lines


@dataclass
class TokenizedExample:
    """One model-ready sample: source ids with sentinel positions, aligned
    line labels, and the (possibly empty) repair target."""

    input_ids: list[int]
    sep_positions: list[int]
    line_labels: list[int]
    target_ids: list[int]
    function_label: int
    degenerate: bool = False
    dropped_lines: int = 0

    def check(self, sep_id: int) -> None:
        assert len(self.sep_positions) == len(self.line_labels)
        for p in self.sep_positions:
            assert self.input_ids[p] == sep_id


def build_example(
    sample: DebugSample,
    tok: Tokenizer,
    max_source_len: int = 512,
    max_target_len: int = 512,
) -> TokenizedExample:
    """Sentinel insertion, tokenization, then whole-line-aware truncation.

    A buggy sample whose positive lines were all truncated away (or that lost
    every line) is flagged degenerate; callers normally skip and count those.
    """
    text = insert_line_sentinels(sample.before_lines)
    lines = split_line_sentinels(text)

    input_ids: list[int] = []
    sep_positions: list[int] = []
    line_labels: list[int] = []
    kept = 0
    for line, label in zip(lines, sample.line_labels):
        unit = tok.encode(line) + [tok.sep_id]
        if len(input_ids) + len(unit) > max_source_len:
            break
        input_ids.extend(unit)
        sep_positions.append(len(input_ids) - 1)
        line_labels.append(label)
        kept += 1

    dropped = len(lines) - kept
    degenerate = kept == 0 or (
        sample.function_label == 1 and not any(line_labels)
    )

    if sample.function_label == 1:
        target_text = "\n".join(sample.after_lines)
        body = tok.encode(target_text)[: max(0, max_target_len - 2)]
        target_ids = [tok.bos_id] + body + [tok.eos_id]
    else:
        target_ids = [tok.bos_id, tok.eos_id]

    return TokenizedExample(
        input_ids=input_ids,
        sep_positions=sep_positions,
        line_labels=line_labels,
        target_ids=target_ids,
        function_label=sample.function_label,
        degenerate=degenerate,
        dropped_lines=dropped,
    )


def build_examples(
    samples: list[DebugSample],
    tok: Tokenizer,
    max_source_len: int = 512,
    max_target_len: int = 512,
) -> tuple[list[TokenizedExample], int]:
    """Build examples for a sample list, skipping degenerate ones.

    Returns (examples, number skipped).
    """
    out: list[TokenizedExample] = []
    skipped = 0
    for s in samples:
        ex = build_example(s, tok, max_source_len, max_target_len)
        if ex.degenerate:
            skipped += 1
        else:
            out.append(ex)
    return out, skipped


@dataclass
class Batch:
    """Padded arrays for a list of TokenizedExamples.

    Localization labels are flattened across the batch: sentinel j of the
    batch lives at (sep_rows[j], sep_cols[j]) in `src` and carries
    sep_labels[j]; sep_counts gives the per-example sentinel counts.
    """

    src: np.ndarray        # [B, S] int64
    src_mask: np.ndarray   # [B, S] 1.0 on real tokens
    last_idx: np.ndarray   # [B] final non-pad position
    labels: np.ndarray     # [B] function-level 0/1
    sep_rows: np.ndarray   # [N] example index per sentinel
    sep_cols: np.ndarray   # [N] position per sentinel
    sep_labels: np.ndarray  # [N] line-level 0/1
    sep_counts: np.ndarray  # [B]
    tgt_in: np.ndarray     # [B, T]
    tgt_out: np.ndarray    # [B, T]
    tgt_mask: np.ndarray   # [B, T]

    @property
    def size(self) -> int:
        return self.src.shape[0]


def pad_batch(examples: list[TokenizedExample], pad_id: int) -> Batch:
    if not examples:
        raise EncodingError("cannot build an empty batch")
    bsz = len(examples)
    s_len = max(len(e.input_ids) for e in examples)
    t_len = max(len(e.target_ids) for e in examples) - 1

    src = np.full((bsz, s_len), pad_id, dtype=np.int64)
    src_mask = np.zeros((bsz, s_len), dtype=np.float32)
    last_idx = np.zeros(bsz, dtype=np.int64)
    labels = np.zeros(bsz, dtype=np.float32)
    tgt_in = np.full((bsz, t_len), pad_id, dtype=np.int64)
    tgt_out = np.full((bsz, t_len), pad_id, dtype=np.int64)
    tgt_mask = np.zeros((bsz, t_len), dtype=np.float32)
    sep_rows: list[int] = []
    sep_cols: list[int] = []
    sep_labels: list[float] = []
    sep_counts = np.zeros(bsz, dtype=np.int64)

    for i, e in enumerate(examples):
        n = len(e.input_ids)
        src[i, :n] = e.input_ids
        src_mask[i, :n] = 1.0
        last_idx[i] = n - 1
        labels[i] = e.function_label
        sep_rows.extend([i] * len(e.sep_positions))
        sep_cols.extend(e.sep_positions)
        sep_labels.extend(e.line_labels)
        sep_counts[i] = len(e.sep_positions)
        t = len(e.target_ids) - 1
        tgt_in[i, :t] = e.target_ids[:-1]
        tgt_out[i, :t] = e.target_ids[1:]
        tgt_mask[i, :t] = 1.0

    return Batch(
        src=src,
        src_mask=src_mask,
        last_idx=last_idx,
        labels=labels,
        sep_rows=np.asarray(sep_rows, dtype=np.int64),
        sep_cols=np.asarray(sep_cols, dtype=np.int64),
        sep_labels=np.asarray(sep_labels, dtype=np.float32),
        sep_counts=sep_counts,
        tgt_in=tgt_in,
        tgt_out=tgt_out,
        tgt_mask=tgt_mask,
    )
