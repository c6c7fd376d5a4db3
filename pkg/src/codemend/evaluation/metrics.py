"""Detection, line-retrieval, and repair metrics.

Localization is scored as retrieval over a ranked line list: reciprocal rank
and average precision truncated at k, plus a line-level false-positive rate.
Average precision is normalized by the sample's total relevant count, which
makes every @k metric monotonically non-decreasing in k (checked at runtime
by the report builders).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass


class MetricError(ValueError):
    pass


@dataclass
class MetricConfig:
    ks: tuple[int, ...] = (1, 5)
    beam_width: int = 4
    bleu_max_order: int = 4
    threshold: float = 0.5
    length_penalty: float = 0.7

    def __post_init__(self) -> None:
        if not self.ks or any(k <= 0 for k in self.ks):
            raise MetricError("retrieval k values must be positive")
        if not 0.0 < self.threshold < 1.0:
            raise MetricError("detection threshold must lie in (0, 1)")
        if self.beam_width < 1 or self.bleu_max_order < 1:
            raise MetricError("beam width and BLEU order must be >= 1")


# ---------------- detection ----------------

def detection_metrics(predictions, labels) -> tuple[float, float | None]:
    """F1 of the buggy class and FPR = FP / (FP + TN).

    FPR is None when there are no actual non-buggy items; F1 is 0 by
    convention when there are no true positives.
    """
    predictions = [bool(p) for p in predictions]
    labels = [bool(l) for l in labels]
    if not predictions or len(predictions) != len(labels):
        raise MetricError("predictions and labels must be equal-length and non-empty")
    tp = sum(p and l for p, l in zip(predictions, labels))
    fp = sum(p and not l for p, l in zip(predictions, labels))
    fn = sum(not p and l for p, l in zip(predictions, labels))
    tn = sum(not p and not l for p, l in zip(predictions, labels))
    f1 = 2 * tp / (2 * tp + fp + fn) if (2 * tp + fp + fn) else 0.0
    fpr = fp / (fp + tn) if (fp + tn) else None
    return f1, fpr


# ---------------- localization ----------------

def _check_ranking(ranking, buggy: set) -> None:
    if not buggy:
        raise MetricError("every sample must have a non-empty buggy line set")
    if len(set(ranking)) != len(ranking):
        raise MetricError(f"ranking contains duplicates: {ranking}")
    n = len(ranking)
    if any(not 0 <= r < n for r in ranking) or any(not 0 <= b < n for b in buggy):
        raise MetricError("ranking must be a full permutation of the sample's lines")


def reciprocal_rank_at_k(ranking, buggy: set, k: int) -> float:
    """1/rank of the first relevant line within the top-k, else 0."""
    for pos, line in enumerate(ranking[:k], start=1):
        if line in buggy:
            return 1.0 / pos
    return 0.0


def average_precision_at_k(ranking, buggy: set, k: int) -> float:
    """Precision at each relevant hit in the top-k, averaged over the
    sample's total relevant count."""
    hits = 0
    acc = 0.0
    for pos, line in enumerate(ranking[:k], start=1):
        if line in buggy:
            hits += 1
            acc += hits / pos
    return acc / len(buggy)


def false_positive_rate_at_k(ranking, buggy: set, k: int) -> float | None:
    """Non-buggy lines retrieved in the top-k over all non-buggy lines;
    None when the sample has no non-buggy line."""
    n_clean = len(ranking) - len(buggy)
    if n_clean == 0:
        return None
    fp = sum(1 for line in ranking[:k] if line not in buggy)
    return fp / n_clean


def localization_metrics(rankings, buggy_line_sets, k: int) -> tuple[float, float, float | None]:
    """(MRR@k, MAP@k, FPR@k) averaged over samples.

    Samples without any non-buggy line are excluded from the FPR average;
    FPR is None when no sample qualifies.
    """
    if not rankings or len(rankings) != len(buggy_line_sets):
        raise MetricError("rankings and buggy sets must be equal-length and non-empty")
    mrr_acc = 0.0
    map_acc = 0.0
    fpr_acc = 0.0
    fpr_n = 0
    for ranking, buggy in zip(rankings, buggy_line_sets):
        buggy = set(buggy)
        _check_ranking(ranking, buggy)
        mrr_acc += reciprocal_rank_at_k(ranking, buggy, k)
        map_acc += average_precision_at_k(ranking, buggy, k)
        fpr = false_positive_rate_at_k(ranking, buggy, k)
        if fpr is not None:
            fpr_acc += fpr
            fpr_n += 1
    n = len(rankings)
    return mrr_acc / n, map_acc / n, (fpr_acc / fpr_n if fpr_n else None)


def localization_report(rankings, buggy_line_sets, ks=(1, 5)) -> dict:
    """MRR/MAP/FPR for every k, with the @k monotonicity checked."""
    out = {"mrr": {}, "map": {}, "fpr": {}}
    for k in sorted(ks):
        mrr, map_, fpr = localization_metrics(rankings, buggy_line_sets, k)
        out["mrr"][k] = mrr
        out["map"][k] = map_
        out["fpr"][k] = fpr
    _check_monotone(out["mrr"], "MRR")
    _check_monotone(out["map"], "MAP")
    _check_monotone(out["fpr"], "FPR")
    return out


def _check_monotone(values: dict, name: str) -> None:
    ks = sorted(values)
    series = [values[k] for k in ks if values[k] is not None]
    for lo, hi in zip(series, series[1:]):
        if hi < lo - 1e-12:
            raise MetricError(f"{name}@k must be non-decreasing in k, got {values}")


# ---------------- repair ----------------

def normalize_ws(text: str) -> str:
    return " ".join(text.split())


def exact_match(hypotheses, references) -> float:
    if len(hypotheses) != len(references):
        raise MetricError("hypotheses and references must be equal-length")
    if not hypotheses:
        return 0.0
    hits = sum(
        normalize_ws(h) == normalize_ws(r) for h, r in zip(hypotheses, references)
    )
    return hits / len(hypotheses)


def corpus_bleu(hypotheses, references, max_order: int = 4) -> float:
    """Corpus-level BLEU over whitespace-tokenized pairs, in [0, 100].

    Standard brevity penalty, no smoothing: any order with zero matches
    (or an empty hypothesis corpus) gives 0.
    """
    if len(hypotheses) != len(references):
        raise MetricError("hypotheses and references must be equal-length")
    matches = [0] * max_order
    totals = [0] * max_order
    hyp_len = 0
    ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        h = hyp.split()
        r = ref.split()
        hyp_len += len(h)
        ref_len += len(r)
        for n in range(1, max_order + 1):
            h_ngrams = Counter(tuple(h[i:i + n]) for i in range(len(h) - n + 1))
            r_ngrams = Counter(tuple(r[i:i + n]) for i in range(len(r) - n + 1))
            totals[n - 1] += max(0, len(h) - n + 1)
            matches[n - 1] += sum(min(c, r_ngrams[g]) for g, c in h_ngrams.items())
    if hyp_len == 0:
        return 0.0
    import math

    log_sum = 0.0
    for m, t in zip(matches, totals):
        if m == 0 or t == 0:
            return 0.0
        log_sum += math.log(m / t) / max_order
    bp = 1.0 if hyp_len > ref_len else math.exp(1.0 - ref_len / hyp_len)
    return 100.0 * bp * math.exp(log_sum)


def repair_metrics(hypotheses, references, max_order: int = 4) -> tuple[float, float]:
    """(exact match after whitespace normalization, corpus BLEU x100)."""
    return exact_match(hypotheses, references), corpus_bleu(hypotheses, references, max_order)
