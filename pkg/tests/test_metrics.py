"""Metric correctness against independent oracles: confusion-matrix detection,
exhaustive-enumeration line retrieval, and a second BLEU implementation."""

import math
import random
from collections import Counter
from fractions import Fraction
from itertools import combinations, permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codemend.evaluation import (
    MetricConfig,
    MetricError,
    corpus_bleu,
    detection_metrics,
    exact_match,
    localization_metrics,
    localization_report,
    repair_metrics,
)


# ---------------- detection ----------------

def test_detection_hand_oracle_example():
    f1, fpr = detection_metrics([1, 1, 0, 0], [1, 0, 1, 0])
    assert f1 == pytest.approx(0.5)    # TP=1 FP=1 FN=1 TN=1
    assert fpr == pytest.approx(0.5)


def test_perfect_predictions():
    f1, fpr = detection_metrics([1, 0, 1], [1, 0, 1])
    assert f1 == 1.0 and fpr == 0.0


def test_all_flagged_half_buggy_gives_full_fpr():
    f1, fpr = detection_metrics([1, 1, 1, 1], [1, 0, 1, 0])
    assert fpr == 1.0


def test_no_actual_negatives_fpr_is_null():
    f1, fpr = detection_metrics([1, 1], [1, 1])
    assert f1 == 1.0 and fpr is None


def test_no_positives_anywhere_f1_zero_by_convention():
    f1, fpr = detection_metrics([0, 0], [0, 0])
    assert f1 == 0.0 and fpr == 0.0


def test_detection_agrees_with_sklearn_on_1000_random_vectors():
    from sklearn.metrics import f1_score

    rng = random.Random(0)
    for _ in range(1000):
        n = rng.randrange(1, 25)
        preds = [rng.random() < 0.5 for _ in range(n)]
        labels = [rng.random() < 0.5 for _ in range(n)]
        f1, fpr = detection_metrics(preds, labels)
        ref_f1 = f1_score(labels, preds, zero_division=0.0)
        assert f1 == pytest.approx(ref_f1, abs=1e-12)
        fp = sum(p and not l for p, l in zip(preds, labels))
        tn = sum(not p and not l for p, l in zip(preds, labels))
        if fp + tn == 0:
            assert fpr is None
        else:
            assert fpr == pytest.approx(fp / (fp + tn), abs=1e-12)


# ---------------- localization ----------------

def oracle_rank_metrics(ranking, buggy, k):
    """Independent brute-force oracle over an explicit ranked list."""
    first = None
    hits = 0
    ap_terms = []
    fp = 0
    for pos, line in enumerate(ranking, start=1):
        rel = line in buggy
        if pos <= k:
            if rel and first is None:
                first = pos
            if rel:
                hits += 1
                ap_terms.append(Fraction(hits, pos))
            else:
                fp += 1
    mrr = Fraction(1, first) if first else Fraction(0)
    ap = sum(ap_terms, Fraction(0)) / len(buggy)
    n_clean = len(ranking) - len(buggy)
    fpr = Fraction(fp, n_clean) if n_clean else None
    return float(mrr), float(ap), (float(fpr) if fpr is not None else None)


def test_mrr_hand_example():
    # ranking [line0, line2, line1] with line2 buggy
    mrr5, _, _ = localization_metrics([[0, 2, 1]], [{2}], k=5)
    mrr1, _, _ = localization_metrics([[0, 2, 1]], [{2}], k=1)
    assert mrr5 == pytest.approx(0.5)
    assert mrr1 == 0.0


def test_map_hand_example():
    # ranking [l0,l1,l2,l3], buggy {l0,l2}: AP = (1/1 + 2/3)/2 = 5/6
    _, ap, _ = localization_metrics([[0, 1, 2, 3]], [{0, 2}], k=5)
    assert ap == pytest.approx(5 / 6)


def test_perfect_top1_everywhere():
    rankings = [[0, 1, 2], [2, 0, 1]]
    buggy = [{0}, {2}]
    mrr, ap, fpr = localization_metrics(rankings, buggy, k=1)
    assert mrr == 1.0 and ap == 1.0 and fpr == 0.0


def test_exhaustive_enumeration_all_rankings_up_to_5_lines():
    """Every permutation of n <= 5 lines x every non-empty buggy subset,
    for k in {1..5}, against the fraction-exact oracle."""
    for n in range(1, 6):
        lines = list(range(n))
        for ranking in permutations(lines):
            for r in range(1, n + 1):
                for buggy in combinations(lines, r):
                    b = set(buggy)
                    for k in (1, 2, 5):
                        mrr, ap, fpr = localization_metrics([list(ranking)], [b], k)
                        omrr, oap, ofpr = oracle_rank_metrics(ranking, b, k)
                        assert abs(mrr - omrr) < 1e-12
                        assert abs(ap - oap) < 1e-12
                        if ofpr is None:
                            assert fpr is None
                        else:
                            assert abs(fpr - ofpr) < 1e-12


def test_single_buggy_line_map_equals_mrr():
    rng = random.Random(1)
    for _ in range(200):
        n = rng.randrange(1, 8)
        ranking = list(range(n))
        rng.shuffle(ranking)
        buggy = {rng.randrange(n)}
        for k in (1, 3, 5):
            mrr, ap, _ = localization_metrics([ranking], [buggy], k)
            assert mrr == pytest.approx(ap, abs=1e-12)


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_monotonicity_in_k_property(data):
    n = data.draw(st.integers(1, 7))
    ranking = data.draw(st.permutations(range(n)))
    buggy = set(data.draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=n)))
    prev = (0.0, 0.0, -1.0)
    for k in range(1, n + 2):
        mrr, ap, fpr = localization_metrics([list(ranking)], [buggy], k)
        assert mrr >= prev[0] - 1e-12
        assert ap >= prev[1] - 1e-12
        if fpr is not None:
            assert fpr >= prev[2] - 1e-12
            prev = (mrr, ap, fpr)
        else:
            prev = (mrr, ap, prev[2])


def test_localization_report_orders_and_checks(recwarn):
    rankings = [[0, 1, 2, 3], [3, 1, 0, 2]]
    buggy = [{1}, {0, 3}]
    rep = localization_report(rankings, buggy, ks=(1, 5))
    assert rep["mrr"][5] >= rep["mrr"][1]
    assert rep["map"][5] >= rep["map"][1]
    assert rep["fpr"][5] >= rep["fpr"][1]


def test_empty_buggy_set_rejected():
    with pytest.raises(MetricError):
        localization_metrics([[0, 1]], [set()], k=1)


def test_sample_without_clean_lines_excluded_from_fpr():
    # one all-buggy sample and one normal one
    _, _, fpr = localization_metrics([[0], [0, 1]], [{0}, {1}], k=1)
    assert fpr == pytest.approx(1.0)  # only the second sample counts; top-1 is clean


# ---------------- repair ----------------

def reference_bleu(hyps, refs, max_order=4):
    """Second independent BLEU: exact Fraction arithmetic, different code path."""
    p_fracs = []
    for n in range(1, max_order + 1):
        match = 0
        total = 0
        for h, r in zip(hyps, refs):
            ht = tuple(h.split())
            rt = tuple(r.split())
            hc = Counter(ht[i:i + n] for i in range(len(ht) - n + 1))
            rc = Counter(rt[i:i + n] for i in range(len(rt) - n + 1))
            match += sum((hc & rc).values())
            total += max(0, len(ht) - n + 1)
        if total == 0 or match == 0:
            return 0.0
        p_fracs.append(Fraction(match, total))
    c = sum(len(h.split()) for h in hyps)
    r = sum(len(rf.split()) for rf in refs)
    if c == 0:
        return 0.0
    bp = 1.0 if c > r else math.exp(1 - r / c)
    geo = math.exp(sum(math.log(float(p)) for p in p_fracs) / max_order)
    return 100.0 * bp * geo


def test_identity_pairs_give_em_1_bleu_100():
    hyps = ["int a = 1; return a;", "x = y + z;"]
    em, bleu = repair_metrics(hyps, list(hyps))
    assert em == 1.0
    assert bleu == pytest.approx(100.0)


def test_all_empty_hypotheses():
    em, bleu = repair_metrics(["", ""], ["a b c d", "e f g h"])
    assert em == 0.0 and bleu == 0.0


def test_empty_reference_nonempty_hypothesis_counts_zero():
    em, _ = repair_metrics(["fix it"], [""])
    assert em == 0.0


def test_short_pair_bleu_matches_reference_implementation():
    # hypothesis shorter than the max n-gram order: both implementations
    # must agree (here: zero 4-gram counts drive BLEU to 0)
    hyps, refs = ["the cat sat"], ["the cat sat down"]
    assert corpus_bleu(hyps, refs) == pytest.approx(reference_bleu(hyps, refs), abs=1e-6)


def test_bleu_agrees_with_independent_implementation_on_100_random_pairs():
    rng = random.Random(3)
    vocab = ["int", "x", "y", "=", "+", "return", ";", "f", "(", ")"]
    for _ in range(100):
        n_pairs = rng.randrange(1, 4)
        hyps, refs = [], []
        for _ in range(n_pairs):
            hyps.append(" ".join(rng.choice(vocab) for _ in range(rng.randrange(0, 14))))
            refs.append(" ".join(rng.choice(vocab) for _ in range(rng.randrange(1, 14))))
        assert corpus_bleu(hyps, refs) == pytest.approx(
            reference_bleu(hyps, refs), abs=1e-6
        )


def test_bleu_permutation_invariant():
    hyps = ["a b c d e", "x y z w v", "p q r s t"]
    refs = ["a b c d f", "x y w z v", "p q r s t"]
    base = corpus_bleu(hyps, refs)
    order = [2, 0, 1]
    assert corpus_bleu([hyps[i] for i in order], [refs[i] for i in order]) == pytest.approx(base)


def test_em_is_on_the_m_over_n_grid():
    hyps = ["a", "b", "c", "d"]
    refs = ["a", "b", "x", "y"]
    em, _ = repair_metrics(hyps, refs)
    assert em == pytest.approx(2 / 4)


def test_em_whitespace_normalization():
    assert exact_match(["int  a =  1;"], ["int a = 1;"]) == 1.0
    assert exact_match(["int a = 1;\n"], ["int a = 1;"]) == 1.0
    assert exact_match(["inta=1;"], ["int a = 1;"]) == 0.0


def test_metric_config_validation():
    with pytest.raises(MetricError):
        MetricConfig(ks=())
    with pytest.raises(MetricError):
        MetricConfig(threshold=1.5)
    with pytest.raises(MetricError):
        MetricConfig(beam_width=0)
