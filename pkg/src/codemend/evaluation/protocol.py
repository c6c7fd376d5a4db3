"""Model evaluation protocols: per-task metrics, the staged
detect -> localize -> repair evaluation, and the per-pattern breakdown."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..corpus.bpe import Tokenizer
from ..corpus.encoding import build_example, pad_batch
from ..corpus.sample import DebugSample
from ..model.config import ModelConfig
from ..model.decoding import ModelStepper, beam_search_steps, detect_via_repair
from ..model.losses import Params
from ..model.network import (
    detect_logits,
    encoder_fwd,
    localize_logits,
    rank_lines,
    sigmoid,
)
from .metrics import (
    MetricConfig,
    detection_metrics,
    localization_report,
    repair_metrics,
)
from .report import MetricsReport

log = logging.getLogger(__name__)


@dataclass
class SamplePrediction:
    sample: DebugSample
    detect_prob: float
    pred_buggy: bool
    ranking: list[int] | None = None     # over kept (non-truncated) lines
    buggy_lines: set = field(default_factory=set)
    repair_text: str | None = None


def predict_samples(
    params: Params,
    cfg: ModelConfig,
    tok: Tokenizer,
    samples: list[DebugSample],
    metric_cfg: MetricConfig | None = None,
    batch_size: int = 16,
    repair_for_all: bool = False,
) -> tuple[list[SamplePrediction], int]:
    """Run the model over samples; repairs are decoded for buggy samples
    (for every sample when repair_for_all, e.g. repair-as-detector mode).

    Returns (predictions, number of degenerate samples skipped).
    """
    metric_cfg = metric_cfg or MetricConfig()
    built = []
    skipped = 0
    for s in samples:
        ex = build_example(s, tok, cfg.max_source_len, cfg.max_target_len)
        if ex.degenerate:
            skipped += 1
            continue
        built.append((s, ex))

    preds: list[SamplePrediction] = []
    for i in range(0, len(built), batch_size):
        chunk = built[i:i + batch_size]
        batch = pad_batch([ex for _, ex in chunk], tok.pad_id)
        enc_out, _ = encoder_fwd(params, cfg, batch.src, batch.src_mask)
        z, _ = detect_logits(params, enc_out, batch.last_idx)
        probs = sigmoid(z)
        zl, _ = localize_logits(params, enc_out, batch.sep_rows, batch.sep_cols)
        line_probs = sigmoid(zl)
        offset = 0
        for (s, ex), prob, count in zip(chunk, probs, batch.sep_counts):
            scores = line_probs[offset:offset + count]
            offset += count
            preds.append(
                SamplePrediction(
                    sample=s,
                    detect_prob=float(prob),
                    pred_buggy=float(prob) > metric_cfg.threshold,
                    ranking=rank_lines(scores),
                    buggy_lines={j for j, l in enumerate(ex.line_labels) if l},
                )
            )

    for p, (s, ex) in zip(preds, built):
        if not (repair_for_all or s.function_label == 1):
            continue
        ids = np.asarray(ex.input_ids, dtype=np.int64)[None, :]
        mask = np.ones(ids.shape, dtype=cfg.np_dtype)
        enc_out, _ = encoder_fwd(params, cfg, ids, mask)
        stepper = ModelStepper(params, cfg, enc_out, mask)
        beam = beam_search_steps(
            stepper,
            tok.bos_id,
            tok.eos_id,
            metric_cfg.beam_width,
            cfg.max_target_len,
            metric_cfg.length_penalty,
        )
        p.repair_text = tok.decode(beam[0][0]) if beam else ""
    return preds, skipped


def is_single_line_dataset(samples: list[DebugSample]) -> bool:
    buggy = [s for s in samples if s.function_label == 1]
    return bool(buggy) and all(len(s.buggy_line_indices) == 1 for s in buggy)


def per_pattern_breakdown(
    predictions: list[bool], samples: list[DebugSample], min_group: int = 2
) -> dict:
    """Detection F1 within each pattern group; clean and unclassified samples
    share the UNKNOWN bucket; groups smaller than min_group report None."""
    groups: dict[str, list[int]] = {}
    for i, s in enumerate(samples):
        name = s.pattern.value if s.pattern is not None else "UNKNOWN"
        groups.setdefault(name, []).append(i)
    out: dict[str, float | None] = {}
    for name, idxs in groups.items():
        if len(idxs) < min_group:
            out[name] = None
            continue
        f1, _ = detection_metrics(
            [predictions[i] for i in idxs],
            [samples[i].function_label == 1 for i in idxs],
        )
        out[name] = f1
    return out


def end_to_end_eval(
    preds: list[SamplePrediction],
    metric_cfg: MetricConfig,
    single_line: bool,
) -> dict:
    """Staged evaluation: localization and repair are scored only on samples
    the detector flagged (restricted to the truly buggy among them; falsely
    flagged clean samples are counted separately)."""
    detected = [p for p in preds if p.pred_buggy]
    subset = [p for p in detected if p.sample.function_label == 1]
    n_false = len(detected) - len(subset)
    out = {
        "bl": None,
        "pr": None,
        "bl_metric": "mrr@5" if single_line else "map@5",
        "n_detected": len(detected),
        "n_detected_buggy": len(subset),
        "n_false_positives": n_false,
    }
    if not subset:
        log.warning("end-to-end evaluation: detector flagged no truly buggy sample")
        return out
    k = max(metric_cfg.ks)
    loc = localization_report(
        [p.ranking for p in subset], [p.buggy_lines for p in subset], ks=(k,)
    )
    out["bl"] = loc["mrr"][k] if single_line else loc["map"][k]
    hyps = [p.repair_text or "" for p in subset]
    refs = [p.sample.after_text() for p in subset]
    _, bleu = repair_metrics(hyps, refs, metric_cfg.bleu_max_order)
    out["pr"] = bleu
    return out


def evaluate_model(
    params: Params,
    cfg: ModelConfig,
    tok: Tokenizer,
    samples: list[DebugSample],
    metric_cfg: MetricConfig | None = None,
    detection_mode: str = "head",
) -> MetricsReport:
    """Full evaluation: detection, localization, repair, the staged
    end-to-end protocol, and the per-pattern breakdown.

    detection_mode "head" uses the classification head; "repair" derives the
    verdict from whether the generated repair differs from the input.
    """
    if detection_mode not in ("head", "repair"):
        raise ValueError(f"unknown detection mode: {detection_mode!r}")
    metric_cfg = metric_cfg or MetricConfig()
    preds, skipped = predict_samples(
        params, cfg, tok, samples, metric_cfg,
        repair_for_all=detection_mode == "repair",
    )
    if not preds:
        raise ValueError("no usable samples to evaluate")
    kept = [p.sample for p in preds]

    if detection_mode == "repair":
        for p in preds:
            p.pred_buggy = detect_via_repair(p.sample.before_text(), p.repair_text or "")

    labels = [s.function_label == 1 for s in kept]
    verdicts = [p.pred_buggy for p in preds]
    f1, fpr = detection_metrics(verdicts, labels)

    buggy_preds = [p for p in preds if p.sample.function_label == 1]
    localization = {}
    if buggy_preds:
        localization = localization_report(
            [p.ranking for p in buggy_preds],
            [p.buggy_lines for p in buggy_preds],
            ks=metric_cfg.ks,
        )

    repair = {}
    if buggy_preds:
        em, bleu = repair_metrics(
            [p.repair_text or "" for p in buggy_preds],
            [p.sample.after_text() for p in buggy_preds],
            metric_cfg.bleu_max_order,
        )
        repair = {"em": em, "bleu": bleu}

    single = is_single_line_dataset(kept)
    e2e = end_to_end_eval(preds, metric_cfg, single)

    return MetricsReport(
        detection={"f1": f1, "fpr": fpr},
        localization=localization,
        repair=repair,
        end_to_end=e2e,
        per_pattern=per_pattern_breakdown(verdicts, kept),
        counts={
            "samples": len(kept),
            "buggy": sum(labels),
            "skipped_degenerate": skipped,
            "single_line_dataset": single,
            "detection_mode": detection_mode,
        },
    )
