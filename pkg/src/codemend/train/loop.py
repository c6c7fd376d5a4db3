"""Multi-task training: Adam with warmup and gradient clipping, shared
batches over the enabled objectives, validation-based model selection, and
fully resumable checkpoints.

All randomness (batch order, dropout) is derived from (seed, epoch/step), so
resuming from a checkpoint replays exactly the same stream as an
uninterrupted run.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from ..corpus.bpe import Tokenizer
from ..corpus.encoding import Batch, TokenizedExample, build_examples, pad_batch
from ..corpus.sample import DebugSample
from ..evaluation.metrics import detection_metrics, localization_metrics, repair_metrics
from ..model.config import ModelConfig
from ..model.decoding import ModelStepper, greedy_decode
from ..model.losses import LossBundle, loss_and_grads, parse_objectives
from ..model.network import (
    Params,
    detect_logits,
    encoder_fwd,
    init_parameters,
    localize_logits,
    rank_lines,
    sigmoid,
)


class NonFiniteLossError(RuntimeError):
    """Raised when a loss component stops being finite during training."""


@dataclass
class TrainConfig:
    objectives: str = "DLR"
    batch_size: int = 16
    learning_rate: float = 3e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    max_steps: int = 1000
    val_interval: int = 100
    patience: int = 5
    clip_norm: float | None = 1.0
    warmup_steps: int = 100
    lr_decay: str = "linear"  # "linear" (to min_lr_frac over max_steps) or "none"
    min_lr_frac: float = 0.05
    seed: int = 0

    def __post_init__(self) -> None:
        self.objectives = "".join(sorted(parse_objectives(self.objectives)))
        if self.learning_rate < 0:
            raise ValueError("learning rate must be >= 0")
        if self.batch_size < 1 or self.max_steps < 1:
            raise ValueError("batch_size and max_steps must be >= 1")
        if self.lr_decay not in ("linear", "none"):
            raise ValueError(f"unknown lr_decay: {self.lr_decay!r}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TrainState:
    config: TrainConfig
    model_config: ModelConfig
    params: Params
    m: dict
    v: dict
    step: int = 0


def init_train_state(
    config: TrainConfig, model_config: ModelConfig, params: Params | None = None
) -> TrainState:
    if params is None:
        params = init_parameters(model_config)
    return TrainState(
        config=config,
        model_config=model_config,
        params=params,
        m={k: np.zeros_like(v) for k, v in params.items()},
        v={k: np.zeros_like(v) for k, v in params.items()},
    )


def _dropout_rng(seed: int, step: int) -> np.random.Generator:
    return np.random.default_rng([seed, 0xD0, step])


def train_step(state: TrainState, batch: Batch) -> tuple[TrainState, LossBundle]:
    """One Adam step on the joint loss; masked-out heads stay untouched."""
    cfg = state.config
    bundle, grads = loss_and_grads(
        state.params,
        state.model_config,
        batch,
        cfg.objectives,
        train=True,
        rng=_dropout_rng(cfg.seed, state.step),
    )
    if not bundle.finite():
        raise NonFiniteLossError(
            f"non-finite loss component(s) at step {state.step}: "
            f"{', '.join(bundle.nonfinite_components())}"
        )

    if cfg.clip_norm is not None:
        sq = 0.0
        for g in grads.values():
            sq += float(np.vdot(g, g))
        norm = np.sqrt(sq)
        if norm > cfg.clip_norm:
            scale = cfg.clip_norm / norm
            for g in grads.values():
                g *= scale

    t = state.step + 1
    lr = cfg.learning_rate * min(1.0, t / max(1, cfg.warmup_steps))
    if cfg.lr_decay == "linear":
        lr *= max(cfg.min_lr_frac, 1.0 - t / cfg.max_steps)
    b1, b2 = cfg.beta1, cfg.beta2
    bias1 = 1.0 - b1 ** t
    bias2 = 1.0 - b2 ** t
    for name, g in grads.items():
        m = state.m[name]
        v = state.v[name]
        m *= b1
        m += (1.0 - b1) * g
        np.square(g, out=g)  # grads are consumed here; reuse as scratch
        v *= b2
        v += (1.0 - b2) * g
        np.divide(v, bias2, out=g)
        np.sqrt(g, out=g)
        g += cfg.eps
        np.divide(m, g, out=g)
        state.params[name] -= (lr / bias1) * g
    state.step = t
    return state, bundle


# ---------------- deterministic batch stream ----------------

def batch_for_step(
    examples: list[TokenizedExample], config: TrainConfig, step: int, pad_id: int
) -> Batch:
    """The batch at a global step, as a pure function of (examples, seed, step)."""
    n = len(examples)
    per_epoch = max(1, (n + config.batch_size - 1) // config.batch_size)
    epoch, idx = divmod(step, per_epoch)
    perm = np.random.default_rng([config.seed, 0xE0, epoch]).permutation(n)
    chosen = perm[idx * config.batch_size:(idx + 1) * config.batch_size]
    return pad_batch([examples[i] for i in chosen], pad_id)


# ---------------- validation ----------------

def _batched(items: list, size: int):
    for i in range(0, len(items), size):
        yield items[i:i + size]


def validation_metrics(
    params: Params,
    model_cfg: ModelConfig,
    tok: Tokenizer,
    examples: list[TokenizedExample],
    objectives: str,
    batch_size: int = 16,
) -> dict:
    """Mask-dependent validation metrics: detection F1, localization rank@1
    (reciprocal-rank on single-line data, average precision otherwise), and
    greedy-decode exact match for repair."""
    objectives = parse_objectives(objectives)
    out: dict = {}

    probs: list[float] = []
    rankings: list[list[int]] = []
    buggy_sets: list[set[int]] = []
    for chunk in _batched(examples, batch_size):
        batch = pad_batch(chunk, tok.pad_id)
        enc_out, _ = encoder_fwd(params, model_cfg, batch.src, batch.src_mask)
        z, _ = detect_logits(params, enc_out, batch.last_idx)
        probs.extend(float(p) for p in sigmoid(z))
        zl, _ = localize_logits(params, enc_out, batch.sep_rows, batch.sep_cols)
        pl = sigmoid(zl)
        offset = 0
        for e, count in zip(chunk, batch.sep_counts):
            if e.function_label == 1:
                scores = pl[offset:offset + count]
                rankings.append(rank_lines(scores))
                buggy_sets.append({i for i, l in enumerate(e.line_labels) if l})
            offset += count

    if "D" in objectives:
        preds = [p > 0.5 for p in probs]
        f1, _ = detection_metrics(preds, [e.function_label == 1 for e in examples])
        out["detection_f1"] = f1
    if "L" in objectives and rankings:
        single_line = all(len(b) == 1 for b in buggy_sets)
        mrr, map_, _ = localization_metrics(rankings, buggy_sets, k=1)
        out["localization_rank1"] = mrr if single_line else map_
    if "R" in objectives:
        hyps: list[str] = []
        refs: list[str] = []
        for e in examples:
            if e.function_label != 1:
                continue
            ids = np.asarray(e.input_ids, dtype=np.int64)[None, :]
            mask = np.ones(ids.shape, dtype=model_cfg.np_dtype)
            enc_out, _ = encoder_fwd(params, model_cfg, ids, mask)
            stepper = ModelStepper(params, model_cfg, enc_out, mask)
            tokens, _ = greedy_decode(
                stepper, tok.bos_id, tok.eos_id, model_cfg.max_target_len
            )
            hyps.append(tok.decode(tokens))
            refs.append(tok.decode(e.target_ids))
        em, _ = repair_metrics(hyps, refs) if hyps else (0.0, 0.0)
        out["repair_em"] = em

    out["score"] = float(np.mean([v for v in out.values()])) if out else 0.0
    return out


# ---------------- fit ----------------

@dataclass
class FitCheckpoint:
    """Best-so-far training snapshot; reloading and resuming replays the same
    loss sequence as an uninterrupted run."""

    model_config: ModelConfig
    train_config: TrainConfig
    params: Params
    m: dict
    v: dict
    step: int
    best_val_score: float
    best_val_metrics: dict = field(default_factory=dict)
    history: list = field(default_factory=list)


def save_train_state(path: str, state: TrainState, extra: dict | None = None) -> None:
    from ..model.checkpoint import save_model

    meta = {"train_config": state.config.to_dict(), "step": state.step}
    meta.update(extra or {})
    save_model(
        path,
        state.model_config,
        state.params,
        extra=meta,
        opt_state={"m": state.m, "v": state.v, "step": state.step},
    )


def load_train_state(path: str) -> TrainState:
    from ..model.checkpoint import load_model

    model_config, params, extra, opt_state = load_model(path)
    config = TrainConfig(**extra["train_config"])
    if opt_state is None:
        raise ValueError(f"{path}: checkpoint has no optimizer state; cannot resume")
    return TrainState(
        config=config,
        model_config=model_config,
        params=params,
        m=opt_state["m"],
        v=opt_state["v"],
        step=int(opt_state["step"]),
    )


def save_fit_checkpoint(path: str, ckpt: FitCheckpoint) -> None:
    from ..model.checkpoint import save_model

    save_model(
        path,
        ckpt.model_config,
        ckpt.params,
        extra={
            "train_config": ckpt.train_config.to_dict(),
            "step": ckpt.step,
            "best_val_score": ckpt.best_val_score,
            "best_val_metrics": ckpt.best_val_metrics,
            "history": ckpt.history,
        },
        opt_state={"m": ckpt.m, "v": ckpt.v, "step": ckpt.step},
    )


def load_fit_checkpoint(path: str) -> FitCheckpoint:
    from ..model.checkpoint import load_model

    model_config, params, extra, opt_state = load_model(path)
    return FitCheckpoint(
        model_config=model_config,
        train_config=TrainConfig(**extra["train_config"]),
        params=params,
        m=opt_state["m"] if opt_state else {},
        v=opt_state["v"] if opt_state else {},
        step=int(extra["step"]),
        best_val_score=float(extra["best_val_score"]),
        best_val_metrics=extra.get("best_val_metrics", {}),
        history=extra.get("history", []),
    )


def fit(
    config: TrainConfig,
    model_config: ModelConfig,
    tok: Tokenizer,
    train_samples: list[DebugSample],
    val_samples: list[DebugSample],
    log_path: str | None = None,
    quiet: bool = True,
) -> FitCheckpoint:
    """Train until max_steps or early stop; returns the best checkpoint by
    validation score (mean of the enabled tasks' metrics)."""
    if not train_samples or not val_samples:
        raise ValueError("training and validation sets must be non-empty")
    train_examples, _ = build_examples(
        train_samples, tok, model_config.max_source_len, model_config.max_target_len
    )
    val_examples, _ = build_examples(
        val_samples, tok, model_config.max_source_len, model_config.max_target_len
    )
    if not train_examples or not val_examples:
        raise ValueError("all samples were degenerate after tokenization")

    state = init_train_state(config, model_config)
    best = FitCheckpoint(
        model_config=model_config,
        train_config=config,
        params={k: v.copy() for k, v in state.params.items()},
        m={k: v.copy() for k, v in state.m.items()},
        v={k: v.copy() for k, v in state.v.items()},
        step=0,
        best_val_score=-np.inf,
    )
    history: list[dict] = []
    log_file = open(log_path, "w", encoding="utf-8") if log_path else None
    bad_validations = 0
    try:
        while state.step < config.max_steps:
            batch = batch_for_step(train_examples, config, state.step, tok.pad_id)
            state, bundle = train_step(state, batch)
            if state.step % config.val_interval == 0 or state.step == config.max_steps:
                metrics = validation_metrics(
                    state.params, model_config, tok, val_examples, config.objectives
                )
                event = {
                    "step": state.step,
                    "losses": bundle.to_dict(),
                    "val_metrics": metrics,
                }
                history.append(event)
                if log_file:
                    log_file.write(json.dumps(event, sort_keys=True) + "\n")
                    log_file.flush()
                if not quiet:
                    print(json.dumps(event, sort_keys=True))
                if metrics["score"] > best.best_val_score:
                    best.best_val_score = metrics["score"]
                    best.best_val_metrics = metrics
                    best.step = state.step
                    best.params = {k: v.copy() for k, v in state.params.items()}
                    best.m = {k: v.copy() for k, v in state.m.items()}
                    best.v = {k: v.copy() for k, v in state.v.items()}
                    bad_validations = 0
                else:
                    bad_validations += 1
                    if bad_validations > config.patience:
                        break
    finally:
        if log_file:
            log_file.close()
    best.history = history
    return best
