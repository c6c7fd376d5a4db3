"""The three task losses and their joint sum.

Detection and localization are binary cross-entropies on the encoder heads;
repair is the mean per-token cross-entropy of teacher-forced decoding.
Masked-out objectives contribute exactly zero loss and zero gradient, and
the total is always the plain sum of the three components.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..corpus.encoding import Batch
from .config import ModelConfig
from .network import (
    Params,
    decoder_bwd,
    decoder_fwd,
    detect_logits,
    detect_logits_bwd,
    encoder_bwd,
    encoder_fwd,
    localize_logits,
    localize_logits_bwd,
    sigmoid,
    zero_grads,
)

#: The three objectives: function-level detection, line-level localization,
#: sequence-to-sequence repair.
ALL_OBJECTIVES = frozenset("DLR")


def parse_objectives(spec) -> frozenset:
    """Normalize an objective mask ('DLR', iterable of letters, ...)."""
    mask = frozenset(str(c).upper() for c in spec)
    if not mask:
        raise ValueError("objective mask must not be empty")
    unknown = mask - ALL_OBJECTIVES
    if unknown:
        raise ValueError(f"unknown objectives: {sorted(unknown)}")
    return mask


@dataclass
class LossBundle:
    detect_loss: float
    localize_loss: float
    repair_loss: float
    total: float

    def to_dict(self) -> dict:
        return {
            "detect": self.detect_loss,
            "localize": self.localize_loss,
            "repair": self.repair_loss,
            "total": self.total,
        }

    def finite(self) -> bool:
        return all(
            np.isfinite(v)
            for v in (self.detect_loss, self.localize_loss, self.repair_loss)
        )

    def nonfinite_components(self) -> list[str]:
        return [
            name
            for name, v in (
                ("detect", self.detect_loss),
                ("localize", self.localize_loss),
                ("repair", self.repair_loss),
            )
            if not np.isfinite(v)
        ]


def _bundle(detect: float, localize: float, repair: float) -> LossBundle:
    detect = float(detect)
    localize = float(localize)
    repair = float(repair)
    return LossBundle(detect, localize, repair, detect + localize + repair)


def bce_with_logits(z: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean binary cross-entropy and its gradient w.r.t. the logits."""
    per = np.maximum(z, 0.0) - z * y + np.log1p(np.exp(-np.abs(z)))
    grad = (sigmoid(z) - y) / z.size
    return float(per.mean(dtype=np.float64)), grad.astype(z.dtype)


def token_ce_with_logits(
    logits: np.ndarray, targets: np.ndarray, mask: np.ndarray
) -> tuple[float, np.ndarray]:
    """Mean cross-entropy over non-pad target positions, plus d(loss)/d(logits)."""
    b, t, v = logits.shape
    flat = logits.reshape(-1, v)
    m = logits.max(axis=-1, keepdims=True)
    ex = np.exp(logits - m)
    denom = ex.sum(axis=-1, keepdims=True)
    logz = (m + np.log(denom)).reshape(b, t)
    gold = np.take_along_axis(flat, targets.reshape(-1, 1), axis=1).reshape(b, t)
    n_tok = mask.sum()
    if n_tok == 0:
        return 0.0, np.zeros_like(logits)
    loss = float((((logz - gold) * mask).sum(dtype=np.float64)) / n_tok)
    grad = (ex / denom).astype(logits.dtype)
    g2 = grad.reshape(-1, v)
    g2[np.arange(b * t), targets.reshape(-1)] -= 1.0
    grad *= (mask / n_tok)[..., None]
    return loss, grad


def _forward(
    params: Params,
    cfg: ModelConfig,
    batch: Batch,
    objectives: frozenset,
    train: bool,
    rng: np.random.Generator | None,
):
    enc_out, enc_cache = encoder_fwd(params, cfg, batch.src, batch.src_mask, train, rng)

    detect_loss = 0.0
    localize_loss = 0.0
    repair_loss = 0.0
    d_grad = l_grad = r_grad = None
    d_cache = l_cache = dec_cache = None

    if "D" in objectives:
        z, d_cache = detect_logits(params, enc_out, batch.last_idx)
        detect_loss, d_grad = bce_with_logits(z, batch.labels.astype(z.dtype))
    if "L" in objectives:
        if batch.sep_rows.size == 0:
            raise ValueError("batch has no sentinel positions: malformed examples")
        z, l_cache = localize_logits(params, enc_out, batch.sep_rows, batch.sep_cols)
        localize_loss, l_grad = bce_with_logits(z, batch.sep_labels.astype(z.dtype))
    if "R" in objectives:
        logits, dec_cache = decoder_fwd(
            params, cfg, batch.tgt_in, enc_out, batch.src_mask, train, rng
        )
        repair_loss, r_grad = token_ce_with_logits(
            logits, batch.tgt_out, batch.tgt_mask.astype(logits.dtype)
        )

    bundle = _bundle(detect_loss, localize_loss, repair_loss)
    ctx = (enc_out, enc_cache, d_grad, d_cache, l_grad, l_cache, r_grad, dec_cache)
    return bundle, ctx


def compute_losses(
    params: Params,
    cfg: ModelConfig,
    batch: Batch,
    objectives="DLR",
    train: bool = False,
    rng: np.random.Generator | None = None,
) -> LossBundle:
    objectives = parse_objectives(objectives)
    bundle, _ = _forward(params, cfg, batch, objectives, train, rng)
    return bundle


def loss_and_grads(
    params: Params,
    cfg: ModelConfig,
    batch: Batch,
    objectives="DLR",
    train: bool = False,
    rng: np.random.Generator | None = None,
) -> tuple[LossBundle, dict]:
    """Joint loss plus gradients for every parameter (zeros for untouched ones)."""
    objectives = parse_objectives(objectives)
    bundle, ctx = _forward(params, cfg, batch, objectives, train, rng)
    enc_out, enc_cache, d_grad, d_cache, l_grad, l_cache, r_grad, dec_cache = ctx

    grads: dict = {}
    g_enc = np.zeros_like(enc_out)
    if r_grad is not None:
        g_enc += decoder_bwd(params, cfg, grads, dec_cache, r_grad)
    if d_grad is not None:
        g_enc += detect_logits_bwd(
            params, grads, enc_out.shape, batch.last_idx, d_cache, d_grad
        )
    if l_grad is not None:
        g_enc += localize_logits_bwd(
            params, grads, enc_out.shape, batch.sep_rows, batch.sep_cols, l_cache, l_grad
        )
    encoder_bwd(params, cfg, grads, enc_cache, g_enc)

    full = zero_grads(params)
    full.update(grads)
    return bundle, full
