"""Shared fixtures: tiny models, random batches, and the finite-difference
gradient checker."""

from __future__ import annotations

import numpy as np

from codemend.corpus.encoding import Batch
from codemend.model import ModelConfig, compute_losses, init_parameters


def tiny_config(**overrides) -> ModelConfig:
    kwargs = dict(
        vocab_size=23,
        model_dim=16,
        num_heads=2,
        ffn_dim=24,
        num_encoder_layers=2,
        num_decoder_layers=2,
        max_source_len=32,
        max_target_len=32,
        dropout=0.0,
        dtype="float64",
        seed=0,
    )
    kwargs.update(overrides)
    return ModelConfig(**kwargs)


def tiny_params(cfg: ModelConfig, seed: int = 0, live_heads: bool = True) -> dict:
    rng = np.random.default_rng(seed)
    params = init_parameters(cfg, rng)
    if live_heads:  # heads init to zero; give them signal for gradient tests
        for name in ("detect.w", "detect.b", "localize.w", "localize.b"):
            params[name] = rng.normal(0.0, 0.1, params[name].shape).astype(cfg.np_dtype)
    return params


def random_batch(cfg: ModelConfig, rng: np.random.Generator, bsz: int = 3) -> Batch:
    """A structurally valid random batch: padded sources with sentinel
    positions, labels, and BOS/EOS-framed targets."""
    dt = cfg.np_dtype
    pad, bos, eos, sep = 0, 1, 2, 4
    s_len = int(rng.integers(8, min(14, cfg.max_source_len)))
    t_len = int(rng.integers(4, min(10, cfg.max_target_len - 1)))

    src = np.zeros((bsz, s_len), dtype=np.int64)
    src_mask = np.zeros((bsz, s_len), dtype=dt)
    last_idx = np.zeros(bsz, dtype=np.int64)
    sep_rows, sep_cols, sep_labels = [], [], []
    sep_counts = np.zeros(bsz, dtype=np.int64)
    labels = np.zeros(bsz, dtype=dt)

    for i in range(bsz):
        n = int(rng.integers(5, s_len + 1))
        row = rng.integers(5, cfg.vocab_size, size=n)
        n_lines = int(rng.integers(1, 4))
        positions = sorted(rng.choice(np.arange(1, n), size=min(n_lines, n - 1), replace=False))
        if not positions or positions[-1] != n - 1:
            positions.append(n - 1)
        for p in positions:
            row[p] = sep
        line_lab = rng.integers(0, 2, size=len(positions))
        labels[i] = 1.0 if line_lab.any() else 0.0
        src[i, :n] = row
        src_mask[i, :n] = 1
        last_idx[i] = n - 1
        sep_rows.extend([i] * len(positions))
        sep_cols.extend(positions)
        sep_labels.extend(line_lab.tolist())
        sep_counts[i] = len(positions)

    tgt = rng.integers(5, cfg.vocab_size, size=(bsz, t_len))
    tgt_in = tgt.copy()
    tgt_in[:, 0] = bos
    tgt_out = np.roll(tgt, -1, axis=1)
    tgt_out[:, -1] = eos
    tgt_mask = np.ones((bsz, t_len), dtype=dt)
    for i in range(bsz):
        cut = int(rng.integers(2, t_len + 1))
        tgt_mask[i, cut:] = 0
        tgt_in[i, cut:] = pad
        tgt_out[i, cut:] = pad
        tgt_out[i, cut - 1] = eos

    return Batch(
        src=src,
        src_mask=src_mask,
        last_idx=last_idx,
        labels=labels,
        sep_rows=np.asarray(sep_rows, dtype=np.int64),
        sep_cols=np.asarray(sep_cols, dtype=np.int64),
        sep_labels=np.asarray(sep_labels, dtype=dt),
        sep_counts=sep_counts,
        tgt_in=tgt_in,
        tgt_out=tgt_out,
        tgt_mask=tgt_mask,
    )


def finite_difference_check(
    params: dict,
    cfg: ModelConfig,
    batch: Batch,
    objectives: str,
    grads: dict,
    attr: str,
    n_coords: int = 60,
    h: float = 1e-5,
    seed: int = 1,
) -> tuple[int, float]:
    """Compare analytic gradients against central finite differences on
    randomly sampled coordinates.

    Relative error uses a small absolute floor (1e-5): below it, central
    differences are dominated by float64 cancellation noise and cannot
    resolve the comparison.  Returns (coordinates checked, worst error).
    """
    crng = np.random.default_rng(seed)
    names = sorted(params)
    worst = 0.0
    checked = 0
    while checked < n_coords:
        name = names[int(crng.integers(len(names)))]
        arr = params[name]
        idx = int(crng.integers(arr.size))
        orig = arr.flat[idx]
        arr.flat[idx] = orig + h
        lp = getattr(compute_losses(params, cfg, batch, objectives), attr)
        arr.flat[idx] = orig - h
        lm = getattr(compute_losses(params, cfg, batch, objectives), attr)
        arr.flat[idx] = orig
        fd = (lp - lm) / (2.0 * h)
        an = float(grads[name].flat[idx])
        rel = abs(fd - an) / max(abs(fd), abs(an), 1e-5)
        worst = max(worst, rel)
        checked += 1
    return checked, worst
