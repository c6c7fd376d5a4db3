"""Shared encoder-decoder network with detection and localization heads.

Pre-norm transformer blocks; the decoder attends to the encoder through
cross-attention.  All forwards return explicit caches so the hand-written
backwards can rebuild exact gradients (verified against finite differences).
"""

from __future__ import annotations

import numpy as np

from .config import ModelConfig
from .layers import (
    NEG_INF,
    accumulate,
    attention_bwd,
    attention_fwd,
    dropout_bwd,
    dropout_fwd,
    embed_bwd,
    embed_fwd,
    ffn_bwd,
    ffn_fwd,
    layer_norm_bwd,
    layer_norm_fwd,
    linear_bwd,
    linear_fwd,
)

Params = dict  # name -> np.ndarray


def init_parameters(config: ModelConfig, rng: np.random.Generator | None = None) -> Params:
    """Random initialization; task heads start at zero so an untrained model
    scores exactly 0.5 everywhere."""
    if rng is None:
        rng = np.random.default_rng(config.seed)
    dt = config.np_dtype
    d, f, v = config.model_dim, config.ffn_dim, config.vocab_size
    n_res = 2 * (config.num_encoder_layers + config.num_decoder_layers)
    res_scale = 1.0 / np.sqrt(max(1, n_res))

    def w(*shape, scale=0.02):
        return (rng.normal(0.0, scale, size=shape)).astype(dt)

    p: Params = {
        "tok_emb": w(v, d),
        "pos_src": w(config.max_source_len, d),
        "pos_tgt": w(config.max_target_len, d),
        "out.w": w(d, v),
        "out.b": np.zeros(v, dtype=dt),
        "detect.w": np.zeros(d, dtype=dt),
        "detect.b": np.zeros(1, dtype=dt),
        "localize.w": np.zeros(d, dtype=dt),
        "localize.b": np.zeros(1, dtype=dt),
        "enc_ln.g": np.ones(d, dtype=dt),
        "enc_ln.b": np.zeros(d, dtype=dt),
        "dec_ln.g": np.ones(d, dtype=dt),
        "dec_ln.b": np.zeros(d, dtype=dt),
    }

    def block(prefix: str, cross: bool) -> None:
        subs = ["self"] + (["cross"] if cross else [])
        for i, sub in enumerate(subs, start=1):
            p[f"{prefix}.ln{i}.g"] = np.ones(d, dtype=dt)
            p[f"{prefix}.ln{i}.b"] = np.zeros(d, dtype=dt)
            for proj in ("q", "k", "v"):
                p[f"{prefix}.{sub}.{proj}.w"] = w(d, d)
                p[f"{prefix}.{sub}.{proj}.b"] = np.zeros(d, dtype=dt)
            p[f"{prefix}.{sub}.o.w"] = w(d, d, scale=0.02 * res_scale)
            p[f"{prefix}.{sub}.o.b"] = np.zeros(d, dtype=dt)
        i = len(subs) + 1
        p[f"{prefix}.ln{i}.g"] = np.ones(d, dtype=dt)
        p[f"{prefix}.ln{i}.b"] = np.zeros(d, dtype=dt)
        p[f"{prefix}.ffn.fc1.w"] = w(d, f)
        p[f"{prefix}.ffn.fc1.b"] = np.zeros(f, dtype=dt)
        p[f"{prefix}.ffn.fc2.w"] = w(f, d, scale=0.02 * res_scale)
        p[f"{prefix}.ffn.fc2.b"] = np.zeros(d, dtype=dt)

    for i in range(config.num_encoder_layers):
        block(f"enc{i}", cross=False)
    for i in range(config.num_decoder_layers):
        block(f"dec{i}", cross=True)
    return p


def zero_grads(params: Params) -> dict:
    return {k: np.zeros_like(v) for k, v in params.items()}


def key_pad_mask(src_mask: np.ndarray, dtype) -> np.ndarray:
    """Additive mask [B,1,1,S] blocking attention onto padded key positions."""
    return ((1.0 - src_mask) * NEG_INF).astype(dtype)[:, None, None, :]


def causal_mask(t: int, dtype) -> np.ndarray:
    m = np.triu(np.full((t, t), NEG_INF, dtype=dtype), k=1)
    return m[None, None, :, :]


# ---------------- encoder ----------------

def encoder_fwd(
    params: Params,
    cfg: ModelConfig,
    src_ids: np.ndarray,
    src_mask: np.ndarray,
    train: bool = False,
    rng: np.random.Generator | None = None,
):
    if src_ids.shape[1] > cfg.max_source_len:
        raise ValueError(
            f"source length {src_ids.shape[1]} exceeds max_source_len {cfg.max_source_len}"
        )
    if int(src_ids.max()) >= cfg.vocab_size:
        raise ValueError("source contains an out-of-vocabulary token id")
    kmask = key_pad_mask(src_mask, cfg.np_dtype)
    x, c_emb = embed_fwd(params, src_ids, "pos_src")
    x, c_drop = dropout_fwd(x, cfg.dropout, train, rng)
    layer_caches = []
    for i in range(cfg.num_encoder_layers):
        pre = f"enc{i}"
        h, c_ln1 = layer_norm_fwd(params, f"{pre}.ln1", x)
        a, c_attn = attention_fwd(params, f"{pre}.self", h, h, kmask, cfg.num_heads)
        a, c_d1 = dropout_fwd(a, cfg.dropout, train, rng)
        x = x + a
        h, c_ln2 = layer_norm_fwd(params, f"{pre}.ln2", x)
        ff, c_ffn = ffn_fwd(params, f"{pre}.ffn", h)
        ff, c_d2 = dropout_fwd(ff, cfg.dropout, train, rng)
        x = x + ff
        layer_caches.append((c_ln1, c_attn, c_d1, c_ln2, c_ffn, c_d2))
    out, c_final = layer_norm_fwd(params, "enc_ln", x)
    return out, (c_emb, c_drop, layer_caches, c_final)


def encoder_bwd(params: Params, cfg: ModelConfig, grads: dict, cache, g: np.ndarray) -> None:
    c_emb, c_drop, layer_caches, c_final = cache
    g = layer_norm_bwd(params, grads, "enc_ln", c_final, g)
    for i in reversed(range(cfg.num_encoder_layers)):
        pre = f"enc{i}"
        c_ln1, c_attn, c_d1, c_ln2, c_ffn, c_d2 = layer_caches[i]
        gf = dropout_bwd(c_d2, g)
        gf = ffn_bwd(params, grads, f"{pre}.ffn", c_ffn, gf)
        g = g + layer_norm_bwd(params, grads, f"{pre}.ln2", c_ln2, gf)
        ga = dropout_bwd(c_d1, g)
        gq, gkv = attention_bwd(params, grads, f"{pre}.self", c_attn, ga)
        g = g + layer_norm_bwd(params, grads, f"{pre}.ln1", c_ln1, gq + gkv)
    g = dropout_bwd(c_drop, g)
    embed_bwd(params, grads, c_emb, g)


# ---------------- decoder (teacher forcing) ----------------

def decoder_fwd(
    params: Params,
    cfg: ModelConfig,
    tgt_in: np.ndarray,
    enc_out: np.ndarray,
    src_mask: np.ndarray,
    train: bool = False,
    rng: np.random.Generator | None = None,
):
    if tgt_in.shape[1] > cfg.max_target_len:
        raise ValueError(
            f"target length {tgt_in.shape[1]} exceeds max_target_len {cfg.max_target_len}"
        )
    t = tgt_in.shape[1]
    cmask = causal_mask(t, cfg.np_dtype)
    kmask = key_pad_mask(src_mask, cfg.np_dtype)
    y, c_emb = embed_fwd(params, tgt_in, "pos_tgt")
    y, c_drop = dropout_fwd(y, cfg.dropout, train, rng)
    layer_caches = []
    for i in range(cfg.num_decoder_layers):
        pre = f"dec{i}"
        h, c_ln1 = layer_norm_fwd(params, f"{pre}.ln1", y)
        a, c_self = attention_fwd(params, f"{pre}.self", h, h, cmask, cfg.num_heads)
        a, c_d1 = dropout_fwd(a, cfg.dropout, train, rng)
        y = y + a
        h, c_ln2 = layer_norm_fwd(params, f"{pre}.ln2", y)
        a, c_cross = attention_fwd(params, f"{pre}.cross", h, enc_out, kmask, cfg.num_heads)
        a, c_d2 = dropout_fwd(a, cfg.dropout, train, rng)
        y = y + a
        h, c_ln3 = layer_norm_fwd(params, f"{pre}.ln3", y)
        ff, c_ffn = ffn_fwd(params, f"{pre}.ffn", h)
        ff, c_d3 = dropout_fwd(ff, cfg.dropout, train, rng)
        y = y + ff
        layer_caches.append((c_ln1, c_self, c_d1, c_ln2, c_cross, c_d2, c_ln3, c_ffn, c_d3))
    y, c_final = layer_norm_fwd(params, "dec_ln", y)
    logits, c_out = linear_fwd(params, "out", y)
    return logits, (c_emb, c_drop, layer_caches, c_final, c_out)


def decoder_bwd(
    params: Params, cfg: ModelConfig, grads: dict, cache, g_logits: np.ndarray
) -> np.ndarray:
    """Backward through the decoder; returns the gradient w.r.t. enc_out."""
    c_emb, c_drop, layer_caches, c_final, c_out = cache
    g = linear_bwd(params, grads, "out", c_out, g_logits)
    g = layer_norm_bwd(params, grads, "dec_ln", c_final, g)
    g_enc = None
    for i in reversed(range(cfg.num_decoder_layers)):
        pre = f"dec{i}"
        c_ln1, c_self, c_d1, c_ln2, c_cross, c_d2, c_ln3, c_ffn, c_d3 = layer_caches[i]
        gf = dropout_bwd(c_d3, g)
        gf = ffn_bwd(params, grads, f"{pre}.ffn", c_ffn, gf)
        g = g + layer_norm_bwd(params, grads, f"{pre}.ln3", c_ln3, gf)
        ga = dropout_bwd(c_d2, g)
        gq, g_enc_i = attention_bwd(params, grads, f"{pre}.cross", c_cross, ga)
        g_enc = g_enc_i if g_enc is None else g_enc + g_enc_i
        g = g + layer_norm_bwd(params, grads, f"{pre}.ln2", c_ln2, gq)
        ga = dropout_bwd(c_d1, g)
        gq, gkv = attention_bwd(params, grads, f"{pre}.self", c_self, ga)
        g = g + layer_norm_bwd(params, grads, f"{pre}.ln1", c_ln1, gq + gkv)
    g = dropout_bwd(c_drop, g)
    embed_bwd(params, grads, c_emb, g)
    return g_enc


# ---------------- task heads ----------------

def detect_logits(params: Params, enc_out: np.ndarray, last_idx: np.ndarray):
    h = enc_out[np.arange(enc_out.shape[0]), last_idx]
    return h @ params["detect.w"] + params["detect.b"][0], h


def detect_logits_bwd(
    params: Params, grads: dict, enc_out_shape, last_idx, cache, g: np.ndarray
) -> np.ndarray:
    h = cache
    accumulate(grads, "detect.w", h.T @ g)
    accumulate(grads, "detect.b", np.array([g.sum()], dtype=h.dtype))
    g_enc = np.zeros(enc_out_shape, dtype=h.dtype)
    g_enc[np.arange(len(last_idx)), last_idx] = g[:, None] * params["detect.w"]
    return g_enc


def localize_logits(params: Params, enc_out: np.ndarray, rows: np.ndarray, cols: np.ndarray):
    h = enc_out[rows, cols]
    return h @ params["localize.w"] + params["localize.b"][0], h


def localize_logits_bwd(
    params: Params, grads: dict, enc_out_shape, rows, cols, cache, g: np.ndarray
) -> np.ndarray:
    h = cache
    accumulate(grads, "localize.w", h.T @ g)
    accumulate(grads, "localize.b", np.array([g.sum()], dtype=h.dtype))
    g_enc = np.zeros(enc_out_shape, dtype=h.dtype)
    np.add.at(g_enc, (rows, cols), g[:, None] * params["localize.w"])
    return g_enc


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


# ---------------- inference-facing ops ----------------

def encode(
    params: Params,
    cfg: ModelConfig,
    input_ids: np.ndarray,
    pad_mask: np.ndarray | None = None,
) -> np.ndarray:
    """Per-position hidden states for a [B, S] batch (dropout off)."""
    input_ids = np.atleast_2d(np.asarray(input_ids, dtype=np.int64))
    if pad_mask is None:
        pad_mask = np.ones(input_ids.shape, dtype=cfg.np_dtype)
    else:
        pad_mask = np.atleast_2d(np.asarray(pad_mask, dtype=cfg.np_dtype))
    out, _ = encoder_fwd(params, cfg, input_ids, pad_mask, train=False)
    return out


def detect(params: Params, encoded: np.ndarray, last_nonpad_index) -> np.ndarray:
    """Buggy-function probability from the final non-padding hidden state."""
    encoded = encoded[None] if encoded.ndim == 2 else encoded
    idx = np.atleast_1d(np.asarray(last_nonpad_index, dtype=np.int64))
    z, _ = detect_logits(params, encoded, idx)
    return sigmoid(z)


def localize(params: Params, encoded: np.ndarray, sep_positions) -> np.ndarray:
    """Per-line buggy probabilities from the sentinel hidden states of one sample."""
    sep_positions = np.asarray(sep_positions, dtype=np.int64)
    if sep_positions.size == 0:
        raise ValueError("sep_positions is empty: malformed example")
    encoded = encoded[None] if encoded.ndim == 2 else encoded
    rows = np.zeros(sep_positions.size, dtype=np.int64)
    z, _ = localize_logits(params, encoded, rows, sep_positions)
    return sigmoid(z)


def rank_lines(line_probs) -> list[int]:
    """Line indices by descending score; ties broken by smaller line index."""
    probs = np.asarray(line_probs)
    return sorted(range(len(probs)), key=lambda i: (-float(probs[i]), i))
