"""Forward/backward primitives for the transformer.

Every forward returns (output, cache); the matching backward consumes the
cache and an upstream gradient, accumulates parameter gradients into a dict
keyed by parameter name, and returns the gradient w.r.t. the layer input.
"""

from __future__ import annotations

import numpy as np

NEG_INF = -1e9


def accumulate(grads: dict, name: str, value: np.ndarray) -> None:
    if name in grads:
        grads[name] += value
    else:
        grads[name] = value


# ---------------- linear ----------------

def linear_fwd(params: dict, name: str, x: np.ndarray):
    # flatten leading dims so BLAS sees one big GEMM, not a batch of small ones
    w = params[f"{name}.w"]
    x2 = np.ascontiguousarray(x).reshape(-1, x.shape[-1])
    y = x2 @ w + params[f"{name}.b"]
    return y.reshape(*x.shape[:-1], w.shape[1]), x2


def linear_bwd(params: dict, grads: dict, name: str, cache, g: np.ndarray) -> np.ndarray:
    x2 = cache
    w = params[f"{name}.w"]
    g2 = np.ascontiguousarray(g).reshape(-1, g.shape[-1])
    accumulate(grads, f"{name}.w", x2.T @ g2)
    accumulate(grads, f"{name}.b", g2.sum(axis=0))
    return (g2 @ w.T).reshape(*g.shape[:-1], w.shape[0])


# ---------------- layer norm ----------------

def layer_norm_fwd(params: dict, name: str, x: np.ndarray, eps: float = 1e-5):
    mu = x.mean(axis=-1, keepdims=True)
    xc = x - mu
    var = (xc * xc).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = xc * inv
    y = params[f"{name}.g"] * xhat + params[f"{name}.b"]
    return y, (xhat, inv)


def layer_norm_bwd(params: dict, grads: dict, name: str, cache, g: np.ndarray) -> np.ndarray:
    xhat, inv = cache
    gamma = params[f"{name}.g"]
    axes = tuple(range(g.ndim - 1))
    accumulate(grads, f"{name}.g", (g * xhat).sum(axis=axes))
    accumulate(grads, f"{name}.b", g.sum(axis=axes))
    gx = g * gamma
    mean_gx = gx.mean(axis=-1, keepdims=True)
    mean_gx_xhat = (gx * xhat).mean(axis=-1, keepdims=True)
    return inv * (gx - mean_gx - xhat * mean_gx_xhat)


# ---------------- dropout ----------------

def dropout_fwd(x: np.ndarray, rate: float, train: bool, rng: np.random.Generator | None):
    if not train or rate <= 0.0:
        return x, None
    keep = (rng.random(x.shape) >= rate).astype(x.dtype) / (1.0 - rate)
    return x * keep, keep


def dropout_bwd(cache, g: np.ndarray) -> np.ndarray:
    return g if cache is None else g * cache


# ---------------- relu feed-forward ----------------

def ffn_fwd(params: dict, name: str, x: np.ndarray):
    h_pre, c1 = linear_fwd(params, f"{name}.fc1", x)
    h = np.maximum(h_pre, 0.0)
    y, c2 = linear_fwd(params, f"{name}.fc2", h)
    return y, (c1, h_pre, c2)


def ffn_bwd(params: dict, grads: dict, name: str, cache, g: np.ndarray) -> np.ndarray:
    c1, h_pre, c2 = cache
    gh = linear_bwd(params, grads, f"{name}.fc2", c2, g)
    gh = gh * (h_pre > 0.0)
    return linear_bwd(params, grads, f"{name}.fc1", c1, gh)


# ---------------- multi-head attention ----------------

def split_heads(x: np.ndarray, n_heads: int) -> np.ndarray:
    b, t, d = x.shape
    return x.reshape(b, t, n_heads, d // n_heads).transpose(0, 2, 1, 3)


def merge_heads(x: np.ndarray) -> np.ndarray:
    b, h, t, dh = x.shape
    return x.transpose(0, 2, 1, 3).reshape(b, t, h * dh)


def attention_fwd(
    params: dict,
    name: str,
    q_in: np.ndarray,
    kv_in: np.ndarray,
    mask: np.ndarray | None,
    n_heads: int,
):
    """Multi-head attention; `mask` is additive on scores ([..., Tq, Tk])."""
    q_flat, cq = linear_fwd(params, f"{name}.q", q_in)
    k_flat, ck = linear_fwd(params, f"{name}.k", kv_in)
    v_flat, cv = linear_fwd(params, f"{name}.v", kv_in)
    q = split_heads(q_flat, n_heads)
    k = split_heads(k_flat, n_heads)
    v = split_heads(v_flat, n_heads)
    # python-float scale: an np.float64 scalar would upcast the whole graph
    scale = 1.0 / float(q.shape[-1]) ** 0.5
    scores = (q @ k.swapaxes(-1, -2)) * scale
    if mask is not None:
        scores = scores + mask
    scores = scores - scores.max(axis=-1, keepdims=True)
    attn = np.exp(scores)
    attn /= attn.sum(axis=-1, keepdims=True)
    ctx = merge_heads(attn @ v)
    out, co = linear_fwd(params, f"{name}.o", ctx)
    return out, (cq, ck, cv, co, q, k, v, attn, scale, n_heads)


def attention_bwd(params: dict, grads: dict, name: str, cache, g: np.ndarray):
    """Returns (grad_q_in, grad_kv_in)."""
    cq, ck, cv, co, q, k, v, attn, scale, n_heads = cache
    g_ctx = linear_bwd(params, grads, f"{name}.o", co, g)
    g_ctx = split_heads(g_ctx, n_heads)
    g_attn = g_ctx @ v.swapaxes(-1, -2)
    g_v = attn.swapaxes(-1, -2) @ g_ctx
    g_scores = attn * (g_attn - (g_attn * attn).sum(axis=-1, keepdims=True))
    g_q = (g_scores @ k) * scale
    g_k = (g_scores.swapaxes(-1, -2) @ q) * scale
    g_q_in = linear_bwd(params, grads, f"{name}.q", cq, merge_heads(g_q))
    g_kv = linear_bwd(params, grads, f"{name}.k", ck, merge_heads(g_k))
    g_kv += linear_bwd(params, grads, f"{name}.v", cv, merge_heads(g_v))
    return g_q_in, g_kv


# ---------------- embeddings ----------------

def embed_fwd(params: dict, ids: np.ndarray, pos_name: str):
    t = ids.shape[-1]
    return params["tok_emb"][ids] + params[pos_name][:t], (ids, pos_name, t)


def embed_bwd(params: dict, grads: dict, cache, g: np.ndarray) -> None:
    ids, pos_name, t = cache
    if "tok_emb" not in grads:
        grads["tok_emb"] = np.zeros_like(params["tok_emb"])
    # group-by-token accumulation (much faster than np.add.at)
    flat_ids = ids.reshape(-1)
    g2 = g.reshape(-1, g.shape[-1])
    order = np.argsort(flat_ids, kind="stable")
    sorted_ids = flat_ids[order]
    boundaries = np.flatnonzero(np.diff(sorted_ids)) + 1
    starts = np.concatenate(([0], boundaries))
    sums = np.add.reduceat(g2[order], starts, axis=0)
    grads["tok_emb"][sorted_ids[starts]] += sums
    if pos_name not in grads:
        grads[pos_name] = np.zeros_like(params[pos_name])
    grads[pos_name][:t] += g.sum(axis=0)
