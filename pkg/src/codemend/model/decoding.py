"""Autoregressive decoding: greedy, length-normalized beam search, and the
repair-as-detector rule.

The beam loop is written against a small stepper protocol so the same code
runs over the real decoder (with incremental key/value caches) and over
hand-built score tables in tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ModelConfig
from .layers import linear_fwd, merge_heads, split_heads
from .network import Params, encode, key_pad_mask, rank_lines
from .network import detect as detect_op
from .network import localize as localize_op


@dataclass
class Prediction:
    """Model outputs for one input: bug probability, per-line scores, and a
    ranked beam of repair candidates as (token ids, normalized log-prob)."""

    detect_prob: float
    line_probs: list[float]
    repair_beam: list[tuple[list[int], float]]

    @property
    def ranked_lines(self) -> list[int]:
        return rank_lines(self.line_probs)


# ---------------- incremental decoder stepping ----------------

def _layer_norm(params: Params, name: str, x: np.ndarray) -> np.ndarray:
    mu = x.mean(axis=-1, keepdims=True)
    xc = x - mu
    inv = 1.0 / np.sqrt((xc * xc).mean(axis=-1, keepdims=True) + 1e-5)
    return params[f"{name}.g"] * (xc * inv) + params[f"{name}.b"]


def _project_heads(params: Params, name: str, x: np.ndarray, n_heads: int) -> np.ndarray:
    y, _ = linear_fwd(params, name, x)
    return split_heads(y, n_heads)


@dataclass
class _DecoderState:
    t: int
    self_k: list[np.ndarray]   # per layer [K, H, t, dh]
    self_v: list[np.ndarray]
    cross_k: list[np.ndarray]  # per layer [1, H, S, dh]
    cross_v: list[np.ndarray]
    kmask: np.ndarray          # [1, 1, 1, S]


class ModelStepper:
    """Stepper over the trained decoder for one source sample, with cached
    self-attention keys/values and precomputed cross-attention projections."""

    def __init__(self, params: Params, cfg: ModelConfig, enc_out: np.ndarray, src_mask: np.ndarray):
        self.params = params
        self.cfg = cfg
        enc_out = enc_out[None] if enc_out.ndim == 2 else enc_out
        src_mask = np.atleast_2d(src_mask)
        cross_k, cross_v = [], []
        for i in range(cfg.num_decoder_layers):
            pre = f"dec{i}.cross"
            cross_k.append(_project_heads(params, f"{pre}.k", enc_out, cfg.num_heads))
            cross_v.append(_project_heads(params, f"{pre}.v", enc_out, cfg.num_heads))
        self._template = _DecoderState(
            t=0,
            self_k=[np.zeros((0,)) for _ in range(cfg.num_decoder_layers)],
            self_v=[np.zeros((0,)) for _ in range(cfg.num_decoder_layers)],
            cross_k=cross_k,
            cross_v=cross_v,
            kmask=key_pad_mask(src_mask, cfg.np_dtype),
        )
        self.state: _DecoderState | None = None

    @property
    def vocab_size(self) -> int:
        return self.cfg.vocab_size

    def start(self, n_beams: int) -> None:
        cfg = self.cfg
        dh, h = cfg.head_dim, cfg.num_heads
        self.state = _DecoderState(
            t=0,
            self_k=[np.zeros((n_beams, h, 0, dh), dtype=cfg.np_dtype) for _ in range(cfg.num_decoder_layers)],
            self_v=[np.zeros((n_beams, h, 0, dh), dtype=cfg.np_dtype) for _ in range(cfg.num_decoder_layers)],
            cross_k=self._template.cross_k,
            cross_v=self._template.cross_v,
            kmask=self._template.kmask,
        )

    def step(self, tokens: list[int], parents: list[int] | None) -> np.ndarray:
        """Advance every beam by one token; returns log-probs [K, vocab]."""
        params, cfg, st = self.params, self.cfg, self.state
        k_beams = len(tokens)
        if parents is not None:
            idx = np.asarray(parents, dtype=np.int64)
            st.self_k = [c[idx] for c in st.self_k]
            st.self_v = [c[idx] for c in st.self_v]
        if st.t >= cfg.max_target_len:
            raise ValueError("decoder ran past max_target_len")

        ids = np.asarray(tokens, dtype=np.int64)[:, None]
        y = params["tok_emb"][ids] + params["pos_tgt"][st.t]
        scale = 1.0 / float(cfg.head_dim) ** 0.5
        for i in range(cfg.num_decoder_layers):
            pre = f"dec{i}"
            hidden = _layer_norm(params, f"{pre}.ln1", y)
            q = _project_heads(params, f"{pre}.self.q", hidden, cfg.num_heads)
            k_new = _project_heads(params, f"{pre}.self.k", hidden, cfg.num_heads)
            v_new = _project_heads(params, f"{pre}.self.v", hidden, cfg.num_heads)
            st.self_k[i] = np.concatenate([st.self_k[i], k_new], axis=2)
            st.self_v[i] = np.concatenate([st.self_v[i], v_new], axis=2)
            attn = _softmax((q @ st.self_k[i].swapaxes(-1, -2)) * scale)
            ctx = merge_heads(attn @ st.self_v[i])
            y = y + linear_fwd(params, f"{pre}.self.o", ctx)[0]

            hidden = _layer_norm(params, f"{pre}.ln2", y)
            q = _project_heads(params, f"{pre}.cross.q", hidden, cfg.num_heads)
            scores = (q @ st.cross_k[i].swapaxes(-1, -2)) * scale + st.kmask
            attn = _softmax(scores)
            ctx = merge_heads(attn @ st.cross_v[i])
            y = y + linear_fwd(params, f"{pre}.cross.o", ctx)[0]

            hidden = _layer_norm(params, f"{pre}.ln3", y)
            h1 = np.maximum(linear_fwd(params, f"{pre}.ffn.fc1", hidden)[0], 0.0)
            y = y + linear_fwd(params, f"{pre}.ffn.fc2", h1)[0]

        y = _layer_norm(params, "dec_ln", y)
        logits = (y @ params["out.w"] + params["out.b"])[:, 0, :]
        st.t += 1
        return log_softmax(logits)


def _softmax(scores: np.ndarray) -> np.ndarray:
    scores = scores - scores.max(axis=-1, keepdims=True)
    e = np.exp(scores)
    return e / e.sum(axis=-1, keepdims=True)


def log_softmax(logits: np.ndarray) -> np.ndarray:
    m = logits.max(axis=-1, keepdims=True)
    s = logits - m
    return s - np.log(np.exp(s).sum(axis=-1, keepdims=True))


class TableStepper:
    """Stepper over a fixed next-token distribution table, for tests.

    `table(prefix) -> log-prob vector` where prefix is the generated-token
    tuple so far (BOS excluded).
    """

    def __init__(self, table, vocab_size: int, bos_id: int):
        self.table = table
        self.vocab_size = vocab_size
        self.bos_id = bos_id
        self.prefixes: list[tuple[int, ...]] = []

    def start(self, n_beams: int) -> None:
        self.prefixes = [() for _ in range(n_beams)]

    def step(self, tokens: list[int], parents: list[int] | None) -> np.ndarray:
        if parents is not None:
            self.prefixes = [self.prefixes[p] for p in parents]
        self.prefixes = [
            pre + ((t,) if t != self.bos_id else ())
            for pre, t in zip(self.prefixes, tokens)
        ]
        return np.stack([self.table(pre) for pre in self.prefixes])


# ---------------- greedy and beam search ----------------

def greedy_decode(stepper, bos_id: int, eos_id: int, max_len: int) -> tuple[list[int], float]:
    """Argmax decoding; ties resolved toward the smaller token id."""
    stepper.start(1)
    tokens: list[int] = []
    logprob = 0.0
    last, parents = bos_id, None
    for _ in range(max_len):
        lp = stepper.step([last], parents)[0]
        nxt = int(lp.argmax())
        logprob += float(lp[nxt])
        tokens.append(nxt)
        if nxt == eos_id:
            break
        last, parents = nxt, [0]
    return tokens, logprob


def _normalized(logprob: float, n_tokens: int, alpha: float) -> float:
    return logprob / (max(1, n_tokens) ** alpha)


def beam_search_steps(
    stepper,
    bos_id: int,
    eos_id: int,
    beam_width: int,
    max_len: int,
    length_penalty: float = 0.7,
) -> list[tuple[list[int], float]]:
    """Length-normalized beam search over a stepper.

    Returns up to beam_width candidates as (tokens, normalized log-prob),
    sorted by score descending; ties break toward the lexicographically
    smaller token sequence, so decoding is fully deterministic.  Candidate
    token lists end at their first EOS (or run to max_len without one).
    """
    if beam_width < 1:
        raise ValueError("beam_width must be >= 1")
    stepper.start(1)
    # (logprob, tokens); all beams implicitly start from BOS
    beams: list[tuple[float, list[int]]] = [(0.0, [])]
    finished: list[tuple[list[int], float]] = []
    last_tokens = [bos_id]
    parents: list[int] | None = None

    for _ in range(max_len):
        if not beams:
            break
        logprobs = stepper.step(last_tokens, parents)  # [K, V]
        k_beams, vocab = logprobs.shape
        total = np.asarray([b[0] for b in beams])[:, None] + logprobs
        flat = total.reshape(-1)
        # stable sort keeps ties in (beam index, token id) order
        order = np.argsort(-flat, kind="stable")[: beam_width]
        next_beams: list[tuple[float, list[int]]] = []
        next_parents: list[int] = []
        next_tokens: list[int] = []
        for key in order:
            i, v = int(key) // vocab, int(key) % vocab
            lp = float(flat[key])
            if lp == -np.inf:  # unreachable continuation
                continue
            tokens = beams[i][1] + [v]
            if v == eos_id:
                finished.append((tokens, _normalized(lp, len(tokens), length_penalty)))
            else:
                next_beams.append((lp, tokens))
                next_parents.append(i)
                next_tokens.append(v)
        beams = next_beams
        parents = next_parents
        last_tokens = next_tokens
        if len(finished) >= beam_width:
            break

    for lp, tokens in beams:  # length-capped, no EOS emitted
        finished.append((tokens, _normalized(lp, len(tokens), length_penalty)))
    finished.sort(key=lambda c: (-c[1], c[0]))
    return finished[:beam_width]


def beam_search(
    params: Params,
    cfg: ModelConfig,
    input_ids,
    beam_width: int,
    max_target_len: int | None = None,
    length_penalty: float = 0.7,
    bos_id: int = 1,
    eos_id: int = 2,
    pad_mask=None,
) -> list[tuple[list[int], float]]:
    """Ranked repair candidates for one source sequence."""
    input_ids = np.atleast_2d(np.asarray(input_ids, dtype=np.int64))
    if pad_mask is None:
        pad_mask = np.ones(input_ids.shape, dtype=cfg.np_dtype)
    enc_out = encode(params, cfg, input_ids, pad_mask)
    stepper = ModelStepper(params, cfg, enc_out, pad_mask)
    return beam_search_steps(
        stepper,
        bos_id,
        eos_id,
        beam_width,
        max_target_len or cfg.max_target_len,
        length_penalty,
    )


# ---------------- repair-as-detector ----------------

def _squeeze_ws(text: str) -> str:
    return " ".join(text.split())


def detect_via_repair(input_text: str, top_repair_candidate: str) -> bool:
    """Buggy iff the candidate is non-empty and differs from the input
    (whitespace-normalized); an empty or identity candidate means clean."""
    candidate = _squeeze_ws(top_repair_candidate)
    if not candidate:
        return False
    return candidate != _squeeze_ws(input_text)


# ---------------- one-call prediction ----------------

def predict(
    params: Params,
    cfg: ModelConfig,
    example,
    beam_width: int = 4,
    length_penalty: float = 0.7,
    bos_id: int = 1,
    eos_id: int = 2,
) -> Prediction:
    """Run all three heads on one TokenizedExample."""
    ids = np.asarray(example.input_ids, dtype=np.int64)[None, :]
    mask = np.ones(ids.shape, dtype=cfg.np_dtype)
    enc_out = encode(params, cfg, ids, mask)
    prob = float(detect_op(params, enc_out, [len(example.input_ids) - 1])[0])
    line_probs = localize_op(params, enc_out, example.sep_positions)
    stepper = ModelStepper(params, cfg, enc_out, mask)
    beam = beam_search_steps(
        stepper, bos_id, eos_id, beam_width, cfg.max_target_len, length_penalty
    )
    return Prediction(
        detect_prob=prob,
        line_probs=[float(p) for p in line_probs],
        repair_beam=beam,
    )
