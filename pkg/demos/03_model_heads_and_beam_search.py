"""The shared encoder-decoder and its three task heads.

Shows the joint loss (detection + localization + repair, plain sum), the
objective masks that produce the single-task model variants, a finite
difference spot check of the hand-written backprop, and beam-search decoding.
"""

import numpy as np

from codemend.corpus import build_examples, pad_batch, train_tokenizer
from codemend.model import (
    ModelConfig,
    TableStepper,
    beam_search_steps,
    compute_losses,
    detect,
    encode,
    init_parameters,
    localize,
    loss_and_grads,
    rank_lines,
)
from codemend.train import make_samples

samples = make_samples(8, seed=0)
texts = [s.before_text() for s in samples] + [s.after_text() for s in samples]
tok = train_tokenizer(texts, vocab_size=300)
examples, _ = build_examples(samples, tok)
batch = pad_batch(examples, tok.pad_id)

cfg = ModelConfig(
    vocab_size=tok.size, model_dim=32, num_heads=2, ffn_dim=64,
    num_encoder_layers=1, num_decoder_layers=1, dropout=0.0, dtype="float64",
)
params = init_parameters(cfg)

# ---------------------------------------------------------------------------
# 1. Joint loss and the objective masks (model variants).
# ---------------------------------------------------------------------------
print("== losses under each objective mask ==")
for mask in ("D", "L", "R", "DLR"):
    b = compute_losses(params, cfg, batch, mask)
    print(f"  mask {mask:3s}: detect={b.detect_loss:.4f} localize={b.localize_loss:.4f} "
          f"repair={b.repair_loss:.4f} total={b.total:.4f}")
    assert b.total == b.detect_loss + b.localize_loss + b.repair_loss

# ---------------------------------------------------------------------------
# 2. Spot-check one analytic gradient against central finite differences.
# ---------------------------------------------------------------------------
_, grads = loss_and_grads(params, cfg, batch, "DLR")
name, idx, h = "enc0.ffn.fc1.w", 17, 1e-5
orig = params[name].flat[idx]
params[name].flat[idx] = orig + h
up = compute_losses(params, cfg, batch, "DLR").total
params[name].flat[idx] = orig - h
down = compute_losses(params, cfg, batch, "DLR").total
params[name].flat[idx] = orig
fd = (up - down) / (2 * h)
print(f"\n== gradient spot check ({name}[{idx}]) ==")
print(f"  analytic {grads[name].flat[idx]: .10f}   finite-difference {fd: .10f}")

# ---------------------------------------------------------------------------
# 3. Detection and localization on one example.
# ---------------------------------------------------------------------------
ex = examples[0]
ids = np.asarray(ex.input_ids)[None, :]
enc_out = encode(params, cfg, ids)
prob = detect(params, enc_out, [len(ex.input_ids) - 1])[0]
line_probs = localize(params, enc_out[0], ex.sep_positions)
print("\n== untrained heads (zero-initialized: every score is exactly 0.5) ==")
print(f"  buggy probability {prob:.3f}; line scores {np.round(line_probs, 3)}")
print(f"  ranking (ties break toward earlier lines): {rank_lines(line_probs)}")

# ---------------------------------------------------------------------------
# 4. Beam search over a hand-built three-token distribution table.
#    Vocabulary: 2=EOS, 3='a', 4='b'.
# ---------------------------------------------------------------------------
def table(prefix):
    dist = {
        (): {3: 0.50, 4: 0.45, 2: 0.05},
        (3,): {3: 0.10, 4: 0.20, 2: 0.70},
        (4,): {3: 0.90, 4: 0.05, 2: 0.05},
    }.get(prefix, {3: 0.05, 4: 0.05, 2: 0.90})
    row = np.full(5, -1e9)
    for t, p in dist.items():
        row[t] = np.log(p)
    return row

print("\n== beam search over a toy distribution ==")
for width in (1, 2, 3):
    cands = beam_search_steps(TableStepper(table, 5, bos_id=1), 1, 2, width, max_len=3)
    pretty = [("".join({2: "<eos>", 3: "a", 4: "b"}[t] for t in c), round(s, 4)) for c, s in cands]
    print(f"  width {width}: {pretty}")
