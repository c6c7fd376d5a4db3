"""Training the joint model on synthetic single-line bugs and evaluating it.

Uses a small model and a short schedule so the demo finishes in about a
minute; the acceptance suite runs the full-size overfit experiment.
"""

import time

import numpy as np

from codemend.corpus import split_by_project, train_tokenizer
from codemend.evaluation import MetricConfig, evaluate_model
from codemend.model import ModelConfig
from codemend.train import TrainConfig, fit, make_samples

samples = make_samples(48, seed=2, n_projects=8)
train_set, val_set = split_by_project(samples, (0.75, 0.25), seed=0)
print(f"synthetic corpus: {len(train_set)} train / {len(val_set)} val samples")

texts = [s.before_text() for s in train_set] + [s.after_text() for s in train_set]
tok = train_tokenizer(texts, vocab_size=400)

model_cfg = ModelConfig(
    vocab_size=tok.size, model_dim=96, num_heads=4, ffn_dim=256,
    num_encoder_layers=2, num_decoder_layers=2, dropout=0.0,
    dtype="float32", seed=0,
)
train_cfg = TrainConfig(
    objectives="DLR", batch_size=12, learning_rate=1.5e-3,
    warmup_steps=30, max_steps=240, val_interval=60, patience=10, seed=0,
)

t0 = time.perf_counter()
ckpt = fit(train_cfg, model_cfg, tok, train_set, val_set)
print(f"\ntrained {ckpt.history[-1]['step']} steps in {time.perf_counter() - t0:.0f}s")
print("validation trajectory:")
for event in ckpt.history:
    m = event["val_metrics"]
    print(f"  step {event['step']:4d}  loss {event['losses']['total']:.3f}  "
          f"F1 {m.get('detection_f1', 0):.2f}  rank@1 {m.get('localization_rank1', 0):.2f}  "
          f"EM {m.get('repair_em', 0):.2f}")

# ---------------------------------------------------------------------------
# Full evaluation on the held-out split, including the staged protocol:
# localization and repair are only scored on samples the detector flags.
# ---------------------------------------------------------------------------
report = evaluate_model(
    ckpt.params, model_cfg, tok, val_set, MetricConfig(beam_width=2)
)
print("\n" + report.render_table())
