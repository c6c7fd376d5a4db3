import os, time, json
os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
import numpy as np
from codemend.corpus import train_tokenizer, build_examples
from codemend.train import make_samples, TrainConfig, init_train_state, train_step, batch_for_step
from codemend.train.loop import validation_metrics
from codemend.model import ModelConfig

samples = make_samples(64, seed=11)
texts = [s.before_text() for s in samples] + [s.after_text() for s in samples]
tok = train_tokenizer(texts, vocab_size=512)
exs, _ = build_examples(samples, tok)
mc = ModelConfig(vocab_size=tok.size, dropout=0.0, dtype="float32", seed=1)
tc = TrainConfig(batch_size=16, max_steps=2000, val_interval=10**9,
                 learning_rate=1e-3, warmup_steps=50, seed=1)
st = init_train_state(tc, mc)
t0 = time.perf_counter()
for step in range(2000):
    st, bundle = train_step(st, batch_for_step(exs, tc, st.step, tok.pad_id))
    if st.step % 50 == 0:
        m = validation_metrics(st.params, mc, tok, exs, "DLR")
        el = time.perf_counter() - t0
        print(json.dumps({"step": st.step, "loss": round(bundle.total, 4),
                          "f1": round(m.get("detection_f1", 0), 3),
                          "rank1": round(m.get("localization_rank1", 0), 3),
                          "em": round(m.get("repair_em", 0), 3),
                          "min": round(el/60, 1)}), flush=True)
        if (m.get("detection_f1",0) >= 0.97 and m.get("localization_rank1",0) >= 0.95
                and m.get("repair_em",0) >= 0.95):
            print("thresholds met at step", st.step, "elapsed", round(el/60,1), "min")
            break
