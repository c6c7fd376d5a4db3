"""The whole pipeline through the command-line interface.

synth -> mine -> build-corpus -> train -> evaluate -> debug, all inside a
temporary directory.  Every subcommand prints machine-readable JSON first;
this script captures those payloads and shows the interesting parts.
"""

import io
import json
import tempfile
from contextlib import redirect_stdout
from pathlib import Path

from codemend.cli import main


def run(*argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(list(argv))
    lines = buf.getvalue().splitlines()
    assert code == 0, f"{argv} exited {code}:\n{buf.getvalue()}"
    return json.loads(lines[0])


with tempfile.TemporaryDirectory() as tmp:
    root = Path(tmp)
    export = root / "export.ndjson"
    dataset = root / "dataset.ndjson"
    corpus = root / "corpus"
    run_dir = root / "run"

    payload = run("synth", "--out", str(export), "--pairs", "20", "--noise", "3", "--seed", "4")
    print(f"synth: {payload['records']} commit records")

    payload = run("mine", "--input", str(export), "--out", str(dataset))
    print(f"mine: {payload['bugfix_commits']}/{payload['commits_scanned']} bug-fix commits, "
          f"{payload['samples_emitted']} samples")
    print(f"  pattern histogram: {payload['pattern_counts']}")

    payload = run("build-corpus", "--dataset", str(dataset), "--out", str(corpus),
                  "--vocab-size", "350", "--ratios", "0.6,0.2,0.2", "--seed", "4")
    print("build-corpus:", {k: v["instances"] for k, v in payload["stats"].items()},
          f"vocab={payload['vocab_size']}")

    config = json.dumps({
        "model": {"model_dim": 64, "num_heads": 2, "ffn_dim": 128,
                  "num_encoder_layers": 1, "num_decoder_layers": 1},
    })
    payload = run("train", "--corpus", str(corpus), "--out", str(run_dir),
                  "--steps", "150", "--val-interval", "50", "--batch-size", "8",
                  "--lr", "0.002", "--seed", "4", "--config", config)
    print(f"train: best step {payload['best_step']}, "
          f"val metrics {payload['best_val_metrics']}")

    payload = run("evaluate", "--checkpoint", str(run_dir / "checkpoint.npz"),
                  "--corpus", str(corpus), "--split", "test", "--beam", "2",
                  "--out", str(root / "report.json"), "--csv", str(root / "patterns.csv"))
    rep = payload["report"]
    print(f"evaluate: F1={rep['detection']['f1']:.2f} "
          f"MRR@1={rep['localization']['mrr']['1']:.2f} "
          f"EM={rep['repair']['em']:.2f} BL={rep['end_to_end']['bl']} "
          f"(on {rep['counts']['samples']} test samples)")

    # point the debugger at a source file containing one function
    source = root / "Snippet.java"
    first_test_sample = (corpus / "test.ndjson").read_text().splitlines()[0]
    source.write_text(json.loads(first_test_sample)["before"] + "\n")
    payload = run("debug", "--checkpoint", str(run_dir / "checkpoint.npz"),
                  "--tokenizer", str(corpus / "tokenizer.json"),
                  "--source", str(source), "--beam", "2")
    entry = payload["functions"][0]
    print(f"debug: {entry['function']} -> {'BUGGY' if entry['buggy'] else 'clean'} "
          f"(p={entry['probability']:.2f}), "
          f"top line {entry['suspicious_lines'][0]['line']}")
    print("\n(a short training run like this one is not expected to be accurate;"
          "\n the acceptance suite trains the full-size model)")
