"""CLI surface: exit codes, JSON-first output, determinism, and the
debug command's verdict gating."""

import json
import os

import pytest

from codemend.cli import main


def run_cli(capsys, *argv):
    capsys.readouterr()  # drop output buffered by earlier main() calls
    code = main(list(argv))
    out = capsys.readouterr()
    first_line = out.out.splitlines()[0] if out.out else ""
    payload = json.loads(first_line) if first_line.startswith("{") else None
    return code, payload, out


def test_usage_error_exit_code_1(capsys):
    assert main(["mine"]) == 1           # missing required args
    assert main(["no-such-command"]) == 1


def test_synth_then_mine(tmp_path, capsys):
    export = tmp_path / "export.ndjson"
    data = tmp_path / "data.ndjson"
    code, payload, _ = run_cli(capsys, "synth", "--out", str(export), "--pairs", "4", "--seed", "1")
    assert code == 0 and payload["records"] == 4
    code, payload, _ = run_cli(capsys, "mine", "--input", str(export), "--out", str(data))
    assert code == 0
    assert payload["samples_emitted"] == 8
    assert payload["pattern_counts"]
    assert data.exists()


def test_mine_empty_export_succeeds_with_zero_counts(tmp_path, capsys):
    export = tmp_path / "empty.ndjson"
    export.write_text("")
    out_path = tmp_path / "out.ndjson"
    code, payload, _ = run_cli(capsys, "mine", "--input", str(export), "--out", str(out_path))
    assert code == 0
    assert payload["samples_emitted"] == 0
    assert out_path.read_text() == ""


def test_mine_malformed_line_exits_2_naming_line(tmp_path, capsys):
    export = tmp_path / "bad.ndjson"
    export.write_text('{"commit_id": "a", "message": "fix", "files": [], "language": "java"}\n{oops\n')
    code = main(["mine", "--input", str(export), "--out", str(tmp_path / "o.ndjson")])
    err = capsys.readouterr().err
    assert code == 2
    assert "line 2" in err


def test_mine_missing_input_exits_2(tmp_path, capsys):
    code = main(["mine", "--input", str(tmp_path / "nope.ndjson"), "--out", str(tmp_path / "o")])
    assert code == 2


def test_mine_output_is_byte_identical_across_runs(tmp_path, capsys):
    export = tmp_path / "export.ndjson"
    main(["synth", "--out", str(export), "--pairs", "5", "--seed", "3", "--quiet"])
    out1 = tmp_path / "a.ndjson"
    out2 = tmp_path / "b.ndjson"
    assert main(["mine", "--input", str(export), "--out", str(out1), "--quiet"]) == 0
    assert main(["mine", "--input", str(export), "--out", str(out2), "--quiet"]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_build_corpus_writes_splits_and_tokenizer(tmp_path, capsys):
    data = tmp_path / "data.ndjson"
    main(["synth", "--out", str(data), "--pairs", "12", "--format", "dataset",
          "--projects", "6", "--quiet"])
    corpus = tmp_path / "corpus"
    code, payload, _ = run_cli(
        capsys, "build-corpus", "--dataset", str(data), "--out", str(corpus),
        "--vocab-size", "300", "--seed", "2",
    )
    assert code == 0
    for name in ("train.ndjson", "val.ndjson", "test.ndjson", "tokenizer.json", "corpus_meta.json"):
        assert (corpus / name).exists()
    stats = payload["stats"]
    assert stats["train"]["instances"] + stats["val"]["instances"] + stats["test"]["instances"] == 24
    # project-level separation
    projects = [set(), set(), set()]
    for i, split in enumerate(("train", "val", "test")):
        for line in (corpus / f"{split}.ndjson").read_text().splitlines():
            projects[i].add(json.loads(line)["project"])
    assert not (projects[0] & projects[1]) and not (projects[0] & projects[2])


@pytest.fixture(scope="module")
def trained(tmp_path_factory):
    """A tiny trained pipeline shared by the train/evaluate/debug CLI tests."""
    root = tmp_path_factory.mktemp("cli-pipe")
    data = root / "data.ndjson"
    corpus = root / "corpus"
    run = root / "run"
    assert main(["synth", "--out", str(data), "--pairs", "10", "--format", "dataset",
                 "--projects", "5", "--quiet"]) == 0
    assert main(["build-corpus", "--dataset", str(data), "--out", str(corpus),
                 "--vocab-size", "300", "--ratios", "0.5,0.25,0.25", "--quiet"]) == 0
    config = {"model": {"model_dim": 32, "num_heads": 2, "ffn_dim": 64,
                        "num_encoder_layers": 1, "num_decoder_layers": 1}}
    assert main(["train", "--corpus", str(corpus), "--out", str(run),
                 "--steps", "8", "--val-interval", "4", "--batch-size", "4",
                 "--config", json.dumps(config), "--quiet"]) == 0
    return root, corpus, run


def test_train_writes_checkpoint_and_log(trained):
    _, _, run = trained
    assert (run / "checkpoint.npz").exists()
    log_lines = (run / "train_log.ndjson").read_text().splitlines()
    assert log_lines
    event = json.loads(log_lines[0])
    assert set(event) == {"step", "losses", "val_metrics"}


def test_evaluate_writes_report(trained, capsys, tmp_path):
    _, corpus, run = trained
    report_path = tmp_path / "report.json"
    csv_path = tmp_path / "patterns.csv"
    code, payload, out = run_cli(
        capsys, "evaluate", "--checkpoint", str(run / "checkpoint.npz"),
        "--corpus", str(corpus), "--split", "test",
        "--out", str(report_path), "--csv", str(csv_path), "--beam", "2",
    )
    assert code == 0
    report = payload["report"]
    assert 0.0 <= report["detection"]["f1"] <= 1.0
    assert "mrr" in report["localization"]
    assert report_path.exists() and csv_path.exists()
    assert "== detection ==" in out.out


def test_report_renders_saved_metrics(trained, capsys, tmp_path):
    _, corpus, run = trained
    report_path = tmp_path / "r.json"
    main(["evaluate", "--checkpoint", str(run / "checkpoint.npz"),
          "--corpus", str(corpus), "--out", str(report_path), "--beam", "1", "--quiet"])
    code, payload, out = run_cli(capsys, "report", "--metrics", str(report_path))
    assert code == 0
    assert "== detection ==" in out.out


def test_debug_lists_available_functions_on_bad_name(trained, capsys, tmp_path):
    _, corpus, run = trained
    src = tmp_path / "Demo.java"
    src.write_text(
        "public class Demo {\n"
        "    public int twice(int x) {\n        return x * 2;\n    }\n"
        "    public int thrice(int x) {\n        return x * 3;\n    }\n"
        "}\n"
    )
    code = main(["debug", "--checkpoint", str(run / "checkpoint.npz"),
                 "--tokenizer", str(corpus / "tokenizer.json"),
                 "--source", str(src), "--function", "nope"])
    captured = capsys.readouterr()
    assert code == 2
    assert "twice" in captured.err and "thrice" in captured.err


def test_debug_reports_verdict_and_gates_repair(trained, capsys, tmp_path):
    _, corpus, run = trained
    src = tmp_path / "Demo.java"
    src.write_text(
        "public class Demo {\n"
        "    public int twice(int x) {\n        return x * 2;\n    }\n"
        "}\n"
    )
    code, payload, out = run_cli(
        capsys, "debug", "--checkpoint", str(run / "checkpoint.npz"),
        "--tokenizer", str(corpus / "tokenizer.json"),
        "--source", str(src), "--beam", "1",
    )
    assert code == 0
    (entry,) = payload["functions"]
    assert entry["function"] == "twice"
    assert isinstance(entry["buggy"], bool)
    assert len(entry["suspicious_lines"]) <= 5
    if not entry["buggy"]:
        assert entry["repair"] is None  # no repair printed for a clean verdict
    assert code == 0


def test_quiet_suppresses_human_rendering(tmp_path, capsys):
    export = tmp_path / "e.ndjson"
    code, payload, out = run_cli(capsys, "synth", "--out", str(export), "--pairs", "2", "--quiet")
    assert code == 0
    assert len(out.out.strip().splitlines()) == 1  # JSON only
