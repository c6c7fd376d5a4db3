"""Command-line pipeline: synth -> mine -> build-corpus -> train -> evaluate,
plus single-file debugging and report rendering.

Every subcommand prints a machine-readable JSON summary first and a
human-readable rendering second (suppressed by --quiet).  Exit codes:
0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import difflib
import json
import os
import sys

from .corpus.bpe import Tokenizer, TokenizerError, train_tokenizer
from .corpus.encoding import EncodingError, build_example
from .corpus.sample import (
    DatasetError,
    DebugSample,
    dataset_stats,
    read_dataset,
    split_by_project,
    write_dataset,
)
from .evaluation.metrics import MetricConfig, MetricError
from .evaluation.protocol import evaluate_model
from .evaluation.report import MetricsReport
from .mine.commits import MiningError, read_commit_export, write_commit_export
from .mine.extract import extract_functions
from .mine.pipeline import build_samples
from .model.checkpoint import CheckpointError, load_model
from .model.config import ModelConfig
from .model.decoding import detect_via_repair, predict
from .model.network import rank_lines
from .patterns import BugPattern
from .train.loop import NonFiniteLossError, TrainConfig, fit, save_fit_checkpoint
from .train.synthetic import make_commits, make_samples

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

_DATA_ERRORS = (
    DatasetError,
    MiningError,
    EncodingError,
    TokenizerError,
    CheckpointError,
    FileNotFoundError,
    IsADirectoryError,
    json.JSONDecodeError,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1 instead of argparse's 2
        raise UsageError(message)


def _emit(payload: dict, human: str | None, quiet: bool) -> None:
    print(json.dumps(payload, sort_keys=True))
    if human and not quiet:
        print(human)


def _load_config_overrides(path_or_json: str | None) -> dict:
    if not path_or_json:
        return {}
    if os.path.exists(path_or_json):
        with open(path_or_json, encoding="utf-8") as f:
            return json.load(f)
    return json.loads(path_or_json)


# ---------------- subcommands ----------------

def cmd_synth(args) -> int:
    if args.format == "commits":
        commits = make_commits(
            args.pairs, seed=args.seed, n_projects=args.projects, noise_commits=args.noise
        )
        n = write_commit_export(commits, args.out)
        payload = {"command": "synth", "format": "commits", "records": n, "out": args.out}
    else:
        samples = make_samples(args.pairs * 2, seed=args.seed, n_projects=args.projects)
        n = write_dataset(samples, args.out)
        payload = {"command": "synth", "format": "dataset", "records": n, "out": args.out}
    _emit(payload, f"wrote {n} records to {args.out}", args.quiet)
    return EXIT_OK


def cmd_mine(args) -> int:
    commits = read_commit_export(args.input)
    samples, stats = build_samples(commits)
    write_dataset(samples, args.out)
    payload = {"command": "mine", "out": args.out, **stats.to_dict()}
    human = (
        f"{stats.bugfix_commits}/{stats.commits_scanned} bug-fix commits -> "
        f"{stats.samples_emitted} samples ({args.out})"
    )
    _emit(payload, human, args.quiet)
    return EXIT_OK


def _split_paths(corpus_dir: str) -> dict:
    return {name: os.path.join(corpus_dir, f"{name}.ndjson") for name in ("train", "val", "test")}


def cmd_build_corpus(args) -> int:
    samples = read_dataset(args.dataset)
    ratios = tuple(float(r) for r in args.ratios.split(","))
    train_set, val_set, test_set = split_by_project(samples, ratios, seed=args.seed)
    os.makedirs(args.out, exist_ok=True)
    splits = {"train": train_set, "val": val_set, "test": test_set}
    for name, split in splits.items():
        write_dataset(split, _split_paths(args.out)[name])
    texts = [s.before_text() for s in train_set] + [s.after_text() for s in train_set]
    tok = train_tokenizer(texts, vocab_size=args.vocab_size)
    tok.save(os.path.join(args.out, "tokenizer.json"))
    stats = dataset_stats(splits)
    with open(os.path.join(args.out, "corpus_meta.json"), "w", encoding="utf-8") as f:
        json.dump({"stats": stats, "vocab_size": tok.size, "seed": args.seed}, f, sort_keys=True)
    payload = {"command": "build-corpus", "out": args.out, "vocab_size": tok.size, "stats": stats}
    human = "\n".join(
        f"{name}: {v['projects']} projects, {v['instances']} instances" for name, v in stats.items()
    )
    _emit(payload, human, args.quiet)
    return EXIT_OK


def _load_corpus(corpus_dir: str, split: str) -> list[DebugSample]:
    path = _split_paths(corpus_dir)[split]
    return read_dataset(path)


def cmd_train(args) -> int:
    overrides = _load_config_overrides(args.config)
    tok = Tokenizer.load(os.path.join(args.corpus, "tokenizer.json"))
    train_set = _load_corpus(args.corpus, "train")
    val_set = _load_corpus(args.corpus, "val")

    model_kwargs = {"vocab_size": tok.size, "seed": args.seed, "dropout": 0.0}
    model_kwargs.update(overrides.get("model", {}))
    model_cfg = ModelConfig(**model_kwargs)
    train_kwargs = {
        "objectives": args.mask,
        "max_steps": args.steps,
        "batch_size": args.batch_size,
        "learning_rate": args.lr,
        "val_interval": args.val_interval,
        "patience": args.patience,
        "seed": args.seed,
    }
    train_kwargs.update(overrides.get("train", {}))
    train_cfg = TrainConfig(**train_kwargs)

    os.makedirs(args.out, exist_ok=True)
    log_path = os.path.join(args.out, "train_log.ndjson")
    ckpt = fit(train_cfg, model_cfg, tok, train_set, val_set, log_path=log_path, quiet=args.quiet)
    ckpt_path = os.path.join(args.out, "checkpoint.npz")
    save_fit_checkpoint(ckpt_path, ckpt)
    payload = {
        "command": "train",
        "checkpoint": ckpt_path,
        "log": log_path,
        "best_step": ckpt.step,
        "best_val_score": ckpt.best_val_score,
        "best_val_metrics": ckpt.best_val_metrics,
        "objectives": train_cfg.objectives,
    }
    human = (
        f"best step {ckpt.step}: score {ckpt.best_val_score:.4f} "
        f"{ckpt.best_val_metrics} -> {ckpt_path}"
    )
    _emit(payload, human, args.quiet)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    overrides = _load_config_overrides(args.config)
    model_cfg, params, _, _ = load_model(args.checkpoint)
    tok = Tokenizer.load(os.path.join(args.corpus, "tokenizer.json"))
    samples = _load_corpus(args.corpus, args.split)
    metric_kwargs = overrides.get("metrics", {})
    if args.beam is not None:
        metric_kwargs.setdefault("beam_width", args.beam)
    metric_cfg = MetricConfig(**metric_kwargs)
    report = evaluate_model(
        params, model_cfg, tok, samples, metric_cfg, detection_mode=args.detection_mode
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(report.to_json(indent=2))
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as f:
            f.write(report.per_pattern_csv())
    payload = {"command": "evaluate", "split": args.split, "report": report.to_dict()}
    _emit(payload, report.render_table(), args.quiet)
    return EXIT_OK


def cmd_debug(args) -> int:
    model_cfg, params, _, _ = load_model(args.checkpoint)
    tok = Tokenizer.load(args.tokenizer)
    with open(args.source, encoding="utf-8") as f:
        text = f.read()
    language = args.language or ("python" if args.source.endswith(".py") else "java")
    spans = extract_functions(text, language)
    if not spans:
        raise DatasetError(f"no functions found in {args.source}")
    if args.function:
        spans = [s for s in spans if s.name == args.function]
        if not spans:
            available = sorted({s.name for s in extract_functions(text, language)})
            raise DatasetError(
                f"function {args.function!r} not found; available: {', '.join(available)}"
            )

    results = []
    for span in spans:
        sample = DebugSample(
            before_lines=span.body_lines,
            after_lines=span.body_lines,
            line_labels=[0] * len(span.body_lines),
            function_label=0,
        )
        example = build_example(sample, tok, model_cfg.max_source_len, model_cfg.max_target_len)
        if example.degenerate:
            results.append({"function": span.name, "error": "function too long to encode"})
            continue
        pred = predict(params, model_cfg, example, beam_width=args.beam,
                       bos_id=tok.bos_id, eos_id=tok.eos_id)
        verdict = pred.detect_prob > 0.5
        repair_text = tok.decode(pred.repair_beam[0][0]) if pred.repair_beam else ""
        repair_differs = detect_via_repair(sample.before_text(), repair_text)
        ranked = rank_lines(pred.line_probs)[: args.top_k]
        entry = {
            "function": span.name,
            "start_line": span.start_line,
            "buggy": verdict,
            "probability": round(pred.detect_prob, 6),
            "suspicious_lines": [
                {
                    "line": span.start_line + i,
                    "score": round(pred.line_probs[i], 6),
                    "text": span.body_lines[i],
                }
                for i in ranked
            ],
            "repair": repair_text if verdict else None,
            "repair_head_disagrees": repair_differs != verdict,
        }
        results.append(entry)

    payload = {"command": "debug", "source": args.source, "functions": results}
    human_parts = []
    for entry in results:
        if "error" in entry:
            human_parts.append(f"{entry['function']}: {entry['error']}")
            continue
        verdict = "BUGGY" if entry["buggy"] else "clean"
        human_parts.append(
            f"{entry['function']} (line {entry['start_line']}): {verdict} "
            f"p={entry['probability']:.3f}"
        )
        for line in entry["suspicious_lines"]:
            human_parts.append(f"  [{line['score']:.3f}] line {line['line']}: {line['text']}")
        if entry["buggy"] and entry["repair"]:
            span = next(s for s in spans if s.name == entry["function"])
            diff = difflib.unified_diff(
                span.body_lines, entry["repair"].split("\n"),
                fromfile="before", tofile="suggested", lineterm="",
            )
            human_parts.extend(f"  {d}" for d in diff)
        if entry["repair_head_disagrees"]:
            human_parts.append("  note: repair head disagrees with the detection verdict")
    _emit(payload, "\n".join(human_parts), args.quiet)
    return EXIT_OK


def cmd_report(args) -> int:
    with open(args.metrics, encoding="utf-8") as f:
        report = MetricsReport.from_json(f.read())
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as f:
            f.write(report.per_pattern_csv())
    payload = {"command": "report", "report": report.to_dict()}
    _emit(payload, report.render_table(), args.quiet)
    return EXIT_OK


# ---------------- parser wiring ----------------

def build_parser() -> _Parser:
    parser = _Parser(
        prog="codemend",
        description="Detect buggy functions, rank their buggy lines, and generate fixes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--config", help="JSON file or inline JSON with config overrides")
        p.add_argument("--quiet", action="store_true", help="machine-readable output only")

    p = sub.add_parser("synth", help="generate a synthetic commit export or dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--pairs", type=int, default=32)
    p.add_argument("--projects", type=int, default=8)
    p.add_argument("--noise", type=int, default=0, help="extra non-bug-fix commits")
    p.add_argument("--format", choices=("commits", "dataset"), default="commits")
    common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("mine", help="mine a commit export into a debugging dataset")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("build-corpus", help="split a dataset by project and train a tokenizer")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--vocab-size", type=int, default=512)
    p.add_argument("--ratios", default="0.6,0.2,0.2")
    common(p)
    p.set_defaults(func=cmd_build_corpus)

    p = sub.add_parser("train", help="train a model on a built corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mask", default="DLR", help="objective subset, e.g. D, LR, DLR")
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--val-interval", type=int, default=100)
    p.add_argument("--patience", type=int, default=5)
    common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="evaluate a checkpoint on a corpus split")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--split", choices=("train", "val", "test"), default="test")
    p.add_argument("--detection-mode", choices=("head", "repair"), default="head")
    p.add_argument("--beam", type=int, default=None)
    p.add_argument("--out", help="write the metrics report JSON here")
    p.add_argument("--csv", help="write the per-pattern breakdown CSV here")
    common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("debug", help="detect, localize, and repair functions in a source file")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--tokenizer", required=True)
    p.add_argument("--source", required=True)
    p.add_argument("--function", help="only this function (default: all)")
    p.add_argument("--language", choices=("java", "python"))
    p.add_argument("--top-k", type=int, default=5)
    p.add_argument("--beam", type=int, default=4)
    common(p)
    p.set_defaults(func=cmd_debug)

    p = sub.add_parser("report", help="render a saved metrics report")
    p.add_argument("--metrics", required=True)
    p.add_argument("--csv", help="write the per-pattern breakdown CSV here")
    common(p)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NonFiniteLossError, MetricError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
