"""Command-line interface.

Subcommands: build-vocab, pretrain, finetune, multitrain, evaluate, sweep,
ingest, query, export-report.  Exit codes: 0 success, 1 usage error, 2
runtime error.  ``--config`` supplies a flat JSON file whose keys mirror the
training configuration (epochs, batch_size, learning_rate, epsilon,
weight_decay, warmup_steps, split_ratio, validations_per_epoch, prune_layer,
prune_heads, selection_metric, k, seed); explicit command-line flags override
file values.
"""

from __future__ import annotations

import argparse
import json
import sys

from .data import load_dataset, split
from .errors import InputError, MiniBertError
from .kb import DEFAULT_LABEL_NAMES, KnowledgeBase, ingest_and_classify
from .model import Checkpoint, MiniBert, ModelConfig
from .tokenizer import Vocabulary, build_vocab
from .trainer import (
    MultiTrainConfig,
    RunLog,
    TrainConfig,
    encode_dataset,
    evaluate_model,
    finetune_multi,
    finetune_single,
    pretrain_mlm,
    sweep,
)

USAGE_EXIT = 1
RUNTIME_EXIT = 2

# config-file key -> TrainConfig field
CONFIG_KEYS = {
    "epochs": "epochs",
    "batch_size": "batch_size",
    "learning_rate": "base_lr",
    "epsilon": "eps",
    "weight_decay": "weight_decay",
    "warmup_steps": "warmup_steps",
    "split_ratio": "split_ratio",
    "validations_per_epoch": "validations_per_epoch",
    "prune_layer": "prune_layer",
    "prune_heads": "prune_heads",
    "prune_mode": "prune_mode",
    "selection_metric": "selection_metric",
    "seed": "seed",
    "max_len": "max_len",
    "k": "k",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def _parse_prune_heads(text: str):
    if text == "all":
        return None
    if text in ("none", ""):
        return ()
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise InputError(f"cannot parse prune heads {text!r}; use 'all', 'none', or e.g. '0,2'")


def _add_train_flags(parser: argparse.ArgumentParser, multi: bool) -> None:
    parser.add_argument("--config", help="flat JSON config file")
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--batch-size", type=int)
    parser.add_argument("--learning-rate", type=float)
    parser.add_argument("--epsilon", type=float)
    parser.add_argument("--weight-decay", type=float)
    parser.add_argument("--warmup-steps", type=int)
    parser.add_argument("--split-ratio", type=float)
    parser.add_argument("--validations-per-epoch", type=int)
    parser.add_argument("--prune-layer", type=int)
    parser.add_argument("--prune-heads", help="'all', 'none', or comma-separated head indices")
    parser.add_argument("--selection-metric")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--max-len", type=int)
    if multi:
        parser.add_argument("--k", type=int)
        parser.add_argument("--workers", type=int, default=1)


def _train_config(args, mode: str):
    """Merge config-file values with explicit flags; mode is 'single',
    'multi', or 'auto' (multi when an effective k > 1 is present)."""
    values: dict = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise InputError("config file must hold a flat JSON object")
        for key, value in raw.items():
            if key not in CONFIG_KEYS:
                raise InputError(f"unknown config key {key!r}")
            if key == "prune_heads" and value is not None:
                value = tuple(int(v) for v in value)
            values[CONFIG_KEYS[key]] = value

    flag_map = {
        "epochs": "epochs",
        "batch_size": "batch_size",
        "learning_rate": "base_lr",
        "epsilon": "eps",
        "weight_decay": "weight_decay",
        "warmup_steps": "warmup_steps",
        "split_ratio": "split_ratio",
        "validations_per_epoch": "validations_per_epoch",
        "prune_layer": "prune_layer",
        "selection_metric": "selection_metric",
        "seed": "seed",
        "max_len": "max_len",
    }
    for attr, field in flag_map.items():
        value = getattr(args, attr, None)
        if value is not None:
            values[field] = value
    if getattr(args, "prune_heads", None) is not None:
        values["prune_heads"] = _parse_prune_heads(args.prune_heads)
    if getattr(args, "k", None) is not None:
        values["k"] = args.k

    if mode == "multi" or (mode == "auto" and values.get("k", 1) > 1):
        values.setdefault("k", 3)
        return MultiTrainConfig(**values)
    values.pop("k", None)
    return TrainConfig(**values)


def _load_model(path) -> MiniBert:
    return MiniBert.from_checkpoint(Checkpoint.load(path))


def _write_or_print(text: str, output) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text, end="" if text.endswith("\n") else "\n")


# -- subcommand implementations ----------------------------------------------------


def _cmd_build_vocab(args) -> int:
    from .kb import read_input_texts

    texts = read_input_texts(args.input, args.format)
    vocab = build_vocab(texts, args.max_size)
    vocab.save(args.output)
    print(f"wrote {len(vocab)} tokens to {args.output}")
    return 0


def _cmd_pretrain(args) -> int:
    vocab = Vocabulary.load(args.vocab)
    cfg = _train_config(args, mode="single")
    config = ModelConfig(
        vocab_size=len(vocab),
        num_layers=args.num_layers,
        hidden_size=args.hidden_size,
        num_heads=args.num_heads,
        ff_size=args.ff_size,
        max_positions=max(args.max_positions, cfg.max_len),
        dropout_rate=args.dropout,
    )
    from .kb import read_input_texts

    corpus = read_input_texts(args.corpus, args.format)
    checkpoint = pretrain_mlm(config, vocab, corpus, cfg)
    checkpoint.save(args.output)
    print(f"saved pretrained checkpoint to {args.output}")
    return 0


def _split_from_args(args, cfg):
    records = load_dataset(args.data, args.format)
    return split(records, cfg.split_ratio, cfg.seed)


def _cmd_finetune(args) -> int:
    vocab = Vocabulary.load(args.vocab)
    cfg = _train_config(args, mode="single")
    start = Checkpoint.load(args.checkpoint)
    dataset = _split_from_args(args, cfg)
    checkpoint, runlog = finetune_single(start, vocab, dataset, cfg)
    checkpoint.save(args.output)
    if args.runlog:
        runlog.save(args.runlog)
    print(json.dumps(runlog.final_event()["report"], sort_keys=True))
    return 0


def _cmd_multitrain(args) -> int:
    vocab = Vocabulary.load(args.vocab)
    cfg = _train_config(args, mode="multi")
    start = Checkpoint.load(args.checkpoint)
    dataset = _split_from_args(args, cfg)
    checkpoint, runlog = finetune_multi(start, vocab, dataset, cfg, workers=args.workers)
    checkpoint.save(args.output)
    if args.runlog:
        runlog.save(args.runlog)
    print(json.dumps(runlog.final_event()["report"], sort_keys=True))
    return 0


def _cmd_evaluate(args) -> int:
    vocab = Vocabulary.load(args.vocab)
    model = _load_model(args.checkpoint)
    records = load_dataset(args.data, args.format)
    data = encode_dataset(vocab, records, args.max_len)
    report = evaluate_model(model, data, args.batch_size)
    print(report.to_json())
    return 0


def _cmd_sweep(args) -> int:
    vocab = Vocabulary.load(args.vocab)
    cfg = _train_config(args, mode="auto")
    start = Checkpoint.load(args.checkpoint)
    dataset = _split_from_args(args, cfg)
    raw_values = [v for v in args.values.split(",") if v]
    if args.vary == "pruning":
        values = [v.lower() in ("1", "true", "on", "yes") for v in raw_values]
    elif args.vary == "learning_rate":
        values = [float(v) for v in raw_values]
    else:
        values = [int(v) for v in raw_values]
    result = sweep(start, vocab, dataset, args.vary, values, cfg)
    _write_or_print(result.to_tsv(), args.output)
    return 0


def _cmd_ingest(args) -> int:
    vocab = Vocabulary.load(args.vocab)
    model = _load_model(args.checkpoint)
    store = KnowledgeBase(args.store)
    label_names = dict(DEFAULT_LABEL_NAMES)
    if args.label_names:
        label_names = {int(k): v for k, v in json.loads(args.label_names).items()}
    errors: list[str] = []
    count = ingest_and_classify(
        model, vocab, args.input, store,
        fmt=args.format, label_names=label_names, max_len=args.max_len,
        source=args.source, error_log=errors,
    )
    for message in errors:
        print(message, file=sys.stderr)
    print(f"stored {count} records in {args.store}")
    return 0


def _cmd_query(args) -> int:
    store = KnowledgeBase(args.store)
    records = store.query(label=args.label, keyword=args.keyword, limit=args.limit)
    for record in records:
        print(record.to_json())
    return 0


def _cmd_export_report(args) -> int:
    runlog = RunLog.load(args.runlog)
    if args.format == "json":
        report = runlog.final_event()["report"]
        _write_or_print(json.dumps(report, sort_keys=True) + "\n", args.output)
        return 0
    # TSV of every validation event
    header = ["model_id", "epoch", "step", "mcc", "accuracy", "precision", "recall",
              "f1", "roc_auc", "loss"]
    lines = ["\t".join(header)]
    for event in runlog.validation_events():
        r = event["report"]
        lines.append("\t".join(
            [str(event["model_id"]), str(event["epoch"]), str(event["step"])]
            + [f"{r[k]:.6f}" for k in ("mcc", "accuracy", "precision", "recall", "f1", "roc_auc", "loss")]
        ))
    _write_or_print("\n".join(lines) + "\n", args.output)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="minibert", description="Mini BERT-style classification toolkit")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("build-vocab", help="build a WordPiece vocabulary file")
    p.add_argument("--input", required=True)
    p.add_argument("--format", default="text", choices=["text", "cola", "simple"])
    p.add_argument("--max-size", type=int, default=8192)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_build_vocab)

    p = sub.add_parser("pretrain", help="MLM-pretrain a fresh encoder (epochs 0 = init only)")
    p.add_argument("--vocab", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--format", default="text", choices=["text", "cola", "simple"])
    p.add_argument("--num-layers", type=int, default=2)
    p.add_argument("--hidden-size", type=int, default=64)
    p.add_argument("--num-heads", type=int, default=4)
    p.add_argument("--ff-size", type=int, default=256)
    p.add_argument("--max-positions", type=int, default=64)
    p.add_argument("--dropout", type=float, default=0.1)
    p.add_argument("--output", required=True)
    _add_train_flags(p, multi=False)
    p.set_defaults(func=_cmd_pretrain)

    p = sub.add_parser("finetune", help="single-model pruned fine-tuning")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--format", default="cola", choices=["cola", "simple"])
    p.add_argument("--output", required=True)
    p.add_argument("--runlog")
    _add_train_flags(p, multi=False)
    p.set_defaults(func=_cmd_finetune)

    p = sub.add_parser("multitrain", help="k-candidate training with best-model selection")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--format", default="cola", choices=["cola", "simple"])
    p.add_argument("--output", required=True)
    p.add_argument("--runlog")
    _add_train_flags(p, multi=True)
    p.set_defaults(func=_cmd_multitrain)

    p = sub.add_parser("evaluate", help="print a metrics report for a labeled file")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--format", default="cola", choices=["cola", "simple"])
    p.add_argument("--max-len", type=int, default=64)
    p.add_argument("--batch-size", type=int, default=32)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("sweep", help="vary one hyperparameter, emit a TSV of metrics")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--format", default="cola", choices=["cola", "simple"])
    p.add_argument("--vary", required=True,
                   choices=["batch_size", "epochs", "learning_rate", "n_val", "pruning"])
    p.add_argument("--values", required=True, help="comma-separated cell values")
    p.add_argument("--output")
    _add_train_flags(p, multi=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("ingest", help="classify a file and append records to the store")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--store", required=True)
    p.add_argument("--format", default="cola", choices=["cola", "simple", "text"])
    p.add_argument("--max-len", type=int, default=64)
    p.add_argument("--source")
    p.add_argument("--label-names", help='JSON map, e.g. \'{"0": "bad", "1": "good"}\'')
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("query", help="query the knowledgebase store")
    p.add_argument("--store", required=True)
    p.add_argument("--label", type=int)
    p.add_argument("--keyword")
    p.add_argument("--limit", type=int)
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("export-report", help="extract the final report or a validation table")
    p.add_argument("--runlog", required=True)
    p.add_argument("--format", default="json", choices=["json", "tsv"])
    p.add_argument("--output")
    p.set_defaults(func=_cmd_export_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        return USAGE_EXIT
    try:
        return args.func(args)
    except MiniBertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT


if __name__ == "__main__":
    raise SystemExit(main())
