"""Training orchestration: pruned fine-tuning, multi-model selection, MLM
pretraining, in-training validation with best-checkpoint restore, and sweeps.

The multi-model flow trains k identically initialized candidates for one
epoch, each on its own permutation of the training data, picks the candidate
with the best end-of-epoch validation metric, stops the others permanently,
and trains only the winner for the remaining epochs.  Every candidate's
learning-rate schedule spans the full run horizon so the winner's schedule is
continuous across the selection boundary.

Each run's randomness (data order, dropout, MLM masking) derives from its own
seed through the pinned generator in :mod:`minibert.rng`, so a k=1 multi run
is byte-identical to a plain fine-tune with the derived seed, and concurrent
epoch-0 training cannot perturb results.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from . import tensor as T
from .data import SplitDataset, batches, permute, steps_per_epoch
from .errors import ConfigError, InputError
from .metrics import MetricsReport
from .model import Checkpoint, MiniBert, ModelConfig
from .optim import AdamW, LinearSchedule, clip_grad_norm, lr_at
from .rng import derive_rng, derive_seed
from .tokenizer import CLS_ID, MASK_ID, SEP_ID, TokenizedBatch, Vocabulary, encode

SELECTABLE_METRICS = ("accuracy", "mcc", "f1", "precision", "recall", "roc_auc")

MLM_SELECT_RATE = 0.15
MLM_MASK_SHARE = 0.8
MLM_RANDOM_SHARE = 0.1


@dataclass(frozen=True)
class TrainConfig:
    """Fine-tuning hyperparameters: 3 epochs, batch 16, AdamW at 2e-5 with
    eps 1e-8, 80:20 split, 10 validations per epoch, and pruning of every
    head of the first layer by default."""

    epochs: int = 3
    batch_size: int = 16
    base_lr: float = 2e-5
    eps: float = 1e-8
    weight_decay: float = 0.01
    warmup_steps: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    bias_correction: bool = True
    max_grad_norm: float | None = None
    split_ratio: float = 0.8
    validations_per_epoch: int = 10
    prune_layer: int = 0
    prune_heads: tuple[int, ...] | None = None  # None = every head of prune_layer
    prune_mode: str = "remove"
    selection_metric: str = "accuracy"
    seed: int = 0
    max_len: int = 64

    def __post_init__(self):
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.validations_per_epoch < 1:
            raise ConfigError(f"validations_per_epoch must be >= 1, got {self.validations_per_epoch}")
        if self.base_lr <= 0:
            raise ConfigError(f"base_lr must be positive, got {self.base_lr}")
        if self.selection_metric not in SELECTABLE_METRICS:
            raise ConfigError(
                f"selection_metric must be one of {SELECTABLE_METRICS}, got {self.selection_metric!r}"
            )
        if self.prune_mode not in ("remove", "reinit"):
            raise ConfigError(f"prune_mode must be 'remove' or 'reinit', got {self.prune_mode!r}")
        if not 0.0 < self.split_ratio < 1.0:
            raise ConfigError(f"split_ratio must be in (0, 1), got {self.split_ratio}")


@dataclass(frozen=True)
class MultiTrainConfig(TrainConfig):
    k: int = 3

    def __post_init__(self):
        super().__post_init__()
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")


class RunLog:
    """Ordered event records for one training run (single or multi)."""

    def __init__(self, events: list[dict] | None = None):
        self.events: list[dict] = events or []

    def add(self, event_type: str, **fields) -> None:
        self.events.append({"type": event_type, **fields})

    def validation_events(self, model_id: int | None = None) -> list[dict]:
        out = [e for e in self.events if e["type"] == "validation"]
        if model_id is not None:
            out = [e for e in out if e["model_id"] == model_id]
        return out

    def selection_event(self) -> dict | None:
        for e in self.events:
            if e["type"] == "selection":
                return e
        return None

    def final_event(self) -> dict:
        finals = [e for e in self.events if e["type"] == "final"]
        if not finals:
            raise InputError("run log has no final event")
        return finals[-1]

    def to_jsonl(self, include_timings: bool = True) -> str:
        lines = []
        for e in self.events:
            if not include_timings and e["type"] == "timing":
                continue
            lines.append(json.dumps(e, sort_keys=True))
        return "\n".join(lines) + "\n"

    def canonical_bytes(self) -> bytes:
        """Serialization with wall-clock data stripped, for determinism checks."""
        return self.to_jsonl(include_timings=False).encode("utf-8")

    def save(self, path, include_timings: bool = True) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_jsonl(include_timings=include_timings))

    @classmethod
    def load(cls, path) -> "RunLog":
        events = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    events.append(json.loads(line))
        return cls(events)


def validation_steps(spe: int, n_val: int) -> list[int]:
    """1-based step indices within an epoch at which to run validation.

    min(n_val, spe) events: multiples of ceil(spe / n_eff), plus the final
    step of the epoch.
    """
    if spe < 1:
        raise InputError(f"steps_per_epoch must be >= 1, got {spe}")
    n_eff = min(n_val, spe)
    spacing = -(-spe // n_eff)
    steps = {spacing * j for j in range(1, n_eff) if spacing * j < spe}
    steps.add(spe)
    return sorted(steps)


def encode_dataset(vocab: Vocabulary, records: Sequence, max_len: int) -> TokenizedBatch:
    examples = [encode(vocab, r.text, max_len, label=r.label) for r in records]
    return TokenizedBatch.from_examples(examples)


def _slice_batch(full: TokenizedBatch, idx: np.ndarray) -> TokenizedBatch:
    return TokenizedBatch(
        input_ids=full.input_ids[idx],
        attention_mask=full.attention_mask[idx],
        token_type_ids=full.token_type_ids[idx],
        labels=None if full.labels is None else full.labels[idx],
    )


def _softmax_scores(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    p = np.exp(z)
    p /= p.sum(axis=1, keepdims=True)
    return p


def evaluate_model(model: MiniBert, data: TokenizedBatch, batch_size: int) -> MetricsReport:
    """Eval-mode pass over a labeled dataset: metrics plus mean cross-entropy."""
    n = len(data)
    if n == 0:
        raise InputError("cannot evaluate on an empty dataset")
    preds: list[np.ndarray] = []
    scores: list[np.ndarray] = []
    loss_sum = 0.0
    for lo in range(0, n, batch_size):
        idx = np.arange(lo, min(lo + batch_size, n))
        chunk = _slice_batch(data, idx)
        logits = model.forward(chunk).data
        loss_sum += float(T.cross_entropy(T.Tensor(logits), chunk.labels).data) * len(idx)
        probs = _softmax_scores(logits)
        preds.append(np.argmax(logits, axis=1))
        scores.append(probs[:, 1])
    return MetricsReport.compute(
        predictions=np.concatenate(preds),
        labels=np.asarray(data.labels),
        scores=np.concatenate(scores),
        loss=loss_sum / n,
    )


def predict(model: MiniBert, data: TokenizedBatch, batch_size: int = 32) -> tuple[np.ndarray, np.ndarray]:
    """Argmax labels and full softmax probabilities, eval mode."""
    preds: list[np.ndarray] = []
    probs: list[np.ndarray] = []
    for lo in range(0, len(data), batch_size):
        idx = np.arange(lo, min(lo + batch_size, len(data)))
        logits = model.forward(_slice_batch(data, idx)).data
        preds.append(np.argmax(logits, axis=1))
        probs.append(_softmax_scores(logits))
    return np.concatenate(preds), np.concatenate(probs)


def _resolve_prune_heads(cfg: TrainConfig, config: ModelConfig) -> tuple[int, ...]:
    if cfg.prune_heads is None:
        return tuple(range(config.num_heads))
    return tuple(sorted(set(int(h) for h in cfg.prune_heads)))


class _Run:
    """One model's training state; epoch-0 candidates each own one of these."""

    def __init__(
        self,
        start: Checkpoint,
        train_data: TokenizedBatch,
        val_data: TokenizedBatch,
        cfg: TrainConfig,
        model_id: int,
        total_epochs: int,
    ):
        self.cfg = cfg
        self.model_id = model_id
        self.train_data = train_data
        self.val_data = val_data
        self.model = MiniBert.from_checkpoint(start)
        heads = _resolve_prune_heads(cfg, start.config)
        if heads:
            if cfg.prune_mode == "remove":
                self.model.prune_heads(cfg.prune_layer, heads)
            else:
                self.model.prune_heads(
                    cfg.prune_layer, heads, mode="reinit", rng=derive_rng(cfg.seed, "prune-reinit")
                )
        self.n_train = len(train_data)
        self.spe = steps_per_epoch(self.n_train, cfg.batch_size)
        self.schedule = LinearSchedule(cfg.base_lr, cfg.warmup_steps, total_epochs * self.spe)
        self.val_steps = set(validation_steps(self.spe, cfg.validations_per_epoch))
        self.opt = AdamW(
            self.model.params,
            beta1=cfg.beta1,
            beta2=cfg.beta2,
            eps=cfg.eps,
            weight_decay=cfg.weight_decay,
            bias_correction=cfg.bias_correction,
        )
        self.events: list[dict] = []
        self.best_value = -math.inf
        self.best_epoch = -1
        self.best_step = -1
        self.best_checkpoint: Checkpoint | None = None

    def run_epochs(self, epochs: Iterable[int]) -> None:
        cfg = self.cfg
        for epoch in epochs:
            order = np.array(permute(list(range(self.n_train)), derive_seed(cfg.seed, "perm", epoch)))
            for step, chunk_idx in enumerate(batches(order, cfg.batch_size), start=1):
                batch = _slice_batch(self.train_data, np.asarray(chunk_idx))
                drop_rng = derive_rng(cfg.seed, "dropout", epoch, step)
                logits = self.model.forward(batch, train=True, rng=drop_rng)
                loss = T.cross_entropy(logits, batch.labels)
                self.model.zero_grads()
                loss.backward()
                if cfg.max_grad_norm is not None:
                    clip_grad_norm(self.model.params, cfg.max_grad_norm)
                global_step = epoch * self.spe + step - 1
                self.opt.step(lr_at(self.schedule, global_step))
                if step in self.val_steps:
                    self._validate(epoch, step, global_step, float(loss.data))

    def _validate(self, epoch: int, step: int, global_step: int, train_loss: float) -> None:
        report = evaluate_model(self.model, self.val_data, self.cfg.batch_size)
        self.events.append(
            {
                "type": "validation",
                "model_id": self.model_id,
                "epoch": epoch,
                "step": step,
                "global_step": global_step + 1,
                "train_loss": round(train_loss, 6),
                "report": report.to_dict(),
            }
        )
        value = getattr(report, self.cfg.selection_metric)
        if value > self.best_value:
            self.best_value = value
            self.best_epoch = epoch
            self.best_step = step
            self.best_checkpoint = self.model.to_checkpoint()

    def epoch0_report(self) -> dict:
        for e in self.events:
            if e["epoch"] == 0 and e["step"] == self.spe:
                return e["report"]
        raise InputError("run has no end-of-epoch-0 validation event")

    def finalize(self, runlog: RunLog) -> Checkpoint:
        assert self.best_checkpoint is not None
        self.model = MiniBert.from_checkpoint(self.best_checkpoint)
        best_event = next(
            e
            for e in self.events
            if e["epoch"] == self.best_epoch and e["step"] == self.best_step
        )
        runlog.add(
            "final",
            model_id=self.model_id,
            best_epoch=self.best_epoch,
            best_step=self.best_step,
            optimizer_steps=self.opt.t,
            report=best_event["report"],
        )
        return self.best_checkpoint


def _coerce_checkpoint(start: Checkpoint | MiniBert) -> Checkpoint:
    if isinstance(start, MiniBert):
        return start.to_checkpoint()
    return start


def finetune_single(
    start: Checkpoint | MiniBert,
    vocab: Vocabulary,
    dataset: SplitDataset,
    cfg: TrainConfig,
) -> tuple[Checkpoint, RunLog]:
    """Prune once, then train for cfg.epochs with in-training validation and
    best-checkpoint restore."""
    if cfg.epochs < 1:
        raise InputError(f"fine-tuning needs epochs >= 1, got {cfg.epochs}")
    if not dataset.train:
        raise InputError("empty training set")
    if not dataset.validation:
        raise InputError("empty validation set")
    started = time.perf_counter()
    start = _coerce_checkpoint(start)
    train_data = encode_dataset(vocab, dataset.train, cfg.max_len)
    val_data = encode_dataset(vocab, dataset.validation, cfg.max_len)
    run = _Run(start, train_data, val_data, cfg, model_id=0, total_epochs=cfg.epochs)
    run.run_epochs(range(cfg.epochs))
    runlog = RunLog(list(run.events))
    best = run.finalize(runlog)
    runlog.add("timing", scope="finetune_single", seconds=time.perf_counter() - started)
    return best, runlog


@dataclass
class MultiTrainResult:
    """Everything the multi-model flow produced; the public API returns only
    (checkpoint, runlog), tests can inspect the rest."""

    checkpoint: Checkpoint
    runlog: RunLog
    chosen_index: int
    candidate_seeds: list[int]
    candidates_at_selection: list[Checkpoint]
    candidates_at_end: list[Checkpoint]
    candidate_optimizer_steps: list[int]


def finetune_multi_detailed(
    start: Checkpoint | MiniBert,
    vocab: Vocabulary,
    dataset: SplitDataset,
    cfg: MultiTrainConfig,
    workers: int = 1,
) -> MultiTrainResult:
    if cfg.epochs < 1:
        raise InputError(f"fine-tuning needs epochs >= 1, got {cfg.epochs}")
    if not dataset.train:
        raise InputError("empty training set")
    if not dataset.validation:
        raise InputError("empty validation set")
    started = time.perf_counter()
    start = _coerce_checkpoint(start)
    train_data = encode_dataset(vocab, dataset.train, cfg.max_len)
    val_data = encode_dataset(vocab, dataset.validation, cfg.max_len)

    base = _as_train_config(cfg)
    seeds = [derive_seed(cfg.seed, "model", i) for i in range(cfg.k)]
    runs = [
        _Run(start, train_data, val_data, replace(base, seed=seeds[i]), model_id=i,
             total_epochs=cfg.epochs)
        for i in range(cfg.k)
    ]

    def train_epoch0(run: _Run) -> None:
        run.run_epochs([0])

    if workers > 1 and cfg.k > 1:
        with ThreadPoolExecutor(max_workers=min(workers, cfg.k)) as pool:
            list(pool.map(train_epoch0, runs))
    else:
        for run in runs:
            train_epoch0(run)

    candidates_at_selection = [run.model.to_checkpoint() for run in runs]
    epoch0_reports = {run.model_id: run.epoch0_report() for run in runs}

    def rank(run: _Run) -> tuple:
        report = epoch0_reports[run.model_id]
        return (report[cfg.selection_metric], report["mcc"], -run.model_id)

    chosen = max(runs, key=rank)

    runlog = RunLog()
    for run in runs:
        runlog.events.extend(run.events)
    runlog.add(
        "selection",
        chosen_model_id=chosen.model_id,
        epoch0_reports={str(i): epoch0_reports[i] for i in sorted(epoch0_reports)},
        optimizer_steps={str(run.model_id): run.opt.t for run in runs},
        candidate_seeds={str(i): seeds[i] for i in range(cfg.k)},
    )

    pre_continue = len(chosen.events)
    chosen.run_epochs(range(1, cfg.epochs))
    runlog.events.extend(chosen.events[pre_continue:])
    best = chosen.finalize(runlog)
    runlog.add("timing", scope="finetune_multi", seconds=time.perf_counter() - started)

    return MultiTrainResult(
        checkpoint=best,
        runlog=runlog,
        chosen_index=chosen.model_id,
        candidate_seeds=seeds,
        candidates_at_selection=candidates_at_selection,
        candidates_at_end=[run.model.to_checkpoint() if run is not chosen else best for run in runs],
        candidate_optimizer_steps=[run.opt.t for run in runs],
    )


def finetune_multi(
    start: Checkpoint | MiniBert,
    vocab: Vocabulary,
    dataset: SplitDataset,
    cfg: MultiTrainConfig,
    workers: int = 1,
) -> tuple[Checkpoint, RunLog]:
    result = finetune_multi_detailed(start, vocab, dataset, cfg, workers=workers)
    return result.checkpoint, result.runlog


def _as_train_config(cfg: TrainConfig) -> TrainConfig:
    fields = {name: getattr(cfg, name) for name in TrainConfig.__dataclass_fields__}
    return TrainConfig(**fields)


# -- masked language modeling ---------------------------------------------------


def mlm_mask_batch(
    ids: np.ndarray, attention_mask: np.ndarray, vocab_size: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The 15% / 80-10-10 masking rule.

    Returns (masked input ids, flat positions of selected tokens, their
    original ids).  At least one eligible position is always selected so a
    step never has an empty loss.
    """
    eligible = (attention_mask == 1) & (ids != CLS_ID) & (ids != SEP_ID)
    selected = eligible & (rng.random(ids.shape) < MLM_SELECT_RATE)
    if not selected.any() and eligible.any():
        first = np.unravel_index(np.argmax(eligible), eligible.shape)
        selected[first] = True
    replacement = rng.random(ids.shape)
    masked = ids.copy()
    to_mask = selected & (replacement < MLM_MASK_SHARE)
    to_random = selected & (replacement >= MLM_MASK_SHARE) & (replacement < MLM_MASK_SHARE + MLM_RANDOM_SHARE)
    masked[to_mask] = MASK_ID
    n_random = int(to_random.sum())
    if n_random:
        masked[to_random] = rng.integers(5, vocab_size, size=n_random)
    flat_positions = np.flatnonzero(selected.reshape(-1))
    labels = ids.reshape(-1)[flat_positions]
    return masked, flat_positions, labels


def pretrain_mlm(
    config: ModelConfig,
    vocab: Vocabulary,
    corpus: Sequence[str],
    cfg: TrainConfig,
) -> Checkpoint:
    """Masked-language-model pretraining from random init; epochs=0 returns
    the untouched initialization."""
    model = MiniBert.init(config, cfg.seed)
    if cfg.epochs == 0:
        return model.to_checkpoint()
    corpus = list(corpus)
    if not corpus:
        raise InputError("empty pretraining corpus")
    examples = [encode(vocab, text, cfg.max_len) for text in corpus]
    full = TokenizedBatch.from_examples(examples)
    n = len(full)
    spe = steps_per_epoch(n, cfg.batch_size)
    schedule = LinearSchedule(cfg.base_lr, cfg.warmup_steps, cfg.epochs * spe)
    opt = AdamW(
        model.params,
        beta1=cfg.beta1,
        beta2=cfg.beta2,
        eps=cfg.eps,
        weight_decay=cfg.weight_decay,
        bias_correction=cfg.bias_correction,
    )
    seq_len = full.input_ids.shape[1]
    for epoch in range(cfg.epochs):
        order = np.array(permute(list(range(n)), derive_seed(cfg.seed, "mlm-perm", epoch)))
        for step, chunk_idx in enumerate(batches(order, cfg.batch_size), start=1):
            batch = _slice_batch(full, np.asarray(chunk_idx))
            mask_rng = derive_rng(cfg.seed, "mlm-mask", epoch, step)
            masked_ids, positions, labels = mlm_mask_batch(
                batch.input_ids, batch.attention_mask, config.vocab_size, mask_rng
            )
            masked_batch = TokenizedBatch(masked_ids, batch.attention_mask, batch.token_type_ids)
            drop_rng = derive_rng(cfg.seed, "mlm-dropout", epoch, step)
            logits = model.forward_mlm(masked_batch, train=True, rng=drop_rng)
            flat = T.reshape(logits, (len(batch) * seq_len, config.vocab_size))
            loss = T.cross_entropy(T.gather_rows(flat, positions), labels)
            model.zero_grads()
            loss.backward()
            if cfg.max_grad_norm is not None:
                clip_grad_norm(model.params, cfg.max_grad_norm)
            global_step = epoch * spe + step - 1
            opt.step(lr_at(schedule, global_step))
    return model.to_checkpoint()


def mlm_loss(model: MiniBert, vocab: Vocabulary, corpus: Sequence[str], cfg: TrainConfig, seed: int = 0) -> float:
    """Mean masked-token cross-entropy over a corpus, eval mode."""
    examples = [encode(vocab, text, cfg.max_len) for text in corpus]
    full = TokenizedBatch.from_examples(examples)
    seq_len = full.input_ids.shape[1]
    total, count = 0.0, 0
    for lo in range(0, len(full), cfg.batch_size):
        idx = np.arange(lo, min(lo + cfg.batch_size, len(full)))
        batch = _slice_batch(full, idx)
        rng = derive_rng(seed, "mlm-eval", lo)
        masked_ids, positions, labels = mlm_mask_batch(
            batch.input_ids, batch.attention_mask, model.config.vocab_size, rng
        )
        masked_batch = TokenizedBatch(masked_ids, batch.attention_mask, batch.token_type_ids)
        logits = model.forward_mlm(masked_batch)
        flat = T.reshape(logits, (len(batch) * seq_len, model.config.vocab_size))
        loss = T.cross_entropy(T.gather_rows(flat, positions), labels)
        total += float(loss.data) * len(positions)
        count += len(positions)
    return total / count


# -- hyperparameter sweeps --------------------------------------------------------


SWEEPABLE = {
    "batch_size": ("batch_size", int),
    "epochs": ("epochs", int),
    "learning_rate": ("base_lr", float),
    "n_val": ("validations_per_epoch", int),
    "pruning": ("pruning", bool),
}


@dataclass
class SweepResult:
    vary: str
    values: list
    reports: list[MetricsReport]
    runlogs: dict = field(default_factory=dict)

    def to_tsv(self) -> str:
        header = [self.vary, "mcc", "accuracy", "precision", "recall", "f1", "roc_auc", "loss"]
        lines = ["\t".join(header)]
        for value, report in zip(self.values, self.reports):
            d = report.to_dict()
            row = [str(value)] + [
                f"{d[k]:.6f}" for k in ("mcc", "accuracy", "precision", "recall", "f1", "roc_auc", "loss")
            ]
            lines.append("\t".join(row))
        return "\n".join(lines) + "\n"


def _cell_config(cfg: TrainConfig, vary: str, value):
    field_name, typ = SWEEPABLE[vary]
    if vary == "pruning":
        if not isinstance(value, bool):
            raise ConfigError(f"cell pruning={value!r}: expected a boolean")
        return replace(cfg, prune_heads=None if value else ())
    try:
        coerced = typ(value)
        if typ is int and coerced != float(value):
            raise ValueError
    except (TypeError, ValueError):
        raise ConfigError(f"cell {vary}={value!r}: expected {typ.__name__}")
    if vary == "epochs" and coerced < 1:
        raise ConfigError(f"cell epochs={value!r}: fine-tuning needs epochs >= 1")
    try:
        return replace(cfg, **{field_name: coerced})
    except ConfigError as exc:
        raise ConfigError(f"cell {vary}={value!r}: {exc}") from exc


def sweep(
    start: Checkpoint | MiniBert,
    vocab: Vocabulary,
    dataset: SplitDataset,
    vary: str,
    values: Sequence,
    cfg: TrainConfig,
) -> SweepResult:
    """Re-run training per grid value, changing only the swept field."""
    if vary not in SWEEPABLE:
        raise ConfigError(f"cannot sweep {vary!r}; choose one of {sorted(SWEEPABLE)}")
    if not values:
        raise ConfigError("sweep needs at least one value")
    start = _coerce_checkpoint(start)
    reports: list[MetricsReport] = []
    runlogs: dict = {}
    for value in values:
        cell = _cell_config(cfg, vary, value)
        if isinstance(cell, MultiTrainConfig):
            ckpt, runlog = finetune_multi(start, vocab, dataset, cell)
        else:
            ckpt, runlog = finetune_single(start, vocab, dataset, cell)
        reports.append(MetricsReport.from_dict(runlog.final_event()["report"]))
        runlogs[value] = runlog
    return SweepResult(vary=vary, values=list(values), reports=reports, runlogs=runlogs)
