"""Estimator-style wrapper so the fine-tuning pipeline composes with the
scikit-learn ecosystem (fit/predict/predict_proba, get_params/set_params)."""

from __future__ import annotations

import inspect
from dataclasses import replace

import numpy as np

from .data import LabeledSentence, split
from .errors import InputError
from .model import MiniBert, ModelConfig
from .tokenizer import TokenizedBatch, build_vocab, encode
from .trainer import (
    MultiTrainConfig,
    TrainConfig,
    finetune_multi,
    finetune_single,
    predict as predict_batch,
    pretrain_mlm,
)
from .validation import check_binary_labels, check_is_fitted, check_text_sequence


class TransferTextClassifier:
    """Binary sentence classifier: builds a WordPiece vocabulary, optionally
    MLM-pretrains a small encoder on the training sentences, then fine-tunes
    with first-layer head pruning and (for k > 1) multi-model selection.

    Parameters mirror the training configuration; fitted state lives in
    ``vocab_``, ``model_``, ``runlog_``.
    """

    def __init__(
        self,
        num_layers: int = 2,
        hidden_size: int = 64,
        num_heads: int = 4,
        ff_size: int = 256,
        max_len: int = 64,
        max_vocab_size: int = 8192,
        dropout_rate: float = 0.1,
        epochs: int = 3,
        batch_size: int = 16,
        learning_rate: float = 2e-5,
        epsilon: float = 1e-8,
        weight_decay: float = 0.01,
        warmup_steps: int = 0,
        split_ratio: float = 0.8,
        validations_per_epoch: int = 10,
        prune_layer: int = 0,
        prune_heads: tuple[int, ...] | None = None,
        selection_metric: str = "accuracy",
        k: int = 3,
        mlm_pretrain_epochs: int = 0,
        seed: int = 0,
    ):
        self.num_layers = num_layers
        self.hidden_size = hidden_size
        self.num_heads = num_heads
        self.ff_size = ff_size
        self.max_len = max_len
        self.max_vocab_size = max_vocab_size
        self.dropout_rate = dropout_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.epsilon = epsilon
        self.weight_decay = weight_decay
        self.warmup_steps = warmup_steps
        self.split_ratio = split_ratio
        self.validations_per_epoch = validations_per_epoch
        self.prune_layer = prune_layer
        self.prune_heads = prune_heads
        self.selection_metric = selection_metric
        self.k = k
        self.mlm_pretrain_epochs = mlm_pretrain_epochs
        self.seed = seed

    # -- sklearn plumbing ------------------------------------------------------

    @classmethod
    def _param_names(cls) -> list[str]:
        sig = inspect.signature(cls.__init__)
        return [name for name in sig.parameters if name != "self"]

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params) -> "TransferTextClassifier":
        valid = set(self._param_names())
        for key, value in params.items():
            if key not in valid:
                raise InputError(f"unknown parameter {key!r}")
            setattr(self, key, value)
        return self

    # -- fitting -----------------------------------------------------------------

    def _train_config(self) -> TrainConfig:
        common = dict(
            epochs=self.epochs,
            batch_size=self.batch_size,
            base_lr=self.learning_rate,
            eps=self.epsilon,
            weight_decay=self.weight_decay,
            warmup_steps=self.warmup_steps,
            split_ratio=self.split_ratio,
            validations_per_epoch=self.validations_per_epoch,
            prune_layer=self.prune_layer,
            prune_heads=self.prune_heads,
            selection_metric=self.selection_metric,
            seed=self.seed,
            max_len=self.max_len,
        )
        if self.k > 1:
            return MultiTrainConfig(k=self.k, **common)
        return TrainConfig(**common)

    def fit(self, X, y) -> "TransferTextClassifier":
        X = check_text_sequence(X)
        y = check_binary_labels(y, n=len(X))
        if len(X) < 2:
            raise InputError("need at least 2 sentences to fit")
        self.vocab_ = build_vocab(X, self.max_vocab_size)
        config = ModelConfig(
            vocab_size=len(self.vocab_),
            num_layers=self.num_layers,
            hidden_size=self.hidden_size,
            num_heads=self.num_heads,
            ff_size=self.ff_size,
            max_positions=self.max_len,
            dropout_rate=self.dropout_rate,
        )
        cfg = self._train_config()
        if self.mlm_pretrain_epochs > 0:
            start = pretrain_mlm(config, self.vocab_, X, replace(cfg, epochs=self.mlm_pretrain_epochs))
        else:
            start = MiniBert.init(config, self.seed).to_checkpoint()

        records = [LabeledSentence("", int(label), "", text) for text, label in zip(X, y)]
        dataset = split(records, self.split_ratio, self.seed)
        if isinstance(cfg, MultiTrainConfig):
            checkpoint, runlog = finetune_multi(start, self.vocab_, dataset, cfg)
        else:
            checkpoint, runlog = finetune_single(start, self.vocab_, dataset, cfg)
        self.model_ = MiniBert.from_checkpoint(checkpoint)
        self.runlog_ = runlog
        self.classes_ = np.array([0, 1])
        return self

    # -- inference --------------------------------------------------------------

    def _encode(self, X) -> TokenizedBatch:
        examples = [encode(self.vocab_, text, self.max_len) for text in X]
        return TokenizedBatch.from_examples(examples)

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "model_", "vocab_")
        X = check_text_sequence(X)
        preds, _ = predict_batch(self.model_, self._encode(X), self.batch_size)
        return preds

    def predict_proba(self, X) -> np.ndarray:
        check_is_fitted(self, "model_", "vocab_")
        X = check_text_sequence(X)
        _, probs = predict_batch(self.model_, self._encode(X), self.batch_size)
        return probs

    def score(self, X, y) -> float:
        y = check_binary_labels(y)
        preds = self.predict(X)
        return float(np.mean(preds == y))
