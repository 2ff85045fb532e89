"""Confusion-matrix metrics and ROC-AUC for binary classification.

The positive class is label 1 ("acceptable").  Metrics with a zero
denominator return 0 by convention so sweep tables stay total.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(predictions: Sequence[int], labels: Sequence[int]) -> ConfusionMatrix:
    preds = np.asarray(predictions)
    labs = np.asarray(labels)
    if preds.shape != labs.shape or preds.ndim != 1:
        raise InputError(f"predictions and labels must be equal-length 1-D, got {preds.shape} and {labs.shape}")
    if preds.size == 0:
        raise InputError("cannot build a confusion matrix from zero examples")
    return ConfusionMatrix(
        tp=int(np.sum((preds == 1) & (labs == 1))),
        fp=int(np.sum((preds == 1) & (labs == 0))),
        tn=int(np.sum((preds == 0) & (labs == 0))),
        fn=int(np.sum((preds == 0) & (labs == 1))),
    )


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def derive_metrics(cm: ConfusionMatrix) -> dict[str, float]:
    """Accuracy, precision, recall, F1, and Matthews correlation coefficient."""
    if cm.total <= 0:
        raise InputError("confusion matrix is empty")
    accuracy = (cm.tp + cm.tn) / cm.total
    precision = _ratio(cm.tp, cm.tp + cm.fp)
    recall = _ratio(cm.tp, cm.tp + cm.fn)
    f1 = _ratio(2.0 * precision * recall, precision + recall)
    mcc_den = math.sqrt(
        float(cm.tp + cm.fp) * float(cm.tp + cm.fn) * float(cm.tn + cm.fp) * float(cm.tn + cm.fn)
    )
    mcc = _ratio(cm.tp * cm.tn - cm.fp * cm.fn, mcc_den)
    return {
        "accuracy": accuracy,
        "precision": precision,
        "recall": recall,
        "f1": f1,
        "mcc": mcc,
    }


def roc_auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Probability a random positive outscores a random negative, ties count 1/2.

    Computed by the rank-sum (Mann-Whitney) formulation with average ranks for
    tied scores.
    """
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels)
    if s.shape != y.shape or s.ndim != 1:
        raise InputError(f"scores and labels must be equal-length 1-D, got {s.shape} and {y.shape}")
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise InputError("ROC-AUC is undefined when only one class is present")

    order = np.argsort(s, kind="stable")
    ranks = np.empty(s.size, dtype=float)
    sorted_scores = s[order]
    i = 0
    while i < s.size:
        j = i
        while j + 1 < s.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0  # average of 1-based ranks
        i = j + 1
    rank_sum_pos = float(ranks[y == 1].sum())
    return (rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def roc_auc_brute_force(scores: Sequence[float], labels: Sequence[int]) -> float:
    """O(P*N) pairwise comparison; the independent oracle for roc_auc."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels)
    pos = s[y == 1]
    neg = s[y == 0]
    if pos.size == 0 or neg.size == 0:
        raise InputError("ROC-AUC is undefined when only one class is present")
    wins = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                wins += 1.0
            elif p == n:
                wins += 0.5
    return wins / (pos.size * neg.size)


@dataclass(frozen=True)
class MetricsReport:
    """Everything reported per evaluation: counts, rates, AUC, and mean loss."""

    tp: int
    fp: int
    tn: int
    fn: int
    accuracy: float
    precision: float
    recall: float
    f1: float
    mcc: float
    roc_auc: float
    loss: float

    @classmethod
    def compute(
        cls,
        predictions: Sequence[int],
        labels: Sequence[int],
        scores: Sequence[float],
        loss: float,
    ) -> "MetricsReport":
        cm = confusion(predictions, labels)
        derived = derive_metrics(cm)
        try:
            auc = roc_auc(scores, labels)
        except InputError:
            auc = 0.0  # single-class validation set: report 0 rather than abort a run
        return cls(
            tp=cm.tp, fp=cm.fp, tn=cm.tn, fn=cm.fn,
            accuracy=derived["accuracy"], precision=derived["precision"],
            recall=derived["recall"], f1=derived["f1"], mcc=derived["mcc"],
            roc_auc=auc, loss=float(loss),
        )

    def to_dict(self) -> dict:
        return {
            "tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn,
            "accuracy": round(self.accuracy, 6), "precision": round(self.precision, 6),
            "recall": round(self.recall, 6), "f1": round(self.f1, 6),
            "mcc": round(self.mcc, 6), "roc_auc": round(self.roc_auc, 6),
            "loss": round(self.loss, 6),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        return cls(**{k: d[k] for k in (
            "tp", "fp", "tn", "fn", "accuracy", "precision", "recall", "f1", "mcc", "roc_auc", "loss"
        )})
