import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minibert.errors import InputError
from minibert.metrics import (
    ConfusionMatrix,
    MetricsReport,
    confusion,
    derive_metrics,
    roc_auc,
    roc_auc_brute_force,
)


def test_confusion_perfect():
    cm = confusion([1, 1, 0], [1, 1, 0])
    assert (cm.tp, cm.fp, cm.tn, cm.fn) == (2, 0, 1, 0)


def test_confusion_all_positive_predictions():
    cm = confusion([1, 1], [1, 0])
    assert (cm.tp, cm.fp) == (1, 1)


def test_confusion_total_invariant():
    rng = np.random.default_rng(0)
    preds = rng.integers(0, 2, 37)
    labels = rng.integers(0, 2, 37)
    assert confusion(preds, labels).total == 37


def test_confusion_length_mismatch():
    with pytest.raises(InputError):
        confusion([1], [1, 0])
    with pytest.raises(InputError):
        confusion([], [])


def test_derive_metrics_reference_confusion_matrix():
    # frozen reference: tp 333, fp 78, tn 84, fn 21 over 516 examples
    out = derive_metrics(ConfusionMatrix(tp=333, fp=78, tn=84, fn=21))
    assert out["accuracy"] == pytest.approx(0.808, abs=1e-3)
    assert out["precision"] == pytest.approx(0.810, abs=1e-3)
    assert out["recall"] == pytest.approx(0.941, abs=1e-3)
    assert out["f1"] == pytest.approx(0.871, abs=1e-3)
    assert out["mcc"] == pytest.approx(0.529, abs=1e-3)


def test_derive_metrics_degenerate_all_negative():
    out = derive_metrics(ConfusionMatrix(tp=0, fp=0, tn=50, fn=0))
    assert out["precision"] == 0.0
    assert out["recall"] == 0.0
    assert out["f1"] == 0.0
    assert out["mcc"] == 0.0
    assert out["accuracy"] == 1.0


def test_derive_metrics_balanced_coin():
    out = derive_metrics(ConfusionMatrix(1, 1, 1, 1))
    assert out["accuracy"] == 0.5
    assert out["mcc"] == 0.0


def test_mcc_negation_symmetry():
    cm = ConfusionMatrix(tp=30, fp=10, tn=40, fn=20)
    flipped = ConfusionMatrix(tp=cm.fn, fp=cm.tn, tn=cm.fp, fn=cm.tp)  # negated predictions
    assert derive_metrics(flipped)["mcc"] == pytest.approx(-derive_metrics(cm)["mcc"], abs=1e-12)


def test_mcc_swap_predictions_labels():
    cm = ConfusionMatrix(tp=30, fp=10, tn=40, fn=20)
    swapped = ConfusionMatrix(tp=cm.tp, fp=cm.fn, tn=cm.tn, fn=cm.fp)
    assert derive_metrics(swapped)["mcc"] == pytest.approx(derive_metrics(cm)["mcc"], abs=1e-12)


def test_roc_auc_perfect_separation():
    assert roc_auc([0.9, 0.8, 0.3, 0.2], [1, 1, 0, 0]) == 1.0


def test_roc_auc_all_ties():
    assert roc_auc([0.5, 0.5, 0.5, 0.5], [1, 0, 1, 0]) == 0.5


def test_roc_auc_pairwise_hand_case():
    # pairs: (0.9 vs 0.4) win, (0.9 vs 0.6) win, (0.2 vs 0.4) loss, (0.2 vs 0.6) loss
    assert roc_auc([0.9, 0.4, 0.6, 0.2], [1, 0, 0, 1]) == 0.5


def test_roc_auc_single_class_undefined():
    with pytest.raises(InputError):
        roc_auc([0.1, 0.2], [1, 1])


@given(st.integers(0, 2**32 - 1), st.integers(2, 200))
@settings(max_examples=60, deadline=None)
def test_roc_auc_matches_brute_force(seed, n):
    rng = np.random.default_rng(seed)
    scores = rng.choice([0.1, 0.25, 0.5, 0.75, 0.9], size=n)  # heavy ties
    labels = rng.integers(0, 2, size=n)
    if labels.min() == labels.max():
        labels[0] = 1 - labels[0]
    assert roc_auc(scores, labels) == pytest.approx(roc_auc_brute_force(scores, labels), abs=1e-12)


def test_report_json_round_trip():
    report = MetricsReport.compute(
        predictions=[1, 0, 1, 1],
        labels=[1, 0, 0, 1],
        scores=[0.9, 0.2, 0.6, 0.8],
        loss=0.432109876,
    )
    payload = json.loads(report.to_json())
    assert set(payload) == {
        "tp", "fp", "tn", "fn", "accuracy", "precision", "recall", "f1", "mcc", "roc_auc", "loss",
    }
    assert payload["tp"] == 2
    assert payload["loss"] == 0.43211  # rounded to 6 decimal places
    restored = MetricsReport.from_dict(payload)
    assert restored.tp == report.tp


def test_report_single_class_scores_fall_back_to_zero_auc():
    report = MetricsReport.compute([1, 1], [1, 1], [0.9, 0.8], loss=0.1)
    assert report.roc_auc == 0.0
