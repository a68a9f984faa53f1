"""Multiclass precision/recall/F1, computed from scratch.

Kept dependency-free so the test suite can check these against
hand-computed values without the implementation and the oracle sharing
code. Per-label F1 is 0 when a label has no true and no predicted
samples; macro-F1 averages over every label on the scale; micro-F1 over
single-label multiclass predictions equals accuracy.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LabelMetrics:
    precision: float
    recall: float
    f1: float
    support: int


def per_label_metrics(
    y_true: np.ndarray, y_pred: np.ndarray, n_labels: int
) -> list[LabelMetrics]:
    out = []
    for k in range(n_labels):
        tp = int(np.sum((y_pred == k) & (y_true == k)))
        fp = int(np.sum((y_pred == k) & (y_true != k)))
        fn = int(np.sum((y_pred != k) & (y_true == k)))
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        out.append(
            LabelMetrics(precision=precision, recall=recall, f1=f1, support=tp + fn)
        )
    return out


def macro_f1(y_true: np.ndarray, y_pred: np.ndarray, n_labels: int) -> float:
    per_label = per_label_metrics(y_true, y_pred, n_labels)
    return sum(m.f1 for m in per_label) / n_labels


def micro_f1(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    # single-label multiclass: micro-averaged F1 reduces to accuracy
    if len(y_true) == 0:
        return 0.0
    return float(np.mean(y_true == y_pred))


def accuracy(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    return micro_f1(y_true, y_pred)
