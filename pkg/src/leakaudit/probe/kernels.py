"""Hot numeric loops for probe training and scoring.

Both kernels exist twice: a numba ``@njit`` version and a pure-numpy
fallback. The numba path is used when numba imports cleanly and the
``LEAKAUDIT_PURE_NUMPY`` environment variable is unset/empty; set
``LEAKAUDIT_PURE_NUMPY=1`` to force the fallback. ``BACKEND`` names the
selected path. Feature rows must carry unique column indices (the
featurizer deduplicates), so scatter-updates behave identically on both
paths.
"""
from __future__ import annotations

import os

import numpy as np


def _sgd_epoch_numpy(weights, bias, indptr, indices, data, labels, order, lr):
    for i in order:
        start, end = indptr[i], indptr[i + 1]
        idx = indices[start:end]
        val = data[start:end]
        logits = weights[:, idx] @ val + bias
        logits -= logits.max()
        probs = np.exp(logits)
        probs /= probs.sum()
        probs[labels[i]] -= 1.0
        bias -= lr * probs
        if len(idx):
            weights[:, idx] -= lr * np.outer(probs, val)
    return weights


def _score_all_numpy(weights, bias, indptr, indices, data, out):
    for i in range(indptr.shape[0] - 1):
        start, end = indptr[i], indptr[i + 1]
        idx = indices[start:end]
        val = data[start:end]
        out[i] = weights[:, idx] @ val + bias
    return out


try:  # pragma: no cover - exercised indirectly via backend selection
    if os.environ.get("LEAKAUDIT_PURE_NUMPY"):
        raise ImportError("disabled via LEAKAUDIT_PURE_NUMPY")
    from numba import njit

    @njit(cache=True)
    def _sgd_epoch_numba(weights, bias, indptr, indices, data, labels, order, lr):
        n_labels = weights.shape[0]
        probs = np.empty(n_labels, dtype=np.float64)
        for pos in range(order.shape[0]):
            i = order[pos]
            start, end = indptr[i], indptr[i + 1]
            for k in range(n_labels):
                acc = bias[k]
                for j in range(start, end):
                    acc += weights[k, indices[j]] * data[j]
                probs[k] = acc
            top = probs[0]
            for k in range(1, n_labels):
                if probs[k] > top:
                    top = probs[k]
            total = 0.0
            for k in range(n_labels):
                probs[k] = np.exp(probs[k] - top)
                total += probs[k]
            for k in range(n_labels):
                probs[k] /= total
            probs[labels[i]] -= 1.0
            for k in range(n_labels):
                grad = probs[k]
                bias[k] -= lr * grad
                for j in range(start, end):
                    weights[k, indices[j]] -= lr * grad * data[j]
        return weights

    @njit(cache=True)
    def _score_all_numba(weights, bias, indptr, indices, data, out):
        n_labels = weights.shape[0]
        for i in range(indptr.shape[0] - 1):
            start, end = indptr[i], indptr[i + 1]
            for k in range(n_labels):
                acc = bias[k]
                for j in range(start, end):
                    acc += weights[k, indices[j]] * data[j]
                out[i, k] = acc
        return out

    sgd_epoch = _sgd_epoch_numba
    score_all = _score_all_numba
    BACKEND = "numba"
except ImportError:
    sgd_epoch = _sgd_epoch_numpy
    score_all = _score_all_numpy
    BACKEND = "numpy"

sgd_epoch_numpy = _sgd_epoch_numpy
score_all_numpy = _score_all_numpy
