"""Linear multiclass probe: training, prediction, serialization.

Multinomial logistic regression over hashed n-gram counts, trained by
per-sample SGD with seeded shuffling. After each epoch the model is
scored on the dev set; the checkpoint with the best dev macro-F1 wins
(earliest epoch on ties). Training is deterministic for a fixed
(data, config, seed) triple.

The model file is a single binary: one JSON header line followed by the
raw little-endian float64 weight matrix and bias vector.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from ..corpus import ClaimRecord
from . import kernels
from .config import ProbeConfig
from .features import build_input, featurize_batch
from .metrics import macro_f1

_FORMAT = "leakaudit-probe"
_VERSION = 1


class TrainingError(Exception):
    pass


@dataclass(frozen=True)
class ProbeModel:
    weights: np.ndarray  # (n_labels, hash_dims)
    bias: np.ndarray  # (n_labels,)
    config: ProbeConfig
    provenance: dict[str, Any]

    def predict_texts(self, texts: Sequence[str]) -> np.ndarray:
        """Argmax label indices; ties break toward the lowest label index."""
        indptr, indices, data = featurize_batch(texts, self.config)
        scores = np.zeros((len(texts), len(self.config.label_scale)), dtype=np.float64)
        if len(texts):
            kernels.score_all(self.weights, self.bias, indptr, indices, data, scores)
        return scores.argmax(axis=1)

    def predict_records(self, records: Sequence[ClaimRecord]) -> np.ndarray:
        texts = [
            build_input(r, self.config.input_mode, self.config.token_budget)
            for r in records
        ]
        return self.predict_texts(texts)

    def save(self, path: Path | str) -> None:
        path = Path(path)
        header = {
            "format": _FORMAT,
            "version": _VERSION,
            "config": self.config.to_json_dict(),
            "provenance": self.provenance,
            "n_labels": int(self.weights.shape[0]),
            "hash_dims": int(self.weights.shape[1]),
            "dtype": "<f8",
        }
        with path.open("wb") as fh:
            fh.write(
                json.dumps(header, sort_keys=True, ensure_ascii=False).encode("utf-8")
            )
            fh.write(b"\n")
            fh.write(np.ascontiguousarray(self.weights, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(self.bias, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path: Path | str) -> "ProbeModel":
        path = Path(path)
        with path.open("rb") as fh:
            header_line = fh.readline()
            try:
                header = json.loads(header_line.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise TrainingError(f"{path}: not a probe model file") from exc
            if header.get("format") != _FORMAT or header.get("version") != _VERSION:
                raise TrainingError(f"{path}: unsupported model format/version")
            n_labels = header["n_labels"]
            hash_dims = header["hash_dims"]
            buf = fh.read()
        expected = (n_labels * hash_dims + n_labels) * 8
        if len(buf) != expected:
            raise TrainingError(
                f"{path}: truncated model payload ({len(buf)} != {expected} bytes)"
            )
        weights = np.frombuffer(
            buf, dtype="<f8", count=n_labels * hash_dims
        ).reshape(n_labels, hash_dims)
        bias = np.frombuffer(buf, dtype="<f8", offset=n_labels * hash_dims * 8)
        return cls(
            weights=weights.copy(),
            bias=bias.copy(),
            config=ProbeConfig.from_json_dict(header["config"]),
            provenance=header.get("provenance", {}),
        )


def _ids_hash(records: Sequence[ClaimRecord]) -> str:
    blob = "\n".join(r.claim_id for r in records)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def select_on_scale(
    records: Sequence[ClaimRecord], config: ProbeConfig
) -> tuple[list[ClaimRecord], np.ndarray, int]:
    """Keep records whose label is on the scale; count the rejects."""
    label_to_index = {label: i for i, label in enumerate(config.label_scale)}
    kept: list[ClaimRecord] = []
    labels: list[int] = []
    rejected = 0
    for record in records:
        index = label_to_index.get(record.raw_label.strip().lower())
        if index is None:
            rejected += 1
            continue
        kept.append(record)
        labels.append(index)
    return kept, np.array(labels, dtype=np.int64), rejected


def train(
    train_records: Sequence[ClaimRecord],
    dev_records: Sequence[ClaimRecord],
    config: ProbeConfig,
) -> ProbeModel:
    """Train the probe and return the best-dev-epoch checkpoint."""
    train_kept, train_labels, train_rejected = select_on_scale(train_records, config)
    dev_kept, dev_labels, dev_rejected = select_on_scale(dev_records, config)
    if not train_kept:
        raise TrainingError("empty train set (no records with on-scale labels)")
    overlap = {r.claim_id for r in train_kept} & {r.claim_id for r in dev_kept}
    if overlap:
        raise TrainingError(f"train/dev splits share claim ids: {sorted(overlap)[:3]}")

    n_labels = len(config.label_scale)
    train_texts = [
        build_input(r, config.input_mode, config.token_budget) for r in train_kept
    ]
    indptr, indices, data = featurize_batch(train_texts, config)
    dev_texts = [
        build_input(r, config.input_mode, config.token_budget) for r in dev_kept
    ]
    dev_indptr, dev_indices, dev_data = featurize_batch(dev_texts, config)
    dev_scores = np.zeros((len(dev_kept), n_labels), dtype=np.float64)

    weights = np.zeros((n_labels, config.hash_dims), dtype=np.float64)
    bias = np.zeros(n_labels, dtype=np.float64)
    rng = np.random.default_rng(config.seed)

    best_f1 = -1.0
    best_epoch = 0
    best_weights = weights.copy()
    best_bias = bias.copy()
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(train_kept)).astype(np.int64)
        kernels.sgd_epoch(
            weights, bias, indptr, indices, data, train_labels, order,
            config.learning_rate,
        )
        if len(dev_kept):
            kernels.score_all(weights, bias, dev_indptr, dev_indices, dev_data, dev_scores)
            dev_f1 = macro_f1(dev_labels, dev_scores.argmax(axis=1), n_labels)
        else:
            dev_f1 = float("nan")  # no dev set: keep the final epoch
        if (len(dev_kept) and dev_f1 > best_f1) or not len(dev_kept):
            best_f1 = dev_f1
            best_epoch = epoch
            best_weights = weights.copy()
            best_bias = bias.copy()

    if not (np.isfinite(best_weights).all() and np.isfinite(best_bias).all()):
        raise TrainingError(
            "training diverged to non-finite weights; lower the learning rate"
        )

    provenance = {
        "backend": kernels.BACKEND,
        "train_size": len(train_kept),
        "dev_size": len(dev_kept),
        "rejected_train": train_rejected,
        "rejected_dev": dev_rejected,
        "best_epoch": best_epoch,
        "best_dev_macro_f1": None if not len(dev_kept) else round(best_f1, 6),
        "train_ids_sha256": _ids_hash(train_kept),
        "dev_ids_sha256": _ids_hash(dev_kept),
    }
    return ProbeModel(
        weights=best_weights, bias=best_bias, config=config, provenance=provenance
    )
