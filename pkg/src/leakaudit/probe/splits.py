"""Train/dev/test split files and the seeded stratified fallback.

Split files hold one claim_id per line so splits published by prior work
can be reused verbatim. When none exist, ``stratified_split`` draws a
seeded, label-stratified 70/10/20 partition.
"""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

from ..corpus import ClaimRecord, Dataset


class SplitError(Exception):
    pass


def read_split_file(path: Path | str) -> list[str]:
    path = Path(path)
    if not path.is_file():
        raise SplitError(f"split file not found: {path}")
    ids = []
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                ids.append(line)
    return ids


def write_split_file(ids: Sequence[str], path: Path | str) -> None:
    Path(path).write_text(
        "".join(f"{i}\n" for i in ids), encoding="utf-8", newline="\n"
    )


def select_records(dataset: Dataset, ids: Sequence[str]) -> list[ClaimRecord]:
    """Records in split-file order; unknown ids are fatal."""
    by_id = dataset.by_id()
    missing = [i for i in ids if i not in by_id]
    if missing:
        raise SplitError(
            f"{len(missing)} split ids not in dataset (first: {missing[0]!r})"
        )
    return [by_id[i] for i in ids]


def stratified_split(
    records: Sequence[ClaimRecord],
    seed: int,
    fractions: tuple[float, float, float] = (0.7, 0.1, 0.2),
) -> tuple[list[str], list[str], list[str]]:
    """Deterministic label-stratified split into (train, dev, test) ids."""
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise SplitError(f"split fractions must sum to 1, got {fractions}")
    by_label: dict[str, list[str]] = {}
    for record in records:
        by_label.setdefault(record.raw_label.strip().lower(), []).append(
            record.claim_id
        )
    rng = np.random.default_rng(seed)
    train: list[str] = []
    dev: list[str] = []
    test: list[str] = []
    for label in sorted(by_label):
        ids = sorted(by_label[label])
        rng.shuffle(ids)
        n = len(ids)
        n_train = int(round(fractions[0] * n))
        n_dev = int(round(fractions[1] * n))
        n_train = min(n_train, n)
        n_dev = min(n_dev, n - n_train)
        train.extend(ids[:n_train])
        dev.extend(ids[n_train : n_train + n_dev])
        test.extend(ids[n_train + n_dev :])
    return train, dev, test
