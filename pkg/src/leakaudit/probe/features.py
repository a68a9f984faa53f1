"""Input construction and hashed n-gram featurization.

Input strings follow the snippet-concatenation layout: snippet parts in
rank order joined by "; ", and for full mode the claim text separated
from the evidence block by " [SEP] ". The result is truncated to the
first ``token_budget`` whitespace tokens.

Features are counts of token n-grams hashed into ``hash_dims`` buckets
with blake2b-64 (stable across processes and platforms, unlike ``hash``).
"""
from __future__ import annotations

import hashlib
import re
from typing import Iterable

import numpy as np

from ..corpus import ClaimRecord, EvidenceSnippet
from .config import InputMode, ProbeConfig

_TOKEN_RE = re.compile(r"\w+")


def _truncate(text: str, token_budget: int) -> str:
    tokens = text.split()
    if len(tokens) <= token_budget:
        return text
    return " ".join(tokens[:token_budget])


def _snippet_part(snippet: EvidenceSnippet, mode: InputMode) -> str:
    if mode is InputMode.SNIPPET_TEXT:
        return snippet.text
    if mode is InputMode.SNIPPET_TITLE:
        return snippet.title
    # SNIPPETS / FULL: "title text", with empty halves skipped
    return " ".join(part for part in (snippet.title, snippet.text) if part)


def join_snippets(snippets: Iterable[EvidenceSnippet], mode: InputMode) -> str:
    parts = [_snippet_part(s, mode) for s in snippets]
    return "; ".join(part for part in parts if part)


def build_input(record: ClaimRecord, mode: InputMode, token_budget: int = 512) -> str:
    """Flatten a claim record into the probe's input string."""
    if mode is InputMode.CLAIM_ONLY:
        text = record.claim_text
    elif mode is InputMode.FULL:
        evidence = join_snippets(record.snippets, mode)
        text = " [SEP] ".join(part for part in (record.claim_text, evidence) if part)
    else:
        text = join_snippets(record.snippets, mode)
    return _truncate(text, token_budget)


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def hash_ngram(key: str, hash_dims: int) -> int:
    digest = hashlib.blake2b(key.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little") & (hash_dims - 1)


def featurize(text: str, config: ProbeConfig) -> tuple[np.ndarray, np.ndarray]:
    """Sparse count vector: (sorted unique indices, counts).

    The L1 norm of the counts equals the number of emitted n-grams.
    """
    tokens = tokenize(text)
    counts: dict[int, float] = {}
    for order in config.ngram_orders:
        for i in range(len(tokens) - order + 1):
            key = tokens[i] if order == 1 else "_".join(tokens[i : i + order])
            index = hash_ngram(key, config.hash_dims)
            counts[index] = counts.get(index, 0.0) + 1.0
    if not counts:
        return (
            np.empty(0, dtype=np.int64),
            np.empty(0, dtype=np.float64),
        )
    indices = np.array(sorted(counts), dtype=np.int64)
    values = np.array([counts[i] for i in indices], dtype=np.float64)
    return indices, values


def featurize_batch(
    texts: Iterable[str], config: ProbeConfig
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """CSR-style arrays (indptr, indices, data) over many documents."""
    indptr = [0]
    all_indices: list[np.ndarray] = []
    all_values: list[np.ndarray] = []
    for text in texts:
        indices, values = featurize(text, config)
        all_indices.append(indices)
        all_values.append(values)
        indptr.append(indptr[-1] + len(indices))
    if all_indices:
        indices_arr = np.concatenate(all_indices)
        values_arr = np.concatenate(all_values)
    else:
        indices_arr = np.empty(0, dtype=np.int64)
        values_arr = np.empty(0, dtype=np.float64)
    return np.array(indptr, dtype=np.int64), indices_arr, values_arr
