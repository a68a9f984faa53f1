"""Probe configuration: input construction and training hyperparameters."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any


class InputMode(str, Enum):
    SNIPPET_TEXT = "snippet_text"
    SNIPPET_TITLE = "snippet_title"
    SNIPPETS = "snippets"
    FULL = "full"
    CLAIM_ONLY = "claim_only"


class ProbeConfigError(Exception):
    pass


@dataclass(frozen=True)
class ProbeConfig:
    """Hashed n-gram probe settings.

    ``label_scale`` is the ordered list of raw labels the probe predicts
    over (e.g. an organization's veracity scale); records with labels off
    the scale are rejected and counted.
    """

    input_mode: InputMode
    label_scale: tuple[str, ...]
    token_budget: int = 512
    ngram_orders: tuple[int, ...] = (1, 2)
    hash_dims: int = 2**18
    epochs: int = 10
    learning_rate: float = 0.1
    seed: int = 1

    def __post_init__(self) -> None:
        if self.token_budget < 1:
            raise ProbeConfigError("token_budget must be >= 1")
        if self.hash_dims < 2 or self.hash_dims & (self.hash_dims - 1):
            raise ProbeConfigError("hash_dims must be a power of two")
        if not self.ngram_orders or any(n < 1 for n in self.ngram_orders):
            raise ProbeConfigError("ngram_orders must be positive integers")
        if self.epochs < 1:
            raise ProbeConfigError("epochs must be >= 1")
        if not self.label_scale:
            raise ProbeConfigError("label_scale must not be empty")
        normalized = tuple(label.strip().lower() for label in self.label_scale)
        if len(set(normalized)) != len(normalized):
            raise ProbeConfigError("label_scale entries must be unique")
        object.__setattr__(self, "label_scale", normalized)
        object.__setattr__(self, "ngram_orders", tuple(sorted(set(self.ngram_orders))))
        if not isinstance(self.input_mode, InputMode):
            object.__setattr__(self, "input_mode", InputMode(self.input_mode))

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "input_mode": self.input_mode.value,
            "label_scale": list(self.label_scale),
            "token_budget": self.token_budget,
            "ngram_orders": list(self.ngram_orders),
            "hash_dims": self.hash_dims,
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, data: dict[str, Any]) -> "ProbeConfig":
        return cls(
            input_mode=InputMode(data["input_mode"]),
            label_scale=tuple(data["label_scale"]),
            token_budget=int(data["token_budget"]),
            ngram_orders=tuple(int(n) for n in data["ngram_orders"]),
            hash_dims=int(data["hash_dims"]),
            epochs=int(data["epochs"]),
            learning_rate=float(data["learning_rate"]),
            seed=int(data["seed"]),
        )
