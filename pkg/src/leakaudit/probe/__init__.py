"""Desk-scale verdict probe: hashed n-gram logistic regression."""

from .config import InputMode, ProbeConfig, ProbeConfigError
from .evaluate import (
    ContrastReports,
    EvalReport,
    Partition,
    evaluate,
    evaluate_same_claim_contrast,
)
from .features import build_input, featurize, tokenize
from .model import ProbeModel, TrainingError, train
from .splits import SplitError, read_split_file, select_records, stratified_split, write_split_file

__all__ = [
    "ContrastReports",
    "EvalReport",
    "InputMode",
    "Partition",
    "ProbeConfig",
    "ProbeConfigError",
    "ProbeModel",
    "SplitError",
    "TrainingError",
    "build_input",
    "evaluate",
    "evaluate_same_claim_contrast",
    "featurize",
    "read_split_file",
    "select_records",
    "stratified_split",
    "tokenize",
    "train",
    "write_split_file",
]
