"""Probe evaluation over leaked/unleaked partitions and contrast sets."""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Mapping, Optional, Sequence

import numpy as np

from ..corpus import ClaimRecord
from ..detector import ClaimLeakStatus
from ..reporting import ConsistencyError
from .metrics import LabelMetrics, micro_f1, per_label_metrics
from .model import ProbeModel, select_on_scale


class Partition(str, Enum):
    ALL = "ALL"
    LEAKED = "LEAKED"
    UNLEAKED = "UNLEAKED"


@dataclass(frozen=True)
class EvalReport:
    partition: str
    n_samples: int
    f1_micro: Optional[float]
    f1_macro: Optional[float]
    per_label: dict[str, LabelMetrics]
    predicted_counts: dict[str, int]
    rejected_off_scale: int
    claim_ids: Optional[tuple[str, ...]] = None

    def to_json_dict(self) -> dict[str, Any]:
        obj: dict[str, Any] = {
            "partition": self.partition,
            "n_samples": self.n_samples,
            "per_label": {
                label: {
                    "precision": round(m.precision, 4),
                    "recall": round(m.recall, 4),
                    "f1": round(m.f1, 4),
                    "support": m.support,
                }
                for label, m in self.per_label.items()
            },
            "predicted_counts": dict(sorted(self.predicted_counts.items())),
            "rejected_off_scale": self.rejected_off_scale,
        }
        if self.f1_micro is not None:
            obj["f1_micro"] = round(self.f1_micro, 4)
        if self.f1_macro is not None:
            obj["f1_macro"] = round(self.f1_macro, 4)
        if self.claim_ids is not None:
            obj["claim_ids"] = list(self.claim_ids)
        return obj


@dataclass(frozen=True)
class ContrastReports:
    """Paired reports over identical claims: leaked-only vs unleaked-only evidence."""

    leaked: EvalReport
    unleaked: EvalReport


def _require_statuses(
    records: Sequence[ClaimRecord], statuses: Mapping[str, ClaimLeakStatus]
) -> None:
    missing = [r.claim_id for r in records if r.claim_id not in statuses]
    if missing:
        raise ConsistencyError(
            f"{len(missing)} claims have no leak status (first: {missing[0]!r})"
        )


def _report(
    model: ProbeModel,
    records: Sequence[ClaimRecord],
    partition: str,
    rejected: int,
    claim_ids: Optional[tuple[str, ...]] = None,
) -> EvalReport:
    scale = model.config.label_scale
    n_labels = len(scale)
    if not records:
        return EvalReport(
            partition=partition,
            n_samples=0,
            f1_micro=None,
            f1_macro=None,
            per_label={},
            predicted_counts={},
            rejected_off_scale=rejected,
            claim_ids=claim_ids,
        )
    kept, y_true, _ = select_on_scale(records, model.config)
    assert len(kept) == len(records)  # caller pre-filters to on-scale labels
    y_pred = model.predict_records(kept)
    per_label = per_label_metrics(y_true, y_pred, n_labels)
    return EvalReport(
        partition=partition,
        n_samples=len(kept),
        f1_micro=micro_f1(y_true, y_pred),
        f1_macro=sum(m.f1 for m in per_label) / n_labels,
        per_label={scale[k]: per_label[k] for k in range(n_labels)},
        predicted_counts={
            scale[k]: int(np.sum(y_pred == k)) for k in range(n_labels)
        },
        rejected_off_scale=rejected,
        claim_ids=claim_ids,
    )


def evaluate(
    model: ProbeModel,
    test_records: Sequence[ClaimRecord],
    statuses: Mapping[str, ClaimLeakStatus],
    partition: Partition = Partition.ALL,
) -> EvalReport:
    """Metrics over ALL claims or the LEAKED/UNLEAKED claim-level subsets.

    Records with labels off the model's scale are dropped and counted in
    ``rejected_off_scale``.
    """
    _require_statuses(test_records, statuses)
    if partition is Partition.LEAKED:
        records = [r for r in test_records if statuses[r.claim_id].leaked]
    elif partition is Partition.UNLEAKED:
        records = [r for r in test_records if not statuses[r.claim_id].leaked]
    else:
        records = list(test_records)
    kept, _, rejected = select_on_scale(records, model.config)
    return _report(model, kept, partition.value, rejected)


def contrast_eligible(
    record: ClaimRecord, status: ClaimLeakStatus
) -> bool:
    """Eligible for same-claim contrast: has leaked AND unleaked snippets."""
    leaked_flags = [v.leaked for v in status.snippet_verdicts]
    return any(leaked_flags) and not all(leaked_flags) if leaked_flags else False


def _filter_snippets(
    record: ClaimRecord, status: ClaimLeakStatus, keep_leaked: bool
) -> ClaimRecord:
    verdict_by_rank = {v.snippet_rank: v.leaked for v in status.snippet_verdicts}
    kept = tuple(
        s for s in record.snippets if verdict_by_rank.get(s.rank, False) == keep_leaked
    )
    return replace(record, snippets=kept)


def evaluate_same_claim_contrast(
    model: ProbeModel,
    test_records: Sequence[ClaimRecord],
    statuses: Mapping[str, ClaimLeakStatus],
) -> ContrastReports:
    """Evaluate eligible claims twice: leaked-only vs unleaked-only snippets.

    Both reports cover the same claim ids in the same order; the input to
    the probe differs only in which snippets survive the filter.
    """
    _require_statuses(test_records, statuses)
    eligible = [
        r for r in test_records if contrast_eligible(r, statuses[r.claim_id])
    ]
    kept, _, rejected = select_on_scale(eligible, model.config)
    claim_ids = tuple(r.claim_id for r in kept)
    leaked_variant = [
        _filter_snippets(r, statuses[r.claim_id], keep_leaked=True) for r in kept
    ]
    unleaked_variant = [
        _filter_snippets(r, statuses[r.claim_id], keep_leaked=False) for r in kept
    ]
    return ContrastReports(
        leaked=_report(model, leaked_variant, "CONTRAST_LEAKED", rejected, claim_ids),
        unleaked=_report(
            model, unleaked_variant, "CONTRAST_UNLEAKED", rejected, claim_ids
        ),
    )
