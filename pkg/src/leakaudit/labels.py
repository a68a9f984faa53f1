"""Per-organization verdict taxonomies.

Three independent views over raw verdict strings:

* a binary misinformation flag (per-organization label sets shipped in
  ``data/label_scheme.tsv``),
* a conservative 3-way grouping of PolitiFact-style verdicts into
  False / Mixed / True bands for distribution-over-time reports,
* ordinal veracity scales (Snopes 5-way, PolitiFact 6-way) used by the
  probe experiments.

Label comparison is exact string match after lowercasing and trimming;
the shipped lists enumerate labels verbatim, punctuation included.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Optional

log = logging.getLogger(__name__)


class LabelSchemeError(Exception):
    """Label-set data file is malformed."""


class VerdictGroup(str, Enum):
    FALSE_GROUP = "FALSE_GROUP"
    MIXED_GROUP = "MIXED_GROUP"
    TRUE_GROUP = "TRUE_GROUP"
    OTHER = "OTHER"


_VALID_CLASSES = {"misinfo", "true", "mixed", "other"}

# Conservative verdict bands: pants on fire / false -> False,
# mostly false / half true -> Mixed, mostly true / true -> True.
_GROUPING = {
    "pants on fire": VerdictGroup.FALSE_GROUP,
    "false": VerdictGroup.FALSE_GROUP,
    "mostly false": VerdictGroup.MIXED_GROUP,
    "half true": VerdictGroup.MIXED_GROUP,
    "mostly true": VerdictGroup.TRUE_GROUP,
    "true": VerdictGroup.TRUE_GROUP,
}


def _norm(value: str) -> str:
    return value.strip().lower()


def group_verdict_3way(raw_label: str) -> VerdictGroup:
    """Total 3-way grouping of a raw verdict string.

    Accepts the label with or without a trailing "!" and with hyphens in
    place of spaces ("half-true", "pants on fire!"), since label strings
    vary across snapshots of the same organization.
    """
    label = _norm(raw_label)
    if label.endswith("!"):
        label = label[:-1].rstrip()
    label = label.replace("-", " ")
    label = " ".join(label.split())
    return _GROUPING.get(label, VerdictGroup.OTHER)


@dataclass
class LabelScheme:
    """Immutable-after-load mapping from (org, raw label) to label classes."""

    misinformation_sets: dict[str, frozenset[str]]
    experiment_scales: dict[str, tuple[str, ...]]
    classes: dict[tuple[str, str], str]
    _warned_orgs: set[str] = field(default_factory=set, repr=False)

    @classmethod
    def from_file(cls, path: Path | str) -> "LabelScheme":
        path = Path(path)
        if not path.is_file():
            raise LabelSchemeError(f"label scheme file not found: {path}")
        return cls.from_text(path.read_text(encoding="utf-8"), source=str(path))

    @classmethod
    def from_text(cls, text: str, source: str = "<string>") -> "LabelScheme":
        misinfo: dict[str, set[str]] = {}
        scales: dict[str, dict[int, str]] = {}
        classes: dict[tuple[str, str], str] = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cells = line.split("\t")
            if len(cells) < 3:
                raise LabelSchemeError(
                    f"{source}:{lineno}: expected at least 3 tab-separated columns"
                )
            org = _norm(cells[0])
            label = _norm(cells[1])
            cls_name = _norm(cells[2])
            if cls_name not in _VALID_CLASSES:
                raise LabelSchemeError(
                    f"{source}:{lineno}: unknown class {cls_name!r}"
                )
            if (org, label) in classes:
                raise LabelSchemeError(
                    f"{source}:{lineno}: duplicate entry for ({org!r}, {label!r})"
                )
            classes[(org, label)] = cls_name
            if cls_name == "misinfo":
                misinfo.setdefault(org, set()).add(label)
            if len(cells) >= 4 and cells[3].strip():
                try:
                    index = int(cells[3])
                except ValueError as exc:
                    raise LabelSchemeError(
                        f"{source}:{lineno}: bad scale index {cells[3]!r}"
                    ) from exc
                org_scale = scales.setdefault(org, {})
                if index in org_scale:
                    raise LabelSchemeError(
                        f"{source}:{lineno}: duplicate scale index {index} for {org!r}"
                    )
                org_scale[index] = label
        experiment_scales: dict[str, tuple[str, ...]] = {}
        for org, by_index in scales.items():
            indices = sorted(by_index)
            if indices != list(range(len(indices))):
                raise LabelSchemeError(
                    f"{source}: scale for {org!r} has gaps: {indices}"
                )
            experiment_scales[org] = tuple(by_index[i] for i in indices)
        return cls(
            misinformation_sets={k: frozenset(v) for k, v in misinfo.items()},
            experiment_scales=experiment_scales,
            classes=classes,
        )

    @classmethod
    def default(cls) -> "LabelScheme":
        text = (
            resources.files("leakaudit.data")
            .joinpath("label_scheme.tsv")
            .read_text(encoding="utf-8")
        )
        return cls.from_text(text, source="leakaudit.data/label_scheme.tsv")

    def is_misinformation(self, org: str, raw_label: str) -> bool:
        """True iff the label is in the organization's misinformation set.

        Unknown organizations and unlisted labels are False; an unknown
        organization is logged once per scheme instance.
        """
        org = _norm(org)
        labels = self.misinformation_sets.get(org)
        if labels is None:
            if org not in self._warned_orgs:
                self._warned_orgs.add(org)
                log.warning("organization %r has no misinformation label set", org)
            return False
        return _norm(raw_label) in labels

    def scale_index(self, org: str, raw_label: str) -> Optional[int]:
        """0-based position on the organization's veracity scale, if any."""
        scale = self.experiment_scales.get(_norm(org))
        if scale is None:
            return None
        label = _norm(raw_label)
        try:
            return scale.index(label)
        except ValueError:
            return None

    def label_class(self, org: str, raw_label: str) -> str:
        return self.classes.get((_norm(org), _norm(raw_label)), "other")

    def organizations(self) -> tuple[str, ...]:
        return tuple(sorted({org for org, _ in self.classes}))
