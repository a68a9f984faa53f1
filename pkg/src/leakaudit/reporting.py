"""Corpus-level leakage statistics and verdict-distribution reports.

Reports serialize deterministically: JSON with sorted keys, ratios rounded
to 4 decimals; CSV with a stable header, "\\n" line endings, and 4-decimal
ratio columns. Emitting the same report twice yields byte-identical files.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Optional, Protocol

from .corpus import Dataset
from .detector import ClaimLeakStatus
from .labels import LabelScheme, VerdictGroup, group_verdict_3way


class ConsistencyError(Exception):
    """Statuses and dataset disagree about which claims exist."""


class Report(Protocol):
    def to_json_dict(self) -> dict[str, Any]: ...

    def to_csv_rows(self) -> tuple[list[str], list[list[str]]]: ...


def _ratio(count: int, population: int) -> float:
    return count / population if population > 0 else 0.0


@dataclass(frozen=True)
class LeakStats:
    population: int
    by_url: int
    by_phrase: int
    by_either: int
    filter: str

    @property
    def url_ratio(self) -> float:
        return _ratio(self.by_url, self.population)

    @property
    def phrase_ratio(self) -> float:
        return _ratio(self.by_phrase, self.population)

    @property
    def either_ratio(self) -> float:
        return _ratio(self.by_either, self.population)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "by_either": {"count": self.by_either, "ratio": round(self.either_ratio, 4)},
            "by_phrase": {"count": self.by_phrase, "ratio": round(self.phrase_ratio, 4)},
            "by_url": {"count": self.by_url, "ratio": round(self.url_ratio, 4)},
            "filter": self.filter,
            "population": self.population,
        }

    def to_csv_rows(self) -> tuple[list[str], list[list[str]]]:
        header = [
            "filter",
            "population",
            "by_url_count",
            "by_url_ratio",
            "by_phrase_count",
            "by_phrase_ratio",
            "by_either_count",
            "by_either_ratio",
        ]
        row = [
            self.filter,
            str(self.population),
            str(self.by_url),
            f"{self.url_ratio:.4f}",
            str(self.by_phrase),
            f"{self.phrase_ratio:.4f}",
            str(self.by_either),
            f"{self.either_ratio:.4f}",
        ]
        return header, [row]


_GROUP_COLUMNS = (
    VerdictGroup.FALSE_GROUP,
    VerdictGroup.MIXED_GROUP,
    VerdictGroup.TRUE_GROUP,
)


@dataclass(frozen=True)
class YearRow:
    year: int
    counts: dict[VerdictGroup, int]  # FALSE/MIXED/TRUE counts
    other: int
    ratios: dict[VerdictGroup, float]


@dataclass(frozen=True)
class YearlyVerdictTable:
    rows: dict[int, YearRow]
    excluded: int  # OTHER-group verdicts plus undated claims
    excluded_undated: int
    excluded_other: int

    def to_json_dict(self) -> dict[str, Any]:
        years = {}
        for year in sorted(self.rows):
            row = self.rows[year]
            years[str(year)] = {
                "counts": {g.value: row.counts[g] for g in _GROUP_COLUMNS},
                "other": row.other,
                "ratios": {g.value: round(row.ratios[g], 4) for g in _GROUP_COLUMNS},
            }
        return {
            "excluded": self.excluded,
            "excluded_other": self.excluded_other,
            "excluded_undated": self.excluded_undated,
            "years": years,
        }

    def to_csv_rows(self) -> tuple[list[str], list[list[str]]]:
        header = [
            "year",
            "false_count",
            "mixed_count",
            "true_count",
            "other_count",
            "false_ratio",
            "mixed_ratio",
            "true_ratio",
        ]
        rows = []
        for year in sorted(self.rows):
            row = self.rows[year]
            rows.append(
                [
                    str(year),
                    str(row.counts[VerdictGroup.FALSE_GROUP]),
                    str(row.counts[VerdictGroup.MIXED_GROUP]),
                    str(row.counts[VerdictGroup.TRUE_GROUP]),
                    str(row.other),
                    f"{row.ratios[VerdictGroup.FALSE_GROUP]:.4f}",
                    f"{row.ratios[VerdictGroup.MIXED_GROUP]:.4f}",
                    f"{row.ratios[VerdictGroup.TRUE_GROUP]:.4f}",
                ]
            )
        return header, rows


def leak_stats(
    dataset: Dataset,
    statuses: Mapping[str, ClaimLeakStatus],
    misinfo_only: bool = False,
    scheme: Optional[LabelScheme] = None,
) -> LeakStats:
    """Count claims whose leak status sets each mechanism flag.

    With ``misinfo_only`` the population is restricted to claims whose raw
    label is in the organization's misinformation set.
    """
    missing = [r.claim_id for r in dataset.records if r.claim_id not in statuses]
    if missing:
        raise ConsistencyError(
            f"{len(missing)} claims have no leak status (first: {missing[0]!r})"
        )
    if misinfo_only and scheme is None:
        scheme = LabelScheme.default()

    population = 0
    by_url = by_phrase = by_either = 0
    for record in dataset.records:
        if misinfo_only and not scheme.is_misinformation(
            record.organization, record.raw_label
        ):
            continue
        population += 1
        status = statuses[record.claim_id]
        if status.leaked_by_url:
            by_url += 1
        if status.leaked_by_phrase:
            by_phrase += 1
        if status.leaked:
            by_either += 1
    return LeakStats(
        population=population,
        by_url=by_url,
        by_phrase=by_phrase,
        by_either=by_either,
        filter="misinformation-only" if misinfo_only else "all-claims",
    )


def verdict_ratio_by_year(
    dataset: Dataset, other_in_denominator: bool = False
) -> YearlyVerdictTable:
    """Per-year 3-way verdict counts and ratios over dated claims.

    The year comes from ``verification_date``; undated claims are excluded.
    OTHER-group verdicts are counted but left out of the ratio denominator
    unless ``other_in_denominator`` is set.
    """
    counts: dict[int, dict[VerdictGroup, int]] = {}
    undated = 0
    other_total = 0
    for record in dataset.records:
        if record.verification_date is None:
            undated += 1
            continue
        year = record.verification_date.year
        group = group_verdict_3way(record.raw_label)
        year_counts = counts.setdefault(
            year, {g: 0 for g in (*_GROUP_COLUMNS, VerdictGroup.OTHER)}
        )
        year_counts[group] += 1
        if group is VerdictGroup.OTHER:
            other_total += 1

    rows: dict[int, YearRow] = {}
    for year, year_counts in counts.items():
        grouped = sum(year_counts[g] for g in _GROUP_COLUMNS)
        denominator = grouped + year_counts[VerdictGroup.OTHER] if other_in_denominator else grouped
        ratios = {g: _ratio(year_counts[g], denominator) for g in _GROUP_COLUMNS}
        rows[year] = YearRow(
            year=year,
            counts={g: year_counts[g] for g in _GROUP_COLUMNS},
            other=year_counts[VerdictGroup.OTHER],
            ratios=ratios,
        )
    return YearlyVerdictTable(
        rows=rows,
        excluded=undated + other_total,
        excluded_undated=undated,
        excluded_other=other_total,
    )


def emit_report(report: Any, fmt: str, path: Path | str) -> Path:
    """Write a report deterministically as JSON or CSV.

    Any object with ``to_json_dict`` works for JSON; CSV additionally needs
    ``to_csv_rows``. Plain dicts are emitted as JSON directly.
    """
    path = Path(path)
    if fmt == "json":
        payload = report if isinstance(report, dict) else report.to_json_dict()
        blob = json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=2)
        path.write_text(blob + "\n", encoding="utf-8", newline="\n")
    elif fmt == "csv":
        if not hasattr(report, "to_csv_rows"):
            raise TypeError(f"report type {type(report).__name__} has no CSV form")
        header, rows = report.to_csv_rows()
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    return path
