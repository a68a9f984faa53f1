"""Canonical in-memory corpus model and dataset ingestion.

Two input layouts are supported: a neutral JSONL schema (one claim per
line, the canonical interchange format) and a MultiFC-style layout (one
claims TSV plus a directory of per-claim snippet TSVs) driven by a
configurable column map.

All strings are NFC-normalized at ingestion so downstream regex word
boundaries behave predictably. Datasets are immutable once built; every
downstream stage treats them as read-only.
"""
from __future__ import annotations

import hashlib
import json
import unicodedata
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Optional


class CorpusError(Exception):
    """Base class for ingestion/validation failures."""


class DataFormatError(CorpusError):
    """Malformed input record (fatal in strict mode)."""


class DuplicateClaimIdError(CorpusError):
    """Two records share a claim_id. Always fatal."""


class ColumnMapError(CorpusError):
    """Column map is inconsistent with the claims TSV."""


class Strategy(str, Enum):
    """Primary human verification strategy (storage only)."""

    GCE = "GCE"
    LCE = "LCE"
    NCS = "NCS"
    NEA = "NEA"
    OTHER = "OTHER"
    NA = "NA"


def _nfc(s: str) -> str:
    return unicodedata.normalize("NFC", s)


def _parse_iso_date(value: Any) -> Optional[date]:
    """Parse an ISO-8601 calendar date; anything else is None."""
    if value is None or value == "":
        return None
    try:
        return date.fromisoformat(str(value).strip())
    except ValueError:
        return None


@dataclass(frozen=True)
class EvidenceSnippet:
    """One ranked search-result fragment attached to a claim."""

    rank: int
    title: str = ""
    text: str = ""
    url: str = ""
    retrieved_date: Optional[date] = None

    @property
    def is_empty(self) -> bool:
        return not (self.title or self.text or self.url)


@dataclass(frozen=True)
class ManualAnnotation:
    """Record type for manual strategy/stance annotations."""

    strategy: Strategy
    stance_notes: str = ""
    annotator: str = ""


@dataclass(frozen=True)
class ClaimRecord:
    """One claim with its organization, verbatim verdict, and evidence."""

    claim_id: str
    claim_text: str
    organization: str
    raw_label: str
    claim_date: Optional[date] = None
    verification_date: Optional[date] = None
    snippets: tuple[EvidenceSnippet, ...] = ()
    annotations: Optional[ManualAnnotation] = None
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class Dataset:
    """Immutable collection of claim records plus ingestion provenance."""

    records: tuple[ClaimRecord, ...]
    provenance: dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)

    def by_id(self) -> dict[str, ClaimRecord]:
        return {r.claim_id: r for r in self.records}


@dataclass(frozen=True)
class ValidationReport:
    records: int
    snippets: int
    zero_snippet_claims: int
    empty_field_snippets: int
    duplicate_ids: int
    per_organization: dict[str, int]
    flag_counts: dict[str, int]

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "records": self.records,
            "snippets": self.snippets,
            "zero_snippet_claims": self.zero_snippet_claims,
            "empty_field_snippets": self.empty_field_snippets,
            "duplicate_ids": self.duplicate_ids,
            "per_organization": dict(sorted(self.per_organization.items())),
            "flag_counts": dict(sorted(self.flag_counts.items())),
        }


def config_hash(config: dict[str, Any]) -> str:
    """Stable sha256 over a canonical JSON dump of a config mapping."""
    blob = json.dumps(config, sort_keys=True, ensure_ascii=False, default=str)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


# -- record construction -----------------------------------------------------


def _build_snippet(obj: dict[str, Any], flags: list[str]) -> EvidenceSnippet:
    rank = obj.get("rank")
    if not isinstance(rank, int) or rank < 1:
        raise DataFormatError(f"snippet rank must be a positive integer, got {rank!r}")
    retrieved = obj.get("retrieved_date")
    retrieved_date = _parse_iso_date(retrieved)
    if retrieved not in (None, "") and retrieved_date is None:
        flags.append("unparseable-date")
    snippet = EvidenceSnippet(
        rank=rank,
        title=_nfc(str(obj.get("title", "") or "")),
        text=_nfc(str(obj.get("text", "") or "")),
        url=_nfc(str(obj.get("url", "") or "")),
        retrieved_date=retrieved_date,
    )
    if snippet.is_empty:
        flags.append("empty-snippet-fields")
    return snippet


def _build_record(obj: dict[str, Any]) -> ClaimRecord:
    for key in ("claim_id", "claim_text", "organization", "raw_label"):
        if key not in obj:
            raise DataFormatError(f"missing required field {key!r}")
    claim_id = _nfc(str(obj["claim_id"]).strip())
    claim_text = _nfc(str(obj["claim_text"]))
    if not claim_id:
        raise DataFormatError("claim_id is empty")
    if not claim_text.strip():
        raise DataFormatError(f"claim_text is empty for claim {claim_id!r}")

    flags: list[str] = [str(f) for f in obj.get("flags", [])]
    claim_date = _parse_iso_date(obj.get("claim_date"))
    if obj.get("claim_date") not in (None, "") and claim_date is None:
        flags.append("unparseable-date")
    verification_date = _parse_iso_date(obj.get("verification_date"))
    if obj.get("verification_date") not in (None, "") and verification_date is None:
        flags.append("unparseable-date")

    snippets = []
    last_rank = 0
    for snip_obj in obj.get("snippets", []):
        snippet = _build_snippet(snip_obj, flags)
        if snippet.rank <= last_rank:
            raise DataFormatError(
                f"snippet ranks must be strictly increasing in claim {claim_id!r}"
            )
        last_rank = snippet.rank
        snippets.append(snippet)

    annotations = None
    ann = obj.get("annotations")
    if ann:
        try:
            strategy = Strategy(ann["strategy"])
        except (KeyError, ValueError) as exc:
            raise DataFormatError(f"bad annotation for claim {claim_id!r}: {exc}")
        annotations = ManualAnnotation(
            strategy=strategy,
            stance_notes=_nfc(str(ann.get("stance_notes", ""))),
            annotator=_nfc(str(ann.get("annotator", ""))),
        )

    return ClaimRecord(
        claim_id=claim_id,
        claim_text=claim_text,
        organization=_nfc(str(obj["organization"])).strip().lower(),
        raw_label=_nfc(str(obj["raw_label"])),
        claim_date=claim_date,
        verification_date=verification_date,
        snippets=tuple(snippets),
        annotations=annotations,
        # dedup keeps re-ingestion of an already-flagged record idempotent
        flags=tuple(dict.fromkeys(flags)),
    )


# -- JSONL interchange -------------------------------------------------------


def record_to_json_dict(record: ClaimRecord) -> dict[str, Any]:
    """Canonical JSON form of one claim; optional fields omitted when unset."""
    obj: dict[str, Any] = {
        "claim_id": record.claim_id,
        "claim_text": record.claim_text,
        "organization": record.organization,
        "raw_label": record.raw_label,
        "snippets": [],
    }
    if record.claim_date is not None:
        obj["claim_date"] = record.claim_date.isoformat()
    if record.verification_date is not None:
        obj["verification_date"] = record.verification_date.isoformat()
    for s in record.snippets:
        snip: dict[str, Any] = {
            "rank": s.rank,
            "title": s.title,
            "text": s.text,
            "url": s.url,
        }
        if s.retrieved_date is not None:
            snip["retrieved_date"] = s.retrieved_date.isoformat()
        obj["snippets"].append(snip)
    if record.annotations is not None:
        obj["annotations"] = {
            "strategy": record.annotations.strategy.value,
            "stance_notes": record.annotations.stance_notes,
            "annotator": record.annotations.annotator,
        }
    if record.flags:
        obj["flags"] = list(record.flags)
    return obj


def write_jsonl(dataset: Dataset, path: Path | str) -> None:
    """Serialize a dataset to canonical JSONL (byte-deterministic)."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for record in dataset.records:
            line = json.dumps(
                record_to_json_dict(record),
                sort_keys=True,
                ensure_ascii=False,
                separators=(",", ":"),
            )
            fh.write(line + "\n")


def ingest_jsonl(path: Path | str, strict: bool = True) -> Dataset:
    """Read the neutral one-claim-per-line JSONL schema.

    Strict mode aborts on the first malformed line; lenient mode skips and
    counts them. Duplicate claim ids are fatal either way.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"dataset file not found: {path}")
    records: list[ClaimRecord] = []
    seen: set[str] = set()
    skipped = 0
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                if not isinstance(obj, dict):
                    raise DataFormatError("line is not a JSON object")
                record = _build_record(obj)
            except (json.JSONDecodeError, DataFormatError) as exc:
                if strict:
                    raise DataFormatError(f"{path}:{lineno}: {exc}") from exc
                skipped += 1
                continue
            if record.claim_id in seen:
                raise DuplicateClaimIdError(
                    f"{path}:{lineno}: duplicate claim_id {record.claim_id!r}"
                )
            seen.add(record.claim_id)
            records.append(record)
    provenance = {
        "source": f"jsonl:{path.name}",
        "config_hash": config_hash({"format": "jsonl", "strict": strict}),
        "skipped_lines": skipped,
    }
    return Dataset(records=tuple(records), provenance=provenance)


# -- MultiFC-style adapter ---------------------------------------------------


@dataclass(frozen=True)
class ColumnMap:
    """Column indices and derivation rules for a MultiFC-style claims TSV.

    `org_rule` is either "id_prefix" (organization looked up from the
    claim_id prefix before the first "-" via `org_prefixes`) or "column"
    (read from `organization` column index).
    """

    claim_id: int
    claim_text: int
    raw_label: int
    claim_date: Optional[int] = None
    verification_date: Optional[int] = None
    organization: Optional[int] = None
    org_rule: str = "id_prefix"
    org_prefixes: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ColumnMap":
        columns = data.get("columns", {})
        org = data.get("organization", {})
        try:
            return cls(
                claim_id=int(columns["claim_id"]),
                claim_text=int(columns["claim_text"]),
                raw_label=int(columns["raw_label"]),
                claim_date=(
                    int(columns["claim_date"]) if "claim_date" in columns else None
                ),
                verification_date=(
                    int(columns["verification_date"])
                    if "verification_date" in columns
                    else None
                ),
                organization=(
                    int(columns["organization"]) if "organization" in columns else None
                ),
                org_rule=str(org.get("rule", "id_prefix")),
                org_prefixes={
                    str(k).lower(): str(v).lower()
                    for k, v in org.get("prefixes", {}).items()
                },
            )
        except KeyError as exc:
            raise ColumnMapError(f"column map missing required key: {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise ColumnMapError(f"bad column map value: {exc}") from exc

    @classmethod
    def from_toml(cls, path: Path | str) -> "ColumnMap":
        try:
            import tomllib  # Python >= 3.11
        except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
            import tomli as tomllib
        path = Path(path)
        if not path.is_file():
            raise ColumnMapError(f"column map file not found: {path}")
        with path.open("rb") as fh:
            try:
                data = tomllib.load(fh)
            except tomllib.TOMLDecodeError as exc:
                raise ColumnMapError(f"{path}: {exc}") from exc
        return cls.from_dict(data)


def _cell(row: list[str], index: Optional[int], what: str) -> str:
    if index is None:
        return ""
    if index >= len(row) or index < 0:
        raise ColumnMapError(
            f"column index {index} for {what} out of range (row has {len(row)} columns)"
        )
    return row[index]


def _read_snippet_file(path: Path) -> list[EvidenceSnippet]:
    snippets: list[EvidenceSnippet] = []
    with path.open("r", encoding="utf-8", errors="replace") as fh:
        for line in fh:
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            cells = line.split("\t")
            cells += [""] * (4 - len(cells))
            try:
                rank = int(cells[0])
            except ValueError:
                rank = len(snippets) + 1
            snippets.append(
                EvidenceSnippet(
                    rank=rank,
                    title=_nfc(cells[1]),
                    text=_nfc(cells[2]),
                    url=_nfc(cells[3]),
                )
            )
    snippets.sort(key=lambda s: s.rank)
    return snippets


def ingest_multifc(
    claims_tsv: Path | str,
    snippets_dir: Path | str,
    column_map: ColumnMap,
    strict: bool = False,
) -> Dataset:
    """Ingest a MultiFC-style on-disk layout.

    One ClaimRecord per TSV row; snippets attached from
    ``snippets_dir/<claim_id>``. Claims with a missing snippet file keep an
    empty snippet list and get a "missing-snippets" flag.
    """
    claims_tsv = Path(claims_tsv)
    snippets_dir = Path(snippets_dir)
    if not claims_tsv.is_file():
        raise FileNotFoundError(f"claims TSV not found: {claims_tsv}")
    if not snippets_dir.is_dir():
        raise FileNotFoundError(f"snippets directory not found: {snippets_dir}")

    records: list[ClaimRecord] = []
    seen: set[str] = set()
    skipped = 0
    with claims_tsv.open("r", encoding="utf-8", errors="replace") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            row = line.split("\t")
            try:
                claim_id = _nfc(_cell(row, column_map.claim_id, "claim_id").strip())
                claim_text = _nfc(_cell(row, column_map.claim_text, "claim_text"))
                raw_label = _nfc(_cell(row, column_map.raw_label, "raw_label"))
                if not claim_id or not claim_text.strip():
                    raise DataFormatError(
                        f"{claims_tsv}:{lineno}: empty claim_id or claim_text"
                    )
            except DataFormatError:
                if strict:
                    raise
                skipped += 1
                continue
            if claim_id in seen:
                raise DuplicateClaimIdError(
                    f"{claims_tsv}:{lineno}: duplicate claim_id {claim_id!r}"
                )
            seen.add(claim_id)

            flags: list[str] = []
            if column_map.org_rule == "column":
                organization = _cell(row, column_map.organization, "organization")
                organization = organization.strip().lower()
            else:
                prefix = claim_id.split("-", 1)[0].lower()
                organization = column_map.org_prefixes.get(prefix, "")
                if not organization:
                    organization = prefix
                    flags.append("unknown-org-prefix")

            claim_date = None
            if column_map.claim_date is not None:
                cell = _cell(row, column_map.claim_date, "claim_date")
                claim_date = _parse_iso_date(cell)
                if cell.strip() and claim_date is None:
                    flags.append("unparseable-date")
            verification_date = None
            if column_map.verification_date is not None:
                cell = _cell(row, column_map.verification_date, "verification_date")
                verification_date = _parse_iso_date(cell)
                if cell.strip() and verification_date is None:
                    flags.append("unparseable-date")

            snippet_path = snippets_dir / claim_id
            snippets: list[EvidenceSnippet] = []
            if not snippet_path.is_file():
                flags.append("missing-snippets")
            else:
                try:
                    snippets = _read_snippet_file(snippet_path)
                except OSError:
                    flags.append("unreadable-snippets")
            for s in snippets:
                if s.is_empty:
                    flags.append("empty-snippet-fields")

            records.append(
                ClaimRecord(
                    claim_id=claim_id,
                    claim_text=claim_text,
                    organization=_nfc(organization),
                    raw_label=raw_label,
                    claim_date=claim_date,
                    verification_date=verification_date,
                    snippets=tuple(snippets),
                    flags=tuple(dict.fromkeys(flags)),
                )
            )

    provenance = {
        "source": f"multifc:{claims_tsv.name}",
        "config_hash": config_hash(
            {
                "format": "multifc",
                "strict": strict,
                "columns": {
                    "claim_id": column_map.claim_id,
                    "claim_text": column_map.claim_text,
                    "raw_label": column_map.raw_label,
                    "claim_date": column_map.claim_date,
                    "verification_date": column_map.verification_date,
                    "organization": column_map.organization,
                },
                "org_rule": column_map.org_rule,
                "org_prefixes": dict(sorted(column_map.org_prefixes.items())),
            }
        ),
        "skipped_lines": skipped,
    }
    return Dataset(records=tuple(records), provenance=provenance)


# -- validation ---------------------------------------------------------------


def validate(dataset: Dataset) -> ValidationReport:
    """Report-only integrity counts over an ingested dataset."""
    per_org: dict[str, int] = {}
    flag_counts: dict[str, int] = {}
    snippets = 0
    zero_snippet = 0
    empty_field = 0
    seen: set[str] = set()
    duplicates = 0
    for record in dataset.records:
        if record.claim_id in seen:
            duplicates += 1
        seen.add(record.claim_id)
        per_org[record.organization] = per_org.get(record.organization, 0) + 1
        snippets += len(record.snippets)
        if not record.snippets:
            zero_snippet += 1
        empty_field += sum(1 for s in record.snippets if s.is_empty)
        for flag in record.flags:
            flag_counts[flag] = flag_counts.get(flag, 0) + 1
    return ValidationReport(
        records=len(dataset.records),
        snippets=snippets,
        zero_snippet_claims=zero_snippet,
        empty_field_snippets=empty_field,
        duplicate_ids=duplicates,
        per_organization=per_org,
        flag_counts=flag_counts,
    )


def iter_snippets(dataset: Dataset) -> Iterable[tuple[ClaimRecord, EvidenceSnippet]]:
    for record in dataset.records:
        for snippet in record.snippets:
            yield record, snippet
