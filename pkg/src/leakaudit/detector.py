"""Pattern-based leaked-evidence detection.

Two mechanisms flag a snippet as leaked:

* URL templates: a template string is a plain substring of the snippet's
  URL (both lowercased by default).
* Phrase patterns: a regex matches the lowercased title or text, matched
  per field (never on a concatenation). '^' anchors at position 0 of the
  field and \\b is an ASCII word boundary; no multiline mode.

The shipped ``data/patterns.tsv`` holds the default 19 URL templates and
13 phrase regexes. Known error modes of this detector (matching a
different claim about the same incident; snippets discussing fake news or
fact-checking in general) are inherent to the pattern approach and are
deliberately not patched here; extend the pattern file instead.
"""
from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .corpus import ClaimRecord, DataFormatError, Dataset, EvidenceSnippet


class PatternConfigError(Exception):
    """Pattern data file failed to load or compile."""


class Mechanism(str, Enum):
    NONE = "NONE"
    URL = "URL"
    PHRASE = "PHRASE"
    BOTH = "BOTH"


@dataclass(frozen=True)
class UrlTemplate:
    id: str
    template: str


@dataclass(frozen=True)
class PhrasePattern:
    id: str
    source: str
    regex: re.Pattern


@dataclass(frozen=True)
class PatternSet:
    url_templates: tuple[UrlTemplate, ...]
    phrase_patterns: tuple[PhrasePattern, ...]
    lowercase_urls: bool = True

    @classmethod
    def from_rows(
        cls,
        rows: Iterable[tuple[str, str, str]],
        lowercase_urls: bool = True,
        source: str = "<rows>",
    ) -> "PatternSet":
        urls: list[UrlTemplate] = []
        phrases: list[PhrasePattern] = []
        seen: set[str] = set()
        for kind, pattern_id, pattern in rows:
            if pattern_id in seen:
                raise PatternConfigError(f"{source}: duplicate pattern id {pattern_id!r}")
            seen.add(pattern_id)
            if kind == "url":
                template = pattern.lower() if lowercase_urls else pattern
                urls.append(UrlTemplate(id=pattern_id, template=template))
            elif kind == "phrase":
                try:
                    regex = re.compile(pattern, re.ASCII)
                except re.error as exc:
                    raise PatternConfigError(
                        f"{source}: bad regex {pattern!r}: {exc}"
                    ) from exc
                phrases.append(PhrasePattern(id=pattern_id, source=pattern, regex=regex))
            else:
                raise PatternConfigError(f"{source}: unknown pattern kind {kind!r}")
        return cls(
            url_templates=tuple(urls),
            phrase_patterns=tuple(phrases),
            lowercase_urls=lowercase_urls,
        )

    @classmethod
    def from_text(
        cls, text: str, lowercase_urls: bool = True, source: str = "<string>"
    ) -> "PatternSet":
        rows: list[tuple[str, str, str]] = []
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cells = line.split("\t")
            if len(cells) != 3:
                raise PatternConfigError(
                    f"{source}:{lineno}: expected 3 tab-separated columns"
                )
            rows.append((cells[0].strip(), cells[1], cells[2]))
        return cls.from_rows(rows, lowercase_urls=lowercase_urls, source=source)

    @classmethod
    def from_file(cls, path: Path | str, lowercase_urls: bool = True) -> "PatternSet":
        path = Path(path)
        if not path.is_file():
            raise PatternConfigError(f"pattern file not found: {path}")
        return cls.from_text(
            path.read_text(encoding="utf-8"),
            lowercase_urls=lowercase_urls,
            source=str(path),
        )

    @classmethod
    def default(cls, lowercase_urls: bool = True) -> "PatternSet":
        text = (
            resources.files("leakaudit.data")
            .joinpath("patterns.tsv")
            .read_text(encoding="utf-8")
        )
        return cls.from_text(
            text, lowercase_urls=lowercase_urls, source="leakaudit.data/patterns.tsv"
        )


@dataclass(frozen=True)
class LeakVerdict:
    """Per-snippet detection result."""

    snippet_rank: int
    url_matches: tuple[str, ...]
    phrase_matches: tuple[tuple[str, str], ...]  # (field, pattern id)

    @property
    def mechanism(self) -> Mechanism:
        if self.url_matches and self.phrase_matches:
            return Mechanism.BOTH
        if self.url_matches:
            return Mechanism.URL
        if self.phrase_matches:
            return Mechanism.PHRASE
        return Mechanism.NONE

    @property
    def leaked(self) -> bool:
        return self.mechanism is not Mechanism.NONE


@dataclass(frozen=True)
class ClaimLeakStatus:
    """Claim-level OR-aggregation of its snippet verdicts."""

    claim_id: str
    leaked_by_url: bool
    leaked_by_phrase: bool
    snippet_verdicts: tuple[LeakVerdict, ...]

    @property
    def leaked(self) -> bool:
        return self.leaked_by_url or self.leaked_by_phrase


def match_url(url: str, patterns: PatternSet) -> list[str]:
    """Ids of all templates that are substrings of the snippet URL."""
    if not url:
        return []
    haystack = url.lower() if patterns.lowercase_urls else url
    return [t.id for t in patterns.url_templates if t.template in haystack]


def match_phrases(title: str, text: str, patterns: PatternSet) -> list[tuple[str, str]]:
    """All (field, pattern id) phrase hits over the lowercased fields."""
    hits: list[tuple[str, str]] = []
    for field_name, value in (("title", title), ("text", text)):
        if not value:
            continue
        lowered = value.lower()
        for pattern in patterns.phrase_patterns:
            if pattern.regex.search(lowered) is not None:
                hits.append((field_name, pattern.id))
    return hits


def classify_snippet(snippet: EvidenceSnippet, patterns: PatternSet) -> LeakVerdict:
    return LeakVerdict(
        snippet_rank=snippet.rank,
        url_matches=tuple(match_url(snippet.url, patterns)),
        phrase_matches=tuple(match_phrases(snippet.title, snippet.text, patterns)),
    )


def classify_claim(record: ClaimRecord, patterns: PatternSet) -> ClaimLeakStatus:
    verdicts = tuple(classify_snippet(s, patterns) for s in record.snippets)
    return ClaimLeakStatus(
        claim_id=record.claim_id,
        leaked_by_url=any(v.url_matches for v in verdicts),
        leaked_by_phrase=any(v.phrase_matches for v in verdicts),
        snippet_verdicts=verdicts,
    )


def classify_dataset(
    dataset: Dataset, patterns: PatternSet, threads: int = 1
) -> dict[str, ClaimLeakStatus]:
    """Classify every claim; output is independent of the thread count."""
    if threads <= 1 or len(dataset.records) < 2:
        statuses = [classify_claim(r, patterns) for r in dataset.records]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            statuses = list(pool.map(lambda r: classify_claim(r, patterns), dataset.records))
    return {s.claim_id: s for s in statuses}


# -- status (de)serialization --------------------------------------------------


def status_to_json_dict(status: ClaimLeakStatus) -> dict:
    return {
        "claim_id": status.claim_id,
        "leaked": status.leaked,
        "leaked_by_url": status.leaked_by_url,
        "leaked_by_phrase": status.leaked_by_phrase,
        "snippets": [
            {
                "rank": v.snippet_rank,
                "mechanism": v.mechanism.value,
                "url_matches": list(v.url_matches),
                "phrase_matches": [list(m) for m in v.phrase_matches],
            }
            for v in status.snippet_verdicts
        ],
    }


def write_statuses(
    statuses: Mapping[str, ClaimLeakStatus], path: Path | str, order: Iterable[str]
) -> None:
    """Write one status JSON object per line, in the given claim order."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for claim_id in order:
            line = json.dumps(
                status_to_json_dict(statuses[claim_id]),
                sort_keys=True,
                ensure_ascii=False,
                separators=(",", ":"),
            )
            fh.write(line + "\n")


def read_statuses(path: Path | str) -> dict[str, ClaimLeakStatus]:
    path = Path(path)
    statuses: dict[str, ClaimLeakStatus] = {}
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                verdicts = tuple(
                    LeakVerdict(
                        snippet_rank=v["rank"],
                        url_matches=tuple(v["url_matches"]),
                        phrase_matches=tuple((f, p) for f, p in v["phrase_matches"]),
                    )
                    for v in obj["snippets"]
                )
                statuses[obj["claim_id"]] = ClaimLeakStatus(
                    claim_id=obj["claim_id"],
                    leaked_by_url=obj["leaked_by_url"],
                    leaked_by_phrase=obj["leaked_by_phrase"],
                    snippet_verdicts=verdicts,
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise DataFormatError(f"{path}:{lineno}: bad status record: {exc}") from exc
    return statuses
