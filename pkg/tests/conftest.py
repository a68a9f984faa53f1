import json
from datetime import date
from pathlib import Path

import pytest

from leakaudit.corpus import ClaimRecord, Dataset, EvidenceSnippet, write_jsonl


def make_snippet(rank=1, title="", text="", url="", retrieved_date=None) -> EvidenceSnippet:
    return EvidenceSnippet(
        rank=rank, title=title, text=text, url=url, retrieved_date=retrieved_date
    )


def make_claim(
    claim_id,
    claim_text="some claim text",
    organization="politifact",
    raw_label="false",
    snippets=(),
    claim_date=None,
    verification_date=None,
    flags=(),
) -> ClaimRecord:
    return ClaimRecord(
        claim_id=claim_id,
        claim_text=claim_text,
        organization=organization,
        raw_label=raw_label,
        claim_date=claim_date,
        verification_date=verification_date,
        snippets=tuple(snippets),
        flags=tuple(flags),
    )


def make_dataset(records) -> Dataset:
    return Dataset(records=tuple(records), provenance={"source": "test"})


def dump_jsonl(path: Path, objects) -> Path:
    with path.open("w", encoding="utf-8") as fh:
        for obj in objects:
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
    return path


@pytest.fixture
def tmp_dataset_file(tmp_path):
    def _write(records, name="dataset.jsonl"):
        path = tmp_path / name
        write_jsonl(make_dataset(records), path)
        return path

    return _write


def ymd(y, m=1, d=1):
    return date(y, m, d)
