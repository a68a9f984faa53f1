"""Detector vs. independently written brute-force reference matcher."""
import random

from bruteforce_reference import classify_reference, phrase_hits, url_hits
from conftest import make_snippet
from leakaudit.detector import PatternSet, classify_snippet

# words that sit on and around the pattern triggers
_SPICY = [
    "fake", "fakest", "fakes", "hoax", "hoaxes", "hoaxer", "rumor", "rumors",
    "rumored", "myth", "myths", "mythical", "falsely", "false:", "debunk",
    "debunked", "politifact", "snopes", "unfounded", "unfoundedly",
    "not real news", "surreal news", "real story behind", "a real story behind it",
    "fact check", "fact-check", "factcheck", "fact checking", "fact checker",
]
_PLAIN = [
    "the", "quick", "brown", "fox", "county", "election", "budget", "water",
    "school", "story", "truth", "report", "official", "reviewed",
]
_URLS = [
    "",
    "https://www.politifact.com/factchecks/2013/x",
    "https://www.washingtonpost.com/politics/2017/a",
    "https://www.washingtonpost.com/news/fact-checker/wp/b",
    "http://FACTSCAN.CA/claims/9",
    "https://factly.in/x",
    "https://notfactly.example/x",
    "https://www.truthorfiction.com/a",
    "https://sub.snopes.com.mirror.example/x",
    "https://hoax-alert.leadstories.com/z",
    "https://example.com/hoax-slayer.net-copy",
    "https://gossipcop.com",
    "https://africacheck.org/reports/2019/k",
    "https://africacheck.org/about-us",
    "https://radionz.co.nz/programmes/election17-fact-or-fiction/abc",
    "https://radionz.co.nz/news/d",
    "https://factcheck.afp.com/x",
    "https://afp.com/factcheck",
    "https://example.org/plain-news",
    "https://healthfeedback.org/claimreview/e",
    "https://fullfact.org/health/f",
]
_PUNCT = [" ", " ", " ", ", ", ". ", "! ", "; ", " - ", ": ", "\n"]


def _mixed_case(rng, s):
    return "".join(ch.upper() if rng.random() < 0.3 else ch for ch in s)


def _field(rng):
    if rng.random() < 0.15:
        return ""
    n = rng.randint(1, 12)
    words = [
        rng.choice(_SPICY if rng.random() < 0.4 else _PLAIN) for _ in range(n)
    ]
    text = ""
    for i, w in enumerate(words):
        text += w
        if i < n - 1:
            text += rng.choice(_PUNCT)
    return _mixed_case(rng, text)


def generate_fixture(n=500, seed=20220817):
    rng = random.Random(seed)
    snippets = []
    for i in range(n):
        url = rng.choice(_URLS)
        if rng.random() < 0.3:
            url = _mixed_case(rng, url)
        snippets.append(make_snippet(i + 1, _field(rng), _field(rng), url))
    return snippets


def test_classify_snippet_agrees_with_reference_on_500_snippets():
    patterns = PatternSet.default()
    url_rows = [(t.id, t.template) for t in patterns.url_templates]
    phrase_rows = [(p.id, p.source) for p in patterns.phrase_patterns]
    for snippet in generate_fixture():
        verdict = classify_snippet(snippet, patterns)
        ref_urls, ref_phrases = classify_reference(snippet, url_rows, phrase_rows)
        assert list(verdict.url_matches) == ref_urls, snippet
        assert list(verdict.phrase_matches) == ref_phrases, snippet


def test_cli_audit_statuses_match_reference(tmp_path):
    # one claim per fixture snippet, audited through the CLI; every stored
    # status must agree with the reference matcher
    from leakaudit import cli
    from leakaudit.corpus import ClaimRecord, Dataset, write_jsonl
    from leakaudit.detector import read_statuses

    snippets = generate_fixture(n=120, seed=7)
    records = tuple(
        ClaimRecord(
            claim_id=f"c{i}",
            claim_text=f"claim {i}",
            organization="politifact",
            raw_label="false",
            snippets=(snippet,),
        )
        for i, snippet in enumerate(snippets)
    )
    dataset_path = tmp_path / "dataset.jsonl"
    write_jsonl(Dataset(records=records, provenance={}), dataset_path)
    assert cli.main(
        ["audit", "--dataset", str(dataset_path), "--out", str(tmp_path / "audit")]
    ) == 0

    patterns = PatternSet.default()
    url_rows = [(t.id, t.template) for t in patterns.url_templates]
    phrase_rows = [(p.id, p.source) for p in patterns.phrase_patterns]
    statuses = read_statuses(tmp_path / "audit" / "statuses.jsonl")
    assert len(statuses) == len(records)
    for record in records:
        verdict = statuses[record.claim_id].snippet_verdicts[0]
        ref_urls, ref_phrases = classify_reference(
            record.snippets[0], url_rows, phrase_rows
        )
        assert list(verdict.url_matches) == ref_urls
        assert list(verdict.phrase_matches) == ref_phrases
        assert statuses[record.claim_id].leaked == bool(ref_urls or ref_phrases)


def test_reference_matcher_self_checks():
    # spot-check the reference's own semantics on knowable cases
    assert phrase_hits("^false:", "false: story")
    assert not phrase_hits("^false:", " false: story")
    assert phrase_hits(r"\brumors?\b", "the rumor mill")
    assert phrase_hits(r"\brumors?\b", "the rumors mill")
    assert not phrase_hits(r"\brumors?\b", "rumored")
    assert phrase_hits("fact[ -]check", "one fact-check here")
    assert not phrase_hits("fact[ -]check", "factcheck")
    assert url_hits("snopes.com", "https://www.SNOPES.com/x")
    assert not url_hits("snopes.com", "")
