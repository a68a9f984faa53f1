import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_claim, make_dataset, make_snippet
from leakaudit.detector import (
    Mechanism,
    PatternConfigError,
    PatternSet,
    classify_claim,
    classify_dataset,
    classify_snippet,
    match_phrases,
    match_url,
    read_statuses,
    write_statuses,
)

# Vendored transcription of the default pattern tables: 19 URL templates
# and 13 phrase regexes, in table order.
URL_TEMPLATES = [
    "africacheck.org/reports",
    "factcheck.afp.com",
    "checkyourfact.com",
    "climatefeedback.org/claimreview",
    "radionz.co.nz/programmes/election17-fact-or-fiction",
    "factcheck.org",
    "factcheckni.org",
    "factly.in",
    "factscan.ca",
    "fullfact.org",
    "gossipcop.com",
    "healthfeedback.org/claimreview",
    "hoax-slayer.net",
    "hoax-alert.leadstories.com",
    "pesacheck.org",
    "politifact.com",
    "snopes.com",
    "truthorfiction.com",
    "washingtonpost.com/news/fact-checker",
]
PHRASE_PATTERNS = [
    "^false:",
    "politifact",
    "snopes",
    "^debunk",
    "real story behind",
    r"\bfake\b",
    r"\bhoax\b",
    r"\bfalsely\b",
    r"\brumors?\b",
    r"\bmyths?\b",
    r"\bnot real news\b",
    r"\bunfounded\b",
    "fact[ -]check",
]


@pytest.fixture(scope="module")
def patterns():
    return PatternSet.default()


class TestShippedPatternFile:
    def test_url_templates_match_transcription(self, patterns):
        assert [t.template for t in patterns.url_templates] == URL_TEMPLATES

    def test_phrase_patterns_match_transcription(self, patterns):
        assert [p.source for p in patterns.phrase_patterns] == PHRASE_PATTERNS

    def test_ids_unique(self, patterns):
        ids = [t.id for t in patterns.url_templates] + [
            p.id for p in patterns.phrase_patterns
        ]
        assert len(set(ids)) == len(ids) == 32

    def test_shipped_file_hash_frozen(self):
        import hashlib
        from importlib import resources

        blob = resources.files("leakaudit.data").joinpath("patterns.tsv").read_bytes()
        assert hashlib.sha256(blob).hexdigest() == (
            "6f3b507c44225660dc3905163c8e3e380641daf1bf4701a975d6df1c60f23f34"
        )


class TestMatchUrl:
    def test_politifact_url(self, patterns):
        url = "https://www.politifact.com/factchecks/2013/dec/20/some-claim/"
        assert match_url(url, patterns) == ["politifact.com"]

    def test_washington_post_restricted_to_fact_checker(self, patterns):
        assert match_url("https://www.washingtonpost.com/politics/2017/x", patterns) == []
        assert match_url(
            "https://www.washingtonpost.com/news/fact-checker/wp/2017/x", patterns
        ) == ["washingtonpost.com/news/fact-checker"]

    def test_empty_url(self, patterns):
        assert match_url("", patterns) == []

    def test_truthorfiction_url(self, patterns):
        assert match_url("https://www.truthorfiction.com/google-earth-sos/", patterns) == [
            "truthorfiction.com"
        ]

    def test_lowercases_by_default(self, patterns):
        assert match_url("HTTPS://WWW.SNOPES.COM/X", patterns) == ["snopes.com"]

    def test_strict_byte_matching_flag(self):
        strict = PatternSet.default(lowercase_urls=False)
        assert match_url("HTTPS://WWW.SNOPES.COM/X", strict) == []
        assert match_url("https://www.snopes.com/x", strict) == ["snopes.com"]

    def test_multiple_templates_can_hit(self, patterns):
        url = "https://factcheck.afp.com/x"
        # factcheck.afp.com is also not factcheck.org; only the afp template hits
        assert match_url(url, patterns) == ["factcheck.afp.com"]


class TestMatchPhrases:
    def test_false_prefix_on_title(self, patterns):
        title = "FALSE: Map Shows Results of the 2012 Presidential Election If Only ..."
        assert match_phrases(title, "", patterns) == [("title", "^false:")]

    def test_fake_in_text(self, patterns):
        text = (
            "Fake news reports that recently-deceased country music legend "
            "Merle Haggard left his entire estate to an LGBT group"
        )
        assert match_phrases("", text, patterns) == [("text", r"\bfake\b")]

    def test_word_boundary_excludes_fakest(self, patterns):
        assert match_phrases("the fakest story", "", patterns) == []

    def test_politifact_in_text(self, patterns):
        text = "PolitiFact: Testing Kathleen Vinehout claim on Scott Walker"
        assert match_phrases("", text, patterns) == [("text", "politifact")]

    def test_anchor_only_at_position_zero(self, patterns):
        assert match_phrases("we rate this false: nonsense", "", patterns) == []
        # no per-line anchoring: '^' does not re-anchor after a newline
        assert match_phrases("headline\nfalse: body", "", patterns) == []
        assert match_phrases("debunking the myth machine", "", patterns) == [
            ("title", "^debunk"),
            ("title", r"\bmyths?\b"),
        ]

    def test_fields_matched_separately_not_concatenated(self, patterns):
        # title ending "fact" + text starting "check" must not fabricate a hit
        assert match_phrases("just the fact", "check the record", patterns) == []

    def test_optional_plural(self, patterns):
        assert match_phrases("rumor has it", "", patterns) == [("title", r"\brumors?\b")]
        assert match_phrases("rumors have it", "", patterns) == [("title", r"\brumors?\b")]
        assert match_phrases("rumored to be", "", patterns) == []

    def test_fact_check_separator_class(self, patterns):
        assert match_phrases("a fact check", "", patterns) == [("title", "fact[ -]check")]
        assert match_phrases("a fact-check", "", patterns) == [("title", "fact[ -]check")]
        assert match_phrases("a factcheck", "", patterns) == []

    def test_ascii_word_boundary_next_to_non_ascii(self, patterns):
        # é is not an ASCII word character, so the boundary before "fake" holds
        assert match_phrases("café fake story", "", patterns) == [("title", r"\bfake\b")]

    def test_both_fields_can_hit(self, patterns):
        hits = match_phrases("a hoax story", "the real story behind it", patterns)
        assert hits == [("title", r"\bhoax\b"), ("text", "real story behind")]


class TestClassify:
    def test_url_only_snippet(self, patterns):
        snippet = make_snippet(1, text="plain report", url="https://snopes.com/x")
        verdict = classify_snippet(snippet, patterns)
        assert verdict.mechanism is Mechanism.URL

    def test_phrase_only_snippet(self, patterns):
        snippet = make_snippet(2, text="...The Truth: The story is a hoax...")
        verdict = classify_snippet(snippet, patterns)
        assert verdict.mechanism is Mechanism.PHRASE
        assert verdict.phrase_matches == (("text", r"\bhoax\b"),)

    def test_all_empty_snippet(self, patterns):
        assert classify_snippet(make_snippet(1), patterns).mechanism is Mechanism.NONE

    def test_claim_any_rule(self, patterns):
        claim = make_claim(
            "c",
            snippets=[
                make_snippet(1, text="nothing to see"),
                make_snippet(2, url="https://www.politifact.com/factchecks/x"),
            ],
        )
        status = classify_claim(claim, patterns)
        assert status.leaked_by_url and not status.leaked_by_phrase
        assert status.leaked

    def test_google_earth_claim_both_mechanisms(self, patterns):
        claim = make_claim(
            "google-earth",
            claim_text="Google Earth Finds SOS From Woman Stranded on Deserted Island",
            snippets=[
                make_snippet(
                    1,
                    text="The Truth: The story is a hoax. ... GOOGLE EARTH FINDS "
                    "WOMAN TRAPPED ON DESERTED ISLAND FOR 7 YEARS ...",
                    url="https://www.truthorfiction.com/google-earth-sos/",
                )
            ],
        )
        status = classify_claim(claim, patterns)
        assert status.snippet_verdicts[0].mechanism is Mechanism.BOTH
        assert status.leaked_by_url and status.leaked_by_phrase

    def test_zero_snippet_claim_unleaked(self, patterns):
        status = classify_claim(make_claim("empty"), patterns)
        assert not status.leaked
        assert status.snippet_verdicts == ()

    def test_monotonicity_adding_snippet_never_unleaks(self, patterns):
        base = make_claim(
            "m", snippets=[make_snippet(1, url="https://snopes.com/a")]
        )
        grown = make_claim(
            "m",
            snippets=[
                make_snippet(1, url="https://snopes.com/a"),
                make_snippet(2, text="boring extra snippet"),
            ],
        )
        assert classify_claim(base, patterns).leaked
        assert classify_claim(grown, patterns).leaked


_field_text = st.text(
    alphabet=st.characters(min_codepoint=32, max_codepoint=0x2FF), max_size=60
)


@settings(max_examples=80, deadline=None)
@given(title=_field_text, text=_field_text, url=_field_text)
def test_case_invariance(title, text, url):
    patterns = PatternSet.default()
    original = classify_snippet(make_snippet(1, title, text, url), patterns)
    upper = classify_snippet(
        make_snippet(1, title.upper(), text.upper(), url.upper()), patterns
    )
    assert original.url_matches == upper.url_matches
    assert original.phrase_matches == upper.phrase_matches


class TestDatasetClassification:
    def test_thread_count_does_not_change_output(self, patterns):
        claims = [
            make_claim(f"c{i}", snippets=[make_snippet(1, text=f"hoax number {i}")])
            for i in range(10)
        ]
        ds = make_dataset(claims)
        assert classify_dataset(ds, patterns, threads=1) == classify_dataset(
            ds, patterns, threads=4
        )

    def test_statuses_round_trip(self, tmp_path, patterns):
        claims = [
            make_claim("a", snippets=[make_snippet(1, url="https://snopes.com/x")]),
            make_claim("b", snippets=[make_snippet(1, text="nothing")]),
        ]
        ds = make_dataset(claims)
        statuses = classify_dataset(ds, patterns)
        path = tmp_path / "statuses.jsonl"
        write_statuses(statuses, path, order=["a", "b"])
        again = read_statuses(path)
        assert again == statuses


class TestPatternLoading:
    def test_bad_regex_fails_at_load_time(self):
        with pytest.raises(PatternConfigError, match="bad regex"):
            PatternSet.from_text("phrase\tbroken\t[unclosed\n")

    def test_duplicate_id_rejected(self):
        text = "url\tsnopes.com\tsnopes.com\nurl\tsnopes.com\tsnopes.com\n"
        with pytest.raises(PatternConfigError, match="duplicate"):
            PatternSet.from_text(text)

    def test_unknown_kind_rejected(self):
        with pytest.raises(PatternConfigError, match="unknown pattern kind"):
            PatternSet.from_text("glob\tx\tx\n")

    def test_user_extension_rows(self):
        ps = PatternSet.from_text(
            "url\tnewchecker.example\tnewchecker.example\n"
            "phrase\tverdict-word\t\\bbogus\\b\n"
        )
        assert match_url("https://newchecker.example/a", ps) == ["newchecker.example"]
        assert match_phrases("a bogus tale", "", ps) == [("title", "verdict-word")]
