import json

import pytest

from conftest import make_claim, make_dataset, ymd
from leakaudit.detector import ClaimLeakStatus
from leakaudit.labels import VerdictGroup
from leakaudit.reporting import (
    ConsistencyError,
    LeakStats,
    emit_report,
    leak_stats,
    verdict_ratio_by_year,
)


def status(claim_id, by_url=False, by_phrase=False):
    return ClaimLeakStatus(
        claim_id=claim_id,
        leaked_by_url=by_url,
        leaked_by_phrase=by_phrase,
        snippet_verdicts=(),
    )


class TestLeakStats:
    def test_four_claim_fixture(self):
        # hand enumeration: url-leaked = {u, b} -> 2; phrase-leaked = {p, b} -> 2;
        # either = {u, p, b} -> 3
        ds = make_dataset([make_claim(c) for c in ("u", "p", "b", "clean")])
        statuses = {
            "u": status("u", by_url=True),
            "p": status("p", by_phrase=True),
            "b": status("b", by_url=True, by_phrase=True),
            "clean": status("clean"),
        }
        stats = leak_stats(ds, statuses)
        assert (stats.population, stats.by_url, stats.by_phrase, stats.by_either) == (
            4, 2, 2, 3,
        )

    def test_empty_dataset_all_zero(self):
        stats = leak_stats(make_dataset([]), {})
        assert stats.population == 0
        assert stats.url_ratio == stats.phrase_ratio == stats.either_ratio == 0.0

    def test_missing_status_is_fatal(self):
        ds = make_dataset([make_claim("a")])
        with pytest.raises(ConsistencyError):
            leak_stats(ds, {})

    def test_misinfo_filter_shrinks_population(self):
        ds = make_dataset(
            [
                make_claim("a", raw_label="false"),  # politifact misinfo
                make_claim("b", raw_label="true"),
                make_claim("c", raw_label="half-true"),
            ]
        )
        statuses = {c: status(c, by_url=True) for c in ("a", "b", "c")}
        all_stats = leak_stats(ds, statuses, misinfo_only=False)
        misinfo = leak_stats(ds, statuses, misinfo_only=True)
        assert all_stats.population == 3
        assert misinfo.population == 1
        assert misinfo.by_url == 1
        assert misinfo.filter == "misinformation-only"
        assert all_stats.population >= misinfo.population

    def test_either_at_least_max_of_mechanisms(self):
        ds = make_dataset([make_claim(c) for c in "abc"])
        statuses = {
            "a": status("a", by_url=True),
            "b": status("b", by_phrase=True),
            "c": status("c", by_url=True, by_phrase=True),
        }
        stats = leak_stats(ds, statuses)
        assert stats.by_either >= max(stats.by_url, stats.by_phrase)
        assert stats.by_either <= stats.by_url + stats.by_phrase


class TestVerdictRatioByYear:
    def test_single_claim(self):
        ds = make_dataset(
            [make_claim("a", raw_label="true", verification_date=ymd(2010))]
        )
        table = verdict_ratio_by_year(ds)
        assert table.rows[2010].ratios[VerdictGroup.TRUE_GROUP] == 1.0
        assert table.excluded == 0

    def test_six_claim_fixture_hand_tally(self):
        # 2010: true, false, mostly false -> TRUE 1, FALSE 1, MIXED 1 (ratio 1/3 each)
        # 2011: pants on fire!, half-true, full flop -> FALSE 1, MIXED 1, OTHER 1
        ds = make_dataset(
            [
                make_claim("a", raw_label="true", verification_date=ymd(2010)),
                make_claim("b", raw_label="false", verification_date=ymd(2010)),
                make_claim("c", raw_label="mostly false", verification_date=ymd(2010)),
                make_claim("d", raw_label="pants on fire!", verification_date=ymd(2011)),
                make_claim("e", raw_label="half-true", verification_date=ymd(2011)),
                make_claim("f", raw_label="full flop", verification_date=ymd(2011)),
            ]
        )
        table = verdict_ratio_by_year(ds)
        r2010 = table.rows[2010]
        assert r2010.counts == {
            VerdictGroup.FALSE_GROUP: 1,
            VerdictGroup.MIXED_GROUP: 1,
            VerdictGroup.TRUE_GROUP: 1,
        }
        assert abs(sum(r2010.ratios.values()) - 1.0) < 1e-9
        r2011 = table.rows[2011]
        assert r2011.ratios[VerdictGroup.FALSE_GROUP] == 0.5
        assert r2011.ratios[VerdictGroup.MIXED_GROUP] == 0.5
        assert r2011.ratios[VerdictGroup.TRUE_GROUP] == 0.0
        assert r2011.other == 1
        # sum over years of group counts plus excluded equals total records
        grouped = sum(sum(row.counts.values()) for row in table.rows.values())
        assert grouped + table.excluded == len(ds.records)

    def test_undated_claims_excluded(self):
        ds = make_dataset(
            [
                make_claim("a", raw_label="true", verification_date=ymd(2020)),
                make_claim("b", raw_label="true"),
            ]
        )
        table = verdict_ratio_by_year(ds)
        assert table.excluded_undated == 1
        assert table.excluded == 1

    def test_other_in_denominator_toggle(self):
        ds = make_dataset(
            [
                make_claim("a", raw_label="true", verification_date=ymd(2020)),
                make_claim("b", raw_label="full flop", verification_date=ymd(2020)),
            ]
        )
        default = verdict_ratio_by_year(ds)
        assert default.rows[2020].ratios[VerdictGroup.TRUE_GROUP] == 1.0
        toggled = verdict_ratio_by_year(ds, other_in_denominator=True)
        assert toggled.rows[2020].ratios[VerdictGroup.TRUE_GROUP] == 0.5

    def test_year_with_only_other_gets_zero_ratios(self):
        ds = make_dataset(
            [make_claim("a", raw_label="scam", verification_date=ymd(2015))]
        )
        row = verdict_ratio_by_year(ds).rows[2015]
        assert all(r == 0.0 for r in row.ratios.values())


class TestEmitReport:
    def test_leak_stats_json_key_order(self, tmp_path):
        stats = LeakStats(population=4, by_url=2, by_phrase=2, by_either=3, filter="x")
        path = emit_report(stats, "json", tmp_path / "stats.json")
        raw = path.read_text(encoding="utf-8")
        positions = [raw.index(f'"{k}"') for k in
                     ("by_either", "by_phrase", "by_url", "filter", "population")]
        assert positions == sorted(positions)
        payload = json.loads(raw)
        assert payload["by_either"] == {"count": 3, "ratio": 0.75}

    def test_emission_is_byte_deterministic(self, tmp_path):
        stats = LeakStats(population=3, by_url=1, by_phrase=2, by_either=2, filter="f")
        p1 = emit_report(stats, "json", tmp_path / "a.json")
        p2 = emit_report(stats, "json", tmp_path / "b.json")
        assert p1.read_bytes() == p2.read_bytes()
        c1 = emit_report(stats, "csv", tmp_path / "a.csv")
        c2 = emit_report(stats, "csv", tmp_path / "b.csv")
        assert c1.read_bytes() == c2.read_bytes()

    def test_yearly_csv_sorted_ascending_with_header(self, tmp_path):
        ds = make_dataset(
            [
                make_claim("a", raw_label="true", verification_date=ymd(2019)),
                make_claim("b", raw_label="false", verification_date=ymd(2007)),
                make_claim("c", raw_label="false", verification_date=ymd(2013)),
            ]
        )
        table = verdict_ratio_by_year(ds)
        path = emit_report(table, "csv", tmp_path / "y.csv")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0].startswith("year,false_count,")
        years = [int(line.split(",")[0]) for line in lines[1:]]
        assert years == [2007, 2013, 2019]

    def test_four_decimal_ratio_formatting(self, tmp_path):
        stats = LeakStats(population=3, by_url=1, by_phrase=0, by_either=1, filter="f")
        path = emit_report(stats, "csv", tmp_path / "s.csv")
        row = path.read_text(encoding="utf-8").splitlines()[1]
        assert ",0.3333," in row

    def test_csv_needs_tabular_type(self, tmp_path):
        with pytest.raises(TypeError):
            emit_report({"loose": 1}, "csv", tmp_path / "x.csv")

    def test_unknown_format_rejected(self, tmp_path):
        stats = LeakStats(population=0, by_url=0, by_phrase=0, by_either=0, filter="f")
        with pytest.raises(ValueError):
            emit_report(stats, "yaml", tmp_path / "x.yaml")
