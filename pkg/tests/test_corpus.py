import pytest
from hypothesis import given, strategies as st

from guiltspan.corpus import (
    ArchiveError,
    FilterReport,
    RawStory,
    count_distinct_stems,
    count_stem_hits,
    filter_archive,
    scrub,
    split_corpus,
    tokenize_with_offsets,
    word_count,
)
from guiltspan.corpus.filtering import looks_like_incident_log
from guiltspan.corpus.scrub import scrub_text


def raw(id, body, title=None, published="2019-01-01"):
    return RawStory(
        id=id,
        title=title if title is not None else f"Title {id}",
        body=body,
        published=published,
    )


CRIME_BODY = (
    "Police arrested the suspect on Main Street. The suspect allegedly "
    "stole a car. Charges of criminal mischief were filed, and the accused "
    "will appear in court."
)


class TestScrub:
    # Hand-built list of phone formats the scrubber must delete. Each entry
    # is embedded in a sentence and must leave the rest byte-identical.
    PHONE_FORMATS = [
        "555-123-4567",
        "555.123.4567",
        "555 123 4567",
        "(555) 123-4567",
        "(555)123-4567",
        "1-555-123-4567",
        "+1-555-123-4567",
        "+1 555 123 4567",
        "1 555 123 4567",
        "(800) 555-0199",
        "800-555-0199",
        "800.555.0199",
        "123-4567",
        "555-0199",
        "(555) 010-9999",
        "+1.555.123.4567",
        "1.555.123.4567",
        "555 123-4567",
        "(555) 123 4567",
        "917-555-0133",
    ]

    @pytest.mark.parametrize("phone", PHONE_FORMATS)
    def test_phone_formats_removed(self, phone):
        body = f"Call {phone} with tips."
        assert scrub_text(body) == "Call  with tips."

    def test_example_from_contract(self):
        s = raw("a", "Call 555-123-4567 with tips.")
        assert scrub(s).body == "Call  with tips."

    def test_no_phone_no_ads_unchanged(self):
        s = raw("a", CRIME_BODY)
        assert scrub(s) is s

    def test_ad_line_removed_whole(self):
        body = "First line.\nSubscribe to the Anytown newsletter today!\nLast line."
        assert scrub_text(body) == "First line.\nLast line."

    def test_idempotent(self):
        s = raw("a", "Tips: (555) 123-4567.\nSign up for our newsletter now.\nReal text.")
        once = scrub(s)
        assert scrub(once) == once

    def test_never_longer(self):
        bodies = [
            CRIME_BODY,
            "Call 555-123-4567 or 555.987.6543.",
            "Download our app today!\nNews follows.",
            "Ranges like 100-200 and years 2019-2020 stay.",
        ]
        for body in bodies:
            assert len(scrub_text(body)) <= len(body)

    def test_digit_runs_not_chewed(self):
        # Dates, years, and case numbers must survive.
        body = "Case 19-123456 opened on 12/03/2019; unit 2019-2020 budget."
        assert scrub_text(body) == body


class TestStemHits:
    def test_contract_example_four(self):
        assert count_stem_hits("Police arrested the suspect, who allegedly committed crimes.") == 4

    def test_empty(self):
        assert count_stem_hits("") == 0

    def test_contract_example_five(self):
        assert count_stem_hits("The criminal's accuser alleged arrests of suspects.") == 5

    def test_case_insensitive_prefix(self):
        assert count_stem_hits("ALLEGED Suspect ARRESTS") == 3

    def test_distinct_mode(self):
        body = "suspect suspect suspect suspect"
        assert count_stem_hits(body) == 4
        assert count_distinct_stems(body) == 1


class TestTokenize:
    def test_offsets_roundtrip(self):
        body = "Police say the suspect, 34, fled."
        toks = tokenize_with_offsets(body)
        for t in toks:
            assert body[t.char_start : t.char_end] == t.surface
        assert [t.surface for t in toks] == [
            "Police", "say", "the", "suspect", ",", "34", ",", "fled", ".",
        ]

    def test_intervals_ascending_nonoverlapping(self):
        toks = tokenize_with_offsets(CRIME_BODY)
        for a, b in zip(toks, toks[1:]):
            assert a.char_end <= b.char_start

    def test_word_count_whitespace(self):
        assert word_count("one  two\nthree") == 3


class TestIncidentLog:
    def test_blotter_detected(self):
        body = (
            "12/01/2019 - Theft reported on Oak Ave.\n"
            "12/02/2019 - Vandalism at the park.\n"
            "3:45 p.m.: Suspicious person call.\n"
        )
        assert looks_like_incident_log(body)

    def test_prose_not_detected(self):
        assert not looks_like_incident_log(CRIME_BODY)


class TestFilterArchive:
    def test_too_long_boundary(self):
        filler = " ".join(["word"] * 295)
        body_300 = CRIME_BODY + " " + " ".join(["pad"] * (300 - word_count(CRIME_BODY)))
        body_301 = body_300 + " extra"
        assert word_count(body_300) == 300
        stories, report = filter_archive([raw("ok", body_300), raw("long", body_301)])
        assert [s.id for s in stories] == ["ok"]
        assert report.rejected["too_long"] == 1
        del filler

    def test_too_few_stems(self):
        stories, report = filter_archive([raw("a", "Nothing criminal here at all.")])
        assert stories == []
        assert report.rejected["too_few_stems"] == 1

    def test_duplicate_title_keeps_earliest(self):
        s1 = raw("b", CRIME_BODY, title="Same", published="2019-05-01")
        s2 = raw("a", CRIME_BODY, title="Same", published="2019-04-01")
        stories, report = filter_archive([s1, s2])
        assert [s.id for s in stories] == ["a"]
        assert report.rejected["duplicate_title"] == 1

    def test_duplicate_title_tie_breaks_by_id(self):
        s1 = raw("b", CRIME_BODY, title="Same", published="2019-05-01")
        s2 = raw("a", CRIME_BODY, title="Same", published="2019-05-01")
        stories, _ = filter_archive([s1, s2])
        assert [s.id for s in stories] == ["a"]

    def test_report_accounts_for_every_input(self):
        archive = [
            raw("a", CRIME_BODY),
            raw("b", "No stems."),
            raw("c", CRIME_BODY, title="Title a".replace("a", "a")),
            raw("d", CRIME_BODY + " " + " ".join(["x"] * 400)),
        ]
        stories, report = filter_archive(archive)
        report.check()
        assert report.input_count == 4
        assert report.accepted == len(stories)

    def test_duplicate_ids_rejected(self):
        with pytest.raises(ArchiveError):
            filter_archive([raw("a", CRIME_BODY), raw("a", CRIME_BODY)])

    def test_order_insensitive(self):
        archive = [
            raw("a", CRIME_BODY, title="T1"),
            raw("b", CRIME_BODY, title="T1", published="2018-01-01"),
            raw("c", CRIME_BODY, title="T2"),
            raw("d", "no stems", title="T3"),
        ]
        ids1 = sorted(s.id for s in filter_archive(archive)[0])
        ids2 = sorted(s.id for s in filter_archive(list(reversed(archive)))[0])
        assert ids1 == ids2 == ["b", "c"]

    def test_accepted_satisfy_predicates(self):
        stories, _ = filter_archive([raw("a", CRIME_BODY)])
        for s in stories:
            assert s.word_count <= 300
            assert s.stem_hits >= 4
            s.validate()


class TestSplitCorpus:
    def test_sizes_10(self):
        parts = split_corpus(list(range(10)), (0.8, 0.1, 0.1), seed=0, key=lambda x: x)
        assert tuple(len(p) for p in parts) == (8, 1, 1)

    def test_deterministic(self):
        items = [f"s{i}" for i in range(37)]
        a = split_corpus(items, (0.8, 0.1, 0.1), seed=5, key=lambda x: x)
        b = split_corpus(items, (0.8, 0.1, 0.1), seed=5, key=lambda x: x)
        assert a == b

    def test_input_order_irrelevant(self):
        items = [f"s{i}" for i in range(20)]
        a = split_corpus(items, (0.8, 0.1, 0.1), seed=1, key=lambda x: x)
        b = split_corpus(list(reversed(items)), (0.8, 0.1, 0.1), seed=1, key=lambda x: x)
        assert a == b

    def test_degenerate_all_train(self):
        parts = split_corpus(list(range(7)), (1.0, 0.0, 0.0), seed=0, key=lambda x: x)
        assert sorted(parts[0]) == list(range(7))
        assert parts[1] == [] and parts[2] == []

    def test_partition_property(self):
        items = list(range(23))
        parts = split_corpus(items, (0.5, 0.25, 0.25), seed=3, key=lambda x: x)
        flat = [x for p in parts for x in p]
        assert sorted(flat) == items

    def test_too_few_stories(self):
        with pytest.raises(ValueError):
            split_corpus([1, 2], (0.4, 0.3, 0.3), seed=0, key=lambda x: x)

    def test_bad_ratios(self):
        with pytest.raises(ValueError):
            split_corpus(list(range(10)), (0.5, 0.2), seed=0, key=lambda x: x)

    @given(n=st.integers(3, 200), seed=st.integers(0, 50))
    def test_partition_exhaustive_disjoint(self, n, seed):
        items = list(range(n))
        parts = split_corpus(items, (0.8, 0.1, 0.1), seed=seed, key=lambda x: x)
        flat = sorted(x for p in parts for x in p)
        assert flat == items
        assert all(len(p) >= 1 for p in parts)
