"""
Tests for dialogue statistics and TF-IDF terms
"""
import math
import random
from fractions import Fraction
from pathlib import Path

import pytest

from core.transcript import Script, Speaker
from evaluation.script_analytics import (
    ActCounts, AnalyticsError, EmptyInput, ScriptReport, SpeakerStats, TermScore, TfidfModel,
    TurnLengthStats, UnknownScript, analyze_corpus, content_terms, exchange_count,
    load_stopwords, rank_terms, render_report_table, round_half_up, speaker_stats,
    tfidf_top_terms, turn_length_stats,
)
from utils.schemas import validate_document


DATA_DIR = Path(__file__).resolve().parent / "data"


def oracle_quartiles(values):
    """Sort and interpolate at (n - 1) * p, written independently of the module"""
    ordered = sorted(values)
    result = []
    for numerator in (1, 2, 3):
        position = Fraction((len(ordered) - 1) * numerator, 4)
        base = position.numerator // position.denominator
        fraction = position - base
        upper = ordered[min(base + 1, len(ordered) - 1)]
        result.append(ordered[base] + fraction * (upper - ordered[base]))
    return result


def script_of(script_id, *texts):
    speakers = [Speaker.INTERVIEWER, Speaker.STAKEHOLDER]
    return Script.from_utterances(
        script_id, [(speakers[i % 2], text) for i, text in enumerate(texts)]
    )


class TestTurnLengthStats:

    def test_matches_oracle_on_random_lists(self):
        rng = random.Random(7)
        for _ in range(1000):
            values = [rng.randint(0, 300) for _ in range(rng.randint(1, 200))]
            stats = turn_length_stats(values)
            assert [stats.q1, stats.median, stats.q3] == oracle_quartiles(values)
            assert stats.min == min(values)
            assert stats.max == max(values)

    def test_exact_rationals(self):
        stats = turn_length_stats([1, 2, 3, 4])
        assert stats.q1 == Fraction(7, 4)
        assert stats.median == Fraction(5, 2)
        assert stats.q3 == Fraction(13, 4)

    def test_single_value(self):
        stats = turn_length_stats([5])
        assert (stats.min, stats.max, stats.q1, stats.median, stats.q3) == (5, 5, 5, 5, 5)

    def test_empty(self):
        with pytest.raises(EmptyInput):
            turn_length_stats([])

    def test_permutation_and_shift(self):
        rng = random.Random(11)
        for _ in range(200):
            values = [rng.randint(0, 120) for _ in range(rng.randint(1, 60))]
            stats = turn_length_stats(values)
            shuffled = values[:]
            rng.shuffle(shuffled)
            assert turn_length_stats(shuffled) == stats

            c = rng.randint(1, 50)
            shifted = turn_length_stats([v + c for v in values])
            assert (shifted.min, shifted.max) == (stats.min + c, stats.max + c)
            assert (shifted.q1, shifted.median, shifted.q3) == (
                stats.q1 + c, stats.median + c, stats.q3 + c
            )
            assert stats.min <= stats.q1 <= stats.median <= stats.q3 <= stats.max

    def test_round_half_up(self):
        assert round_half_up(Fraction(5, 2)) == 3
        assert round_half_up(Fraction(7, 4)) == 2
        assert round_half_up(Fraction(9, 4)) == 2


class TestSpeakerStats:

    def test_counts_per_speaker(self, small_script):
        interviewer = speaker_stats(small_script, Speaker.INTERVIEWER)
        stakeholder = speaker_stats(small_script, Speaker.STAKEHOLDER)
        assert (interviewer.acts.q, interviewer.acts.nq) == (2, 0)
        assert (stakeholder.acts.q, stakeholder.acts.nq) == (0, 2)
        assert interviewer.turn_count == 2
        # "What goes wrong with it?" has 5 words
        assert interviewer.short_turns == 1
        assert stakeholder.mean_length == Fraction(9 + 7, 2)

    def test_silent_speaker(self):
        script = Script.from_utterances("mono", [(Speaker.INTERVIEWER, "Anyone there?")])
        stats = speaker_stats(script, Speaker.STAKEHOLDER)
        assert stats.lengths is None
        assert stats.mean_length is None
        assert stats.acts.total == 0

    def test_exchange_count(self, small_script):
        assert exchange_count(small_script) == 2

    def test_acts_cover_every_turn(self):
        rng = random.Random(3)
        texts = ("How?", "Fine.", "We book rooms. Why ask?", "No questions here", "Really?!")
        for number in range(100):
            utterances = [(rng.choice(list(Speaker)), rng.choice(texts))
                          for _ in range(rng.randint(1, 30))]
            script = Script.from_utterances(f"r{number}", utterances)
            per_speaker = [speaker_stats(script, speaker) for speaker in Speaker]
            assert sum(stats.acts.total for stats in per_speaker) == len(script.turns)
            for stats in per_speaker:
                assert stats.acts.total == stats.turn_count
                assert stats.short_turns <= stats.turn_count


class TestTfidf:

    def test_single_document(self):
        corpus = [script_of("one", "alpha alpha beta")]
        terms = tfidf_top_terms(corpus, "one", k=10, stopwords=frozenset())
        assert [t.term for t in terms] == ["alpha", "beta"]
        assert terms[0].score == pytest.approx(2 / 3, abs=1e-9)
        assert terms[1].score == pytest.approx(1 / 3, abs=1e-9)

    def test_three_documents(self):
        corpus = [
            script_of("d1", "apple banana apple"),
            script_of("d2", "banana cherry"),
            script_of("d3", "cherry date"),
        ]
        terms = {t.term: t.score for t in tfidf_top_terms(corpus, "d1", stopwords=frozenset())}
        assert terms["apple"] == pytest.approx((2 / 3) * (math.log(4 / 2) + 1), abs=1e-9)
        assert terms["banana"] == pytest.approx((1 / 3) * (math.log(4 / 3) + 1), abs=1e-9)
        assert set(terms) == {"apple", "banana"}

    def test_idf_of_unseen_term(self):
        model = TfidfModel([["a"], ["b"]])
        assert model.idf("zzz") == pytest.approx(math.log(3) + 1)

    def test_ties_break_alphabetically(self):
        ranked = rank_terms({"beta": 0.5, "alpha": 0.5, "gamma": 0.9}, k=2)
        assert [t.term for t in ranked] == ["gamma", "alpha"]

    def test_stopwords_and_numbers_removed(self):
        assert content_terms("The 2 rooms and 3.5 desks", load_stopwords()) == ["rooms", "desks"]

    def test_duplicate_ids_rejected(self):
        corpus = [script_of("same", "a b"), script_of("same", "c d")]
        with pytest.raises(AnalyticsError):
            tfidf_top_terms(corpus, "same")

    def test_unknown_target(self):
        with pytest.raises(UnknownScript):
            tfidf_top_terms([script_of("one", "alpha")], "two")


class TestReports:

    def test_corpus_report_and_table(self, small_script, clean_script):
        reports = analyze_corpus([small_script, clean_script], k=3)
        assert [r.script_id for r in reports] == ["small", "clean"]
        assert all(len(r.top_terms) <= 3 for r in reports)

        table = render_report_table(reports)
        lines = table.splitlines()
        assert lines[0].startswith("Script")
        assert "I:min-max" in lines[0] and "S:Q" in lines[0]
        assert lines[2].startswith("small")
        assert lines[-1].startswith("I = Interviewer, S = Stakeholder")

        document = {"k": 3, "reports": [r.to_dict() for r in reports]}
        validate_document("script_report", document)

    def test_empty_corpus(self):
        with pytest.raises(EmptyInput):
            analyze_corpus([])

    def test_table_matches_golden_file(self):
        interviewer = SpeakerStats(
            speaker=Speaker.INTERVIEWER, turn_count=7,
            lengths=TurnLengthStats(3, 12, Fraction(9, 2), Fraction(7), Fraction(37, 4)),
            acts=ActCounts(nq=2, q=5), mean_length=Fraction(7), short_turns=1,
        )
        stakeholder = SpeakerStats(
            speaker=Speaker.STAKEHOLDER, turn_count=6,
            lengths=TurnLengthStats(10, 40, Fraction(15), Fraction(45, 2), Fraction(30)),
            acts=ActCounts(nq=6, q=0), mean_length=Fraction(24), short_turns=0,
        )
        silent = SpeakerStats(
            speaker=Speaker.INTERVIEWER, turn_count=0, lengths=None,
            acts=ActCounts(), mean_length=None, short_turns=0,
        )
        single = SpeakerStats(
            speaker=Speaker.STAKEHOLDER, turn_count=1,
            lengths=TurnLengthStats(1, 1, Fraction(1), Fraction(1), Fraction(1)),
            acts=ActCounts(nq=1), mean_length=Fraction(1), short_turns=1,
        )
        reports = [
            ScriptReport("s1", 13, 6, {Speaker.INTERVIEWER: interviewer,
                                       Speaker.STAKEHOLDER: stakeholder},
                         [TermScore("calendar", 0.4), TermScore("rooms", 0.2)]),
            ScriptReport("interview-2", 1, 0, {Speaker.INTERVIEWER: silent,
                                               Speaker.STAKEHOLDER: single}, []),
        ]
        expected = (DATA_DIR / "report_table.txt").read_text(encoding="utf-8")
        assert render_report_table(reports) == expected

    def test_rows_follow_input_order(self):
        corpus = [script_of(name, f"Hello {name}?", "Fine.") for name in ("d", "b", "c", "a")]
        lines = render_report_table(analyze_corpus(corpus, k=1)).splitlines()
        assert len(lines) == 2 + 4 + 1
        assert [line.split()[0] for line in lines[2:6]] == ["d", "b", "c", "a"]

    def test_single_report_single_row(self, small_script):
        lines = render_report_table(analyze_corpus([small_script])).splitlines()
        assert len(lines) == 4
        assert lines[2].startswith("small ")

    def test_render_nothing(self):
        with pytest.raises(EmptyInput):
            render_report_table([])
