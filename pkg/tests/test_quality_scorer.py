"""
Tests for reference-free quality scores
"""
import random

import numpy as np
import pytest

from core.transcript import Script, Speaker, Turn
from evaluation.quality_scorer import (
    COMPONENTS, Aggregate, NoScorerRegistered, QualityError, QualityScorer, available_scorers,
    coherence, focus, grammaticality, heuristic_grammaticality, non_redundancy,
    register_scorer, render_quality_table, score_script, token_set_cosine,
)
from utils.schemas import validate_document


ALPHABET = "abcdefgh .,?!()\"'“”[]{}\n-"
WORDS = ("room", "booking", "calendar", "we", "need", "staff", "email", "privacy", "today")


def fuzz_text(rng: random.Random) -> str:
    return "".join(rng.choice(ALPHABET) for _ in range(rng.randint(0, 80)))


class TestMetrics:

    def test_non_redundancy_example(self):
        assert non_redundancy("a b c a b c") == pytest.approx(0.75)

    def test_duplicated_sentence_scores_lower(self):
        base = "We book study rooms at the front desk every morning."
        assert non_redundancy(base + " " + base) < non_redundancy(base)

    def test_short_text_is_not_redundant(self):
        assert non_redundancy("hi there") == 1.0

    def test_grammaticality_example(self):
        assert heuristic_grammaticality("the the system works") == pytest.approx(0.8)

    def test_grammaticality_penalties(self):
        assert heuristic_grammaticality("A clean sentence.") == 1.0
        assert heuristic_grammaticality('He said "yes (maybe.') == pytest.approx(0.6)

    def test_cosine_of_empty_text(self):
        assert token_set_cosine("", "anything") == 0.0

    def test_single_sentence_focus(self):
        assert focus("Only one sentence here.") == 1.0

    def test_chained_overlap_beats_derangement(self):
        chained = [
            "alpha beta gamma delta",
            "delta epsilon zeta eta",
            "eta theta iota kappa",
            "kappa lambda mu nu",
        ]
        # same turns, reordered to break the chain
        deranged = [chained[0], chained[2], chained[1], chained[3]]
        assert coherence(chained) > coherence(deranged)

    def test_reversal_leaves_focus_and_coherence_unchanged(self):
        rng = random.Random(17)
        for _ in range(200):
            units = [" ".join(rng.choice(WORDS) for _ in range(rng.randint(1, 6))) + "."
                     for _ in range(rng.randint(0, 9))]
            assert coherence(units) == coherence(units[::-1])
            assert focus(" ".join(units)) == focus(" ".join(reversed(units)))

    def test_fuzzed_scores_stay_in_unit_interval(self):
        rng = random.Random(3)
        scorer = QualityScorer()
        for _ in range(300):
            text = fuzz_text(rng)
            for value in (non_redundancy(text), focus(text), grammaticality(text),
                          coherence([text, fuzz_text(rng)])):
                assert 0.0 <= value <= 1.0
            if text.strip():
                score = scorer.score_turn(Turn(0, Speaker.INTERVIEWER, text))
                assert 0.0 <= score.composite <= 1.0


class TestScorerRegistry:

    def test_unknown_scorer(self):
        with pytest.raises(NoScorerRegistered):
            QualityScorer(scorer="missing")

    def test_registered_scorer_is_clamped(self):
        register_scorer("always-high", lambda text: 7.0)
        assert "always-high" in available_scorers()
        assert grammaticality("whatever", "always-high") == 1.0

    def test_invalid_weights(self):
        with pytest.raises(QualityError):
            QualityScorer(weights={"grammaticality": -1.0})


class TestScriptScores:

    def test_composite_is_component_mean(self, small_script):
        scorer = QualityScorer()
        for turn in small_script.turns:
            score = scorer.score_turn(turn)
            mean = sum(getattr(score, name) for name in COMPONENTS) / len(COMPONENTS)
            assert score.composite == pytest.approx(mean, abs=1e-12)

    def test_weighted_composite(self):
        scorer = QualityScorer(weights={"grammaticality": 1.0})
        score = scorer.score_turn(Turn(0, Speaker.STAKEHOLDER, "the the system works"))
        assert score.composite == pytest.approx(score.grammaticality)

    def test_aggregates_recomputable(self, clean_script):
        report = score_script(clean_script)
        for group in ("Interviewer", "Stakeholder"):
            values = [t.score.composite for t in report.turns if t.speaker.value == group]
            aggregate = report.aggregates[group]
            assert aggregate.count == len(values)
            assert aggregate.mean == pytest.approx(float(np.mean(values)), abs=1e-12)
            assert aggregate.std == pytest.approx(float(np.std(values)), abs=1e-12)
        assert report.aggregates["All"].count == len(clean_script.turns)
        assert 0.0 <= report.script_coherence <= 1.0

    def test_missing_speaker_aggregate(self):
        script = Script.from_utterances("solo", [(Speaker.INTERVIEWER, "Anyone there?")])
        report = score_script(script)
        assert report.aggregates["Stakeholder"] == Aggregate(count=0, mean=None, std=None)
        assert report.aggregates["Stakeholder"].cell() == "-"

    def test_aggregate_cell(self):
        assert Aggregate.of([0.6, 1.0]).cell() == "0.80 ± 0.20"

    def test_report_document_and_table(self, small_script, clean_script):
        reports = [score_script(small_script), score_script(clean_script)]
        validate_document("quality_report", {"reports": [r.to_dict() for r in reports]})
        table = render_quality_table(reports)
        assert table.splitlines()[0].startswith("Script")
        assert "population std" in table
