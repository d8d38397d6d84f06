"""
Tests for evaluation templates, record validation and aggregation
"""
import json
from fractions import Fraction

import pytest

from management.rubric_manager import (
    DuplicateEntry, EmptyInput, MissingScore, MistakeTag, NLDimension, OutOfRange,
    RubricElement, RubricError, RubricManager, aggregate, format_cell, new_evaluation_template,
    record_filename, validate_evaluation,
)
from utils.schemas import validate_document


def filled(script, evaluator, score=4):
    doc = new_evaluation_template(script, evaluator)
    for group in ("nl_scores", "rubric_scores"):
        for entry in doc[group].values():
            entry["score"] = score
    return doc


class TestValidation:

    def test_template_matches_schema(self, small_script):
        template = new_evaluation_template(small_script, "e1")
        validate_document("evaluation_template", template)
        assert set(template["nl_scores"]) == {d.value for d in NLDimension}
        assert set(template["rubric_scores"]) == {e.value for e in RubricElement}

    def test_filled_record(self, small_script):
        doc = filled(small_script, "e1")
        doc["rubric_scores"]["closing"]["notes"] = "no summary"
        record = validate_evaluation(doc)
        assert all(record.score(d) == 4 for d in NLDimension)
        assert record.notes == {"closing": "no summary"}
        validate_document("evaluation_record", record.to_dict())

    def test_bare_integer_entries(self):
        doc = {
            "script_id": "s", "evaluator_id": "e",
            "nl_scores": {d.value: 5 for d in NLDimension},
            "rubric_scores": {e.value: 1 for e in RubricElement},
        }
        assert validate_evaluation(doc).score(RubricElement.GREETING) == 1

    def test_unfilled_template(self, small_script):
        with pytest.raises(MissingScore):
            validate_evaluation(new_evaluation_template(small_script, "e1"))

    @pytest.mark.parametrize("bad", [0, 6, 3.5, "4", True])
    def test_out_of_range(self, small_script, bad):
        doc = filled(small_script, "e1")
        doc["nl_scores"]["coherence"]["score"] = bad
        with pytest.raises(OutOfRange):
            validate_evaluation(doc)

    def test_unknown_key(self, small_script):
        doc = filled(small_script, "e1")
        doc["rubric_scores"]["humour"] = {"score": 3}
        with pytest.raises(RubricError):
            validate_evaluation(doc)

    def test_mistake_tag_parse(self):
        assert MistakeTag.parse("technical_jargon") is MistakeTag.TECHNICAL_JARGON
        assert MistakeTag.parse("LackOfClarity") is MistakeTag.LACK_OF_CLARITY
        with pytest.raises(RubricError):
            MistakeTag.parse("Rudeness")


class TestAggregation:

    def test_mean_of_two_evaluators(self, small_script):
        records = [
            validate_evaluation(filled(small_script, "e1", 3)),
            validate_evaluation(filled(small_script, "e2", 4)),
        ]
        summary = aggregate(records)
        assert summary.means[RubricElement.GREETING]["small"] == Fraction(7, 2)
        assert summary.cell(RubricElement.GREETING, "small") == "3.5"
        validate_document("rubric_summary", summary.to_dict())

    def test_single_evaluator_shows_integer(self, small_script):
        summary = aggregate([validate_evaluation(filled(small_script, "e1", 4))])
        assert summary.cell(NLDimension.NATURALNESS, "small") == "4"
        rendered = summary.render()
        assert "not natural at all" in rendered
        assert 'Analyze Current State "As Is"' in rendered

    def test_rounding_half_up(self):
        assert format_cell(Fraction(9, 4), 4) == "2.3"
        assert format_cell(Fraction(7, 3), 3) == "2.3"
        assert format_cell(Fraction(4), 2) == "4.0"

    def test_duplicate_evaluator(self, small_script):
        record = validate_evaluation(filled(small_script, "e1"))
        with pytest.raises(DuplicateEntry):
            aggregate([record, record])

    def test_empty(self):
        with pytest.raises(EmptyInput):
            aggregate([])


class TestRubricManager:

    def test_templates_are_not_overwritten(self, tmp_path, small_script):
        manager = RubricManager(tmp_path)
        written = manager.create_templates([small_script], "e1")
        assert [p.name for p in written] == [record_filename("small", "e1")]
        assert manager.create_templates([small_script], "e1") == []
        assert len(manager.create_templates([small_script], "e1", force=True)) == 1

    def test_check_and_report(self, tmp_path, small_script, clean_script):
        manager = RubricManager(tmp_path)
        manager.create_templates([small_script, clean_script], "e1")
        (tmp_path / record_filename("small", "e1")).write_text(
            json.dumps(filled(small_script, "e1", 5)), encoding="utf-8"
        )

        results = manager.check()
        assert results[tmp_path / record_filename("small", "e1")] is None
        assert "Missing score" in results[tmp_path / record_filename("clean", "e1")]

        summary = manager.report([tmp_path / record_filename("small", "e1")])
        assert summary.script_ids == ["small"]

    def test_duplicate_json_key(self, tmp_path):
        path = tmp_path / "dup__e1.json"
        path.write_text('{"script_id": "a", "script_id": "b"}', encoding="utf-8")
        with pytest.raises(DuplicateEntry):
            RubricManager(tmp_path).load_record(path)

    def test_malformed_json_names_file(self, tmp_path):
        path = tmp_path / "bad__e1.json"
        path.write_text("{", encoding="utf-8")
        with pytest.raises(RubricError, match="bad__e1.json"):
            RubricManager(tmp_path).load_record(path)
