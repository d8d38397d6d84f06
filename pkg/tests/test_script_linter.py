"""
Tests for the advisory script linter
"""
import pytest

from core.exceptions import ConfigurationError
from core.transcript import Script, Speaker
from management.rubric_manager import MistakeTag
from management.script_linter import (
    ScriptLinter, Severity, StructuralCheck, lint_script, render_findings,
)
from utils.schemas import validate_document


def dialogue(*texts):
    speakers = [Speaker.INTERVIEWER, Speaker.STAKEHOLDER]
    return Script.from_utterances("lint", [(speakers[i % 2], t) for i, t in enumerate(texts)])


def by_rule(findings):
    return {finding.rule: finding for finding in findings}


class TestFixtures:

    def test_defect_script(self, defect_script):
        findings = by_rule(lint_script(defect_script))
        assert set(findings) == {"OtherStakeholders", "WrittenRegister"}
        assert findings["OtherStakeholders"].tag is MistakeTag.IGNORING_OTHER_STAKEHOLDERS
        assert findings["WrittenRegister"].turn_refs == (4,)
        assert findings["WrittenRegister"].severity is Severity.INFO

    def test_clean_script(self, clean_script):
        assert lint_script(clean_script) == []

    def test_report_document(self, defect_script, clean_script):
        linter = ScriptLinter()
        document = {"scripts": [
            {"script_id": s.id, "findings": [f.to_dict() for f in linter.lint(s)]}
            for s in (defect_script, clean_script)
        ]}
        validate_document("lint_report", document)


class TestRules:

    def test_leading_question(self):
        script = dialogue(
            "Hello, who else uses the system?",
            "The nurses. Will it be fast?",
            "Don't you think a mobile app would be better?",
            "Maybe.",
        )
        finding = by_rule(lint_script(script))["LeadingQuestions"]
        assert finding.tag is MistakeTag.INFLUENCING_STAKEHOLDER
        assert finding.turn_refs == (2,)

    def test_missing_greeting(self):
        findings = by_rule(lint_script(dialogue("What do you need?", "A calendar.")))
        assert findings["GreetingPresent"].tag is StructuralCheck.GREETING_PRESENT
        assert findings["GreetingPresent"].turn_refs == (0,)

    def test_greeting_matches_whole_words(self):
        findings = by_rule(lint_script(dialogue("This is about the new portal?", "Yes.")))
        assert "GreetingPresent" in findings

    def test_unprobed_concern(self):
        script = dialogue(
            "Hello, who else is involved?",
            "Nurses. I worry about privacy of patient data.",
            "What else should it do?",
            "Reminders.",
        )
        finding = by_rule(lint_script(script))["ActiveListening"]
        assert finding.turn_refs == (1,)

    def test_probed_concern(self):
        script = dialogue(
            "Hello, who else is involved?",
            "Nurses. I worry about privacy of patient data.",
            "What privacy risks worry you most?",
            "Leaked records.",
        )
        assert "ActiveListening" not in by_rule(lint_script(script))

    def test_missing_closing(self):
        findings = by_rule(lint_script(dialogue("Hello, who else books rooms?", "The staff.")))
        assert findings["ClosingSummary"].turn_refs == (0,)

    def test_stakeholder_never_asks(self):
        finding = by_rule(lint_script(dialogue("Hello, who else books rooms?", "The staff.")))[
            "StakeholderQuestions"
        ]
        assert finding.tag is StructuralCheck.STAKEHOLDER_QUESTIONS
        assert finding.severity is Severity.INFO
        assert finding.turn_refs == ()

    def test_stakeholder_question_clears_check(self):
        script = dialogue("Hello, who else books rooms?", "The staff. Will they get access?")
        assert "StakeholderQuestions" not in by_rule(lint_script(script))


class TestRendering:

    def test_no_findings(self):
        assert render_findings("clean", []) == "clean: no findings\n"

    def test_findings_listed(self, defect_script):
        text = render_findings("defects", lint_script(defect_script))
        assert text.startswith("defects: 2 finding(s)")
        assert "IgnoringOtherStakeholders [OtherStakeholders]" in text


class TestPatterns:

    def test_incomplete_patterns_file(self, tmp_path):
        path = tmp_path / "patterns.yaml"
        path.write_text("greeting: [hello]\n", encoding="utf-8")
        with pytest.raises(ConfigurationError):
            ScriptLinter(path)
