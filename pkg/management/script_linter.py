"""
Script Linter

Advisory keyword heuristics for common interviewer mistakes and structural
gaps. Findings are Info or Warning and are never turned into scores.

Rules:
    OtherStakeholders      (a) no interviewer question asks about further stakeholders
    GreetingPresent        (b) first interviewer turn has no greeting
    ClosingSummary         (c) closing interviewer turns hold neither summary nor approval request
    WrittenRegister        (d) turns phrased like a written document
    StakeholderQuestions   (e) the stakeholder never asks a question
    LeadingQuestions       (f) interviewer questions that suggest the answer
    ActiveListening        (g) a stakeholder concern the next interviewer turn does not pick up
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import yaml

from core.exceptions import ConfigurationError
from core.transcript import DialogueAct, Script, Speaker, classify_turn, tokenize_words
from management.rubric_manager import MistakeTag


PATTERNS_PATH = Path(__file__).resolve().parent.parent / "data" / "lint_patterns.yaml"
PATTERN_KEYS = (
    "other_stakeholders", "greeting", "summary", "approval",
    "written_register", "leading", "concern_terms",
)
CLOSING_SHARE = 0.2


class Severity(Enum):
    INFO = "info"
    WARNING = "warning"


class StructuralCheck(Enum):
    GREETING_PRESENT = "GreetingPresent"
    CLOSING_SUMMARY = "ClosingSummary"
    STAKEHOLDER_QUESTIONS = "StakeholderQuestions"
    ACTIVE_LISTENING = "ActiveListening"


@dataclass(frozen=True)
class LintFinding:
    rule: str
    tag: Union[MistakeTag, StructuralCheck]
    severity: Severity
    message: str
    turn_refs: Tuple[int, ...] = ()

    def to_dict(self) -> Dict[str, object]:
        return {
            "rule": self.rule,
            "tag": self.tag.value,
            "severity": self.severity.value,
            "message": self.message,
            "turn_refs": list(self.turn_refs),
        }

    def render(self) -> str:
        refs = f" (turns: {', '.join(str(i) for i in self.turn_refs)})" if self.turn_refs else ""
        return f"{self.severity.value:<7} {self.tag.value} [{self.rule}] {self.message}{refs}"


@lru_cache(maxsize=None)
def _load_patterns(path: str) -> Dict[str, Tuple[Tuple[str, ...], ...]]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigurationError(f"Cannot load lint patterns from {path}: {e}")

    missing = [key for key in PATTERN_KEYS if not data.get(key)]
    if missing:
        raise ConfigurationError(f"Lint patterns file {path} lacks: {', '.join(missing)}")
    return {
        key: tuple(tuple(tokenize_words(str(phrase))) for phrase in data[key] if tokenize_words(str(phrase)))
        for key in PATTERN_KEYS
    }


def _contains_phrase(tokens: Sequence[str], phrase: Tuple[str, ...]) -> bool:
    width = len(phrase)
    return any(tuple(tokens[i:i + width]) == phrase for i in range(len(tokens) - width + 1))


class ScriptLinter:
    """Applies every rule to a script; pure and deterministic"""

    def __init__(self, patterns_path: Optional[Union[str, Path]] = None):
        self.patterns = _load_patterns(str(patterns_path or PATTERNS_PATH))
        self.logger = logging.getLogger(self.__class__.__name__)

    def _matches(self, text: str, key: str) -> List[Tuple[str, ...]]:
        tokens = tokenize_words(text)
        return [phrase for phrase in self.patterns[key] if _contains_phrase(tokens, phrase)]

    def lint(self, script: Script) -> List[LintFinding]:
        findings: List[LintFinding] = []
        for rule in (
            self._other_stakeholders, self._greeting_present, self._closing_summary,
            self._written_register, self._stakeholder_questions, self._leading_questions,
            self._active_listening,
        ):
            finding = rule(script)
            if finding is not None:
                findings.append(finding)
        self.logger.debug(f"{script.id}: {len(findings)} finding(s)")
        return findings

    def _other_stakeholders(self, script: Script) -> Optional[LintFinding]:
        questions = [
            t for t in script.turns_by(Speaker.INTERVIEWER)
            if classify_turn(t) is DialogueAct.QUESTION
        ]
        if any(self._matches(t.text, "other_stakeholders") for t in questions):
            return None
        return LintFinding(
            rule="OtherStakeholders",
            tag=MistakeTag.IGNORING_OTHER_STAKEHOLDERS,
            severity=Severity.WARNING,
            message="The interviewer never asks about other stakeholders to involve",
        )

    def _greeting_present(self, script: Script) -> Optional[LintFinding]:
        interviewer = script.turns_by(Speaker.INTERVIEWER)
        if interviewer and self._matches(interviewer[0].text, "greeting"):
            return None
        return LintFinding(
            rule="GreetingPresent",
            tag=StructuralCheck.GREETING_PRESENT,
            severity=Severity.INFO,
            message="The first interviewer turn contains no greeting",
            turn_refs=(interviewer[0].index,) if interviewer else (),
        )

    def _closing_summary(self, script: Script) -> Optional[LintFinding]:
        interviewer = script.turns_by(Speaker.INTERVIEWER)
        if not interviewer:
            return None
        closing = interviewer[-math.ceil(len(interviewer) * CLOSING_SHARE):]
        if any(self._matches(t.text, "summary") or self._matches(t.text, "approval") for t in closing):
            return None
        return LintFinding(
            rule="ClosingSummary",
            tag=StructuralCheck.CLOSING_SUMMARY,
            severity=Severity.WARNING,
            message="The closing interviewer turns neither summarize nor ask for approval",
            turn_refs=tuple(t.index for t in closing),
        )

    def _written_register(self, script: Script) -> Optional[LintFinding]:
        flagged = tuple(t.index for t in script.turns if self._matches(t.text, "written_register"))
        if not flagged:
            return None
        return LintFinding(
            rule="WrittenRegister",
            tag=MistakeTag.UNNATURAL_DIALOGUE_STYLE,
            severity=Severity.INFO,
            message="Phrasing of a written document (e.g. 'the next section') in spoken dialogue",
            turn_refs=flagged,
        )

    def _stakeholder_questions(self, script: Script) -> Optional[LintFinding]:
        if any(classify_turn(t) is DialogueAct.QUESTION for t in script.turns_by(Speaker.STAKEHOLDER)):
            return None
        return LintFinding(
            rule="StakeholderQuestions",
            tag=StructuralCheck.STAKEHOLDER_QUESTIONS,
            severity=Severity.INFO,
            message="The stakeholder never asks a question",
        )

    def _leading_questions(self, script: Script) -> Optional[LintFinding]:
        flagged = tuple(
            t.index for t in script.turns_by(Speaker.INTERVIEWER)
            if classify_turn(t) is DialogueAct.QUESTION and self._matches(t.text, "leading")
        )
        if not flagged:
            return None
        return LintFinding(
            rule="LeadingQuestions",
            tag=MistakeTag.INFLUENCING_STAKEHOLDER,
            severity=Severity.WARNING,
            message="Leading questions suggest the answer to the stakeholder",
            turn_refs=flagged,
        )

    def _active_listening(self, script: Script) -> Optional[LintFinding]:
        flagged = []
        turns = script.turns
        for position, turn in enumerate(turns):
            if turn.speaker is not Speaker.STAKEHOLDER:
                continue
            concerns = self._matches(turn.text, "concern_terms")
            if not concerns:
                continue
            follow_up = next(
                (t for t in turns[position + 1:] if t.speaker is Speaker.INTERVIEWER), None
            )
            if follow_up is None:
                continue
            follow_tokens = tokenize_words(follow_up.text)
            if not any(_contains_phrase(follow_tokens, phrase) for phrase in concerns):
                flagged.append(turn.index)
        if not flagged:
            return None
        return LintFinding(
            rule="ActiveListening",
            tag=StructuralCheck.ACTIVE_LISTENING,
            severity=Severity.INFO,
            message="A stakeholder concern (e.g. privacy) is not probed in the next interviewer turn",
            turn_refs=tuple(flagged),
        )


def lint_script(script: Script) -> List[LintFinding]:
    return ScriptLinter().lint(script)


def render_findings(script_id: str, findings: Sequence[LintFinding]) -> str:
    if not findings:
        return f"{script_id}: no findings\n"
    lines = [f"{script_id}: {len(findings)} finding(s)"]
    lines.extend(f"  {finding.render()}" for finding in findings)
    return "\n".join(lines) + "\n"
