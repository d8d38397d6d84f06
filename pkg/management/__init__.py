"""
Evaluation Management Interface

Rubric templates, evaluator records and aggregation, plus advisory script lints.
"""

from .rubric_manager import EvaluationRecord, MistakeTag, RubricManager, RubricSummary
from .script_linter import LintFinding, ScriptLinter

__all__ = [
    'EvaluationRecord',
    'MistakeTag',
    'RubricManager',
    'RubricSummary',
    'LintFinding',
    'ScriptLinter',
]
