"""
Evaluation package - dialogue statistics and reference-free quality scores
"""
from .script_analytics import ScriptReport, analyze_corpus, render_report_table, script_report
from .quality_scorer import QualityReport, QualityScorer, render_quality_table

__all__ = [
    "ScriptReport",
    "analyze_corpus",
    "render_report_table",
    "script_report",
    "QualityReport",
    "QualityScorer",
    "render_quality_table",
]
