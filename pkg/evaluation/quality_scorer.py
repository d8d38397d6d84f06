"""
Quality Scorer - reference-free per-turn quality metrics

Four lexical criteria in [0, 1] (grammaticality, non-redundancy, focus,
coherence), a weighted composite, and per-speaker mean and population standard
deviation over a script. Degenerate inputs (empty text, a single sentence)
score 1.0: no evidence of a defect.
"""
import logging
import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Sequence

import numpy as np
from nltk import ngrams

from core.exceptions import ToolkitError
from core.transcript import Script, Speaker, Turn, split_sentences, tokenize_words


logger = logging.getLogger(__name__)

COMPONENTS = ("grammaticality", "non_redundancy", "focus", "coherence")
SIMILARITY_SATURATION = 0.2
DEFAULT_SCORER = "heuristic"


class QualityError(ToolkitError):
    """Quality scoring error"""


class EmptyScript(QualityError):
    """Script without turns"""


class NoScorerRegistered(QualityError):
    """Requested grammaticality scorer is not registered"""


# Lexical sub-metrics

def non_redundancy(text: str) -> float:
    """1 minus the share of word trigrams that repeat an earlier trigram"""
    tokens = tokenize_words(text)
    if len(tokens) < 3:
        return 1.0
    counts = Counter(ngrams(tokens, 3))
    total = sum(counts.values())
    repeats = sum(count - 1 for count in counts.values())
    return 1.0 - repeats / max(1, total)


def token_set_cosine(first: str, second: str) -> float:
    """|A & B| / sqrt(|A| |B|) over word-token sets; 0.0 when either set is empty"""
    a, b = set(tokenize_words(first)), set(tokenize_words(second))
    if not a or not b:
        return 0.0
    return len(a & b) / math.sqrt(len(a) * len(b))


def _saturate(similarity: float) -> float:
    return min(1.0, similarity / SIMILARITY_SATURATION)


def _adjacent_similarity(units: Sequence[str]) -> float:
    if len(units) <= 1:
        return 1.0
    pairs = [_saturate(token_set_cosine(a, b)) for a, b in zip(units, units[1:])]
    # fsum rounds once, so the mean does not depend on pair order
    return math.fsum(pairs) / len(pairs)


def focus(text: str) -> float:
    """Mean saturated similarity of neighbouring sentences within one text"""
    return _adjacent_similarity(split_sentences(text))


def coherence(turn_texts: Sequence[str]) -> float:
    """Mean saturated similarity of neighbouring turns (or sentences) in order"""
    return _adjacent_similarity(list(turn_texts))


# Grammaticality scorers

_TERMINAL_RE = re.compile(r"[.!?…][\"'”’)\]]*$")
_BRACKET_PAIRS = (("(", ")"), ("[", "]"), ("{", "}"))


def _unbalanced(text: str, opening: str, closing: str) -> bool:
    depth = 0
    for char in text:
        if char == opening:
            depth += 1
        elif char == closing:
            depth -= 1
            if depth < 0:
                return True
    return depth != 0


def heuristic_grammaticality(text: str) -> float:
    """
    1.0 minus penalties, counted in tenths and floored at 0:
    missing terminal punctuation on a multi-word text (1), each unbalanced
    bracket or quote kind (2), each immediately repeated word (1).
    """
    tenths = 0
    stripped = text.strip()
    if len(stripped.split()) > 1 and not _TERMINAL_RE.search(stripped):
        tenths += 1
    for opening, closing in _BRACKET_PAIRS:
        if _unbalanced(stripped, opening, closing):
            tenths += 2
    if stripped.count('"') % 2:
        tenths += 2
    if stripped.count("“") != stripped.count("”"):
        tenths += 2
    tokens = tokenize_words(stripped)
    tenths += sum(1 for a, b in zip(tokens, tokens[1:]) if a == b)
    return max(0, 10 - tenths) / 10


_SCORERS: Dict[str, Callable[[str], float]] = {DEFAULT_SCORER: heuristic_grammaticality}


def register_scorer(name: str, scorer: Callable[[str], float]) -> None:
    """Register a grammaticality scorer under ``name`` (replaces any existing one)"""
    _SCORERS[name] = scorer
    logger.debug(f"Registered grammaticality scorer {name!r}")


def available_scorers() -> List[str]:
    return sorted(_SCORERS)


def grammaticality(text: str, scorer: str = DEFAULT_SCORER) -> float:
    try:
        score_fn = _SCORERS[scorer]
    except KeyError:
        raise NoScorerRegistered(
            f"No grammaticality scorer named {scorer!r}; available: {', '.join(available_scorers())}"
        )
    return min(1.0, max(0.0, float(score_fn(text))))


# Scores and reports

@dataclass(frozen=True)
class QualityScore:
    grammaticality: float
    non_redundancy: float
    focus: float
    coherence: float
    composite: float

    def to_dict(self) -> Dict[str, float]:
        return {
            "grammaticality": self.grammaticality,
            "non_redundancy": self.non_redundancy,
            "focus": self.focus,
            "coherence": self.coherence,
            "composite": self.composite,
        }


@dataclass(frozen=True)
class TurnQuality:
    index: int
    speaker: Speaker
    score: QualityScore

    def to_dict(self) -> Dict[str, object]:
        return {"index": self.index, "speaker": self.speaker.value, **self.score.to_dict()}


@dataclass(frozen=True)
class Aggregate:
    """Mean and population standard deviation of composite scores"""
    count: int
    mean: Optional[float]
    std: Optional[float]

    @classmethod
    def of(cls, values: Sequence[float]) -> "Aggregate":
        if not values:
            return cls(count=0, mean=None, std=None)
        array = np.asarray(values, dtype=float)
        return cls(count=len(values), mean=float(array.mean()), std=float(array.std(ddof=0)))

    def cell(self) -> str:
        if self.mean is None:
            return "-"
        return f"{self.mean:.2f} ± {self.std:.2f}"

    def to_dict(self) -> Dict[str, object]:
        return {"count": self.count, "mean": self.mean, "std": self.std}


AGGREGATE_GROUPS = ("Interviewer", "Stakeholder", "All")


@dataclass(frozen=True)
class QualityReport:
    script_id: str
    scorer: str
    weights: Dict[str, float]
    turns: List[TurnQuality]
    aggregates: Dict[str, Aggregate]
    script_coherence: float

    def to_dict(self) -> Dict[str, object]:
        return {
            "script_id": self.script_id,
            "scorer": self.scorer,
            "weights": dict(self.weights),
            "turns": [turn.to_dict() for turn in self.turns],
            "aggregates": {group: self.aggregates[group].to_dict() for group in AGGREGATE_GROUPS},
            "script_coherence": self.script_coherence,
            "std_kind": "population",
        }


class QualityScorer:
    """Scores turns and scripts with a named grammaticality scorer and component weights"""

    def __init__(self, scorer: str = DEFAULT_SCORER, weights: Optional[Mapping[str, float]] = None):
        if scorer not in _SCORERS:
            raise NoScorerRegistered(
                f"No grammaticality scorer named {scorer!r}; available: {', '.join(available_scorers())}"
            )
        weights = dict(weights) if weights else {name: 1.0 for name in COMPONENTS}
        unknown = set(weights) - set(COMPONENTS)
        if unknown or any(w < 0 for w in weights.values()) or sum(weights.values()) <= 0:
            raise QualityError(f"Invalid component weights: {weights}")
        self.scorer = scorer
        self.weights = {name: float(weights.get(name, 0.0)) for name in COMPONENTS}
        self.logger = logging.getLogger(self.__class__.__name__)

    def composite(self, components: Mapping[str, float]) -> float:
        total_weight = sum(self.weights.values())
        return sum(self.weights[name] * components[name] for name in COMPONENTS) / total_weight

    def score_turn(self, turn: Turn) -> QualityScore:
        """Intra-turn scores; coherence runs over the turn's own sentence sequence"""
        components = {
            "grammaticality": grammaticality(turn.text, self.scorer),
            "non_redundancy": non_redundancy(turn.text),
            "focus": focus(turn.text),
            "coherence": coherence(split_sentences(turn.text)),
        }
        return QualityScore(composite=self.composite(components), **components)

    def score_script(self, script: Script) -> QualityReport:
        if not script.turns:
            raise EmptyScript(f"Script {script.id!r} has no turns")

        turns = [TurnQuality(t.index, t.speaker, self.score_turn(t)) for t in script.turns]
        by_group: Dict[str, List[float]] = {group: [] for group in AGGREGATE_GROUPS}
        for turn in turns:
            by_group[turn.speaker.value].append(turn.score.composite)
            by_group["All"].append(turn.score.composite)

        report = QualityReport(
            script_id=script.id,
            scorer=self.scorer,
            weights=self.weights,
            turns=turns,
            aggregates={group: Aggregate.of(values) for group, values in by_group.items()},
            script_coherence=coherence([t.text for t in script.turns]),
        )
        self.logger.info(
            f"Scored {script.id}: all turns {report.aggregates['All'].cell()}"
        )
        return report


def score_turn(turn: Turn) -> QualityScore:
    return QualityScorer().score_turn(turn)


def score_script(script: Script) -> QualityReport:
    return QualityScorer().score_script(script)


def render_quality_table(reports: Sequence[QualityReport]) -> str:
    """Mean ± std of composite scores per speaker and overall, one row per script"""
    if not reports:
        raise QualityError("No quality reports to render")

    header = ["Script", "Interviewer Turns", "Stakeholder Turns", "All Turns", "Script Coherence"]
    rows = [
        [report.script_id]
        + [report.aggregates[group].cell() for group in AGGREGATE_GROUPS]
        + [f"{report.script_coherence:.2f}"]
        for report in reports
    ]
    widths = [max(len(line[i]) for line in [header] + rows) for i in range(len(header))]

    def format_line(cells: List[str]) -> str:
        return "  ".join(cell.ljust(width) for cell, width in zip(cells, widths)).rstrip()

    lines = [format_line(header), "-" * len(format_line(header))]
    lines.extend(format_line(row) for row in rows)
    lines.append(
        f"Composite quality, mean ± population std over turns (scorer: {reports[0].scorer})"
    )
    return "\n".join(lines) + "\n"
