"""
Script Analytics - dialogue characteristics per interview script

Turn-length distribution (min, max, quartiles), question/non-question act
counts per speaker, and top TF-IDF terms, rendered as a fixed-width table or
exported as JSON.
"""
import logging
import math
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence

from core.exceptions import ToolkitError
from core.transcript import DialogueAct, Script, Speaker, classify_turn, tokenize_words


logger = logging.getLogger(__name__)

SHORT_TURN_THRESHOLD = 6
DEFAULT_TOP_K = 10
STOPWORDS_PATH = Path(__file__).resolve().parent.parent / "data" / "stopwords_en.txt"

_QUARTILES = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))
_NUMBER_RE = re.compile(r"^\d+([.,]\d+)*$")


class AnalyticsError(ToolkitError):
    """Statistics computation error"""


class EmptyInput(AnalyticsError):
    """Statistics requested over an empty collection"""


class UnknownScript(AnalyticsError):
    """Target script id not present in the corpus"""


def round_half_up(value: Fraction) -> int:
    """Nearest integer, halves rounded up (2.5 -> 3)"""
    return math.floor(value + Fraction(1, 2))


@dataclass(frozen=True)
class TurnLengthStats:
    """Turn length distribution in words; quartiles are exact rationals"""
    min: int
    max: int
    q1: Fraction
    median: Fraction
    q3: Fraction

    def to_dict(self) -> Dict[str, float]:
        return {
            "min": self.min,
            "max": self.max,
            "q1": float(self.q1),
            "median": float(self.median),
            "q3": float(self.q3),
        }


@dataclass(frozen=True)
class ActCounts:
    nq: int = 0
    q: int = 0

    @property
    def total(self) -> int:
        return self.nq + self.q

    def to_dict(self) -> Dict[str, int]:
        return {"nq": self.nq, "q": self.q}


@dataclass(frozen=True)
class SpeakerStats:
    """Per-speaker statistics; ``lengths`` and ``mean_length`` are None when the speaker never talks"""
    speaker: Speaker
    turn_count: int
    lengths: Optional[TurnLengthStats]
    acts: ActCounts
    mean_length: Optional[Fraction]
    short_turns: int

    def to_dict(self) -> Dict[str, object]:
        return {
            "speaker": self.speaker.value,
            "turn_count": self.turn_count,
            "lengths": self.lengths.to_dict() if self.lengths else None,
            "acts": self.acts.to_dict(),
            "mean_length": float(self.mean_length) if self.mean_length is not None else None,
            "short_turns": self.short_turns,
        }


@dataclass(frozen=True)
class TermScore:
    term: str
    score: float

    def to_dict(self) -> Dict[str, object]:
        return {"term": self.term, "score": self.score}


@dataclass(frozen=True)
class ScriptReport:
    """
    Dialogue characteristics of one script.

    ``turn_count`` counts every turn; ``exchange_count`` counts adjacent
    Interviewer -> Stakeholder pairs, the other common reading of "exchange".
    """
    script_id: str
    turn_count: int
    exchange_count: int
    speakers: Dict[Speaker, SpeakerStats]
    top_terms: List[TermScore]

    def to_dict(self) -> Dict[str, object]:
        return {
            "script_id": self.script_id,
            "turn_count": self.turn_count,
            "exchange_count": self.exchange_count,
            "speakers": {
                speaker.value: self.speakers[speaker].to_dict() for speaker in Speaker
            },
            "top_terms": [term.to_dict() for term in self.top_terms],
        }


# Turn length statistics

def _quantile(ordered: Sequence[int], p: Fraction) -> Fraction:
    """Linear interpolation at h = (n - 1) * p over an ascending list"""
    h = (len(ordered) - 1) * p
    lower = math.floor(h)
    upper = math.ceil(h)
    return Fraction(ordered[lower]) + (h - lower) * (ordered[upper] - ordered[lower])


def turn_length_stats(lengths: Sequence[int]) -> TurnLengthStats:
    """Min, max and linearly interpolated quartiles of word counts"""
    if not lengths:
        raise EmptyInput("Turn length statistics need at least one turn")
    if any(value < 0 for value in lengths):
        raise AnalyticsError("Turn lengths must be non-negative")

    ordered = sorted(lengths)
    q1, median, q3 = (_quantile(ordered, p) for p in _QUARTILES)
    return TurnLengthStats(min=ordered[0], max=ordered[-1], q1=q1, median=median, q3=q3)


def act_counts(script: Script, speaker: Speaker) -> ActCounts:
    acts = Counter(classify_turn(turn) for turn in script.turns_by(speaker))
    return ActCounts(nq=acts[DialogueAct.NON_QUESTION], q=acts[DialogueAct.QUESTION])


def speaker_stats(script: Script, speaker: Speaker) -> SpeakerStats:
    lengths = [len(tokenize_words(turn.text)) for turn in script.turns_by(speaker)]
    return SpeakerStats(
        speaker=speaker,
        turn_count=len(lengths),
        lengths=turn_length_stats(lengths) if lengths else None,
        acts=act_counts(script, speaker),
        mean_length=Fraction(sum(lengths), len(lengths)) if lengths else None,
        short_turns=sum(1 for length in lengths if length < SHORT_TURN_THRESHOLD),
    )


def exchange_count(script: Script) -> int:
    """Adjacent Interviewer -> Stakeholder turn pairs"""
    return sum(
        1 for current, following in zip(script.turns, script.turns[1:])
        if current.speaker is Speaker.INTERVIEWER and following.speaker is Speaker.STAKEHOLDER
    )


# TF-IDF

@lru_cache(maxsize=None)
def load_stopwords(path: Optional[str] = None) -> FrozenSet[str]:
    """Bundled English stopword list (one lowercase word per line, '#' comments)"""
    source = Path(path) if path else STOPWORDS_PATH
    words = set()
    with open(source, "r", encoding="utf-8") as f:
        for line in f:
            word = line.strip().lower()
            if word and not word.startswith("#"):
                words.add(word)
    return frozenset(words)


def content_terms(text: str, stopwords: Optional[FrozenSet[str]] = None) -> List[str]:
    """Word tokens with stopwords and pure numbers removed"""
    stop = load_stopwords() if stopwords is None else stopwords
    return [
        token for token in tokenize_words(text)
        if token not in stop and not _NUMBER_RE.match(token)
    ]


class TfidfModel:
    """
    Relative term frequency times smoothed inverse document frequency.

    tf(t, d) = count(t, d) / |kept tokens of d|
    idf(t)   = ln((1 + N) / (1 + df(t))) + 1
    """

    def __init__(self, documents: Iterable[Sequence[str]]):
        self.documents = [list(tokens) for tokens in documents]
        self.document_frequency: Counter = Counter()
        for tokens in self.documents:
            self.document_frequency.update(set(tokens))

    @property
    def size(self) -> int:
        return len(self.documents)

    def idf(self, term: str) -> float:
        return math.log((1 + self.size) / (1 + self.document_frequency[term])) + 1

    def weights(self, tokens: Sequence[str]) -> Dict[str, float]:
        """TF-IDF weight of every term in a token list (empty list -> empty mapping)"""
        if not tokens:
            return {}
        counts = Counter(tokens)
        total = len(tokens)
        return {term: (count / total) * self.idf(term) for term, count in counts.items()}


def rank_terms(weights: Dict[str, float], k: int) -> List[TermScore]:
    """Top ``k`` terms by score, ties alphabetical"""
    ranked = sorted(weights.items(), key=lambda item: (-item[1], item[0]))
    return [TermScore(term=term, score=score) for term, score in ranked[:k]]


def _script_document(script: Script, stopwords: Optional[FrozenSet[str]]) -> List[str]:
    return [term for turn in script.turns for term in content_terms(turn.text, stopwords)]


def _index_of(corpus: Sequence[Script], target: str) -> int:
    ids = [script.id for script in corpus]
    duplicates = sorted({script_id for script_id in ids if ids.count(script_id) > 1})
    if duplicates:
        raise AnalyticsError(f"Duplicate script id(s) in corpus: {', '.join(duplicates)}")
    if target not in ids:
        raise UnknownScript(f"Script {target!r} is not in the corpus")
    return ids.index(target)


def tfidf_top_terms(corpus: Sequence[Script], target: str, k: int = DEFAULT_TOP_K,
                    stopwords: Optional[FrozenSet[str]] = None) -> List[TermScore]:
    """Top-k TF-IDF terms of ``target``, using exactly ``corpus`` as the document set"""
    if not corpus:
        raise EmptyInput("TF-IDF needs a corpus of at least one script")
    if k < 1:
        raise AnalyticsError(f"k must be at least 1, got {k}")
    position = _index_of(corpus, target)
    model = TfidfModel(_script_document(script, stopwords) for script in corpus)
    return rank_terms(model.weights(model.documents[position]), k)


def script_report(corpus: Sequence[Script], target: str, k: int = DEFAULT_TOP_K,
                  stopwords: Optional[FrozenSet[str]] = None) -> ScriptReport:
    """Assemble speaker statistics and top terms for one script of a corpus"""
    top_terms = tfidf_top_terms(corpus, target, k, stopwords)
    script = corpus[_index_of(corpus, target)]
    report = ScriptReport(
        script_id=script.id,
        turn_count=len(script.turns),
        exchange_count=exchange_count(script),
        speakers={speaker: speaker_stats(script, speaker) for speaker in Speaker},
        top_terms=top_terms,
    )
    logger.debug(
        f"Report for {script.id}: {report.turn_count} turns, {report.exchange_count} exchanges"
    )
    return report


# Rendering

_SPEAKER_COLUMNS = ("min-max", "Q1", "Mdn", "Q3", "NQ", "Q")


def _speaker_cells(stats: SpeakerStats) -> List[str]:
    if stats.lengths is None:
        return ["-", "-", "-", "-", str(stats.acts.nq), str(stats.acts.q)]
    lengths = stats.lengths
    return [
        f"{lengths.min}-{lengths.max}",
        str(round_half_up(lengths.q1)),
        str(round_half_up(lengths.median)),
        str(round_half_up(lengths.q3)),
        str(stats.acts.nq),
        str(stats.acts.q),
    ]


def render_report_table(reports: Sequence[ScriptReport]) -> str:
    """
    Fixed-width table, one row per report in input order.

    Quartiles are rounded half-up to whole words; the top-terms column is last
    and left unpadded.
    """
    if not reports:
        raise EmptyInput("No reports to render")

    header = ["Script"]
    for speaker in Speaker:
        header.extend(f"{speaker.value[0]}:{column}" for column in _SPEAKER_COLUMNS)
    rows = []
    for report in reports:
        row = [report.script_id]
        for speaker in Speaker:
            row.extend(_speaker_cells(report.speakers[speaker]))
        rows.append(row)

    widths = [max(len(line[i]) for line in [header] + rows) for i in range(len(header))]

    def format_line(cells: List[str], terms: str) -> str:
        padded = [cells[0].ljust(widths[0])]
        padded.extend(cell.rjust(width) for cell, width in zip(cells[1:], widths[1:]))
        return "  ".join(padded + [terms]).rstrip()

    lines = [format_line(header, "Top terms (TF-IDF)")]
    lines.append("-" * len(lines[0]))
    for report, row in zip(reports, rows):
        lines.append(format_line(row, ", ".join(term.term for term in report.top_terms)))
    lines.append("I = Interviewer, S = Stakeholder; lengths in words, quartiles by linear interpolation")
    return "\n".join(lines) + "\n"


def analyze_corpus(corpus: Sequence[Script], k: int = DEFAULT_TOP_K,
                   stopwords: Optional[FrozenSet[str]] = None) -> List[ScriptReport]:
    """One report per script, the whole list serving as the TF-IDF corpus"""
    if not corpus:
        raise EmptyInput("No scripts to analyze")
    return [script_report(corpus, script.id, k, stopwords) for script in corpus]
