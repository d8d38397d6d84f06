"""
Rubric Manager

Expert-evaluation workflow for interview scripts: fill-in templates covering
three natural-language dimensions and six interview rubric elements, validation
of filled records (integer scores 1-5), and aggregation into per-script tables.
Records are stored one file per (script, evaluator).
"""
import json
import logging
from dataclasses import dataclass
from decimal import Decimal, ROUND_HALF_UP
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from core.exceptions import ToolkitError
from core.transcript import Script
from utils.schemas import validate_document


SCORE_MIN = 1
SCORE_MAX = 5
RECORD_SEPARATOR = "__"


class RubricError(ToolkitError):
    """Evaluation record error"""


class MissingScore(RubricError):
    pass


class OutOfRange(RubricError):
    pass


class DuplicateEntry(RubricError):
    pass


class EmptyInput(RubricError):
    pass


class NLDimension(Enum):
    """Natural-language quality dimensions"""
    NATURALNESS = "naturalness"
    COHERENCE = "coherence"
    COMPLETENESS = "completeness"

    @property
    def label(self) -> str:
        return {
            NLDimension.NATURALNESS: "Naturalness (natural flow)",
            NLDimension.COHERENCE: "Coherence",
            NLDimension.COMPLETENESS: "Completeness",
        }[self]

    @property
    def anchors(self) -> Tuple[str, str]:
        """Meaning of the lowest and highest score"""
        adjective = {
            NLDimension.NATURALNESS: "natural",
            NLDimension.COHERENCE: "coherent",
            NLDimension.COMPLETENESS: "complete",
        }[self]
        return f"not {adjective} at all", f"quite {adjective}"


class RubricElement(Enum):
    """Elements of the requirements elicitation interview rubric"""
    GREETING = "greeting"
    OPENING = "opening"
    ANALYZE_AS_IS = "analyze_as_is"
    DESIGN_TO_BE = "design_to_be"
    CLOSING = "closing"
    ACTIVE_LISTENING = "active_listening"

    @property
    def label(self) -> str:
        return {
            RubricElement.GREETING: "Greeting",
            RubricElement.OPENING: "Opening",
            RubricElement.ANALYZE_AS_IS: 'Analyze Current State "As Is"',
            RubricElement.DESIGN_TO_BE: 'Design "To Be" System',
            RubricElement.CLOSING: "Closing",
            RubricElement.ACTIVE_LISTENING: "Active Listening",
        }[self]


class MistakeTag(Enum):
    """Common interviewer mistakes"""
    INFLUENCING_STAKEHOLDER = "InfluencingStakeholder"
    UNNATURAL_DIALOGUE_STYLE = "UnnaturalDialogueStyle"
    IGNORING_OTHER_STAKEHOLDERS = "IgnoringOtherStakeholders"
    TECHNICAL_JARGON = "TechnicalJargon"
    LACK_OF_CLARITY = "LackOfClarity"

    @classmethod
    def parse(cls, name: str) -> "MistakeTag":
        for tag in cls:
            if name.strip().lower() in (tag.value.lower(), tag.name.lower()):
                return tag
        raise RubricError(
            f"Unknown mistake tag {name!r}; expected one of {', '.join(t.value for t in cls)}"
        )


_GROUPS: Tuple[Tuple[str, type], ...] = (("nl_scores", NLDimension), ("rubric_scores", RubricElement))


@dataclass(frozen=True)
class EvaluationRecord:
    script_id: str
    evaluator_id: str
    nl_scores: Dict[NLDimension, int]
    rubric_scores: Dict[RubricElement, int]
    notes: Dict[str, str]

    def score(self, key: Union[NLDimension, RubricElement]) -> int:
        if isinstance(key, NLDimension):
            return self.nl_scores[key]
        return self.rubric_scores[key]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "script_id": self.script_id,
            "evaluator_id": self.evaluator_id,
            "nl_scores": {
                d.value: {"score": self.nl_scores[d], "notes": self.notes.get(d.value, "")}
                for d in NLDimension
            },
            "rubric_scores": {
                e.value: {"score": self.rubric_scores[e], "notes": self.notes.get(e.value, "")}
                for e in RubricElement
            },
        }


def record_filename(script_id: str, evaluator_id: str) -> str:
    return f"{script_id}{RECORD_SEPARATOR}{evaluator_id}.json"


def new_evaluation_template(script: Script, evaluator_id: str = "") -> Dict[str, Any]:
    """Fill-in document with a blank score and note for every dimension and element"""
    return {
        "script_id": script.id,
        "evaluator_id": evaluator_id,
        "scale": {"min": SCORE_MIN, "max": SCORE_MAX},
        "nl_scores": {
            d.value: {
                "label": d.label,
                "anchors": {str(SCORE_MIN): d.anchors[0], str(SCORE_MAX): d.anchors[1]},
                "score": None,
                "notes": "",
            }
            for d in NLDimension
        },
        "rubric_scores": {
            e.value: {"label": e.label, "score": None, "notes": ""}
            for e in RubricElement
        },
    }


def _entry_score(entry: Any) -> Tuple[Any, str]:
    if isinstance(entry, Mapping):
        notes = entry.get("notes") or ""
        return entry.get("score"), notes if isinstance(notes, str) else str(notes)
    return entry, ""


def validate_evaluation(doc: Any) -> EvaluationRecord:
    """
    Check a filled template.

    Every dimension and element needs an integer score in [1, 5]; an entry may
    be ``{"score": n, "notes": "..."}`` or a bare integer.
    """
    if not isinstance(doc, Mapping):
        raise RubricError("Evaluation document must be a JSON object")

    scores: Dict[str, Dict[Any, int]] = {}
    notes: Dict[str, str] = {}
    missing: List[str] = []
    out_of_range: List[str] = []
    for group_name, enum_cls in _GROUPS:
        group = doc.get(group_name)
        if group is None:
            group = {}
        if not isinstance(group, Mapping):
            raise RubricError(f"{group_name} must be an object")
        unknown = sorted(set(group) - {member.value for member in enum_cls})
        if unknown:
            raise RubricError(f"Unknown {group_name} key(s): {', '.join(unknown)}")

        scores[group_name] = {}
        for member in enum_cls:
            score, note = _entry_score(group.get(member.value))
            if score is None:
                missing.append(member.value)
                continue
            if isinstance(score, bool) or not isinstance(score, int) \
                    or not SCORE_MIN <= score <= SCORE_MAX:
                out_of_range.append(f"{member.value}={score!r}")
                continue
            scores[group_name][member] = score
            if note:
                notes[member.value] = note

    if missing:
        raise MissingScore(f"Missing score(s): {', '.join(missing)}")
    if out_of_range:
        raise OutOfRange(
            f"Score(s) must be integers from {SCORE_MIN} to {SCORE_MAX}: {', '.join(out_of_range)}"
        )

    script_id = doc.get("script_id")
    evaluator_id = doc.get("evaluator_id")
    if not isinstance(script_id, str) or not script_id:
        raise RubricError("Evaluation has no script_id")
    if not isinstance(evaluator_id, str) or not evaluator_id:
        raise RubricError("Evaluation has no evaluator_id")

    record = EvaluationRecord(
        script_id=script_id,
        evaluator_id=evaluator_id,
        nl_scores=scores["nl_scores"],
        rubric_scores=scores["rubric_scores"],
        notes=notes,
    )
    validate_document("evaluation_record", record.to_dict())
    return record


def _reject_duplicate_keys(pairs: List[Tuple[str, Any]]) -> Dict[str, Any]:
    result: Dict[str, Any] = {}
    for key, value in pairs:
        if key in result:
            raise DuplicateEntry(f"Key {key!r} appears more than once")
        result[key] = value
    return result


def load_evaluation(path: Union[str, Path]) -> Dict[str, Any]:
    """Read an evaluation file, rejecting duplicated keys"""
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"), object_pairs_hook=_reject_duplicate_keys)
    except json.JSONDecodeError as e:
        raise RubricError(f"{path}:{e.lineno}: malformed JSON: {e.msg}")
    except DuplicateEntry as e:
        raise DuplicateEntry(f"{path}: {e}")
    except OSError as e:
        raise RubricError(f"Cannot read {path}: {e.strerror}")


def format_cell(mean: Fraction, evaluators: int) -> str:
    """Integer for a single evaluator, otherwise one decimal rounded half up"""
    if evaluators == 1 and mean.denominator == 1:
        return str(mean.numerator)
    value = Decimal(mean.numerator) / Decimal(mean.denominator)
    return str(value.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class RubricSummary:
    """Mean score per script (columns) for every dimension and element (rows)"""
    script_ids: List[str]
    evaluator_counts: Dict[str, int]
    means: Dict[Union[NLDimension, RubricElement], Dict[str, Fraction]]

    def cell(self, key: Union[NLDimension, RubricElement], script_id: str) -> str:
        return format_cell(self.means[key][script_id], self.evaluator_counts[script_id])

    def to_dict(self) -> Dict[str, Any]:
        def table(members: Iterable[Union[NLDimension, RubricElement]]) -> Dict[str, Any]:
            return {
                m.value: {
                    sid: {"mean": float(self.means[m][sid]), "display": self.cell(m, sid)}
                    for sid in self.script_ids
                }
                for m in members
            }

        return {
            "scripts": [
                {"script_id": sid, "evaluators": self.evaluator_counts[sid]} for sid in self.script_ids
            ],
            "nl_scores": table(NLDimension),
            "rubric_scores": table(RubricElement),
        }

    def render(self) -> str:
        """Two tables: natural-language dimensions with scale anchors, then rubric elements"""
        def block(title: str, rows: List[List[str]], header: List[str]) -> List[str]:
            widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]

            def fmt(cells: List[str]) -> str:
                return "  ".join(
                    c.ljust(w) if i == 0 else c.rjust(w)
                    for i, (c, w) in enumerate(zip(cells, widths))
                ).rstrip()

            return [title, fmt(header), "-" * len(fmt(header))] + [fmt(r) for r in rows]

        nl_header = ["Dimension", "1 ...", "... 5"] + self.script_ids
        nl_rows = [
            [d.label, d.anchors[0], d.anchors[1]] + [self.cell(d, sid) for sid in self.script_ids]
            for d in NLDimension
        ]
        rubric_header = ["Rubric element"] + self.script_ids
        rubric_rows = [
            [e.label] + [self.cell(e, sid) for sid in self.script_ids] for e in RubricElement
        ]
        lines = block("Natural language quality", nl_rows, nl_header)
        lines.append("")
        lines.extend(block("Requirements elicitation interview rubric", rubric_rows, rubric_header))
        counts = ", ".join(f"{sid}: {self.evaluator_counts[sid]}" for sid in self.script_ids)
        lines.append(f"Scores 1 (lowest) to 5 (highest); evaluators per script: {counts}")
        return "\n".join(lines) + "\n"


def aggregate(records: Sequence[EvaluationRecord]) -> RubricSummary:
    """Per-script mean of every score; scripts appear in first-seen order"""
    if not records:
        raise EmptyInput("No evaluation records to aggregate")

    seen = set()
    by_script: Dict[str, List[EvaluationRecord]] = {}
    for record in records:
        key = (record.script_id, record.evaluator_id)
        if key in seen:
            raise DuplicateEntry(
                f"Evaluator {record.evaluator_id!r} has more than one record for {record.script_id!r}"
            )
        seen.add(key)
        by_script.setdefault(record.script_id, []).append(record)

    members: List[Union[NLDimension, RubricElement]] = list(NLDimension) + list(RubricElement)
    means = {
        m: {
            sid: Fraction(sum(r.score(m) for r in group), len(group))
            for sid, group in by_script.items()
        }
        for m in members
    }
    return RubricSummary(
        script_ids=list(by_script),
        evaluator_counts={sid: len(group) for sid, group in by_script.items()},
        means=means,
    )


class RubricManager:
    """
    Evaluation record storage

    Features:
    - Template creation, one file per (script, evaluator)
    - Validation of filled records
    - Aggregation of a record set into summary tables
    """

    def __init__(self, records_dir: Union[str, Path]):
        self.records_dir = Path(records_dir)
        self.logger = logging.getLogger(self.__class__.__name__)

    def create_templates(self, scripts: Sequence[Script], evaluator_id: str,
                         force: bool = False) -> List[Path]:
        """Write one blank template per script; existing files are kept unless ``force``"""
        self.records_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for script in scripts:
            path = self.records_dir / record_filename(script.id, evaluator_id)
            if path.exists() and not force:
                self.logger.warning(f"Keeping existing evaluation file {path}")
                continue
            template = new_evaluation_template(script, evaluator_id)
            validate_document("evaluation_template", template)
            path.write_text(json.dumps(template, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
            written.append(path)
            self.logger.info(f"Wrote evaluation template {path}")
        return written

    def record_paths(self, paths: Optional[Sequence[Union[str, Path]]] = None) -> List[Path]:
        """Explicit paths, or every ``*.json`` in the records directory"""
        if paths:
            return [Path(p) for p in paths]
        return sorted(self.records_dir.glob("*.json"))

    def load_record(self, path: Union[str, Path]) -> EvaluationRecord:
        try:
            record = validate_evaluation(load_evaluation(path))
        except RubricError as e:
            if str(path) in str(e):
                raise
            raise type(e)(f"{path}: {e}") from e
        expected = record_filename(record.script_id, record.evaluator_id)
        if Path(path).name != expected:
            self.logger.warning(f"{path} holds the record for {expected}")
        return record

    def check(self, paths: Optional[Sequence[Union[str, Path]]] = None) -> Dict[Path, Optional[str]]:
        """Validate each file; maps path to None when valid, else the error message"""
        results: Dict[Path, Optional[str]] = {}
        for path in self.record_paths(paths):
            try:
                self.load_record(path)
                results[path] = None
            except RubricError as e:
                results[path] = str(e)
        return results

    def report(self, paths: Optional[Sequence[Union[str, Path]]] = None) -> RubricSummary:
        records = [self.load_record(path) for path in self.record_paths(paths)]
        summary = aggregate(records)
        self.logger.info(
            f"Aggregated {len(records)} record(s) across {len(summary.script_ids)} script(s)"
        )
        return summary
