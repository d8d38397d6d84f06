"""
Interview Transcript Model

Canonical data model for analyst/stakeholder interview scripts: speakers, turns,
dialogue acts, plain and structured serialization, word tokenization and
sentence splitting.
"""
import json
import logging
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

from .exceptions import ToolkitError


logger = logging.getLogger(__name__)


class TranscriptError(ToolkitError):
    """Transcript parsing or validation error"""

    def __init__(self, message: str, line: Optional[int] = None, source: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.source = source

    def __str__(self) -> str:
        location = ""
        if self.source:
            location = f"{self.source}:"
        if self.line is not None:
            location += f"{self.line}:"
        return f"{location} {self.message}" if location else self.message


class NoTurnsFound(TranscriptError):
    """No speaker tag present in the input"""


class UnknownSpeaker(TranscriptError):
    """A speaker tag other than Interviewer or Stakeholder"""


class EmptyUtterance(TranscriptError):
    """A speaker tag without any text before the next tag"""


class InvalidScript(TranscriptError):
    """Script-level invariant violated (no turns, bad indices, malformed document)"""


class Speaker(Enum):
    """The two roles of a one-to-one elicitation interview"""
    INTERVIEWER = "Interviewer"
    STAKEHOLDER = "Stakeholder"

    @classmethod
    def from_label(cls, label: str) -> "Speaker":
        normalized = label.strip().lower()
        for speaker in cls:
            if speaker.value.lower() == normalized:
                return speaker
        raise UnknownSpeaker(f"Unknown speaker tag: {label.strip()!r}")


class DialogueAct(Enum):
    """Per-turn dialogue act"""
    QUESTION = "Q"
    NON_QUESTION = "NQ"


class ScriptFormat(Enum):
    """On-disk transcript formats"""
    PLAIN = "plain"
    STRUCTURED = "structured"

    @classmethod
    def for_path(cls, path: Union[str, Path]) -> "ScriptFormat":
        return cls.STRUCTURED if Path(path).suffix.lower() == ".json" else cls.PLAIN


def single_line(value: str) -> str:
    """Fold every line boundary ``str.splitlines`` recognizes into one space"""
    return " ".join(part.strip() for part in (value or "").splitlines() if part.strip())


@dataclass(frozen=True)
class Turn:
    """One uninterrupted utterance by one speaker"""
    index: int
    speaker: Speaker
    text: str

    def __post_init__(self):
        # A turn is one logical line of the plain format
        text = single_line(self.text)
        if not text:
            raise EmptyUtterance(f"Turn {self.index} has no text")
        if self.index < 0:
            raise InvalidScript(f"Negative turn index: {self.index}")
        object.__setattr__(self, "text", text)

    def to_dict(self) -> Dict[str, str]:
        return {"speaker": self.speaker.value, "text": self.text}


@dataclass(frozen=True)
class Script:
    """An ordered, speaker-attributed interview transcript"""
    id: str
    title: str
    domain_label: str
    turns: Tuple[Turn, ...] = field(default_factory=tuple)

    def __post_init__(self):
        # Metadata travels as single "# key: value" header lines
        for name in ("id", "title", "domain_label"):
            object.__setattr__(self, name, single_line(getattr(self, name)))
        turns = tuple(self.turns)
        if not turns:
            raise InvalidScript(f"Script {self.id!r} has no turns")
        for position, turn in enumerate(turns):
            if turn.index != position:
                raise InvalidScript(
                    f"Turn index {turn.index} at position {position} in script {self.id!r}"
                )
        object.__setattr__(self, "turns", turns)

    @classmethod
    def from_utterances(cls, script_id: str, utterances: Iterable[Tuple[Speaker, str]],
                        title: str = "", domain_label: str = "") -> "Script":
        """Build a script from (speaker, text) pairs, assigning indices"""
        turns = tuple(
            Turn(index=i, speaker=speaker, text=text)
            for i, (speaker, text) in enumerate(utterances)
        )
        return cls(id=script_id, title=title, domain_label=domain_label, turns=turns)

    def turns_by(self, speaker: Speaker) -> List[Turn]:
        return [turn for turn in self.turns if turn.speaker == speaker]

    def with_id(self, script_id: str) -> "Script":
        return replace(self, id=script_id)

    def to_dict(self) -> Dict[str, object]:
        return {
            "id": self.id,
            "title": self.title,
            "domain_label": self.domain_label,
            "turns": [turn.to_dict() for turn in self.turns],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, object]) -> "Script":
        if not isinstance(data, Mapping):
            raise InvalidScript("Structured script must be a JSON object")
        raw_turns = data.get("turns")
        if not isinstance(raw_turns, list) or not raw_turns:
            raise NoTurnsFound("Structured script has no turns")
        utterances = []
        for position, entry in enumerate(raw_turns):
            if not isinstance(entry, Mapping):
                raise InvalidScript(f"Turn {position} is not an object")
            speaker_value = entry.get("speaker")
            try:
                speaker = Speaker(speaker_value)
            except ValueError:
                raise UnknownSpeaker(f"Unknown speaker {speaker_value!r} in turn {position}")
            text = entry.get("text")
            if not isinstance(text, str) or not text.strip():
                raise EmptyUtterance(f"Turn {position} has no text")
            utterances.append((speaker, text))
        return cls.from_utterances(
            script_id=str(data.get("id", "")),
            utterances=utterances,
            title=str(data.get("title", "")),
            domain_label=str(data.get("domain_label", "")),
        )


_TAG_RE = re.compile(r"^\s*([A-Za-z][A-Za-z0-9 _'.-]{0,39}?)\s*:(.*)$")
_HEADER_RE = re.compile(r"^#\s*(id|title|domain)\s*:\s*(.*)$", re.IGNORECASE)
_HEADER_FIELDS = {"id": "id", "title": "title", "domain": "domain_label"}


def _tag_label(line: str) -> Optional[Tuple[str, str]]:
    """Return (label, rest) when the line opens a new turn"""
    match = _TAG_RE.match(line)
    if not match:
        return None
    label = match.group(1).strip()
    rest = match.group(2)
    if label.lower() in {speaker.value.lower() for speaker in Speaker}:
        return label, rest.strip()
    # Unknown labels count as tags only when they look like a name (up to three
    # words, first one capitalized) and the colon ends a word, so "10:30" and
    # URLs stay inside the turn.
    if len(label.split()) > 3 or not label[0].isupper():
        return None
    if rest and not rest[0].isspace():
        return None
    return label, rest.strip()


def _parse_plain(raw: str) -> Script:
    metadata = {"id": "", "title": "", "domain_label": ""}
    utterances: List[Tuple[Speaker, str]] = []
    current: Optional[Tuple[Speaker, List[str], int]] = None

    def close(entry: Tuple[Speaker, List[str], int]) -> None:
        speaker, parts, tag_line = entry
        if not parts:
            raise EmptyUtterance(f"{speaker.value} tag has no text", line=tag_line)
        utterances.append((speaker, " ".join(parts)))

    for line_no, line in enumerate(raw.splitlines(), start=1):
        tagged = _tag_label(line)
        if tagged is not None:
            label, rest = tagged
            try:
                speaker = Speaker.from_label(label)
            except UnknownSpeaker as e:
                raise UnknownSpeaker(e.message, line=line_no)
            if current is not None:
                close(current)
            current = (speaker, [rest] if rest else [], line_no)
            continue

        stripped = line.strip()
        if current is None:
            header = _HEADER_RE.match(stripped)
            if header:
                metadata[_HEADER_FIELDS[header.group(1).lower()]] = header.group(2).strip()
            elif stripped:
                logger.debug(f"Ignoring preamble line {line_no}: {stripped[:40]}")
            continue
        if stripped:
            current[1].append(stripped)

    if current is None:
        raise NoTurnsFound("No 'Interviewer:' or 'Stakeholder:' tag found")
    close(current)

    return Script.from_utterances(
        script_id=metadata["id"],
        utterances=utterances,
        title=metadata["title"],
        domain_label=metadata["domain_label"],
    )


def _parse_structured(raw: str) -> Script:
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as e:
        raise InvalidScript(f"Malformed JSON: {e.msg}", line=e.lineno)
    return Script.from_dict(data)


def parse_script(raw: str, format: Union[ScriptFormat, str] = ScriptFormat.PLAIN) -> Script:
    """
    Parse a transcript.

    Plain format: each turn starts at a line tagged ``Interviewer:`` or
    ``Stakeholder:`` (case-insensitive); following untagged lines continue the
    turn and are joined with single spaces. Any other capitalized label ending
    in a colon ("Moderator:") raises UnknownSpeaker; a lowercase one
    ("moderator:") is ordinary text. Optional ``# id:``, ``# title:`` and
    ``# domain:`` lines before the first tag carry script metadata.

    Structured format: one JSON document ``{id, title, domain_label, turns}``.
    """
    if not raw or not raw.strip():
        raise NoTurnsFound("Empty transcript")
    fmt = ScriptFormat(format)
    if fmt is ScriptFormat.STRUCTURED:
        return _parse_structured(raw)
    return _parse_plain(raw)


def serialize_script(script: Script, format: Union[ScriptFormat, str] = ScriptFormat.PLAIN) -> str:
    """Serialize a script; the output re-parses to an equal script"""
    fmt = ScriptFormat(format)
    if fmt is ScriptFormat.STRUCTURED:
        return json.dumps(script.to_dict(), indent=2, ensure_ascii=False) + "\n"

    lines = []
    for key, value in (("id", script.id), ("title", script.title),
                       ("domain", script.domain_label)):
        if value:
            lines.append(f"# {key}: {value}")
    if lines:
        lines.append("")
    lines.extend(f"{turn.speaker.value}: {turn.text}" for turn in script.turns)
    return "\n".join(lines) + "\n"


def read_script(path: Union[str, Path], format: Optional[Union[ScriptFormat, str]] = None,
                normalize: bool = False,
                aliases: Optional[Mapping[str, str]] = None) -> Script:
    """Load a script file; the file stem becomes the id when none is recorded"""
    path = Path(path)
    fmt = ScriptFormat(format) if format else ScriptFormat.for_path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InvalidScript(f"Cannot read script: {e.strerror}", source=str(path))

    try:
        if normalize and fmt is ScriptFormat.PLAIN:
            raw = normalize_transcript(raw, aliases)
        script = parse_script(raw, fmt)
    except TranscriptError as e:
        raise type(e)(e.message, line=e.line, source=str(path)) from e

    if not script.id:
        script = script.with_id(path.stem)
    return script


def write_script(script: Script, path: Union[str, Path],
                 format: Optional[Union[ScriptFormat, str]] = None) -> Path:
    path = Path(path)
    fmt = ScriptFormat(format) if format else ScriptFormat.for_path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_script(script, fmt), encoding="utf-8")
    return path


# Normalization of third-party transcripts and model replies

DEFAULT_SPEAKER_ALIASES: Dict[str, Speaker] = {
    "interviewer": Speaker.INTERVIEWER,
    "analyst": Speaker.INTERVIEWER,
    "requirements analyst": Speaker.INTERVIEWER,
    "business analyst": Speaker.INTERVIEWER,
    "stakeholder": Speaker.STAKEHOLDER,
    "interviewee": Speaker.STAKEHOLDER,
    "client": Speaker.STAKEHOLDER,
    "respondent": Speaker.STAKEHOLDER,
}

_SECTION_HEADER_RES = (
    re.compile(r"^\s*#{1,6}\s"),
    re.compile(r"^\s*(section|part)\s+\d+\b", re.IGNORECASE),
    re.compile(r"^\s*[-=*_]{3,}\s*$"),
    re.compile(r"^\s*\[[^\]]*\]\s*$"),
)
_LABEL_LINE_RE = re.compile(
    r"^\s*(?:[-*>]\s+)?([A-Za-z][A-Za-z0-9 _'.-]*?)\s*(?:\([^)]*\))?\s*:(?:\s+(.*)|\s*)$"
)
_EMPHASIS_RE = re.compile(r"\*\*|__")


def normalize_transcript(raw: str, aliases: Optional[Mapping[str, str]] = None) -> str:
    """
    Normalize a third-party transcript into the plain format.

    Drops section headers and rules, removes bold markup, and rewrites speaker
    labels through the alias map. ``aliases`` maps a label (case-insensitive,
    e.g. ``"Analyst 2"``) to ``"Interviewer"`` or ``"Stakeholder"`` and takes
    precedence over the built-in aliases. Unmapped labels are left untouched so
    the parser still reports them.
    """
    alias_map: Dict[str, Speaker] = dict(DEFAULT_SPEAKER_ALIASES)
    for label, role in (aliases or {}).items():
        alias_map[label.strip().lower()] = Speaker.from_label(role)

    normalized = []
    for line in raw.splitlines():
        if any(pattern.match(line) for pattern in _SECTION_HEADER_RES):
            continue
        line = _EMPHASIS_RE.sub("", line)
        match = _LABEL_LINE_RE.match(line)
        if match:
            label = match.group(1).strip().lower()
            base = re.sub(r"\s*\d+$", "", label)
            speaker = alias_map.get(label) or alias_map.get(base)
            if speaker is not None:
                line = f"{speaker.value}: {(match.group(2) or '').strip()}".rstrip()
        normalized.append(line)
    return "\n".join(normalized) + "\n"


# Word and sentence segmentation

_EDGE_PUNCT_RE = re.compile(r"^[\W_]+|[\W_]+$")
_SENTENCE_BOUNDARY_RE = re.compile(r"(?<=[.!?])\s+")


def tokenize_words(text: str) -> List[str]:
    """
    Lowercased whitespace tokens with leading/trailing non-alphanumerics removed.

    Internal apostrophes and hyphens survive ("don't", "to-be").
    """
    tokens = []
    for piece in text.lower().split():
        token = _EDGE_PUNCT_RE.sub("", piece)
        if token:
            tokens.append(token)
    return tokens


def split_sentences(text: str) -> List[str]:
    """Split after '.', '!' or '?' followed by whitespace; abbreviations are not special-cased"""
    return [s.strip() for s in _SENTENCE_BOUNDARY_RE.split(text) if s.strip()]


def classify_turn(turn: Turn) -> DialogueAct:
    """Question iff the turn contains a question mark"""
    return DialogueAct.QUESTION if "?" in turn.text else DialogueAct.NON_QUESTION
