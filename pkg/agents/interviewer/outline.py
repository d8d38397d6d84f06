"""
Interview outline model and parser

An outline reply is a numbered list, one section per line:

    1. Greeting - build rapport with the stakeholder (turns: 4)

Title and goal are separated by a spaced dash (hyphen, en or em dash) or a
colon; the ``(turns: T)`` annotation is optional. Lines that are not numbered
are ignored.
"""
import re
from dataclasses import dataclass
from typing import List, Tuple

from core.exceptions import ToolkitError


MIN_TARGET_TURNS = 2

_NUMBERED_RE = re.compile(r"^\s*(?:[#*>-]\s*)*(\d{1,2})[.)]\s+(.+?)\s*$")
_TURNS_RE = re.compile(r"\(\s*(?:target\s+)?turns?\s*[:=]?\s*(\d+)\s*\)\s*\.?$", re.IGNORECASE)
_SEPARATOR_RE = re.compile(r"\s+[-–—]\s+|:\s+")
_MARKUP_RE = re.compile(r"\*\*|__|`")


class ChainError(ToolkitError):
    """Prompt-chain failure; carries the exchanges logged before the failure"""

    def __init__(self, message: str, chain_log=None):
        super().__init__(message)
        self.chain_log = chain_log


class OutlineParseFailed(ChainError):
    pass


@dataclass(frozen=True)
class OutlineSection:
    ordinal: int
    title: str
    goal: str
    target_turns: int

    def __post_init__(self):
        if not self.title.strip():
            raise OutlineParseFailed(f"Section {self.ordinal} has no title")
        if self.target_turns < MIN_TARGET_TURNS:
            raise OutlineParseFailed(
                f"Section {self.title!r} targets {self.target_turns} turn(s); "
                f"at least {MIN_TARGET_TURNS} are required"
            )

    def to_dict(self):
        return {
            "ordinal": self.ordinal,
            "title": self.title,
            "goal": self.goal,
            "target_turns": self.target_turns,
        }


@dataclass(frozen=True)
class Outline:
    scenario: str
    sections: Tuple[OutlineSection, ...]

    def __post_init__(self):
        sections = tuple(self.sections)
        if not sections:
            raise OutlineParseFailed("Outline has no sections")
        for position, section in enumerate(sections):
            if section.ordinal != position:
                raise OutlineParseFailed(
                    f"Section ordinal {section.ordinal} at position {position}"
                )
        object.__setattr__(self, "sections", sections)

    def __len__(self) -> int:
        return len(self.sections)

    def to_dict(self):
        return {"scenario": self.scenario, "sections": [s.to_dict() for s in self.sections]}


def _parse_line(body: str, ordinal: int, default_turns: int) -> OutlineSection:
    body = _MARKUP_RE.sub("", body).strip()
    target_turns = default_turns
    turns_match = _TURNS_RE.search(body)
    if turns_match:
        target_turns = int(turns_match.group(1))
        body = body[:turns_match.start()].rstrip(" .")

    parts = _SEPARATOR_RE.split(body, maxsplit=1)
    title = parts[0].strip().rstrip(":")
    goal = parts[1].strip() if len(parts) > 1 else ""
    return OutlineSection(ordinal=ordinal, title=title, goal=goal or title,
                          target_turns=target_turns)


def parse_outline(text: str, scenario: str = "", default_turns: int = 6,
                  min_sections: int = 3, max_sections: int = 12) -> Outline:
    """Parse a numbered outline; the section count must lie within the bounds"""
    bodies: List[str] = []
    for line in (text or "").splitlines():
        match = _NUMBERED_RE.match(line)
        if match:
            bodies.append(match.group(2))

    if len(bodies) < min_sections:
        raise OutlineParseFailed(
            f"Outline has {len(bodies)} numbered section(s); at least {min_sections} are required"
        )
    if len(bodies) > max_sections:
        raise OutlineParseFailed(
            f"Outline has {len(bodies)} numbered sections; at most {max_sections} are allowed"
        )

    sections = tuple(
        _parse_line(body, ordinal, default_turns) for ordinal, body in enumerate(bodies)
    )
    return Outline(scenario=scenario, sections=sections)


def render_outline(outline: Outline, numbered_from: int = 1) -> str:
    """Render in the grammar ``parse_outline`` accepts"""
    return "\n".join(
        f"{section.ordinal + numbered_from}. {section.title} - {section.goal} "
        f"(turns: {section.target_turns})"
        for section in outline.sections
    )
