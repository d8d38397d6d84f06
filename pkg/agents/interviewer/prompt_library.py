"""
Prompt Library

Versioned prompt templates stored as text files under ``prompts/<version>/``
and filled with ``str.format``. ``directives.yaml`` holds the opening, closing
and intentional-mistake instructions appended to section prompts.
"""
import logging
from pathlib import Path
from typing import Dict, Optional, Sequence, Union

import yaml

from core.exceptions import ConfigurationError
from core.transcript import Turn
from management.rubric_manager import MistakeTag

from .outline import Outline, OutlineSection, render_outline


PROMPTS_DIR = Path(__file__).resolve().parent / "prompts"
TEMPLATE_NAMES = ("system", "outline", "section", "repair")


def render_turns(turns: Sequence[Turn]) -> str:
    return "\n".join(f"{turn.speaker.value}: {turn.text}" for turn in turns)


class PromptLibrary:
    """Loads one prompt version and renders its templates"""

    def __init__(self, version: str = "v1", directory: Optional[Union[str, Path]] = None):
        self.version = version
        self.path = Path(directory or PROMPTS_DIR) / version
        self.logger = logging.getLogger(self.__class__.__name__)
        if not self.path.is_dir():
            raise ConfigurationError(f"Prompt version {version!r} not found in {self.path.parent}")

        self.templates: Dict[str, str] = {}
        for name in TEMPLATE_NAMES:
            template_path = self.path / f"{name}.txt"
            if not template_path.is_file():
                raise ConfigurationError(f"Missing prompt template {template_path}")
            self.templates[name] = template_path.read_text(encoding="utf-8").strip()

        directives_path = self.path / "directives.yaml"
        try:
            with open(directives_path, "r", encoding="utf-8") as f:
                self.directives = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as e:
            raise ConfigurationError(f"Cannot load {directives_path}: {e}")
        for key in ("opening", "closing", "mistakes_intro", "mistakes", "format_hints"):
            if key not in self.directives:
                raise ConfigurationError(f"{directives_path} lacks {key!r}")

        self.logger.debug(f"Loaded prompt version {version} from {self.path}")

    def _render(self, name: str, **fields) -> str:
        try:
            return self.templates[name].format(**fields)
        except (KeyError, IndexError) as e:
            raise ConfigurationError(f"Template {self.version}/{name}.txt uses unknown field {e}")

    def system_instructions(self) -> str:
        return self.templates["system"]

    def outline_prompt(self, scenario: str, min_sections: int, max_sections: int) -> str:
        return self._render(
            "outline", scenario=scenario, min_sections=min_sections, max_sections=max_sections
        )

    def section_prompt(self, scenario: str, outline: Outline, section: OutlineSection,
                       tail: Sequence[Turn], mistakes: Sequence[MistakeTag] = ()) -> str:
        """Prompt for one section; first and last sections get opening/closing directives"""
        directives = []
        if section.ordinal == 0:
            directives.append(self.directives["opening"])
        if section.ordinal == len(outline) - 1:
            directives.append(self.directives["closing"])
        if mistakes:
            lines = [self.directives["mistakes_intro"]]
            lines.extend(f"- {self.directives['mistakes'][tag.value]}" for tag in mistakes)
            directives.append("\n".join(lines))

        return self._render(
            "section",
            scenario=scenario,
            number=section.ordinal + 1,
            total=len(outline),
            title=section.title,
            goal=section.goal,
            target_turns=section.target_turns,
            outline=render_outline(outline),
            tail=render_turns(tail) if tail else "(none yet, the interview starts with this section)",
            directives="\n" + "\n\n".join(directives) + "\n" if directives else "",
        )

    def repair_prompt(self, kind: str, problem: str, original_prompt: str, reply: str) -> str:
        return self._render(
            "repair",
            problem=problem,
            format_hint=self.directives["format_hints"][kind],
            original_prompt=original_prompt,
            reply=reply.strip() or "(empty)",
        )
