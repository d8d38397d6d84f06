"""
Interview Script Generator

Outline-based prompt chain: one prompt plans the interview sections, one prompt
per section writes its turns (continuing from the tail of the previous
section), and the sections are concatenated into a single script. Every
backend exchange is appended to a JSON-lines chain log as it happens, so a
failed chain leaves its partial log behind.
"""
import json
import logging
import re
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, TypeVar, Union

from core.base_action import BaseAction
from core.config_manager import GenerationSettings
from core.exceptions import BackendError, ConfigurationError, ToolkitError
from core.transcript import (
    Script, ScriptFormat, TranscriptError, Turn, normalize_transcript, parse_script,
)
from management.rubric_manager import MistakeTag
from tools.chat_client import ChatBackend, CompletionRequest, CompletionResponse, FinishReason
from utils.schemas import validate_document

from .knowledge_base import KnowledgeBase, KnowledgeKind
from .outline import ChainError, Outline, OutlineSection, parse_outline
from .prompt_library import PromptLibrary


T = TypeVar("T")


class SectionParseFailed(ChainError):
    pass


class EmptySection(ChainError):
    pass


class SectionCountMismatch(ChainError):
    pass


def slugify(text: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", text.lower()).strip("-")
    return slug or "interview"


@dataclass(frozen=True)
class GenerationConfig:
    """Everything one chain run needs besides knowledge and backend"""
    scenario: str
    temperature: float = 0.7
    max_tokens: int = 1500
    carry_over_turns: int = 6
    context_budget: int = 3000
    retrieval_k: int = 6
    repair_retries: int = 2
    default_section_turns: int = 6
    min_sections: int = 3
    max_sections: int = 12
    prompt_version: str = "v1"
    sample_script_in_context: bool = True
    injected_mistakes: Tuple[MistakeTag, ...] = ()
    script_id: str = ""
    title: str = ""
    domain_label: str = ""

    def __post_init__(self):
        scenario = (self.scenario or "").strip()
        if not scenario:
            raise ConfigurationError("A scenario description is required")
        if self.carry_over_turns < 0:
            raise ConfigurationError("carry_over_turns must be non-negative")
        if self.max_tokens <= 0:
            raise ConfigurationError("max_tokens must be positive")
        object.__setattr__(self, "scenario", scenario)
        object.__setattr__(self, "injected_mistakes", tuple(self.injected_mistakes))
        if not self.script_id:
            object.__setattr__(self, "script_id", slugify(scenario))
        if not self.title:
            object.__setattr__(self, "title", f"Requirements elicitation interview: {scenario}")
        if not self.domain_label:
            object.__setattr__(self, "domain_label", scenario)

    @classmethod
    def from_settings(cls, settings: GenerationSettings, scenario: str, **overrides) -> "GenerationConfig":
        shared = {f.name for f in fields(cls)} & {f.name for f in fields(settings)}
        values: Dict[str, Any] = {name: getattr(settings, name) for name in shared}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(scenario=scenario, **values)


@dataclass
class ChainState:
    """Outline plus the sections written so far"""
    outline: Outline
    carry_over_turns: int = 6
    completed_sections: List[List[Turn]] = field(default_factory=list)

    @property
    def transcript_tail(self) -> List[Turn]:
        """Last ``carry_over_turns`` turns across all completed sections"""
        if self.carry_over_turns <= 0:
            return []
        flat = [turn for section in self.completed_sections for turn in section]
        return flat[-self.carry_over_turns:]

    @property
    def next_section(self) -> Optional[OutlineSection]:
        done = len(self.completed_sections)
        return self.outline.sections[done] if done < len(self.outline) else None

    def complete(self, turns: Sequence[Turn]) -> None:
        if self.next_section is None:
            raise SectionCountMismatch("Every outline section is already complete")
        self.completed_sections.append(list(turns))


class ChainLog:
    """Per-chain record of backend exchanges, mirrored line by line to ``path``"""

    def __init__(self, path: Optional[Union[str, Path]] = None):
        self.records: List[Dict[str, Any]] = []
        self.path = Path(path) if path else None
        if self.path:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text("", encoding="utf-8")

    def __len__(self) -> int:
        return len(self.records)

    def append(self, step: str, request: Dict[str, Any], response: Dict[str, Any],
               timestamp: str) -> Dict[str, Any]:
        record = {
            "ordinal": len(self.records),
            "step": step,
            "request": request,
            "response": response,
            "timestamp": timestamp,
        }
        validate_document("chain_log_record", record)
        self.records.append(record)
        if self.path:
            with open(self.path, "a", encoding="utf-8") as f:
                f.write(json.dumps(record, ensure_ascii=False) + "\n")
        return record

    def to_jsonl(self) -> str:
        return "".join(json.dumps(record, ensure_ascii=False) + "\n" for record in self.records)


def parse_section_reply(text: str) -> List[Turn]:
    """Tagged dialogue lines of a section reply, after label normalization"""
    if not text or not text.strip():
        raise EmptySection("The section reply is empty")
    try:
        script = parse_script(normalize_transcript(text), ScriptFormat.PLAIN)
    except TranscriptError as e:
        raise SectionParseFailed(f"The section reply is not a tagged dialogue: {e}")
    return list(script.turns)


def concatenate(outline: Outline, sections: Sequence[Sequence[Turn]], script_id: str = "",
                title: str = "", domain_label: str = "") -> Script:
    """Join section turns in outline order and renumber them from 0"""
    if len(sections) != len(outline):
        raise SectionCountMismatch(
            f"{len(sections)} section(s) generated for a {len(outline)}-section outline"
        )
    utterances = []
    for section, turns in zip(outline.sections, sections):
        if not turns:
            raise EmptySection(f"Section {section.ordinal + 1} ({section.title}) has no turns")
        utterances.extend((turn.speaker, turn.text) for turn in turns)
    return Script.from_utterances(script_id, utterances, title=title, domain_label=domain_label)


class InterviewChain:
    """
    One prompt chain run

    Holds the shared resources of a run (config, knowledge, backend, prompts
    and chain log). Sections are generated strictly in order.
    """

    def __init__(self, config: GenerationConfig, knowledge: KnowledgeBase, backend: ChatBackend,
                 library: Optional[PromptLibrary] = None, log: Optional[ChainLog] = None):
        self.config = config
        self.knowledge = knowledge
        self.backend = backend
        self.library = library or PromptLibrary(config.prompt_version)
        self.log = log if log is not None else ChainLog()
        self.logger = logging.getLogger(self.__class__.__name__)

    def context_kinds(self, *kinds: KnowledgeKind) -> List[KnowledgeKind]:
        selected = list(kinds)
        if self.config.sample_script_in_context:
            selected.append(KnowledgeKind.SAMPLE_SCRIPT)
        return selected

    def system_context(self, query: str, kinds: Sequence[KnowledgeKind]) -> str:
        bundle = self.knowledge.build_context(
            self.library.system_instructions(), query, kinds,
            k=self.config.retrieval_k, budget=self.config.context_budget,
        )
        return bundle.render()

    async def exchange(self, step: str, system: str, prompt: str) -> CompletionResponse:
        """One logged backend call"""
        request = CompletionRequest(
            system=system,
            prompt=prompt,
            temperature=self.config.temperature,
            max_tokens=self.config.max_tokens,
        )
        body = request.to_wire(self.backend.model)
        try:
            response = await self.backend.complete(request)
        except BackendError as e:
            self.log.append(
                step, body,
                {"text": "", "finish_reason": FinishReason.BACKEND_ERROR.value, "error": str(e)},
                self.backend.timestamp(),
            )
            raise
        self.log.append(step, body, response.to_dict(), self.backend.timestamp())
        if response.finish_reason is FinishReason.LENGTH_CAPPED:
            self.logger.warning(f"{step}: reply hit the max_tokens limit of {self.config.max_tokens}")
        return response

    async def complete_and_parse(self, kind: str, step: str, system: str, prompt: str,
                                 parse: Callable[[str], T]) -> T:
        """Call the backend and parse the reply, sending repair prompts on parse failure"""
        current_prompt = prompt
        retries = self.config.repair_retries
        for attempt in range(retries + 1):
            label = step if attempt == 0 else f"{step}/repair-{attempt}"
            response = await self.exchange(label, system, current_prompt)
            try:
                return parse(response.text)
            except ChainError as e:
                if attempt == retries:
                    raise
                self.logger.warning(f"{label}: unusable reply ({e}); sending repair prompt")
                current_prompt = self.library.repair_prompt(kind, str(e), prompt, response.text)
        raise AssertionError("unreachable")

    async def generate_outline(self) -> Outline:
        return await OutlineAction(self).run()

    async def generate_section(self, state: ChainState, section: OutlineSection) -> List[Turn]:
        if state.next_section != section:
            raise ChainError(
                f"Section {section.ordinal + 1} requested but section "
                f"{len(state.completed_sections) + 1} is next"
            )
        return await SectionAction(self, state, section).run()

    async def run(self) -> Tuple[Script, ChainLog]:
        config = self.config
        self.logger.info(f"Starting chain for scenario {config.scenario!r}")
        try:
            outline = await self.generate_outline()
            state = ChainState(outline=outline, carry_over_turns=config.carry_over_turns)
            for section in outline.sections:
                state.complete(await self.generate_section(state, section))
            script = concatenate(
                outline, state.completed_sections,
                script_id=config.script_id, title=config.title, domain_label=config.domain_label,
            )
        except ToolkitError as e:
            e.chain_log = self.log
            self.logger.error(f"Chain aborted after {len(self.log)} exchange(s): {e}")
            raise

        self.logger.info(
            f"Chain finished: {len(outline)} sections, {len(script.turns)} turns, "
            f"{len(self.log)} backend calls"
        )
        return script, self.log


class OutlineAction(BaseAction[Outline]):
    """Primary prompt: plan the interview sections"""

    kind = "outline"

    def __init__(self, chain: InterviewChain):
        super().__init__(chain, step="outline")
        self.chain = chain
        self.config = chain.config

    def system_prompt(self) -> str:
        kinds = self.chain.context_kinds(KnowledgeKind.GUIDELINES)
        return self.chain.system_context(self.config.scenario, kinds)

    def user_prompt(self) -> str:
        return self.chain.library.outline_prompt(
            self.config.scenario, self.config.min_sections, self.config.max_sections
        )

    def parse(self, text: str) -> Outline:
        return parse_outline(
            text,
            scenario=self.config.scenario,
            default_turns=self.config.default_section_turns,
            min_sections=self.config.min_sections,
            max_sections=self.config.max_sections,
        )

    def describe(self, result: Outline) -> str:
        return f"{len(result)} sections"


class SectionAction(BaseAction[List[Turn]]):
    """Per-section prompt: write the turns of one outline section"""

    kind = "section"

    def __init__(self, chain: InterviewChain, state: ChainState, section: OutlineSection):
        super().__init__(chain, step=f"section-{section.ordinal + 1}")
        self.chain = chain
        self.config = chain.config
        self.state = state
        self.section = section

    def system_prompt(self) -> str:
        query = f"{self.config.scenario} {self.section.title} {self.section.goal}"
        kinds = self.chain.context_kinds(KnowledgeKind.GUIDELINES, KnowledgeKind.PITFALLS)
        return self.chain.system_context(query, kinds)

    def user_prompt(self) -> str:
        return self.chain.library.section_prompt(
            self.config.scenario, self.state.outline, self.section,
            self.state.transcript_tail, self.config.injected_mistakes,
        )

    def parse(self, text: str) -> List[Turn]:
        return parse_section_reply(text)

    def describe(self, result: List[Turn]) -> str:
        return f"{self.section.title}, {len(result)} turns"


async def generate_outline(config: GenerationConfig, knowledge: KnowledgeBase,
                           backend: ChatBackend, library: Optional[PromptLibrary] = None,
                           log: Optional[ChainLog] = None) -> Outline:
    return await InterviewChain(config, knowledge, backend, library, log).generate_outline()


async def generate_section(state: ChainState, section: OutlineSection, config: GenerationConfig,
                           knowledge: KnowledgeBase, backend: ChatBackend,
                           library: Optional[PromptLibrary] = None,
                           log: Optional[ChainLog] = None) -> List[Turn]:
    chain = InterviewChain(config, knowledge, backend, library, log)
    return await chain.generate_section(state, section)


async def run_chain(config: GenerationConfig, knowledge: KnowledgeBase, backend: ChatBackend,
                    library: Optional[PromptLibrary] = None,
                    log_path: Optional[Union[str, Path]] = None) -> Tuple[Script, ChainLog]:
    """Outline, then every section in order, then concatenation"""
    chain = InterviewChain(config, knowledge, backend, library, ChainLog(log_path))
    return await chain.run()
