"""
Interview Toolkit - command orchestration for the CLI
"""
import json
import logging
from argparse import Namespace
from collections import Counter
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Set

import yaml

from agents.interviewer.knowledge_base import KnowledgeBase
from agents.interviewer.outline import render_outline
from agents.interviewer.prompt_library import PromptLibrary
from agents.interviewer.script_generator import GenerationConfig, InterviewChain, run_chain
from evaluation.quality_scorer import QualityScorer, render_quality_table
from evaluation.script_analytics import analyze_corpus, render_report_table
from management.rubric_manager import MistakeTag, RubricError, RubricManager
from management.script_linter import ScriptLinter, render_findings
from tools.chat_client import ChatBackend, HttpChatBackend
from tools.downloader import Downloader
from tools.mock_backends import MockChatBackend, RecordingBackend, ReplayBackend
from utils.schemas import validate_document

from .config_manager import AppConfig
from .exceptions import ConfigurationError, ExitStatus, ToolkitError
from .transcript import Script, ScriptFormat, read_script, write_script


SCENARIOS_PATH = Path(__file__).resolve().parent.parent / "data" / "scenarios.yaml"
BACKEND_CHOICES = ("http", "mock", "replay")

logger = logging.getLogger(__name__)


def load_presets(path: Path = SCENARIOS_PATH) -> Dict[str, Dict[str, str]]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigurationError(f"Cannot load scenario presets from {path}: {e}")


def parse_aliases(items: Optional[Sequence[str]]) -> Dict[str, str]:
    """``["Analyst 2=Interviewer", ...]`` to a label -> role mapping"""
    aliases: Dict[str, str] = {}
    for item in items or ():
        label, sep, role = item.partition("=")
        if not sep or not label.strip() or not role.strip():
            raise ToolkitError(f"Alias must look like LABEL=Interviewer or LABEL=Stakeholder: {item!r}")
        aliases[label.strip()] = role.strip()
    return aliases


def distinct_ids(scripts: Sequence[Script], paths: Sequence[Any]) -> List[Script]:
    """
    Give every script of a corpus its own id.

    Scripts sharing an id (the same stem in two directories, a .txt and .json
    pair, two runs of one preset) are renamed to ``id@path``.
    """
    counts = Counter(script.id for script in scripts)
    seen: Set[str] = set()
    result = []
    for script, path in zip(scripts, paths):
        base = f"{script.id}@{path}" if counts[script.id] > 1 else script.id
        candidate, suffix = base, 2
        while candidate in seen:
            candidate = f"{base}#{suffix}"
            suffix += 1
        seen.add(candidate)
        if candidate != script.id:
            logger.warning(f"Script id {script.id!r} is not unique; reporting {path} as {candidate!r}")
            script = script.with_id(candidate)
        result.append(script)
    return result


def write_json(schema: str, document: Any, path: Path) -> Path:
    """Validate ``document`` against its schema, then write it"""
    validate_document(schema, document)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


class InterviewToolkit:
    """
    Runs one CLI command against a resolved configuration

    Features:
    - Script generation through the outline-based prompt chain (http, mock or replay backend)
    - Dialogue statistics, quality scores and lints over script files
    - Rubric template, validation and aggregation workflow
    - Checksum-verified downloads of published archives
    """

    def __init__(self, config: AppConfig):
        self.config = config
        self.logger = logging.getLogger(self.__class__.__name__)

    async def run(self, args: Namespace) -> int:
        handler = getattr(self, f"cmd_{args.command}", None)
        if handler is None:
            raise ConfigurationError(f"Unknown command: {args.command}")
        return await handler(args)

    # Generation

    def generation_config(self, args: Namespace) -> GenerationConfig:
        scenario = getattr(args, "scenario", None)
        script_id = ""
        preset = getattr(args, "preset", None)
        if preset:
            presets = load_presets()
            if preset not in presets:
                raise ConfigurationError(
                    f"Unknown preset {preset!r}; available: {', '.join(sorted(presets))}"
                )
            scenario = scenario or presets[preset]["scenario"]
            script_id = presets[preset].get("script_id", "")
        if not scenario:
            raise ConfigurationError("Give --scenario or --preset")

        try:
            mistakes = tuple(MistakeTag.parse(name) for name in getattr(args, "inject_mistake", None) or ())
        except RubricError as e:
            raise ConfigurationError(str(e))

        return GenerationConfig.from_settings(
            self.config.generation,
            scenario,
            injected_mistakes=mistakes,
            script_id=getattr(args, "script_id", None) or script_id,
        )

    def create_backend(self, args: Namespace) -> ChatBackend:
        """Backend selected on the command line; only ``http`` ever touches the network"""
        choice = getattr(args, "backend", "http")
        if choice == "mock":
            backend: ChatBackend = MockChatBackend()
        elif choice == "replay":
            if not getattr(args, "fixtures", None):
                raise ConfigurationError("--backend replay needs --fixtures DIR")
            backend = ReplayBackend(args.fixtures, self.config.backend.model)
        elif choice == "http":
            backend = HttpChatBackend.from_config(self.config.backend)
        else:
            raise ConfigurationError(f"Unknown backend {choice!r}; choose from {', '.join(BACKEND_CHOICES)}")

        if getattr(args, "record", None):
            backend = RecordingBackend(backend, args.record)
        self.logger.info(f"Using {backend.name} backend (model {backend.model})")
        return backend

    def load_knowledge(self) -> KnowledgeBase:
        gen = self.config.generation
        return KnowledgeBase.from_directory(
            self.config.paths.knowledge_dir, chunk_tokens=gen.chunk_tokens, factor=gen.token_ratio
        )

    async def cmd_generate(self, args: Namespace) -> int:
        gen_config = self.generation_config(args)
        out_dir = Path(self.config.paths.output_dir)
        script_path = out_dir / f"{gen_config.script_id}.txt"
        json_path = out_dir / f"{gen_config.script_id}.json"
        log_path = out_dir / f"{gen_config.script_id}.chain.jsonl"

        existing = [p for p in (script_path, json_path, log_path) if p.exists()]
        if existing and not args.force:
            raise ToolkitError(
                f"Refusing to overwrite {', '.join(str(p) for p in existing)}; pass --force"
            )

        backend = self.create_backend(args)
        knowledge = self.load_knowledge()
        library = PromptLibrary(gen_config.prompt_version)
        async with backend:
            try:
                script, log = await run_chain(gen_config, knowledge, backend, library, log_path)
            except ToolkitError:
                self.logger.error(f"Partial chain log kept at {log_path}")
                raise

        validate_document("script", script.to_dict())
        write_script(script, script_path, ScriptFormat.PLAIN)
        write_script(script, json_path, ScriptFormat.STRUCTURED)
        self.logger.info(f"Wrote {script_path}, {json_path} and {log_path}")

        sections = sum(1 for record in log.records if record["step"].startswith("section-")
                       and "/repair-" not in record["step"])
        print(f"{script.id}: {sections} sections, {len(script.turns)} turns, "
              f"{len(log)} backend calls")
        print(f"  script:    {script_path}")
        print(f"  json:      {json_path}")
        print(f"  chain log: {log_path}")
        return ExitStatus.SUCCESS

    async def cmd_outline(self, args: Namespace) -> int:
        gen_config = self.generation_config(args)
        backend = self.create_backend(args)
        knowledge = self.load_knowledge()
        async with backend:
            outline = await InterviewChain(gen_config, knowledge, backend).generate_outline()
        print(render_outline(outline))
        return ExitStatus.SUCCESS

    # Evaluation

    def read_scripts(self, args: Namespace) -> List[Script]:
        aliases = parse_aliases(getattr(args, "alias", None))
        normalize = getattr(args, "normalize", False) or bool(aliases)
        return [read_script(path, normalize=normalize, aliases=aliases) for path in args.scripts]

    async def cmd_analyze(self, args: Namespace) -> int:
        scripts = self.read_scripts(args)
        scripts = distinct_ids(scripts, args.scripts)
        reports = analyze_corpus(scripts, k=args.k)
        print(render_report_table(reports), end="")
        if args.json:
            write_json("script_report", {"k": args.k, "reports": [r.to_dict() for r in reports]},
                       Path(args.json))
        return ExitStatus.SUCCESS

    async def cmd_score(self, args: Namespace) -> int:
        scorer = QualityScorer(args.scorer or self.config.quality.scorer, self.config.quality.weights)
        reports = [scorer.score_script(script) for script in self.read_scripts(args)]
        print(render_quality_table(reports), end="")
        if args.json:
            write_json("quality_report", {"reports": [r.to_dict() for r in reports]}, Path(args.json))
        return ExitStatus.SUCCESS

    async def cmd_lint(self, args: Namespace) -> int:
        linter = ScriptLinter()
        results = [(script.id, linter.lint(script)) for script in self.read_scripts(args)]
        for script_id, findings in results:
            print(render_findings(script_id, findings), end="")
        if args.json:
            document = {
                "scripts": [
                    {"script_id": sid, "findings": [f.to_dict() for f in findings]}
                    for sid, findings in results
                ]
            }
            write_json("lint_report", document, Path(args.json))
        return ExitStatus.SUCCESS

    # Rubric workflow

    def rubric_manager(self, args: Namespace) -> RubricManager:
        records_dir = getattr(args, "records_dir", None) or Path(self.config.paths.output_dir) / "evaluations"
        return RubricManager(records_dir)

    async def cmd_rubric(self, args: Namespace) -> int:
        manager = self.rubric_manager(args)

        if args.rubric_command == "init":
            scripts = [read_script(path) for path in args.scripts]
            written = manager.create_templates(scripts, args.evaluator, force=args.force)
            for path in written:
                print(f"wrote {path}")
            return ExitStatus.SUCCESS

        if args.rubric_command == "check":
            results = manager.check(args.records)
            if not results:
                raise ToolkitError(f"No evaluation records found in {manager.records_dir}")
            for path, error in results.items():
                print(f"{path}: {'ok' if error is None else error}")
            invalid = sum(1 for error in results.values() if error is not None)
            if invalid:
                self.logger.error(f"{invalid} of {len(results)} record(s) invalid")
                return ExitStatus.VALIDATION_ERROR
            return ExitStatus.SUCCESS

        summary = manager.report(args.records)
        print(summary.render(), end="")
        if args.json:
            write_json("rubric_summary", summary.to_dict(), Path(args.json))
        return ExitStatus.SUCCESS

    # Data

    async def cmd_fetch(self, args: Namespace) -> int:
        downloader = Downloader(timeout=self.config.backend.timeout)
        dest = args.dest or self.config.paths.knowledge_dir
        target = await downloader.fetch(args.url, dest, sha256=args.sha256)
        print(f"saved {target}")
        if args.extract:
            extract_dir = Path(dest) if Path(dest).is_dir() else target.parent
            for path in downloader.extract(target, extract_dir):
                print(f"extracted {path}")
        return ExitStatus.SUCCESS
