"""
Interview Script Toolkit Main Entry Point
"""
import asyncio
import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

from core.config_manager import ConfigManager
from core.exceptions import ToolkitError
from core.toolkit import BACKEND_CHOICES, InterviewToolkit
from evaluation.script_analytics import DEFAULT_TOP_K
from utils.logger import setup_logger


def _add_backend_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scenario", help="Scenario description, e.g. 'meeting scheduler system'")
    parser.add_argument("--preset", help="Scenario preset id from data/scenarios.yaml (S1-S4)")
    parser.add_argument("--backend", choices=BACKEND_CHOICES, default="http",
                        help="Chat-completion backend (default: http)")
    parser.add_argument("--fixtures", help="Fixture directory for --backend replay")
    parser.add_argument("--record", help="Record every exchange as a replay fixture in this directory")
    parser.add_argument("--model", help="Override backend.model")
    parser.add_argument("--endpoint", help="Override backend.endpoint")
    parser.add_argument("--temperature", type=float, help="Override generation.temperature")
    parser.add_argument("--max-tokens", type=int, help="Override generation.max_tokens")
    parser.add_argument("--carry-over", type=int, help="Override generation.carry_over_turns")
    parser.add_argument("--knowledge-dir", help="Override paths.knowledge_dir")
    parser.add_argument("--inject-mistake", action="append", metavar="TAG",
                        help="Ask for one instance of an interviewer mistake (repeatable)")


def _add_script_inputs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("scripts", nargs="+", help="Script files (.txt plain, .json structured)")
    parser.add_argument("--normalize", action="store_true",
                        help="Normalize third-party transcripts before parsing")
    parser.add_argument("--alias", action="append", metavar="LABEL=ROLE",
                        help="Map a speaker label to Interviewer or Stakeholder (repeatable)")
    parser.add_argument("--json", metavar="PATH", help="Also write the JSON report here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="interview-scripts",
        description="Generate and evaluate requirements elicitation interview scripts",
    )
    parser.add_argument("--config", help="Configuration file path (default: config/toolkit.yaml)")
    parser.add_argument("--output-dir", help="Override paths.output_dir")
    parser.add_argument("--debug", action="store_true", help="Enable debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    generate = commands.add_parser("generate", help="Generate a script through the prompt chain")
    _add_backend_flags(generate)
    generate.add_argument("--script-id", help="Script id (default: preset id or scenario slug)")
    generate.add_argument("--force", action="store_true", help="Overwrite existing outputs")

    outline = commands.add_parser("outline", help="Generate and print only the interview outline")
    _add_backend_flags(outline)

    analyze = commands.add_parser("analyze", help="Dialogue statistics and TF-IDF key terms")
    _add_script_inputs(analyze)
    analyze.add_argument("--k", type=int, default=DEFAULT_TOP_K, help="Top terms per script")

    score = commands.add_parser("score", help="Reference-free quality scores per turn")
    _add_script_inputs(score)
    score.add_argument("--scorer", help="Grammaticality scorer (default: quality.scorer)")

    lint = commands.add_parser("lint", help="Advisory checks for interviewer mistakes")
    _add_script_inputs(lint)

    rubric = commands.add_parser("rubric", help="Expert evaluation records")
    rubric.add_argument("--records-dir", help="Evaluation records directory (default: <output>/evaluations)")
    rubric_commands = rubric.add_subparsers(dest="rubric_command", required=True)
    init = rubric_commands.add_parser("init", help="Write blank evaluation templates")
    init.add_argument("scripts", nargs="+")
    init.add_argument("--evaluator", required=True, help="Evaluator id")
    init.add_argument("--force", action="store_true", help="Overwrite existing templates")
    check = rubric_commands.add_parser("check", help="Validate filled evaluation records")
    check.add_argument("records", nargs="*")
    report = rubric_commands.add_parser("report", help="Aggregate evaluation records")
    report.add_argument("records", nargs="*")
    report.add_argument("--json", metavar="PATH", help="Also write the JSON summary here")

    fetch = commands.add_parser("fetch", help="Download a published archive")
    fetch.add_argument("url")
    fetch.add_argument("dest", nargs="?", help="Target file or directory (default: paths.knowledge_dir)")
    fetch.add_argument("--sha256", help="Expected SHA-256; the file is discarded on mismatch")
    fetch.add_argument("--extract", action="store_true", help="Unpack a zip archive after download")

    return parser


def config_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Command-line flags as ``section.key`` overrides; unset flags are None"""
    return {
        "backend.model": getattr(args, "model", None),
        "backend.endpoint": getattr(args, "endpoint", None),
        "generation.temperature": getattr(args, "temperature", None),
        "generation.max_tokens": getattr(args, "max_tokens", None),
        "generation.carry_over_turns": getattr(args, "carry_over", None),
        "paths.knowledge_dir": getattr(args, "knowledge_dir", None),
        "paths.output_dir": getattr(args, "output_dir", None),
    }


async def run_command(args: argparse.Namespace) -> int:
    logger = logging.getLogger("interview_scripts")
    try:
        config = ConfigManager(args.config).load_config(config_overrides(args))
        setup_logger(debug=args.debug, log_dir=config.paths.log_dir or None)
        return int(await InterviewToolkit(config).run(args))
    except ToolkitError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return int(e.exit_status)


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the interview script toolkit"""
    args = build_parser().parse_args(argv)
    setup_logger(debug=args.debug, log_dir=None)
    return asyncio.run(run_command(args))


if __name__ == "__main__":
    sys.exit(main())
