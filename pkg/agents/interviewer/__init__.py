"""
Interviewer agent - knowledge-grounded, outline-based interview script generation
"""
from .knowledge_base import ContextBundle, KnowledgeBase, KnowledgeKind
from .outline import ChainError, Outline, OutlineSection, parse_outline
from .prompt_library import PromptLibrary
from .script_generator import ChainLog, GenerationConfig, InterviewChain, run_chain

__all__ = [
    "ContextBundle",
    "KnowledgeBase",
    "KnowledgeKind",
    "ChainError",
    "Outline",
    "OutlineSection",
    "parse_outline",
    "PromptLibrary",
    "ChainLog",
    "GenerationConfig",
    "InterviewChain",
    "run_chain",
]
