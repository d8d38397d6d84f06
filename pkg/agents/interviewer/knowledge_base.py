"""
Interviewer Knowledge Base

Loads the three knowledge sources (interviewing guidelines, common pitfalls and
a sample script), splits them into paragraph chunks, ranks chunks against a
query by TF-IDF cosine similarity and packs the best ones into a token-budgeted
context bundle that is injected with every prompt.
"""
import json
import logging
import math
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from core.exceptions import ToolkitError
from evaluation.script_analytics import TfidfModel, content_terms


MANIFEST_NAME = "manifest.json"
DEFAULT_TOKEN_FACTOR = Fraction(4, 3)
MIN_CHUNK_TOKENS = 32

_PARAGRAPH_BREAK_RE = re.compile(r"\n\s*\n")


class KnowledgeError(ToolkitError):
    """Knowledge loading or context assembly error"""


class MissingManifest(KnowledgeError):
    pass


class InvalidManifest(KnowledgeError):
    pass


class MissingFile(KnowledgeError):
    pass


class EmptyFile(KnowledgeError):
    pass


class BudgetTooSmall(KnowledgeError):
    """System instructions alone exceed the context budget"""


class KnowledgeKind(Enum):
    GUIDELINES = "guidelines"
    PITFALLS = "pitfalls"
    SAMPLE_SCRIPT = "sample_script"


@dataclass(frozen=True)
class KnowledgeDoc:
    id: str
    kind: KnowledgeKind
    text: str
    path: Optional[str] = None


@dataclass(frozen=True)
class Chunk:
    doc_id: str
    ordinal: int
    text: str
    token_estimate: int
    kind: Optional[KnowledgeKind] = None


@dataclass(frozen=True)
class ScoredChunk:
    chunk: Chunk
    score: float


@dataclass(frozen=True)
class ContextBundle:
    """Instructions plus the retrieved chunks that fit the budget, best first"""
    system_instructions: str
    chunks: Tuple[ScoredChunk, ...]
    budget: int
    used: int

    def render(self) -> str:
        """System message text sent with a prompt"""
        if not self.chunks:
            return self.system_instructions
        parts = [self.system_instructions, "", "Reference knowledge:"]
        for scored in self.chunks:
            chunk = scored.chunk
            label = chunk.kind.value if chunk.kind else "knowledge"
            parts.append(f"[{label}: {chunk.doc_id} #{chunk.ordinal}]")
            parts.append(chunk.text)
            parts.append("")
        return "\n".join(parts).rstrip() + "\n"


def estimate_tokens(text: str, factor: Fraction = DEFAULT_TOKEN_FACTOR) -> int:
    """ceil(whitespace word count x factor)"""
    return math.ceil(len(text.split()) * Fraction(factor))


def load_knowledge(directory: Union[str, Path]) -> List[KnowledgeDoc]:
    """
    Load the documents named by ``<directory>/manifest.json``.

    The manifest maps any of ``guidelines``, ``pitfalls`` and ``sample_script``
    to a path relative to the directory. Each document's id is its file stem.
    """
    logger = logging.getLogger(__name__)
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME
    if not manifest_path.is_file():
        raise MissingManifest(f"No {MANIFEST_NAME} in knowledge directory {directory}")

    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise InvalidManifest(f"{manifest_path}:{e.lineno}: {e.msg}")
    if not isinstance(manifest, dict) or not manifest:
        raise InvalidManifest(f"{manifest_path} must be a non-empty JSON object")

    kinds = {kind.value: kind for kind in KnowledgeKind}
    unknown = sorted(set(manifest) - set(kinds))
    if unknown:
        raise InvalidManifest(
            f"{manifest_path}: unknown knowledge kind(s) {', '.join(unknown)}; "
            f"expected {', '.join(kinds)}"
        )

    docs = []
    for kind in KnowledgeKind:
        if kind.value not in manifest:
            continue
        relative = manifest[kind.value]
        if not isinstance(relative, str) or not relative:
            raise InvalidManifest(f"{manifest_path}: {kind.value} must name a file")
        path = directory / relative
        if not path.is_file():
            raise MissingFile(f"Knowledge file for {kind.value} not found: {path}")
        try:
            text = path.read_text(encoding="utf-8")
        except UnicodeDecodeError as e:
            raise InvalidManifest(f"{path} is not UTF-8: {e.reason}")
        if not text.strip():
            raise EmptyFile(f"Knowledge file for {kind.value} is empty: {path}")
        docs.append(KnowledgeDoc(id=path.stem, kind=kind, text=text, path=str(path)))

    logger.info(f"Loaded {len(docs)} knowledge document(s) from {directory}")
    return docs


def chunk_doc(doc: KnowledgeDoc, target_tokens: int,
              factor: Fraction = DEFAULT_TOKEN_FACTOR) -> List[Chunk]:
    """
    Split on blank lines, then merge neighbouring paragraphs while the merged
    estimate stays within ``target_tokens``. An oversize paragraph stands alone.
    """
    if target_tokens < MIN_CHUNK_TOKENS:
        raise ValueError(f"target_tokens must be at least {MIN_CHUNK_TOKENS}, got {target_tokens}")

    paragraphs = [p.strip() for p in _PARAGRAPH_BREAK_RE.split(doc.text) if p.strip()]
    groups: List[List[str]] = []
    current: List[str] = []
    current_words = 0
    for paragraph in paragraphs:
        words = len(paragraph.split())
        if current and math.ceil((current_words + words) * Fraction(factor)) > target_tokens:
            groups.append(current)
            current, current_words = [], 0
        current.append(paragraph)
        current_words += words
    if current:
        groups.append(current)

    chunks = []
    for ordinal, group in enumerate(groups):
        text = "\n\n".join(group)
        chunks.append(Chunk(
            doc_id=doc.id,
            ordinal=ordinal,
            text=text,
            token_estimate=estimate_tokens(text, factor),
            kind=doc.kind,
        ))
    return chunks


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    norm = float(np.linalg.norm(a) * np.linalg.norm(b))
    if norm == 0.0:
        return 0.0
    return float(np.clip(np.dot(a, b) / norm, 0.0, 1.0))


def retrieve(query: str, chunks: Sequence[Chunk], k: int,
             stopwords: Optional[FrozenSet[str]] = None) -> List[ScoredChunk]:
    """
    Rank chunks by TF-IDF cosine similarity to the query, the chunk set serving
    as the corpus. Ties fall back to (doc_id, ordinal).
    """
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if not chunks:
        return []

    model = TfidfModel(content_terms(chunk.text, stopwords) for chunk in chunks)
    query_weights = model.weights(content_terms(query, stopwords))
    chunk_weights = [model.weights(tokens) for tokens in model.documents]

    vocabulary = sorted(set(query_weights).union(*chunk_weights))
    position = {term: i for i, term in enumerate(vocabulary)}

    def vectorize(weights: Dict[str, float]) -> np.ndarray:
        vector = np.zeros(len(vocabulary))
        for term, weight in weights.items():
            vector[position[term]] = weight
        return vector

    query_vector = vectorize(query_weights)
    scored = [
        ScoredChunk(chunk=chunk, score=_cosine(query_vector, vectorize(weights)))
        for chunk, weights in zip(chunks, chunk_weights)
    ]
    scored.sort(key=lambda s: (-s.score, s.chunk.doc_id, s.chunk.ordinal))
    return scored[:k]


def assemble_context(instructions: str, retrieved: Sequence[ScoredChunk], budget: int,
                     factor: Fraction = DEFAULT_TOKEN_FACTOR) -> ContextBundle:
    """Include chunks in rank order until the next one would exceed the budget"""
    used = estimate_tokens(instructions, factor)
    if used > budget:
        raise BudgetTooSmall(
            f"Instructions need about {used} tokens but the context budget is {budget}"
        )

    ranked = sorted(retrieved, key=lambda s: (-s.score, s.chunk.doc_id, s.chunk.ordinal))
    included = []
    for scored in ranked:
        if used + scored.chunk.token_estimate > budget:
            break
        included.append(scored)
        used += scored.chunk.token_estimate

    return ContextBundle(
        system_instructions=instructions,
        chunks=tuple(included),
        budget=budget,
        used=used,
    )


class KnowledgeBase:
    """Chunked knowledge set shared by every prompt of a chain; immutable after load"""

    def __init__(self, docs: Iterable[KnowledgeDoc], chunk_tokens: int = 200,
                 factor: Fraction = DEFAULT_TOKEN_FACTOR):
        self.docs = list(docs)
        self.factor = Fraction(factor)
        self.logger = logging.getLogger(self.__class__.__name__)
        self.chunks: Dict[KnowledgeKind, List[Chunk]] = {kind: [] for kind in KnowledgeKind}
        for doc in self.docs:
            self.chunks[doc.kind].extend(chunk_doc(doc, chunk_tokens, self.factor))
        self.logger.debug(
            "Chunked knowledge: "
            + ", ".join(f"{kind.value}={len(chunks)}" for kind, chunks in self.chunks.items())
        )

    @classmethod
    def from_directory(cls, directory: Union[str, Path], chunk_tokens: int = 200,
                       factor: Fraction = DEFAULT_TOKEN_FACTOR) -> "KnowledgeBase":
        return cls(load_knowledge(directory), chunk_tokens=chunk_tokens, factor=factor)

    def document(self, kind: KnowledgeKind) -> Optional[KnowledgeDoc]:
        return next((doc for doc in self.docs if doc.kind is kind), None)

    def build_context(self, instructions: str, query: str, kinds: Sequence[KnowledgeKind],
                      k: int, budget: int) -> ContextBundle:
        """Retrieve the top ``k`` chunks of the given kinds and pack them under ``budget``"""
        candidates = [chunk for kind in kinds for chunk in self.chunks[kind]]
        bundle = assemble_context(instructions, retrieve(query, candidates, k), budget, self.factor)
        self.logger.debug(
            f"Context: {len(bundle.chunks)} of {len(candidates)} chunk(s), "
            f"{bundle.used}/{bundle.budget} tokens"
        )
        return bundle
