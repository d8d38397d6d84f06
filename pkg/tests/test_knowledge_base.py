"""
Tests for knowledge loading, chunking, retrieval and context assembly
"""
import json
from fractions import Fraction

import pytest

from agents.interviewer.knowledge_base import (
    BudgetTooSmall, Chunk, EmptyFile, InvalidManifest, KnowledgeBase, KnowledgeDoc,
    KnowledgeKind, MissingFile, MissingManifest, ScoredChunk, assemble_context, chunk_doc,
    estimate_tokens, load_knowledge, retrieve,
)
from core.transcript import parse_script


def make_chunk(doc_id, ordinal, text):
    return Chunk(doc_id=doc_id, ordinal=ordinal, text=text,
                 token_estimate=estimate_tokens(text), kind=KnowledgeKind.GUIDELINES)


class TestLoadKnowledge:

    def test_bundled_knowledge(self, knowledge_dir):
        docs = load_knowledge(knowledge_dir)
        assert [d.kind for d in docs] == list(KnowledgeKind)
        sample = next(d for d in docs if d.kind is KnowledgeKind.SAMPLE_SCRIPT)
        script = parse_script(sample.text)
        assert len(script.turns) > 20

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(MissingManifest):
            load_knowledge(tmp_path)

    def test_unknown_kind(self, tmp_path):
        (tmp_path / "manifest.json").write_text(json.dumps({"recipes": "r.md"}))
        with pytest.raises(InvalidManifest):
            load_knowledge(tmp_path)

    def test_missing_file(self, tmp_path):
        (tmp_path / "manifest.json").write_text(json.dumps({"guidelines": "g.md"}))
        with pytest.raises(MissingFile):
            load_knowledge(tmp_path)

    def test_empty_file(self, tmp_path):
        (tmp_path / "manifest.json").write_text(json.dumps({"pitfalls": "p.md"}))
        (tmp_path / "p.md").write_text("  \n")
        with pytest.raises(EmptyFile):
            load_knowledge(tmp_path)


class TestChunking:

    def test_estimate_tokens(self):
        assert estimate_tokens("one two three") == 4
        assert estimate_tokens("one two three", Fraction(1)) == 3

    def test_paragraphs_merge_up_to_target(self):
        paragraph = " ".join(["word"] * 30)
        doc = KnowledgeDoc(id="g", kind=KnowledgeKind.GUIDELINES,
                           text="\n\n".join([paragraph] * 4))
        chunks = chunk_doc(doc, target_tokens=90)
        # two 30-word paragraphs estimate to 80 tokens, three to 120
        assert [c.ordinal for c in chunks] == [0, 1]
        assert chunks[0].text == paragraph + "\n\n" + paragraph
        assert all(c.token_estimate == 80 for c in chunks)

    def test_oversize_paragraph_stands_alone(self):
        doc = KnowledgeDoc(id="g", kind=KnowledgeKind.GUIDELINES, text=" ".join(["w"] * 100))
        chunks = chunk_doc(doc, target_tokens=40)
        assert len(chunks) == 1

    def test_target_below_minimum(self):
        doc = KnowledgeDoc(id="g", kind=KnowledgeKind.GUIDELINES, text="text")
        with pytest.raises(ValueError):
            chunk_doc(doc, target_tokens=10)


class TestRetrieval:

    def test_relevant_chunk_ranks_first(self):
        chunks = [
            make_chunk("a", 0, "Greet the stakeholder and thank them for their time."),
            make_chunk("a", 1, "Ask about privacy and security of personal data."),
            make_chunk("b", 0, "Summarize the requirements before closing."),
        ]
        ranked = retrieve("privacy of personal data", chunks, k=3)
        assert ranked[0].chunk.ordinal == 1
        assert all(0.0 <= s.score <= 1.0 for s in ranked)

    def test_ties_fall_back_to_document_order(self):
        chunks = [make_chunk("b", 0, "alpha"), make_chunk("a", 1, "beta"), make_chunk("a", 0, "gamma")]
        ranked = retrieve("unrelated words", chunks, k=3)
        assert [(s.chunk.doc_id, s.chunk.ordinal) for s in ranked] == [("a", 0), ("a", 1), ("b", 0)]

    def test_k_limits_results(self):
        chunks = [make_chunk("a", i, f"topic{i}") for i in range(5)]
        assert len(retrieve("topic1", chunks, k=2)) == 2

    def test_empty_query_scores_zero(self):
        ranked = retrieve("", [make_chunk("a", 0, "rooms")], k=1)
        assert ranked[0].score == 0.0


class TestContextAssembly:

    def test_prefix_inclusion_under_budget(self):
        scored = [
            ScoredChunk(make_chunk("a", 0, " ".join(["x"] * 30)), 0.9),
            ScoredChunk(make_chunk("a", 1, " ".join(["y"] * 30)), 0.5),
        ]
        bundle = assemble_context("Be helpful.", scored, budget=50)
        assert [s.chunk.ordinal for s in bundle.chunks] == [0]
        assert bundle.used == estimate_tokens("Be helpful.") + 40
        assert bundle.used <= bundle.budget
        assert "Reference knowledge:" in bundle.render()

    def test_instructions_over_budget(self):
        with pytest.raises(BudgetTooSmall):
            assemble_context(" ".join(["w"] * 100), [], budget=10)

    def test_no_chunks_renders_instructions_only(self):
        assert assemble_context("Be brief.", [], budget=10).render() == "Be brief."

    def test_knowledge_base_context(self, knowledge_dir):
        kb = KnowledgeBase.from_directory(knowledge_dir, chunk_tokens=120)
        assert kb.document(KnowledgeKind.PITFALLS) is not None
        bundle = kb.build_context(
            "System.", "leading questions jargon", [KnowledgeKind.PITFALLS], k=3, budget=2000
        )
        assert bundle.chunks
        assert all(s.chunk.kind is KnowledgeKind.PITFALLS for s in bundle.chunks)
