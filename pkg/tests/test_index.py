from __future__ import annotations

import math
import random

import pytest

from tutor_engine.rag import (
    Chunk,
    EmbeddingVector,
    HashedNgramEmbedder,
    VectorIndex,
    VectorIndexError,
    build_index,
    load_corpus,
)
from tutor_engine.rag.corpus import CurriculumDoc

from conftest import SAMPLE_CORPUS


def make_chunks(vectors: list[list[float]]) -> tuple[list[Chunk], list[list[float]]]:
    chunks = [
        Chunk(
            chunk_id=f"{i:032x}",
            doc_id="d" * 32,
            ordinal=i,
            text=f"chunk {i}",
            char_span=(0, 7),
        )
        for i in range(len(vectors))
    ]
    return chunks, vectors


def brute_force_oracle(
    vectors: list[list[float]], ids: list[str], query: list[float], k: int
) -> list[tuple[str, float]]:
    """Independent exhaustive scan: pure-Python cosine, explicit sort."""
    qnorm = math.sqrt(sum(x * x for x in query))
    scored = []
    for cid, vec in zip(ids, vectors):
        dot = sum(a * b for a, b in zip(vec, query))
        norm = math.sqrt(sum(a * a for a in vec))
        scored.append((cid, dot / (norm * qnorm)))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[: min(k, len(scored))]


def test_query_equal_to_indexed_vector_ranks_first_with_score_one():
    chunks, vectors = make_chunks([[1.0, 0.0], [0.0, 1.0], [0.7, 0.7]])
    index = VectorIndex(dim=2, chunks=chunks, vectors=vectors)
    hits = index.search(EmbeddingVector(values=(0.0, 1.0)), k=1)
    assert hits[0].chunk_id == chunks[1].chunk_id
    assert abs(hits[0].score - 1.0) <= 1e-9
    assert hits[0].rank == 1


def test_k_larger_than_index_returns_everything_ranked():
    chunks, vectors = make_chunks([[1.0, 0.0], [0.9, 0.1], [0.0, 1.0]])
    index = VectorIndex(dim=2, chunks=chunks, vectors=vectors)
    hits = index.search(EmbeddingVector(values=(1.0, 0.0)), k=50)
    assert len(hits) == 3
    assert [h.rank for h in hits] == [1, 2, 3]
    assert hits[0].score >= hits[1].score >= hits[2].score


def test_exact_ties_break_by_chunk_id_ascending():
    # identical vectors -> identical scores; order must follow chunk_id
    chunks, vectors = make_chunks([[0.5, 0.5]] * 4)
    index = VectorIndex(dim=2, chunks=chunks, vectors=vectors)
    hits = index.search(EmbeddingVector(values=(1.0, 1.0)), k=4)
    assert [h.chunk_id for h in hits] == sorted(c.chunk_id for c in chunks)


def test_dim_mismatch_raises_index_error():
    chunks, vectors = make_chunks([[1.0, 0.0]])
    index = VectorIndex(dim=2, chunks=chunks, vectors=vectors)
    with pytest.raises(VectorIndexError):
        index.search(EmbeddingVector(values=(1.0, 0.0, 0.0)), k=1)


def test_search_on_empty_index_raises():
    index = VectorIndex(dim=2, chunks=[], vectors=[])
    with pytest.raises(VectorIndexError):
        index.search(EmbeddingVector(values=(1.0, 0.0)), k=1)


def test_random_corpus_matches_brute_force_oracle():
    rng = random.Random(42)
    n, dim = 200, 16
    vectors = [[rng.gauss(0, 1) for _ in range(dim)] for _ in range(n)]
    chunks, _ = make_chunks(vectors)
    ids = [c.chunk_id for c in chunks]
    index = VectorIndex(dim=dim, chunks=chunks, vectors=vectors)
    for _ in range(50):
        query = [rng.gauss(0, 1) for _ in range(dim)]
        got = index.search(EmbeddingVector(values=tuple(query)), k=4)
        want = brute_force_oracle(vectors, ids, query, 4)
        assert [h.chunk_id for h in got] == [cid for cid, _ in want]
        for hit, (_, score) in zip(got, want):
            assert abs(hit.score - score) <= 1e-9


def test_ingestion_order_does_not_change_results():
    docs = load_corpus(SAMPLE_CORPUS)
    embedder = HashedNgramEmbedder(dim=32)
    forward = build_index(docs, embedder, chunk_size=500, overlap=60)
    backward = build_index(list(reversed(docs)), embedder, chunk_size=500, overlap=60)
    query = embedder.embed("how does ransomware spread")
    a = forward.search(query, k=8)
    b = backward.search(query, k=8)
    assert [(h.chunk_id, h.score) for h in a] == [(h.chunk_id, h.score) for h in b]


def test_reingestion_yields_identical_chunk_ids():
    docs = load_corpus(SAMPLE_CORPUS)
    embedder = HashedNgramEmbedder(dim=32)
    first = build_index(docs, embedder, chunk_size=500, overlap=60)
    second = build_index(load_corpus(SAMPLE_CORPUS), embedder, chunk_size=500, overlap=60)
    assert [c.chunk_id for c in first.chunks] == [c.chunk_id for c in second.chunks]


def test_chunk_spans_cover_document_bodies():
    docs = load_corpus(SAMPLE_CORPUS)
    embedder = HashedNgramEmbedder(dim=32)
    index = build_index(docs, embedder, chunk_size=400, overlap=50)
    for doc in docs:
        spans = sorted(
            (c.char_span for c in index.chunks if c.doc_id == doc.doc_id),
        )
        assert spans[0][0] == 0
        assert spans[-1][1] == len(doc.body)
        covered = set()
        for start, end in spans:
            covered.update(range(start, end))
        assert covered == set(range(len(doc.body)))


def test_save_load_round_trip(tmp_path):
    docs = load_corpus(SAMPLE_CORPUS)
    embedder = HashedNgramEmbedder(dim=32)
    index = build_index(docs, embedder, chunk_size=500, overlap=60)
    path = tmp_path / "index.json"
    index.save(path)
    loaded = VectorIndex.load(path)
    assert loaded.dim == index.dim
    assert [c.chunk_id for c in loaded.chunks] == [c.chunk_id for c in index.chunks]
    query = embedder.embed("evidence chain of custody")
    assert [
        (h.chunk_id, h.score) for h in loaded.search(query, k=5)
    ] == [(h.chunk_id, h.score) for h in index.search(query, k=5)]


def test_load_rejects_unknown_format_version(tmp_path):
    path = tmp_path / "index.json"
    path.write_text('{"version": 99, "dim": 2, "chunks": [], "vectors": []}')
    with pytest.raises(VectorIndexError):
        VectorIndex.load(path)


def test_corpus_front_matter_parsed():
    docs = load_corpus(SAMPLE_CORPUS)
    by_title = {d.title: d for d in docs}
    assert "Malware Fundamentals and Infection Vectors" in by_title
    doc = by_title["Malware Fundamentals and Infection Vectors"]
    assert "malware" in doc.tags
    assert not doc.body.startswith("---")


def test_empty_document_is_rejected(tmp_path):
    (tmp_path / "empty.md").write_text("---\ntitle: Nothing\n---\n   \n")
    from tutor_engine.rag import CorpusError

    with pytest.raises(CorpusError):
        load_corpus(tmp_path)
