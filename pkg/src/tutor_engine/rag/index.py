"""Exact top-k cosine retrieval over embedded curriculum chunks.

The index is an exhaustive scan, not an approximate structure: corpora are
course-scale and exactness is what makes retrieval testable against an
independent oracle. The chunk matrix is canonically ordered by chunk_id,
so search results do not depend on ingestion order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..domain import derived_id
from .chunking import chunk_text
from .corpus import CurriculumDoc
from .embedding import Embedder, EmbeddingVector

INDEX_FORMAT_VERSION = 1


class VectorIndexError(ValueError):
    """Raised for dimension mismatches and malformed index files."""


@dataclass(frozen=True)
class Chunk:
    chunk_id: str
    doc_id: str
    ordinal: int
    text: str
    char_span: tuple[int, int]

    def to_dict(self) -> dict:
        return {
            "chunk_id": self.chunk_id,
            "doc_id": self.doc_id,
            "ordinal": self.ordinal,
            "text": self.text,
            "char_span": list(self.char_span),
        }

    @classmethod
    def from_dict(cls, d: dict) -> Chunk:
        return cls(
            chunk_id=d["chunk_id"],
            doc_id=d["doc_id"],
            ordinal=d["ordinal"],
            text=d["text"],
            char_span=(d["char_span"][0], d["char_span"][1]),
        )


@dataclass(frozen=True)
class ChunkHit:
    chunk_id: str
    score: float
    rank: int


class VectorIndex:
    """Immutable-after-build store of chunks plus their embedding matrix.

    Safe for concurrent readers; ingestion builds a whole new index and the
    owner swaps the reference, so readers observe either the old or the new
    index, never a partial one.
    """

    def __init__(
        self,
        dim: int,
        chunks: Sequence[Chunk],
        vectors: Sequence[Sequence[float]],
        docs: Sequence[CurriculumDoc] = (),
    ) -> None:
        if len(chunks) != len(vectors):
            raise VectorIndexError(
                f"got {len(chunks)} chunks but {len(vectors)} vectors"
            )
        order = sorted(range(len(chunks)), key=lambda i: chunks[i].chunk_id)
        self.dim = dim
        self._chunks: tuple[Chunk, ...] = tuple(chunks[i] for i in order)
        self._by_id = {c.chunk_id: c for c in self._chunks}
        if len(self._by_id) != len(self._chunks):
            raise VectorIndexError("duplicate chunk ids in index")
        self._docs = {d.doc_id: d for d in docs}
        if self._chunks:
            matrix = np.asarray([vectors[i] for i in order], dtype=np.float64)
            if matrix.shape != (len(self._chunks), dim):
                raise VectorIndexError(
                    f"vector matrix shape {matrix.shape} does not match ({len(self._chunks)}, {dim})"
                )
        else:
            matrix = np.zeros((0, dim), dtype=np.float64)
        self._matrix = matrix
        self._norms = np.linalg.norm(matrix, axis=1) if len(self._chunks) else np.zeros(0)
        if np.any(self._norms == 0.0) and len(self._chunks):
            raise VectorIndexError("index contains a zero-norm vector")

    def __len__(self) -> int:
        return len(self._chunks)

    @property
    def chunks(self) -> tuple[Chunk, ...]:
        return self._chunks

    def chunk(self, chunk_id: str) -> Chunk:
        try:
            return self._by_id[chunk_id]
        except KeyError:
            raise VectorIndexError(f"unknown chunk id: {chunk_id}") from None

    def has_chunk(self, chunk_id: str) -> bool:
        return chunk_id in self._by_id

    def doc_title(self, doc_id: str) -> str:
        doc = self._docs.get(doc_id)
        return doc.title if doc else ""

    def search(self, query: EmbeddingVector, k: int) -> list[ChunkHit]:
        """Top-k chunks by cosine similarity; ties broken by chunk_id ascending.

        Returns min(k, len(index)) hits, scored and ordered exactly as a
        brute-force scan over every stored chunk.
        """
        if k <= 0:
            raise ValueError(f"k must be positive, got {k}")
        if not self._chunks:
            raise VectorIndexError("search on an empty index")
        if query.dim != self.dim:
            raise VectorIndexError(
                f"query dim {query.dim} does not match index dim {self.dim}"
            )
        q = np.asarray(query.values, dtype=np.float64)
        qnorm = float(np.linalg.norm(q))
        if qnorm == 0.0:
            raise VectorIndexError("search with a zero-norm query vector")
        scores = (self._matrix @ q) / (self._norms * qnorm)
        k = min(k, len(self._chunks))
        # Chunks are stored sorted by chunk_id, so a stable sort on -score
        # yields the ascending-chunk_id tie-break for free.
        top = np.argsort(-scores, kind="stable")[:k]
        return [
            ChunkHit(chunk_id=self._chunks[i].chunk_id, score=float(scores[i]), rank=r + 1)
            for r, i in enumerate(top)
        ]

    def save(self, path: str | Path) -> None:
        """Persist as versioned JSON (floats round-trip via repr)."""
        payload = {
            "version": INDEX_FORMAT_VERSION,
            "dim": self.dim,
            "docs": [
                {
                    "doc_id": d.doc_id,
                    "title": d.title,
                    "source_path": d.source_path,
                    "body": d.body,
                    "tags": list(d.tags),
                }
                for d in self._docs.values()
            ],
            "chunks": [c.to_dict() for c in self._chunks],
            "vectors": [list(map(float, row)) for row in self._matrix],
        }
        Path(path).write_text(json.dumps(payload), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> VectorIndex:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        version = payload.get("version")
        if version != INDEX_FORMAT_VERSION:
            raise VectorIndexError(
                f"unsupported index format version {version!r} (expected {INDEX_FORMAT_VERSION})"
            )
        docs = [
            CurriculumDoc(
                doc_id=d["doc_id"],
                title=d["title"],
                source_path=d["source_path"],
                body=d["body"],
                tags=tuple(d.get("tags", ())),
            )
            for d in payload.get("docs", ())
        ]
        chunks = [Chunk.from_dict(c) for c in payload["chunks"]]
        return cls(dim=payload["dim"], chunks=chunks, vectors=payload["vectors"], docs=docs)


def build_index(
    docs: Iterable[CurriculumDoc],
    embedder: Embedder,
    chunk_size: int,
    overlap: int,
) -> VectorIndex:
    """Chunk and embed every document into a fresh index.

    Chunk ids are derived from (doc_id, ordinal, text), so rebuilding the
    same corpus yields identical ids regardless of document order.
    """
    chunks: list[Chunk] = []
    vectors: list[tuple[float, ...]] = []
    doc_list = list(docs)
    for doc in doc_list:
        pieces = chunk_text(doc.body, chunk_size=chunk_size, overlap=overlap)
        for ordinal, piece in enumerate(pieces):
            chunks.append(
                Chunk(
                    chunk_id=derived_id("chunk", doc.doc_id, str(ordinal), piece.text),
                    doc_id=doc.doc_id,
                    ordinal=ordinal,
                    text=piece.text,
                    char_span=(piece.start, piece.end),
                )
            )
            vectors.append(embedder.embed(piece.text).values)
    return VectorIndex(dim=embedder.dim, chunks=chunks, vectors=vectors, docs=doc_list)
