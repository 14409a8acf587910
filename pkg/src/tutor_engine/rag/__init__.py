"""Curriculum ingestion, chunking, embedding and exact top-k retrieval."""

from .chunking import ChunkingConfigError, ChunkPiece, chunk_text
from .context import GroundingContext, build_context
from .corpus import CorpusError, CurriculumDoc, load_corpus
from .embedding import (
    Embedder,
    EmbeddingInputError,
    EmbeddingVector,
    HashedNgramEmbedder,
    RemoteEmbedder,
    cosine,
)
from .index import Chunk, ChunkHit, VectorIndex, VectorIndexError, build_index

__all__ = [
    "ChunkingConfigError",
    "ChunkPiece",
    "chunk_text",
    "Embedder",
    "GroundingContext",
    "build_context",
    "CorpusError",
    "CurriculumDoc",
    "load_corpus",
    "EmbeddingInputError",
    "EmbeddingVector",
    "HashedNgramEmbedder",
    "RemoteEmbedder",
    "cosine",
    "Chunk",
    "ChunkHit",
    "VectorIndex",
    "VectorIndexError",
    "build_index",
]
