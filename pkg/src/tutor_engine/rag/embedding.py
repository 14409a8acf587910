"""Text embedders behind one interface.

Two implementations: a remote embedding endpoint for production, and a
deterministic hashed character n-gram embedder used by the offline test
suite (identical text always maps to the bitwise-identical vector).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Protocol, TYPE_CHECKING

if TYPE_CHECKING:
    from ..gateway.http_client import HttpProvider

_NGRAM = 3


class EmbeddingInputError(ValueError):
    """Raised for empty input text."""


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.values)


class Embedder(Protocol):
    dim: int

    def embed(self, text: str) -> EmbeddingVector: ...


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine similarity of two vectors of equal dimension."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    dot = sum(x * y for x, y in zip(a.values, b.values))
    na = math.sqrt(sum(x * x for x in a.values))
    nb = math.sqrt(sum(y * y for y in b.values))
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine undefined for zero-norm vector")
    return dot / (na * nb)


class HashedNgramEmbedder:
    """Deterministic embedder: hash character n-grams into a fixed-dim vector.

    Whitespace is collapsed and the text lowercased before n-gram extraction,
    then each n-gram is hashed (blake2b, stable across processes and
    platforms) into a signed bucket. The result is L2-normalized, so any
    non-empty text has unit norm.
    """

    def __init__(self, dim: int = 256) -> None:
        if dim <= 0:
            raise ValueError(f"dim must be positive, got {dim}")
        self.dim = dim

    def embed(self, text: str) -> EmbeddingVector:
        if not text.strip():
            raise EmbeddingInputError("cannot embed empty text")
        vec = [0.0] * self.dim
        normalized = " " + " ".join(text.lower().split()) + " "
        if len(normalized) <= _NGRAM:
            grams = [normalized]
        else:
            grams = [normalized[i : i + _NGRAM] for i in range(len(normalized) - _NGRAM + 1)]
        for gram in grams:
            digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=8).digest()
            h = int.from_bytes(digest, "big")
            sign = 1.0 if (h >> 63) & 1 else -1.0
            vec[h % self.dim] += sign
        norm = math.sqrt(sum(v * v for v in vec))
        return EmbeddingVector(values=tuple(v / norm for v in vec))


class RemoteEmbedder:
    """Embedder backed by an OpenAI-compatible ``/v1/embeddings`` endpoint."""

    def __init__(self, provider: "HttpProvider", model: str, dim: int) -> None:
        self._provider = provider
        self._model = model
        self.dim = dim

    def embed(self, text: str) -> EmbeddingVector:
        if not text.strip():
            raise EmbeddingInputError("cannot embed empty text")
        values = self._provider.embed([text], model=self._model)[0]
        if len(values) != self.dim:
            raise ValueError(
                f"embedding endpoint returned dim {len(values)}, expected {self.dim}"
            )
        return EmbeddingVector(values=tuple(float(v) for v in values))
