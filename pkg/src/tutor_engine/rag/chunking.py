"""Sliding-window text chunking with whitespace-preferring cut points."""

from __future__ import annotations

from dataclasses import dataclass

# How far back from the nominal cut we look for a whitespace boundary.
WHITESPACE_WINDOW = 32


class ChunkingConfigError(ValueError):
    """Raised for unusable chunk_size/overlap settings."""


@dataclass(frozen=True)
class ChunkPiece:
    """One window over the source body: the text plus its [start, end) span."""

    text: str
    start: int
    end: int


def chunk_text(body: str, chunk_size: int, overlap: int) -> list[ChunkPiece]:
    """Split ``body`` into overlapping windows of at most ``chunk_size`` chars.

    Consecutive pieces share exactly ``overlap`` characters. Cuts prefer a
    whitespace boundary within the trailing WHITESPACE_WINDOW of the nominal
    cut point, so words are not split mid-token on prose input. Concatenating
    the pieces with the overlap removed reconstructs ``body`` exactly; an
    empty body yields zero pieces (callers reject empty documents upstream).
    """
    if chunk_size <= 0:
        raise ChunkingConfigError(f"chunk_size must be positive, got {chunk_size}")
    if overlap < 0 or overlap >= chunk_size:
        raise ChunkingConfigError(
            f"overlap must satisfy 0 <= overlap < chunk_size, got overlap={overlap} chunk_size={chunk_size}"
        )
    if not body:
        return []

    pieces: list[ChunkPiece] = []
    start = 0
    while True:
        end = min(start + chunk_size, len(body))
        if end < len(body):
            end = _preferred_cut(body, start, end, overlap)
        pieces.append(ChunkPiece(text=body[start:end], start=start, end=end))
        if end >= len(body):
            return pieces
        start = end - overlap


def _preferred_cut(body: str, start: int, end: int, overlap: int) -> int:
    """Move ``end`` back to just after the last whitespace in the window.

    Never moves past ``start + overlap`` (the next window must make progress)
    and never moves more than WHITESPACE_WINDOW characters.
    """
    floor = max(start + overlap + 1, end - WHITESPACE_WINDOW)
    for cut in range(end, floor - 1, -1):
        if body[cut - 1].isspace():
            return cut
    return end
