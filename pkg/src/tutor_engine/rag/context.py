"""Assembly of the grounding context injected into the teaching prompt."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .index import ChunkHit

SOURCE_MARKER = "[SRC:{chunk_id}]"


@dataclass(frozen=True)
class GroundingContext:
    """Concatenated chunk texts with provenance markers, plus the included ids.

    ``insufficient_budget`` is set when there were hits but not even the
    first one fit inside the budget.
    """

    text: str
    chunk_ids: tuple[str, ...]
    insufficient_budget: bool = False

    @property
    def empty(self) -> bool:
        return not self.chunk_ids


def build_context(
    hits: Sequence[ChunkHit],
    chunk_text_for: Callable[[str], str],
    budget: int,
) -> GroundingContext:
    """Pack whole chunks, in rank order, until the next one would exceed budget.

    The budget counts chunk text characters only (markers are free); chunks
    are never truncated mid-text.
    """
    if budget <= 0:
        raise ValueError(f"budget must be positive, got {budget}")
    included: list[str] = []
    blocks: list[str] = []
    used = 0
    for hit in hits:
        text = chunk_text_for(hit.chunk_id)
        if used + len(text) > budget:
            break
        used += len(text)
        included.append(hit.chunk_id)
        blocks.append(SOURCE_MARKER.format(chunk_id=hit.chunk_id) + "\n" + text)
    return GroundingContext(
        text="\n\n".join(blocks),
        chunk_ids=tuple(included),
        insufficient_budget=bool(hits) and not included,
    )
