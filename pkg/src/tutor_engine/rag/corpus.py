"""Loading curriculum documents from a directory of markdown/text files.

Files may start with a front-matter block delimited by ``---`` lines
carrying ``title:`` and ``tags:`` (comma-separated). Anything else in the
block is ignored. Documents are returned in sorted relative-path order and
carry content-derived ids so re-ingestion is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..domain import derived_id

_EXTENSIONS = (".md", ".txt")


class CorpusError(ValueError):
    """Raised for unusable corpus directories or empty documents."""


@dataclass(frozen=True)
class CurriculumDoc:
    doc_id: str
    title: str
    source_path: str
    body: str
    tags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.body:
            raise CorpusError(f"document body must be non-empty: {self.source_path}")


def _parse_front_matter(raw: str) -> tuple[dict[str, str], str]:
    lines = raw.split("\n")
    if not lines or lines[0].strip() != "---":
        return {}, raw
    meta: dict[str, str] = {}
    for i, line in enumerate(lines[1:], start=1):
        if line.strip() == "---":
            return meta, "\n".join(lines[i + 1 :])
        if ":" in line:
            key, _, value = line.partition(":")
            meta[key.strip().lower()] = value.strip()
    # No closing delimiter: treat the whole file as body.
    return {}, raw


def load_doc(path: Path, root: Path) -> CurriculumDoc:
    raw = path.read_text(encoding="utf-8")
    meta, body = _parse_front_matter(raw)
    body = body.strip()
    if not body:
        raise CorpusError(f"document body must be non-empty: {path}")
    rel = path.relative_to(root).as_posix()
    tags = tuple(t.strip() for t in meta.get("tags", "").split(",") if t.strip())
    return CurriculumDoc(
        doc_id=derived_id("doc", rel, body),
        title=meta.get("title", path.stem),
        source_path=rel,
        body=body,
        tags=tags,
    )


def load_corpus(directory: str | Path) -> list[CurriculumDoc]:
    """Load every .md/.txt file under ``directory`` (recursive, sorted)."""
    root = Path(directory)
    if not root.is_dir():
        raise CorpusError(f"corpus directory not found: {root}")
    paths = sorted(
        (p for p in root.rglob("*") if p.is_file() and p.suffix.lower() in _EXTENSIONS),
        key=lambda p: p.relative_to(root).as_posix(),
    )
    if not paths:
        raise CorpusError(f"no .md/.txt files under {root}")
    return [load_doc(p, root) for p in paths]
