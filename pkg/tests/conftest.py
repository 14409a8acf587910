"""Shared fixtures: scripted providers, engines and runtimes wired for
offline, deterministic runs."""

from __future__ import annotations

import dataclasses
import json
from importlib import resources
from pathlib import Path

import pytest

from tutor_engine.config import ApiConfig
from tutor_engine.cycle import EngineConfig, FixedClock, TutorEngine
from tutor_engine.gateway import ScriptedProvider, ScriptRule
from tutor_engine.rag import HashedNgramEmbedder, build_index, load_corpus
from tutor_engine.runtime import TutorRuntime

ASSETS = Path(str(resources.files("tutor_engine") / "assets"))
GOLDEN_SCRIPTS = ASSETS / "scripts" / "golden_malware"
SAMPLE_CORPUS = ASSETS / "sample_corpus"
FEEDBACK_SAMPLE = ASSETS / "feedback_sample.jsonl"
FIXTURES = Path(__file__).parent / "fixtures"

GOLDEN_TURN_1 = "What should I do to defend against malware?"
GOLDEN_TURN_2 = (
    "1. Virus: Attaches to a file and needs me to open it. "
    "2. Ransomware: Locks my files until I pay money. "
    "3. Trojan: Disguises itself as fake software so I install it."
)

PERSONA = (ASSETS / "persona.txt").read_text(encoding="utf-8")


def rules(*pairs: tuple[object, object], once: bool = False) -> list[ScriptRule]:
    """Shorthand: build scripted rules from (match, response) pairs."""
    out = []
    for match, response in pairs:
        if isinstance(match, str):
            match = (match,)
        if not isinstance(response, str):
            response = json.dumps(response)
        out.append(ScriptRule(match=tuple(match), response=response, once=once))
    return out


def make_engine(provider, **overrides) -> TutorEngine:
    kwargs = dict(
        provider=provider,
        embedder=HashedNgramEmbedder(dim=64),
        persona=PERSONA,
        clock=FixedClock(),
        config=EngineConfig(),
    )
    kwargs.update(overrides)
    return TutorEngine(**kwargs)


def golden_config(data_dir: Path, script_path: Path = GOLDEN_SCRIPTS) -> ApiConfig:
    base = ApiConfig()
    return dataclasses.replace(
        base,
        data_dir=str(data_dir),
        provider=dataclasses.replace(
            base.provider, kind="scripted", script_path=str(script_path)
        ),
        embedder=dataclasses.replace(base.embedder, kind="test", dim=64),
    )


def make_runtime(
    data_dir: Path,
    script_path: Path = GOLDEN_SCRIPTS,
    ingest: bool = True,
    clock=None,
) -> TutorRuntime:
    runtime = TutorRuntime(
        golden_config(data_dir, script_path), clock=clock or FixedClock()
    )
    if ingest:
        runtime.ingest(SAMPLE_CORPUS)
    return runtime


@pytest.fixture
def golden_runtime(tmp_path) -> TutorRuntime:
    return make_runtime(tmp_path / "data")


@pytest.fixture
def corpus_index():
    docs = load_corpus(SAMPLE_CORPUS)
    embedder = HashedNgramEmbedder(dim=64)
    return build_index(docs, embedder, chunk_size=800, overlap=120), embedder
