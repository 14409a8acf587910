"""Service configuration: TOML file with documented defaults for every key.

Secrets never live in the file; the completion API key is read from the
TUTOR_LLM_API_KEY environment variable by the gateway.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .domain import Role, ScaffoldLevel
from .scaffolding import ScaffoldPolicy


class ConfigError(ValueError):
    pass


def default_persona_path() -> Path:
    return Path(str(resources.files("tutor_engine") / "assets" / "persona.txt"))


@dataclass(frozen=True)
class ProviderConfig:
    kind: str = "http"  # http | scripted
    endpoint: str = "http://localhost:8000"
    model: str = "gpt-4o"
    script_path: str = ""
    deadline_ms: int = 30_000
    max_retries: int = 3


@dataclass(frozen=True)
class EmbedderConfig:
    kind: str = "test"  # http | test
    dim: int = 256
    model: str = "text-embedding-3-small"


@dataclass(frozen=True)
class RagConfig:
    chunk_size: int = 800
    overlap: int = 120
    k: int = 4
    budget: int = 4000


@dataclass(frozen=True)
class ScaffoldConfig:
    fade_on_mastered: bool = True
    reset_after_struggling: int = 2
    initial_by_role: Mapping[str, str] = field(
        default_factory=lambda: {
            "Student": "HighSupport",
            "Other": "HighSupport",
            "Officer": "Guided",
            "Legal": "Guided",
            "Educator": "Guided",
        }
    )

    def to_policy(self) -> ScaffoldPolicy:
        try:
            mapping = {
                Role(role): ScaffoldLevel(level)
                for role, level in self.initial_by_role.items()
            }
        except ValueError as exc:
            raise ConfigError(f"scaffold.initial_by_role: {exc}") from exc
        return ScaffoldPolicy(
            fade_on_mastered=self.fade_on_mastered,
            reset_after_struggling=self.reset_after_struggling,
            initial_by_role=mapping,
        )


@dataclass(frozen=True)
class ApiConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    data_dir: str = "./data"
    persona_path: str = ""
    history_window: int = 12
    static_dir: str = ""
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    embedder: EmbedderConfig = field(default_factory=EmbedderConfig)
    rag: RagConfig = field(default_factory=RagConfig)
    scaffold: ScaffoldConfig = field(default_factory=ScaffoldConfig)

    def resolved_persona_path(self) -> Path:
        return Path(self.persona_path) if self.persona_path else default_persona_path()


def _section(raw: Mapping[str, Any], name: str) -> dict[str, Any]:
    value = raw.get(name, {})
    if not isinstance(value, dict):
        raise ConfigError(f"[{name}] must be a table")
    return dict(value)


def _build(raw: Mapping[str, Any]) -> ApiConfig:
    service = _section(raw, "service")
    provider = _section(raw, "provider")
    embedder = _section(raw, "embedder")
    rag = _section(raw, "rag")
    scaffold = _section(raw, "scaffold")
    try:
        return ApiConfig(
            host=service.get("host", ApiConfig.host),
            port=int(service.get("port", ApiConfig.port)),
            data_dir=service.get("data_dir", ApiConfig.data_dir),
            persona_path=service.get("persona_path", ""),
            history_window=int(service.get("history_window", ApiConfig.history_window)),
            static_dir=service.get("static_dir", ""),
            provider=ProviderConfig(
                kind=provider.get("kind", ProviderConfig.kind),
                endpoint=provider.get("endpoint", ProviderConfig.endpoint),
                model=provider.get("model", ProviderConfig.model),
                script_path=provider.get("script_path", ""),
                deadline_ms=int(provider.get("deadline_ms", ProviderConfig.deadline_ms)),
                max_retries=int(provider.get("max_retries", ProviderConfig.max_retries)),
            ),
            embedder=EmbedderConfig(
                kind=embedder.get("kind", EmbedderConfig.kind),
                dim=int(embedder.get("dim", EmbedderConfig.dim)),
                model=embedder.get("model", EmbedderConfig.model),
            ),
            rag=RagConfig(
                chunk_size=int(rag.get("chunk_size", RagConfig.chunk_size)),
                overlap=int(rag.get("overlap", RagConfig.overlap)),
                k=int(rag.get("k", RagConfig.k)),
                budget=int(rag.get("budget", RagConfig.budget)),
            ),
            scaffold=ScaffoldConfig(
                fade_on_mastered=bool(
                    scaffold.get("fade_on_mastered", ScaffoldConfig.fade_on_mastered)
                ),
                reset_after_struggling=int(
                    scaffold.get(
                        "reset_after_struggling", ScaffoldConfig.reset_after_struggling
                    )
                ),
                initial_by_role=scaffold.get(
                    "initial_by_role",
                    ScaffoldConfig().initial_by_role,
                ),
            ),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration value: {exc}") from exc


def load_config(path: str | Path | None = None) -> ApiConfig:
    if path is None:
        return ApiConfig()
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        raw = tomllib.loads(p.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file is not valid TOML: {exc}") from exc
    return _build(raw)


def validate_config(cfg: ApiConfig) -> None:
    """Startup checks: referenced paths exist, chunking parameters usable."""
    if cfg.rag.overlap >= cfg.rag.chunk_size:
        raise ConfigError(
            f"rag.overlap ({cfg.rag.overlap}) must be smaller than rag.chunk_size "
            f"({cfg.rag.chunk_size})"
        )
    if cfg.rag.chunk_size <= 0 or cfg.rag.overlap < 0:
        raise ConfigError("rag.chunk_size must be positive and rag.overlap non-negative")
    if cfg.rag.k <= 0 or cfg.rag.budget <= 0:
        raise ConfigError("rag.k and rag.budget must be positive")
    if cfg.history_window < 0:
        raise ConfigError("service.history_window must be non-negative")
    persona = cfg.resolved_persona_path()
    if not persona.exists():
        raise ConfigError(f"persona asset not found: {persona}")
    if cfg.provider.kind not in ("http", "scripted"):
        raise ConfigError(f"provider.kind must be http|scripted, got {cfg.provider.kind!r}")
    if cfg.provider.kind == "scripted":
        if not cfg.provider.script_path:
            raise ConfigError("provider.kind=scripted requires provider.script_path")
        if not Path(cfg.provider.script_path).exists():
            raise ConfigError(f"provider script not found: {cfg.provider.script_path}")
    if cfg.embedder.kind not in ("http", "test"):
        raise ConfigError(f"embedder.kind must be http|test, got {cfg.embedder.kind!r}")
    if cfg.static_dir and not Path(cfg.static_dir).is_dir():
        raise ConfigError(f"service.static_dir not found: {cfg.static_dir}")
    cfg.scaffold.to_policy()
