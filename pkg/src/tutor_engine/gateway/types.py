"""Completion-provider interface: request/response values and error taxonomy."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Protocol

DEFAULT_STRUCTURED_TEMPERATURE = 0.2
DEFAULT_TEACHING_TEMPERATURE = 0.7
DEFAULT_MAX_TOKENS = 1024


class GatewayError(Exception):
    """Base class for completion-provider failures."""


class ProviderError(GatewayError):
    """Non-retriable provider failure (bad status, unusable response)."""

    def __init__(self, message: str, status: int = 0, body_excerpt: str = "") -> None:
        super().__init__(message)
        self.status = status
        self.body_excerpt = body_excerpt


class GatewayTimeout(GatewayError, TimeoutError):
    """The configured deadline elapsed before a usable response arrived."""


class RetriesExhausted(GatewayError):
    """All retry attempts failed with transient errors."""


class SchemaViolation(Exception):
    """Structured output failed validation even after the repair round."""

    def __init__(self, violations: list[str]) -> None:
        super().__init__("; ".join(violations) or "schema violation")
        self.violations = violations


class FinishReason(str, Enum):
    STOP = "stop"
    LENGTH = "length"
    PROVIDER_ERROR = "provider_error"


@dataclass(frozen=True)
class PromptBundle:
    """Everything one completion call needs.

    ``system_text`` always begins with the persona preamble; ``messages``
    alternate (role, text) pairs with role in {"user", "assistant"}.
    """

    system_text: str
    messages: tuple[tuple[str, str], ...] = ()
    temperature: float = DEFAULT_STRUCTURED_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS

    def __post_init__(self) -> None:
        if not self.system_text:
            raise ValueError("system_text must be non-empty")
        if self.temperature < 0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature}")
        if self.max_tokens <= 0:
            raise ValueError(f"max_tokens must be positive, got {self.max_tokens}")
        for role, _ in self.messages:
            if role not in ("user", "assistant"):
                raise ValueError(f"message role must be user|assistant, got {role!r}")

    def appended(self, role: str, text: str) -> PromptBundle:
        return PromptBundle(
            system_text=self.system_text,
            messages=self.messages + ((role, text),),
            temperature=self.temperature,
            max_tokens=self.max_tokens,
        )

    def flat_text(self) -> str:
        """System text plus all message texts; the scripted provider matches on this."""
        return "\n".join([self.system_text, *(text for _, text in self.messages)])


@dataclass(frozen=True)
class Completion:
    text: str
    finish_reason: FinishReason = FinishReason.STOP
    prompt_units: int = 0
    output_units: int = 0
    latency_ms: int = 0

    def __post_init__(self) -> None:
        if self.finish_reason is FinishReason.STOP and not self.text:
            raise ValueError("completion text must be non-empty when finish_reason=stop")


class SchemaId(str, Enum):
    PLAN = "PlanSchema"
    ASSESSMENT = "AssessmentSchema"
    INTENT = "IntentSchema"


@dataclass(frozen=True)
class StructuredRequest:
    bundle: PromptBundle
    schema_id: SchemaId


class Provider(Protocol):
    """Anything that can answer a PromptBundle with a Completion."""

    def complete(self, bundle: PromptBundle) -> Completion: ...
