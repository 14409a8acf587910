"""Uniform interface to completion providers (wire client + scripted)."""

from .http_client import API_KEY_ENV, HttpProvider
from .scripted import ScriptedProvider, ScriptRule, load_rules
from .structured import complete_structured, decode_assessment, decode_intent, decode_plan
from .types import (
    Completion,
    FinishReason,
    GatewayError,
    GatewayTimeout,
    PromptBundle,
    Provider,
    ProviderError,
    RetriesExhausted,
    SchemaId,
    SchemaViolation,
    StructuredRequest,
    DEFAULT_STRUCTURED_TEMPERATURE,
    DEFAULT_TEACHING_TEMPERATURE,
)

__all__ = [
    "API_KEY_ENV",
    "HttpProvider",
    "ScriptedProvider",
    "ScriptRule",
    "load_rules",
    "complete_structured",
    "decode_assessment",
    "decode_intent",
    "decode_plan",
    "Completion",
    "FinishReason",
    "GatewayError",
    "GatewayTimeout",
    "PromptBundle",
    "Provider",
    "ProviderError",
    "RetriesExhausted",
    "SchemaId",
    "SchemaViolation",
    "StructuredRequest",
    "DEFAULT_STRUCTURED_TEMPERATURE",
    "DEFAULT_TEACHING_TEMPERATURE",
]
