"""Deterministic scripted provider for offline tests and CI replays.

A script is an ordered list of rules; the first rule whose ``match``
substrings all occur in the request text wins. ``match`` may be a single
substring, a list of substrings (all must match), or ``"*"`` to match
anything. A rule with ``"once": true`` is consumed by its first use.
Responses may be given as strings or as JSON objects (serialized before
returning, convenient for structured-output scripts).
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from .types import Completion, FinishReason, PromptBundle, ProviderError


@dataclass
class ScriptRule:
    match: tuple[str, ...]
    response: str
    once: bool = False
    used: bool = field(default=False, compare=False)

    def matches(self, haystack: str) -> bool:
        if self.once and self.used:
            return False
        return all(m == "*" or m in haystack for m in self.match)


def _parse_rule(raw: dict) -> ScriptRule:
    match = raw.get("match", "*")
    if isinstance(match, str):
        match = (match,)
    else:
        match = tuple(match)
    response = raw["response"]
    if not isinstance(response, str):
        response = json.dumps(response)
    return ScriptRule(match=match, response=response, once=bool(raw.get("once", False)))


def load_rules(path: str | Path) -> list[ScriptRule]:
    """Load rules from a JSON file, or from every ``*.json`` under a directory
    in sorted filename order (useful for splitting a dialogue into topical
    script files)."""
    p = Path(path)
    if p.is_dir():
        rules: list[ScriptRule] = []
        for f in sorted(p.glob("*.json")):
            rules.extend(load_rules(f))
        if not rules:
            raise ProviderError(f"no script rules found under {p}")
        return rules
    raw = json.loads(p.read_text(encoding="utf-8"))
    if isinstance(raw, dict):
        raw = raw.get("rules", [])
    return [_parse_rule(r) for r in raw]


class ScriptedProvider:
    """Provider that answers from a fixed rule list. Thread-safe: once-only
    rule consumption is serialized."""

    def __init__(self, rules: list[ScriptRule]) -> None:
        self._rules = rules
        self._lock = threading.Lock()

    @classmethod
    def from_path(cls, path: str | Path) -> ScriptedProvider:
        return cls(load_rules(path))

    def complete(self, bundle: PromptBundle) -> Completion:
        start = time.monotonic()
        haystack = bundle.flat_text()
        with self._lock:
            for rule in self._rules:
                if rule.matches(haystack):
                    if rule.once:
                        rule.used = True
                    latency = int((time.monotonic() - start) * 1000)
                    return Completion(
                        text=rule.response,
                        finish_reason=FinishReason.STOP,
                        prompt_units=len(haystack),
                        output_units=len(rule.response),
                        latency_ms=latency,
                    )
        raise ProviderError(
            "no scripted rule matched request",
            body_excerpt=haystack[:200],
        )
