"""Wire client for OpenAI-compatible chat-completion and embedding endpoints.

One deadline covers the whole call including retries: transient failures
(connect errors, 429, 5xx) are retried with exponential backoff while
budget remains; anything else raises immediately.
"""

from __future__ import annotations

import os
import time
from typing import Sequence

import httpx

from .types import (
    Completion,
    FinishReason,
    GatewayTimeout,
    PromptBundle,
    ProviderError,
    RetriesExhausted,
)

API_KEY_ENV = "TUTOR_LLM_API_KEY"
_RETRIABLE_STATUS = {429, 500, 502, 503, 504}


class HttpProvider:
    def __init__(
        self,
        endpoint: str,
        model: str,
        deadline_ms: int = 30_000,
        max_retries: int = 3,
        backoff_base_s: float = 0.25,
        transport: httpx.BaseTransport | None = None,
    ) -> None:
        self.endpoint = endpoint.rstrip("/")
        self.model = model
        self.deadline_ms = deadline_ms
        self.max_retries = max_retries
        self.backoff_base_s = backoff_base_s
        self._transport = transport

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(API_KEY_ENV, "")
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def _post(self, path: str, payload: dict) -> dict:
        start = time.monotonic()
        deadline = start + self.deadline_ms / 1000.0
        attempt = 0
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise GatewayTimeout(
                    f"deadline of {self.deadline_ms} ms exceeded calling {path}"
                )
            try:
                with httpx.Client(
                    timeout=remaining, transport=self._transport
                ) as client:
                    resp = client.post(
                        self.endpoint + path, json=payload, headers=self._headers()
                    )
            except httpx.TimeoutException as exc:
                raise GatewayTimeout(f"timed out calling {path}: {exc}") from exc
            except httpx.HTTPError as exc:
                attempt += 1
                if attempt > self.max_retries:
                    raise RetriesExhausted(
                        f"{attempt} attempts failed calling {path}: {exc}"
                    ) from exc
                self._sleep_backoff(attempt, deadline)
                continue

            if resp.status_code in _RETRIABLE_STATUS:
                attempt += 1
                if attempt > self.max_retries:
                    raise RetriesExhausted(
                        f"{attempt} attempts failed calling {path}: status {resp.status_code}"
                    )
                self._sleep_backoff(attempt, deadline)
                continue
            if resp.status_code != 200:
                raise ProviderError(
                    f"provider returned status {resp.status_code} for {path}",
                    status=resp.status_code,
                    body_excerpt=resp.text[:500],
                )
            try:
                return resp.json()
            except ValueError as exc:
                raise ProviderError(
                    f"provider returned non-JSON body for {path}",
                    status=resp.status_code,
                    body_excerpt=resp.text[:500],
                ) from exc

    def _sleep_backoff(self, attempt: int, deadline: float) -> None:
        delay = self.backoff_base_s * (2 ** (attempt - 1))
        remaining = deadline - time.monotonic()
        if remaining <= 0:
            raise GatewayTimeout(f"deadline of {self.deadline_ms} ms exceeded during backoff")
        time.sleep(min(delay, remaining))

    def complete(self, bundle: PromptBundle) -> Completion:
        start = time.monotonic()
        messages = [{"role": "system", "content": bundle.system_text}]
        messages += [{"role": role, "content": text} for role, text in bundle.messages]
        data = self._post(
            "/v1/chat/completions",
            {
                "model": self.model,
                "messages": messages,
                "temperature": bundle.temperature,
                "max_tokens": bundle.max_tokens,
            },
        )
        latency = int((time.monotonic() - start) * 1000)
        try:
            choice = data["choices"][0]
            text = choice["message"]["content"] or ""
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(
                "provider response missing choices[0].message.content",
                body_excerpt=str(data)[:500],
            ) from exc
        finish_raw = choice.get("finish_reason", "stop")
        finish = {
            "stop": FinishReason.STOP,
            "length": FinishReason.LENGTH,
        }.get(finish_raw, FinishReason.PROVIDER_ERROR)
        usage = data.get("usage") or {}
        if finish is FinishReason.STOP and not text:
            finish = FinishReason.PROVIDER_ERROR
        return Completion(
            text=text,
            finish_reason=finish,
            prompt_units=int(usage.get("prompt_tokens", 0)),
            output_units=int(usage.get("completion_tokens", 0)),
            latency_ms=latency,
        )

    def embed(self, texts: Sequence[str], model: str | None = None) -> list[list[float]]:
        data = self._post(
            "/v1/embeddings",
            {"model": model or self.model, "input": list(texts)},
        )
        try:
            rows = sorted(data["data"], key=lambda r: r.get("index", 0))
            return [list(map(float, row["embedding"])) for row in rows]
        except (KeyError, TypeError) as exc:
            raise ProviderError(
                "embedding response missing data[].embedding",
                body_excerpt=str(data)[:500],
            ) from exc
