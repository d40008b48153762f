"""HTTP clients for the four pluggable backends, plus the factory that
swaps in mocks for ``mock://`` endpoints.

Wire contracts (JSON bodies, bearer-token auth):

* descriptor: POST {clip_id, frames: [ref], subtitles: [str], instruction}
  -> {text}
* embedding:  POST {input: [str], model} -> {vectors: [[float]], dim,
  encoder_id}
* answer / judge: POST {system, user, model, temperature} -> {text}

Transient transport failures (connection errors, timeouts, 429, 5xx) are
retried with exponential backoff and surface as BackendUnavailable; other
HTTP errors are BackendRejected and are not retried.
"""
from __future__ import annotations

import time
from typing import Any, Callable

import requests

from .descriptor import DescriptorRequest
from .errors import BackendRejected, BackendUnavailable
from .mocks import (
    KeywordAnswerBackend,
    MockDescriptorBackend,
    MockEmbeddingBackend,
    MockJudgeBackend,
)

MOCK_SCHEME = "mock://"
_RETRYABLE_STATUS = frozenset({429, 500, 502, 503, 504})


class HttpBackendBase:
    def __init__(
        self,
        endpoint: str,
        api_key: str = "",
        *,
        timeout_s: float = 60.0,
        retries: int = 3,
        backoff_s: float = 0.5,
        session: requests.Session | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.endpoint = endpoint
        self.api_key = api_key
        self.timeout_s = timeout_s
        self.retries = retries
        self.backoff_s = backoff_s
        self._session = session or requests.Session()
        self._sleep = sleep

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        return headers

    def _post(self, payload: dict[str, Any]) -> dict[str, Any]:
        last: Exception | None = None
        for attempt in range(self.retries + 1):
            try:
                resp = self._session.post(
                    self.endpoint,
                    json=payload,
                    headers=self._headers(),
                    timeout=self.timeout_s,
                )
            except requests.RequestException as exc:
                last = BackendUnavailable(f"{self.endpoint}: {exc}")
            else:
                if resp.status_code in _RETRYABLE_STATUS:
                    last = BackendUnavailable(f"{self.endpoint}: HTTP {resp.status_code}")
                elif resp.status_code >= 400:
                    raise BackendRejected(
                        f"{self.endpoint}: HTTP {resp.status_code}: {resp.text[:500]}"
                    )
                else:
                    return resp.json()
            if attempt < self.retries:
                self._sleep(self.backoff_s * 2**attempt)
        raise last  # type: ignore[misc]


class HttpDescriptorBackend(HttpBackendBase):
    def __init__(self, endpoint: str, api_key: str = "", **kwargs):
        super().__init__(endpoint, api_key, **kwargs)
        self.id = f"http-descriptor:{endpoint}"

    def describe(self, request: DescriptorRequest) -> str:
        payload = {
            "clip_id": request.clip_id,
            "frames": list(request.frame_refs),
            "subtitles": list(request.per_frame_subtitles),
            "instruction": request.instruction,
        }
        return self._post(payload).get("text", "")


class HttpEmbeddingBackend(HttpBackendBase):
    """Encoder client; dimensionality is read from responses, never assumed."""

    def __init__(self, endpoint: str, api_key: str = "", model: str = "", **kwargs):
        super().__init__(endpoint, api_key, **kwargs)
        self.model = model
        self.id = model or f"http-embedding:{endpoint}"
        self.dim = 0

    def encode(self, texts: list[str]) -> list[list[float]]:
        payload: dict[str, Any] = {"input": texts}
        if self.model:
            payload["model"] = self.model
        body = self._post(payload)
        self.dim = int(body.get("dim") or (len(body["vectors"][0]) if body["vectors"] else 0))
        if body.get("encoder_id"):
            self.id = body["encoder_id"]
        return body["vectors"]


class HttpChatBackend(HttpBackendBase):
    def __init__(
        self,
        endpoint: str,
        api_key: str = "",
        model: str = "",
        temperature: float = 0.0,
        **kwargs,
    ):
        super().__init__(endpoint, api_key, **kwargs)
        self.model = model
        self.temperature = temperature
        self.id = model or f"http-chat:{endpoint}"

    def complete(self, system: str, user: str) -> str:
        payload = {
            "system": system,
            "user": user,
            "model": self.model,
            "temperature": self.temperature,
        }
        return self._post(payload).get("text", "")


def _is_mock(endpoint: str) -> bool:
    return endpoint.startswith(MOCK_SCHEME)


def make_descriptor_backend(endpoint: str, api_key: str = "", **kwargs):
    if _is_mock(endpoint):
        return MockDescriptorBackend()
    return HttpDescriptorBackend(endpoint, api_key, **kwargs)


def make_embedding_backend(endpoint: str, api_key: str = "", model: str = "", **kwargs):
    if _is_mock(endpoint):
        return MockEmbeddingBackend()
    return HttpEmbeddingBackend(endpoint, api_key, model=model, **kwargs)


def make_answer_backend(
    endpoint: str, api_key: str = "", model: str = "", temperature: float = 0.0, **kwargs
):
    if _is_mock(endpoint):
        return KeywordAnswerBackend()
    return HttpChatBackend(endpoint, api_key, model=model, temperature=temperature, **kwargs)


def make_judge_backend(endpoint: str, api_key: str = "", model: str = "", **kwargs):
    if _is_mock(endpoint):
        return MockJudgeBackend()
    return HttpChatBackend(endpoint, api_key, model=model, **kwargs)
