"""Chat-completion client: endpoint config, transports, parsing, accounting.

All network traffic is an HTTP POST of {model, messages, temperature} to the
endpoint's chat-completion path, temperature fixed to 0. Tests and dry runs
substitute :class:`MockTransport`, which is keyed by prompt-content patterns
and records every request it sees.
"""

from __future__ import annotations

import asyncio
import logging
import os
import re
from dataclasses import dataclass
from importlib import resources
from typing import Awaitable, Callable, Protocol, Sequence

import httpx

logger = logging.getLogger(__name__)

DEFAULT_MAX_IN_FLIGHT = 40
DEFAULT_MAX_RETRIES = 2
DEFAULT_DOCUMENT_CHAR_BUDGET = 24_000


class TransportError(RuntimeError):
    """A single request failed (network, HTTP status, malformed body)."""


class QueryError(RuntimeError):
    """A query kept failing at the transport level after all retries."""


class ResponseParseError(ValueError):
    """The response text does not follow the expected answer format."""


class ParseExhausted(Exception):
    """Every retry produced a response, but none of them parsed."""

    def __init__(self, prompt: str, last_response: str):
        self.prompt = prompt
        self.last_response = last_response
        super().__init__(f"unparseable after retries: {last_response[:120]!r}")


@dataclass
class LlmEndpoint:
    base_url: str
    model_name: str
    auth_token: str = ""
    max_in_flight: int = DEFAULT_MAX_IN_FLIGHT
    timeout: float = 120.0
    max_retries: int = DEFAULT_MAX_RETRIES
    max_document_chars: int = DEFAULT_DOCUMENT_CHAR_BUDGET
    max_prompt_chars: int = 100_000

    def __post_init__(self) -> None:
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")

    @classmethod
    def from_env(cls, **overrides) -> "LlmEndpoint":
        """Read LLM_BASE_URL / LLM_API_KEY; keyword overrides win."""
        settings: dict = {
            "base_url": os.environ.get("LLM_BASE_URL", ""),
            "auth_token": os.environ.get("LLM_API_KEY", ""),
            "model_name": overrides.pop("model_name", "default"),
        }
        settings.update(overrides)
        return cls(**settings)


@dataclass
class QueryLog:
    """Per-document accounting of one classification run."""

    queries_issued: int = 0
    max_observed_in_flight: int = 0
    pruned_unit_count: int = 0
    duration_seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "queries_issued": self.queries_issued,
            "max_observed_in_flight": self.max_observed_in_flight,
            "pruned_unit_count": self.pruned_unit_count,
            "duration_seconds": self.duration_seconds,
        }


class Transport(Protocol):
    async def send(self, prompt: str) -> str: ...


class HttpChatTransport:
    """POSTs one user message per query and returns the generated text."""

    def __init__(self, endpoint: LlmEndpoint):
        if not endpoint.base_url:
            raise ValueError("endpoint has no base_url (set LLM_BASE_URL or --llm-url)")
        self.endpoint = endpoint
        self._client: httpx.AsyncClient | None = None

    def _ensure_client(self) -> httpx.AsyncClient:
        if self._client is None:
            headers = {}
            if self.endpoint.auth_token:
                headers["Authorization"] = f"Bearer {self.endpoint.auth_token}"
            self._client = httpx.AsyncClient(
                base_url=self.endpoint.base_url.rstrip("/"),
                headers=headers,
                timeout=self.endpoint.timeout,
            )
        return self._client

    async def send(self, prompt: str) -> str:
        body = {
            "model": self.endpoint.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        }
        try:
            response = await self._ensure_client().post("/chat/completions", json=body)
            response.raise_for_status()
            payload = response.json()
            return payload["choices"][0]["message"]["content"]
        except httpx.HTTPError as exc:
            raise TransportError(str(exc)) from exc
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise TransportError(f"malformed completion payload: {exc}") from exc

    async def aclose(self) -> None:
        if self._client is not None:
            await self._client.aclose()
            self._client = None


Responder = str | Exception | Callable[[str], str]


class MockTransport:
    """In-process endpoint substitute keyed by prompt-content patterns.

    ``rules`` is an ordered list of (substring, responder) pairs; the first
    rule whose substring occurs in the prompt wins. A responder may be a
    fixed string, a callable on the prompt, or an exception to raise.
    ``latency`` injects an await per request so concurrency is observable.
    """

    def __init__(
        self,
        rules: Sequence[tuple[str, Responder]] = (),
        default: Responder | None = None,
        latency: float = 0.0,
    ):
        self.rules = list(rules)
        self.default = default
        self.latency = latency
        self.prompts: list[str] = []
        self.calls = 0
        self.in_flight = 0
        self.max_in_flight_seen = 0

    async def send(self, prompt: str) -> str:
        self.calls += 1
        self.prompts.append(prompt)
        self.in_flight += 1
        self.max_in_flight_seen = max(self.max_in_flight_seen, self.in_flight)
        try:
            if self.latency:
                await asyncio.sleep(self.latency)
            else:
                await asyncio.sleep(0)
            return self._respond(prompt)
        finally:
            self.in_flight -= 1

    def _respond(self, prompt: str) -> str:
        for pattern, responder in self.rules:
            if pattern in prompt:
                return self._apply(responder, prompt)
        if self.default is None:
            raise AssertionError(f"no scripted response matches prompt: {prompt[:120]!r}")
        return self._apply(self.default, prompt)

    @staticmethod
    def _apply(responder: Responder, prompt: str) -> str:
        if isinstance(responder, Exception):
            raise responder
        if callable(responder):
            return responder(prompt)
        return responder


class BoundedClient:
    """Retrying query issuer with a concurrency cap and in-flight accounting.

    Create one per classification run, inside the running event loop.
    """

    def __init__(self, endpoint: LlmEndpoint, transport: Transport | None = None):
        self.endpoint = endpoint
        self.transport = transport if transport is not None else HttpChatTransport(endpoint)
        self._semaphore = asyncio.Semaphore(endpoint.max_in_flight)
        self.queries_issued = 0
        self._in_flight = 0
        self.max_observed_in_flight = 0

    async def _send(self, prompt: str) -> str:
        async with self._semaphore:
            self.queries_issued += 1
            self._in_flight += 1
            self.max_observed_in_flight = max(self.max_observed_in_flight, self._in_flight)
            try:
                return await self.transport.send(prompt)
            finally:
                self._in_flight -= 1

    async def query(self, prompt: str, parser: Callable[[str], object]):
        """Send with retries; identical prompt every attempt.

        Raises :class:`QueryError` when the transport never recovered and
        :class:`ParseExhausted` when responses arrived but never parsed.
        """
        last_transport_error: TransportError | None = None
        last_response: str | None = None
        for _attempt in range(self.endpoint.max_retries + 1):
            try:
                text = await self._send(prompt)
            except TransportError as exc:
                last_transport_error = exc
                continue
            last_response = text
            try:
                return parser(text)
            except ResponseParseError:
                continue
        if last_response is None:
            raise QueryError(f"transport failed after retries: {last_transport_error}")
        raise ParseExhausted(prompt, last_response)


async def gather_all(tasks: Sequence[Awaitable]) -> list:
    """Gather preserving order; the client's semaphore bounds concurrency."""
    return list(await asyncio.gather(*tasks))


# ---------------------------------------------------------------------------
# Response parsing


_YES_NO_RE = re.compile(r"\s*[\"'(]*\b(yes|no)\b", re.IGNORECASE)
_NUMBERED_LINE_RE = re.compile(r"\s*(\d+)\s*[).:\-]\s*(-?\d+)\s*$")
_INT_RE = re.compile(r"-?\d+")


def parse_yes_no(text: str) -> bool:
    match = _YES_NO_RE.match(text)
    if not match:
        raise ResponseParseError(f"expected yes/no, got {text[:80]!r}")
    return match.group(1).lower() == "yes"


def parse_scores(text: str, arity: int) -> list[int]:
    """Positional 0..5 scores: numbered lines first, bare integers as fallback."""
    if arity == 1:
        match = _INT_RE.search(text)
        if not match:
            raise ResponseParseError(f"no score in {text[:80]!r}")
        return [_validate_score(int(match.group()))]
    by_position: dict[int, int] = {}
    for line in text.splitlines():
        match = _NUMBERED_LINE_RE.match(line)
        if match:
            by_position[int(match.group(1))] = int(match.group(2))
    if set(by_position) == set(range(1, arity + 1)):
        return [_validate_score(by_position[i]) for i in range(1, arity + 1)]
    found = [int(m.group()) for m in _INT_RE.finditer(text)]
    if len(found) == arity:
        return [_validate_score(value) for value in found]
    raise ResponseParseError(f"expected {arity} scores, got {text[:120]!r}")


def _validate_score(value: int) -> int:
    if not 0 <= value <= 5:
        raise ResponseParseError(f"score {value} outside 0..5")
    return value


# ---------------------------------------------------------------------------
# Prompt templates


_PLACEHOLDER_RE = re.compile(
    r"\{(document|category_text|ka_title|ku_title|summary|numbered_category_list|guideline_json)\}"
)


def load_template(name: str) -> str:
    return resources.files("curralign.prompts").joinpath(f"{name}.txt").read_text("utf-8")


def render_template(template: str, **values: str) -> str:
    """Fill named placeholders; document text with braces stays intact."""

    def replace(match: re.Match) -> str:
        key = match.group(1)
        if key not in values:
            raise KeyError(f"template needs {{{key}}} but no value was given")
        return values[key]

    return _PLACEHOLDER_RE.sub(replace, template)


def truncate_document(text: str, budget: int) -> str:
    if len(text) <= budget:
        return text
    logger.warning("document text truncated from %d to %d characters", len(text), budget)
    return text[:budget]
