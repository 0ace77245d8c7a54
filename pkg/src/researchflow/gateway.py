"""Provider-agnostic chat gateway with retries, usage capture, and costing.

Two client implementations share one interface: an HTTP adapter for
OpenAI-style chat-completion providers, and a scripted mock that replays a
deterministic queue of canned responses so the whole pipeline runs offline.
The ``Gateway`` wrapper owns the append-only usage ledger and the response
truncation policy.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path
from typing import Callable, Protocol

from .errors import (AuthError, ProviderError, ScriptExhaustedError,
                     UnknownModelError)

TRUNCATION_MARKER = "\n[TRUNCATED]"


def truncate_text(text: str, budget: int) -> str:
    """Tail-first truncation: keep the head, end with an explicit marker."""
    if len(text) <= budget:
        return text
    head = max(budget - len(TRUNCATION_MARKER), 0)
    return text[:head] + TRUNCATION_MARKER


@dataclass(frozen=True)
class ChatRequest:
    model_id: str
    system: str
    user: str
    temperature: float
    max_output_tokens: int = 4096

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature out of range: {self.temperature}")
        if not self.user:
            raise ValueError("user prompt must be non-empty")


@dataclass(frozen=True)
class Usage:
    prompt_tokens: int = 0
    completion_tokens: int = 0

    def __post_init__(self):
        if self.prompt_tokens < 0 or self.completion_tokens < 0:
            raise ValueError("token counts must be non-negative")

    def __add__(self, other: "Usage") -> "Usage":
        return Usage(self.prompt_tokens + other.prompt_tokens,
                     self.completion_tokens + other.completion_tokens)


@dataclass(frozen=True)
class ChatResponse:
    text: str
    usage: Usage


@dataclass(frozen=True)
class ModelPrice:
    input_price_per_token: Decimal
    output_price_per_token: Decimal

    def __post_init__(self):
        if self.input_price_per_token < 0 or self.output_price_per_token < 0:
            raise ValueError("prices must be non-negative")


class PriceTable:
    """Per-token USD prices keyed by model id."""

    def __init__(self, prices: dict[str, ModelPrice] | None = None):
        self._prices = dict(prices or {})

    def __contains__(self, model_id: str) -> bool:
        return model_id in self._prices

    def get(self, model_id: str) -> ModelPrice:
        try:
            return self._prices[model_id]
        except KeyError:
            raise UnknownModelError(f"no prices for model {model_id!r}")

    @classmethod
    def from_file(cls, path: str | Path) -> "PriceTable":
        """Load a JSON file: {model_id: {input_price_per_token, output_price_per_token}}."""
        raw = json.loads(Path(path).read_text(), parse_float=Decimal)
        prices = {}
        for model_id, entry in raw.items():
            prices[model_id] = ModelPrice(
                input_price_per_token=_as_decimal(entry["input_price_per_token"]),
                output_price_per_token=_as_decimal(entry["output_price_per_token"]),
            )
        return cls(prices)

    @classmethod
    def default(cls) -> "PriceTable":
        per_million = lambda usd: Decimal(usd) / Decimal(1_000_000)
        return cls({
            "mock": ModelPrice(per_million("1.00"), per_million("2.00")),
            "gpt-4o": ModelPrice(per_million("2.50"), per_million("10.00")),
            "gpt-4o-mini": ModelPrice(per_million("0.15"), per_million("0.60")),
        })


def _as_decimal(value) -> Decimal:
    if isinstance(value, Decimal):
        return value
    return Decimal(str(value))


def account_cost(usage: Usage, model_id: str, prices: PriceTable) -> Decimal:
    """Exact-decimal cost of one call: tokens times per-token prices."""
    price = prices.get(model_id)
    return (Decimal(usage.prompt_tokens) * price.input_price_per_token
            + Decimal(usage.completion_tokens) * price.output_price_per_token)


class ChatClient(Protocol):
    def complete(self, request: ChatRequest) -> ChatResponse: ...


# ---------------------------------------------------------------------------
# HTTP adapter (OpenAI-style chat completions)
# ---------------------------------------------------------------------------

Transport = Callable[[str, dict, dict, float], tuple[int, dict]]


def _requests_transport(url: str, headers: dict, payload: dict,
                        timeout: float) -> tuple[int, dict]:
    import requests

    try:
        resp = requests.post(url, headers=headers, json=payload,
                             timeout=timeout)
    except requests.RequestException as exc:
        raise ConnectionError(str(exc)) from exc
    try:
        body = resp.json()
    except ValueError:
        body = {}
    return resp.status_code, body


class OpenAIStyleClient:
    """Adapter for providers speaking the OpenAI chat-completions protocol.

    Credentials come from the environment; transient failures (429, 5xx,
    connection errors) are retried with exponential backoff, while credential
    rejections raise immediately with no retry.
    """

    def __init__(self, *, api_key_env: str = "OPENAI_API_KEY",
                 base_url_env: str = "OPENAI_BASE_URL",
                 base_url: str = "https://api.openai.com/v1",
                 transport: Transport = _requests_transport,
                 max_attempts: int = 5, backoff_base: float = 1.0,
                 backoff_factor: float = 2.0, backoff_cap: float = 30.0,
                 request_timeout: float = 120.0,
                 sleep: Callable[[float], None] = time.sleep):
        self._api_key_env = api_key_env
        self._base_url = os.environ.get(base_url_env, base_url).rstrip("/")
        self._transport = transport
        self._max_attempts = max_attempts
        self._backoff_base = backoff_base
        self._backoff_factor = backoff_factor
        self._backoff_cap = backoff_cap
        self._request_timeout = request_timeout
        self._sleep = sleep
        self.attempts_made = 0

    def complete(self, request: ChatRequest) -> ChatResponse:
        api_key = os.environ.get(self._api_key_env)
        if not api_key:
            raise AuthError(f"missing credentials: set {self._api_key_env}")
        url = f"{self._base_url}/chat/completions"
        headers = {"Authorization": f"Bearer {api_key}"}
        payload = {
            "model": request.model_id,
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
            "messages": [
                {"role": "system", "content": request.system},
                {"role": "user", "content": request.user},
            ],
        }
        last_error = "no attempts made"
        for attempt in range(1, self._max_attempts + 1):
            self.attempts_made = attempt
            try:
                status, body = self._transport(url, headers, payload,
                                               self._request_timeout)
            except ConnectionError as exc:
                last_error = str(exc)
            else:
                if status in (401, 403):
                    raise AuthError(f"credentials rejected (HTTP {status})")
                if status == 200:
                    return self._parse(body)
                last_error = f"HTTP {status}"
                if not (status == 429 or status >= 500):
                    raise ProviderError(f"provider error: {last_error}")
            if attempt < self._max_attempts:
                delay = min(self._backoff_base
                            * self._backoff_factor ** (attempt - 1),
                            self._backoff_cap)
                self._sleep(delay)
        raise ProviderError(
            f"provider failed after {self._max_attempts} attempts:"
            f" {last_error}")

    @staticmethod
    def _parse(body: dict) -> ChatResponse:
        try:
            text = body["choices"][0]["message"]["content"]
            usage_raw = body.get("usage", {})
            usage = Usage(int(usage_raw.get("prompt_tokens", 0)),
                          int(usage_raw.get("completion_tokens", 0)))
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ProviderError(f"malformed provider response: {exc}")
        return ChatResponse(text=text, usage=usage)


# ---------------------------------------------------------------------------
# Scripted mock provider
# ---------------------------------------------------------------------------

class MockGateway:
    """Deterministic queue of canned responses, keyed by call order.

    Each entry is either a plain string or a mapping with ``text`` and
    optional ``prompt_tokens``/``completion_tokens``. The script is a
    first-class way to run the pipeline offline, not a test-only shim.
    """

    def __init__(self, responses: list):
        self._responses = [self._normalize(r) for r in responses]
        self._cursor = 0
        self._lock = threading.Lock()

    @staticmethod
    def _normalize(raw) -> ChatResponse:
        if isinstance(raw, str):
            return ChatResponse(text=raw, usage=Usage(100, 50))
        if isinstance(raw, ChatResponse):
            return raw
        return ChatResponse(
            text=raw["text"],
            usage=Usage(int(raw.get("prompt_tokens", 100)),
                        int(raw.get("completion_tokens", 50))),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "MockGateway":
        raw = json.loads(Path(path).read_text())
        if isinstance(raw, dict):
            raw = raw["responses"]
        return cls(raw)

    @property
    def cursor(self) -> int:
        return self._cursor

    def seek(self, position: int) -> None:
        """Skip to a call index; used when resuming a persisted run."""
        if not 0 <= position <= len(self._responses):
            raise ValueError(f"cannot seek mock script to {position}")
        self._cursor = position

    def complete(self, request: ChatRequest) -> ChatResponse:
        with self._lock:
            if self._cursor >= len(self._responses):
                raise ScriptExhaustedError(
                    f"mock script exhausted after {self._cursor} calls")
            response = self._responses[self._cursor]
            self._cursor += 1
        return response


# ---------------------------------------------------------------------------
# Ledger and the gateway wrapper
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LedgerEntry:
    index: int
    model_id: str
    usage: Usage
    cost: Decimal
    label: str = ""


class UsageLedger:
    """Append-only record of every completion call. Single-writer lock."""

    def __init__(self, prices: PriceTable):
        self._prices = prices
        self._entries: list[LedgerEntry] = []
        self._lock = threading.Lock()

    def record(self, model_id: str, usage: Usage, label: str = "") -> LedgerEntry:
        cost = (account_cost(usage, model_id, self._prices)
                if model_id in self._prices else Decimal(0))
        with self._lock:
            entry = LedgerEntry(len(self._entries), model_id, usage, cost, label)
            self._entries.append(entry)
        return entry

    @property
    def entries(self) -> list[LedgerEntry]:
        with self._lock:
            return list(self._entries)

    def total_cost(self) -> Decimal:
        with self._lock:
            return sum((e.cost for e in self._entries), Decimal(0))

    def total_usage(self) -> Usage:
        with self._lock:
            total = Usage()
            for e in self._entries:
                total = total + e.usage
            return total

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)


@dataclass
class Gateway:
    """Chat client plus ledger plus the response-truncation policy."""

    client: ChatClient
    ledger: UsageLedger
    text_budget: int = 100_000
    call_count: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def complete(self, request: ChatRequest, label: str = "") -> str:
        response = self.client.complete(request)
        self.ledger.record(request.model_id, response.usage, label=label)
        with self._lock:
            self.call_count += 1
        return truncate_text(response.text, self.text_budget)
