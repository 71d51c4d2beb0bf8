"""Uniform chat-completion transport with record/replay cassettes.

One client speaks to the three provider API shapes (OpenAI-, Anthropic-,
and Mistral-compatible). Every exchange carries its verbatim response and
token usage. A cassette is a line-delimited JSON log keyed by a stable
request fingerprint; replay mode serves responses from it with zero
network traffic, which is what makes the whole pipeline reproducible.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path

import requests

from .errors import (
    CassetteMissError,
    ConfigurationError,
    ParseError,
    SchemaError,
    TransportError,
)

PROVIDERS = ("openai-compatible", "anthropic-compatible", "mistral-compatible")

_PROVIDER_FAMILY = {
    "openai-compatible": "gpt",
    "anthropic-compatible": "claude",
    "mistral-compatible": "mixtral",
}

_KEY_ENV = {
    "openai-compatible": "RELEVEL_OPENAI_KEY",
    "anthropic-compatible": "RELEVEL_ANTHROPIC_KEY",
    "mistral-compatible": "RELEVEL_MISTRAL_KEY",
}

_BASE_URL_ENV = {
    "openai-compatible": ("RELEVEL_OPENAI_BASE_URL", "https://api.openai.com"),
    "anthropic-compatible": ("RELEVEL_ANTHROPIC_BASE_URL", "https://api.anthropic.com"),
    "mistral-compatible": ("RELEVEL_MISTRAL_BASE_URL", "https://api.mistral.ai"),
}

MODES = ("live", "record", "replay")


@dataclass(frozen=True)
class ModelSpec:
    provider: str
    model_id: str
    temperature: float | None = None  # None = provider default, recorded as null
    max_tokens: int = 2048

    def __post_init__(self):
        if self.provider not in PROVIDERS:
            raise ConfigurationError(f"unknown provider {self.provider!r}")
        if not self.model_id:
            raise ConfigurationError("model_id must be non-empty")
        if self.temperature is not None and self.temperature < 0:
            raise ConfigurationError("temperature must be >= 0")

    @property
    def family(self) -> str:
        return _PROVIDER_FAMILY[self.provider]


@dataclass(frozen=True)
class Usage:
    prompt_tokens: int
    completion_tokens: int

    def __post_init__(self):
        if self.prompt_tokens < 0 or self.completion_tokens < 0:
            raise SchemaError("usage token counts must be nonnegative")

    @property
    def total_tokens(self) -> int:
        return self.prompt_tokens + self.completion_tokens


@dataclass(frozen=True)
class ChatExchange:
    system: str
    user_turns: tuple[str, ...]
    response: str
    usage: Usage
    latency_ms: float
    model: ModelSpec


def fingerprint(spec: ModelSpec, system: str, user_turns) -> str:
    """Stable hash of the request identity, identical across runs and platforms."""
    payload = json.dumps(
        {
            "provider": spec.provider,
            "model_id": spec.model_id,
            "system": system,
            "user_turns": list(user_turns),
            "temperature": spec.temperature,
        },
        sort_keys=True,
        ensure_ascii=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _exchange_to_dict(exchange: ChatExchange) -> dict:
    return {
        "system": exchange.system,
        "user_turns": list(exchange.user_turns),
        "response": exchange.response,
        "usage": {
            "prompt_tokens": exchange.usage.prompt_tokens,
            "completion_tokens": exchange.usage.completion_tokens,
        },
        "latency_ms": exchange.latency_ms,
        "model": {
            "provider": exchange.model.provider,
            "model_id": exchange.model.model_id,
            "temperature": exchange.model.temperature,
            "max_tokens": exchange.model.max_tokens,
        },
    }


def _exchange_from_dict(doc: dict) -> ChatExchange:
    model = doc["model"]
    return ChatExchange(
        system=doc["system"],
        user_turns=tuple(doc["user_turns"]),
        response=doc["response"],
        usage=Usage(
            prompt_tokens=int(doc["usage"]["prompt_tokens"]),
            completion_tokens=int(doc["usage"]["completion_tokens"]),
        ),
        latency_ms=float(doc["latency_ms"]),
        model=ModelSpec(
            provider=model["provider"],
            model_id=model["model_id"],
            temperature=model["temperature"],
            max_tokens=int(model["max_tokens"]),
        ),
    )


class Cassette:
    """Append-only request/response log, one JSON entry per line."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, fp: str, exchange: ChatExchange) -> None:
        line = json.dumps(
            {"fingerprint": fp, "exchange": _exchange_to_dict(exchange)},
            ensure_ascii=False,
            separators=(",", ":"),
        )
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as handle:
                handle.write(line + "\n")

    def load_index(self) -> dict[str, ChatExchange]:
        """Parse the whole cassette for replay. Duplicate fingerprints are
        a corrupt-cassette condition in replay mode."""
        index: dict[str, ChatExchange] = {}
        if not self.path.exists():
            raise ConfigurationError(f"cassette file {self.path} does not exist")
        with self.path.open(encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    doc = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"{self.path}:{lineno}: malformed cassette line: {exc.msg}") from exc
                fp = doc.get("fingerprint")
                if not fp:
                    raise SchemaError(f"{self.path}:{lineno}: cassette entry has no fingerprint")
                if fp in index:
                    raise SchemaError(f"{self.path}:{lineno}: duplicate fingerprint {fp}")
                index[fp] = _exchange_from_dict(doc["exchange"])
        return index


class TokenBucket:
    """Thread-safe token-bucket rate limiter; ``rate_per_s <= 0`` disables it."""

    def __init__(self, rate_per_s: float, burst: int = 2, sleep=time.sleep):
        self.rate = rate_per_s
        self.capacity = max(burst, 1)
        self.tokens = float(self.capacity)
        self.updated = time.monotonic()
        self._sleep = sleep
        self._lock = threading.Lock()

    def acquire(self) -> None:
        if self.rate <= 0:
            return
        while True:
            with self._lock:
                now = time.monotonic()
                self.tokens = min(self.capacity, self.tokens + (now - self.updated) * self.rate)
                self.updated = now
                if self.tokens >= 1.0:
                    self.tokens -= 1.0
                    return
                wait = (1.0 - self.tokens) / self.rate
            self._sleep(wait)


class HttpTransport:
    """Provider-API adapter; credentials come from RELEVEL_* env vars."""

    def __init__(self, timeout: float = 120.0):
        self.timeout = timeout

    def _credentials(self, provider: str) -> str:
        env = _KEY_ENV[provider]
        key = os.environ.get(env)
        if not key:
            raise ConfigurationError(f"no credentials: set {env}")
        return key

    def _base_url(self, provider: str) -> str:
        env, default = _BASE_URL_ENV[provider]
        return os.environ.get(env, default).rstrip("/")

    def send(self, spec: ModelSpec, system: str, user_turns) -> tuple[str, Usage, int]:
        """One HTTP round trip. Returns (response_text, usage, http_status).

        Raises TransportError for network failures; 429/5xx surface via the
        returned status so the caller can retry.
        """
        key = self._credentials(spec.provider)
        base = self._base_url(spec.provider)
        if spec.provider == "anthropic-compatible":
            url = f"{base}/v1/messages"
            headers = {"x-api-key": key, "anthropic-version": "2023-06-01"}
            body: dict = {
                "model": spec.model_id,
                "system": system,
                "messages": [{"role": "user", "content": turn} for turn in user_turns],
                "max_tokens": spec.max_tokens,
            }
        else:
            url = f"{base}/v1/chat/completions"
            headers = {"Authorization": f"Bearer {key}"}
            messages = [{"role": "system", "content": system}]
            messages += [{"role": "user", "content": turn} for turn in user_turns]
            body = {"model": spec.model_id, "messages": messages, "max_tokens": spec.max_tokens}
        if spec.temperature is not None:
            body["temperature"] = spec.temperature
        try:
            resp = requests.post(url, json=body, headers=headers, timeout=self.timeout)
        except requests.RequestException as exc:
            raise TransportError(f"{spec.provider} request failed: {exc}") from exc
        if resp.status_code != 200:
            return resp.text, Usage(0, 0), resp.status_code
        doc = resp.json()
        if spec.provider == "anthropic-compatible":
            text = "".join(part.get("text", "") for part in doc.get("content", []))
            usage = Usage(
                prompt_tokens=int(doc.get("usage", {}).get("input_tokens", 0)),
                completion_tokens=int(doc.get("usage", {}).get("output_tokens", 0)),
            )
        else:
            text = doc["choices"][0]["message"]["content"]
            usage = Usage(
                prompt_tokens=int(doc.get("usage", {}).get("prompt_tokens", 0)),
                completion_tokens=int(doc.get("usage", {}).get("completion_tokens", 0)),
            )
        return text, usage, 200


class ChatClient:
    """Mode-aware completion client.

    live: HTTP call. record: HTTP call plus cassette append. replay:
    cassette lookup only, no network object is ever touched.
    """

    def __init__(
        self,
        mode: str,
        cassette_path: str | Path | None = None,
        transport: HttpTransport | None = None,
        rate_per_s: float = 2.0,
        burst: int = 2,
        max_retries: int = 3,
        backoff_base: float = 0.5,
        sleep=time.sleep,
    ):
        if mode not in MODES:
            raise ConfigurationError(f"unknown mode {mode!r}")
        if mode == "replay" and cassette_path is None:
            raise ConfigurationError("replay mode requires a cassette path")
        if mode == "record" and cassette_path is None:
            raise ConfigurationError("record mode requires a cassette path")
        self.mode = mode
        self._sleep = sleep
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self._replay_index: dict[str, ChatExchange] | None = None
        self._cassette: Cassette | None = None
        if mode == "replay":
            self._replay_index = Cassette(cassette_path).load_index()
        else:
            if cassette_path is not None:
                self._cassette = Cassette(cassette_path)
            self.transport = transport or HttpTransport()
        self._buckets: dict[str, TokenBucket] = {}
        self._buckets_lock = threading.Lock()
        self._rate = rate_per_s
        self._burst = burst

    def _bucket(self, provider: str) -> TokenBucket:
        with self._buckets_lock:
            if provider not in self._buckets:
                self._buckets[provider] = TokenBucket(self._rate, self._burst, sleep=self._sleep)
            return self._buckets[provider]

    def _call_with_retries(self, spec: ModelSpec, system: str, user_turns) -> ChatExchange:
        attempt = 0
        while True:
            self._bucket(spec.provider).acquire()
            started = time.monotonic()
            try:
                text, usage, status = self.transport.send(spec, system, user_turns)
            except TransportError:
                if attempt >= self.max_retries:
                    raise
                self._sleep(self.backoff_base * 2**attempt)
                attempt += 1
                continue
            latency_ms = (time.monotonic() - started) * 1000.0
            if status == 200:
                return ChatExchange(
                    system=system,
                    user_turns=tuple(user_turns),
                    response=text,
                    usage=usage,
                    latency_ms=latency_ms,
                    model=spec,
                )
            if status == 429 or status >= 500:
                if attempt >= self.max_retries:
                    raise TransportError(
                        f"{spec.provider} returned HTTP {status} after {attempt + 1} attempts"
                    )
                self._sleep(self.backoff_base * 2**attempt)
                attempt += 1
                continue
            raise TransportError(f"{spec.provider} returned HTTP {status}: {text[:200]}")

    def complete(self, spec: ModelSpec, system: str, user_turns) -> ChatExchange:
        user_turns = tuple(user_turns)
        fp = fingerprint(spec, system, user_turns)
        if self.mode == "replay":
            assert self._replay_index is not None
            try:
                return self._replay_index[fp]
            except KeyError:
                raise CassetteMissError(fp) from None
        exchange = self._call_with_retries(spec, system, user_turns)
        if self.mode == "record":
            assert self._cassette is not None
            self._cassette.append(fp, exchange)
        return exchange


def load_price_table(path: str | Path | None = None) -> dict:
    """Price table JSON: {model_id: {input_per_1k, output_per_1k}}."""
    if path is None:
        from importlib.resources import files

        raw = (files("relevel.data") / "price_table.json").read_text(encoding="utf-8")
    else:
        raw = Path(path).read_text(encoding="utf-8")
    return json.loads(raw)


def estimate_cost(exchanges, price_table: dict) -> float:
    """Total currency cost of the exchanges under the given price table."""
    total = 0.0
    for exchange in exchanges:
        model_id = exchange.model.model_id
        try:
            prices = price_table[model_id]
        except KeyError:
            raise ConfigurationError(f"price table has no entry for model {model_id!r}") from None
        total += exchange.usage.prompt_tokens / 1000.0 * prices["input_per_1k"]
        total += exchange.usage.completion_tokens / 1000.0 * prices["output_per_1k"]
    return total
