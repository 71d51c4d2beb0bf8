"""Token-embedding providers for semantic similarity.

Protocol (shared by HTTP and subprocess transports): the request is
``{"texts": [string, ...]}`` and the response is
``{"results": [{"tokens": [...], "vectors": [[...], ...]}, ...]}`` with one
result per text, in order. Vectors need not be unit-norm; the scorer
normalizes. The mock provider derives vectors from SHA-256 digests so runs
are byte-reproducible across platforms.
"""

from __future__ import annotations

import hashlib
import json
import struct
import subprocess

import requests

from .consistency import TokenEmbeddingSequence, normalize_tokens
from .errors import ConfigurationError, DomainError, TransportError

MOCK_DIMENSION = 256
MOCK_MODEL_PREFIX = "mock-sha256"


class MockEmbeddingProvider:
    """Deterministic hash-seeded unit vectors, for tests and replay runs.

    Every distinct token maps to a fixed pseudo-random direction, so equal
    texts score exactly 1.0 while disjoint vocabularies score near zero
    (spurious max cosines concentrate around sqrt(2*ln(n)/dim)).
    """

    def __init__(self, seed: int = 0, dimension: int = MOCK_DIMENSION):
        if dimension < 1:
            raise DomainError("mock embedding dimension must be >= 1")
        self.seed = seed
        self.dimension = dimension

    @property
    def model_id(self) -> str:
        return f"{MOCK_MODEL_PREFIX}-{self.dimension}d-seed{self.seed}"

    def _vector(self, token: str) -> tuple[float, ...]:
        values: list[float] = []
        counter = 0
        while len(values) < self.dimension:
            digest = hashlib.sha256(
                f"{self.seed}\x1f{token}\x1f{counter}".encode("utf-8")
            ).digest()
            for (u,) in struct.iter_unpack(">Q", digest):
                values.append(u / 2**63 - 1.0)  # uniform in [-1, 1)
                if len(values) == self.dimension:
                    break
            counter += 1
        return tuple(values)

    def embed(self, texts: list[str]) -> list[TokenEmbeddingSequence]:
        out = []
        for text in texts:
            tokens = tuple(normalize_tokens(text))
            vectors = tuple(self._vector(tok) for tok in tokens)
            out.append(TokenEmbeddingSequence(tokens=tokens, vectors=vectors))
        return out


def _parse_response(payload: dict, n_texts: int) -> list[TokenEmbeddingSequence]:
    results = payload.get("results")
    if not isinstance(results, list) or len(results) != n_texts:
        raise DomainError(
            f"embedding provider returned {0 if not isinstance(results, list) else len(results)} "
            f"results for {n_texts} texts"
        )
    out = []
    for item in results:
        tokens = tuple(item.get("tokens", ()))
        vectors = tuple(tuple(float(x) for x in vec) for vec in item.get("vectors", ()))
        out.append(TokenEmbeddingSequence(tokens=tokens, vectors=vectors))
    return out


class HttpEmbeddingProvider:
    """POSTs the protocol request as JSON to a provider endpoint."""

    def __init__(self, endpoint: str, model_id: str = "", timeout: float = 120.0):
        self.endpoint = endpoint
        self.model_id = model_id or endpoint
        self.timeout = timeout

    def embed(self, texts: list[str]) -> list[TokenEmbeddingSequence]:
        try:
            resp = requests.post(self.endpoint, json={"texts": texts}, timeout=self.timeout)
        except requests.RequestException as exc:
            raise TransportError(f"embedding provider unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise TransportError(
                f"embedding provider returned HTTP {resp.status_code}: {resp.text[:200]}"
            )
        return _parse_response(resp.json(), len(texts))


class SubprocessEmbeddingProvider:
    """Talks line-delimited JSON to a local subprocess on stdin/stdout."""

    def __init__(self, command: list[str], model_id: str = ""):
        self.command = list(command)
        self.model_id = model_id or " ".join(command)
        self._proc: subprocess.Popen | None = None

    def _ensure_process(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            try:
                self._proc = subprocess.Popen(
                    self.command,
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    text=True,
                    encoding="utf-8",
                )
            except OSError as exc:
                raise TransportError(f"cannot start embedding subprocess: {exc}") from exc
        return self._proc

    def embed(self, texts: list[str]) -> list[TokenEmbeddingSequence]:
        proc = self._ensure_process()
        request = json.dumps({"texts": texts}, ensure_ascii=False)
        try:
            assert proc.stdin is not None and proc.stdout is not None
            proc.stdin.write(request + "\n")
            proc.stdin.flush()
            line = proc.stdout.readline()
        except (OSError, ValueError, AssertionError) as exc:
            raise TransportError(f"embedding subprocess I/O failed: {exc}") from exc
        if not line:
            raise TransportError("embedding subprocess closed its output stream")
        try:
            payload = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TransportError(f"embedding subprocess sent malformed JSON: {exc}") from exc
        return _parse_response(payload, len(texts))

    def close(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            self._proc.stdin.close()
            self._proc.wait(timeout=10)
        self._proc = None


def make_provider(spec: str, seed: int = 0):
    """Build a provider from a CLI-style spec string.

    ``mock`` (seeded), an ``http(s)://`` endpoint, or ``cmd:<argv...>`` for
    a subprocess provider.
    """
    if spec == "mock":
        return MockEmbeddingProvider(seed=seed)
    if spec.startswith(("http://", "https://")):
        return HttpEmbeddingProvider(spec)
    if spec.startswith("cmd:"):
        return SubprocessEmbeddingProvider(spec[len("cmd:"):].split())
    raise ConfigurationError(f"unknown embedding provider spec {spec!r}")
