import json
import sys
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from relevel.embeddings import (
    HttpEmbeddingProvider,
    MockEmbeddingProvider,
    SubprocessEmbeddingProvider,
    make_provider,
)
from relevel.errors import ConfigurationError, TransportError

IDENTITY_PROVIDER_SCRIPT = r"""
import json, sys
for line in sys.stdin:
    req = json.loads(line)
    results = []
    for text in req["texts"]:
        tokens = text.split()
        vocab = {t: i for i, t in enumerate(sorted(set(tokens)))}
        dim = max(len(vocab), 1)
        vectors = [[1.0 if i == vocab[t] else 0.0 for i in range(dim)] for t in tokens]
        results.append({"tokens": tokens, "vectors": vectors})
    sys.stdout.write(json.dumps({"results": results}) + "\n")
    sys.stdout.flush()
"""


class TestMockProvider:
    def test_same_seed_same_vectors(self):
        a = MockEmbeddingProvider(seed=7).embed(["hippo river"])[0]
        b = MockEmbeddingProvider(seed=7).embed(["hippo river"])[0]
        assert a == b

    def test_different_seed_different_vectors(self):
        a = MockEmbeddingProvider(seed=7).embed(["hippo"])[0]
        b = MockEmbeddingProvider(seed=8).embed(["hippo"])[0]
        assert a.vectors != b.vectors

    def test_tokens_are_normalized_words(self):
        seq = MockEmbeddingProvider().embed(['The "Hippo," plan.'])[0]
        assert seq.tokens == ("the", "hippo", "plan")

    def test_model_id_carries_seed(self):
        assert "seed7" in MockEmbeddingProvider(seed=7).model_id


class _Handler(BaseHTTPRequestHandler):
    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        results = [
            {"tokens": text.split() or ["empty"], "vectors": [[1.0, 0.0]] * max(len(text.split()), 1)}
            for text in body["texts"]
        ]
        payload = json.dumps({"results": results}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture()
def http_endpoint():
    server = HTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}/embed"
    server.shutdown()


class TestHttpProvider:
    def test_round_trip(self, http_endpoint):
        provider = HttpEmbeddingProvider(http_endpoint)
        seqs = provider.embed(["one two", "three"])
        assert seqs[0].tokens == ("one", "two")
        assert seqs[1].tokens == ("three",)

    def test_unreachable_endpoint_is_transport_error(self):
        provider = HttpEmbeddingProvider("http://127.0.0.1:9/none", timeout=0.2)
        with pytest.raises(TransportError):
            provider.embed(["x"])


class TestSubprocessProvider:
    def test_round_trip(self):
        provider = SubprocessEmbeddingProvider([sys.executable, "-c", IDENTITY_PROVIDER_SCRIPT])
        try:
            seqs = provider.embed(["hippo river hippo"])
            assert seqs[0].tokens == ("hippo", "river", "hippo")
            assert seqs[0].vectors[0] == seqs[0].vectors[2]
        finally:
            provider.close()

    def test_dead_process_is_transport_error(self):
        provider = SubprocessEmbeddingProvider([sys.executable, "-c", "pass"])
        with pytest.raises(TransportError):
            provider.embed(["x"])
        provider.close()


class TestMakeProvider:
    def test_mock_spec(self):
        provider = make_provider("mock", seed=3)
        assert isinstance(provider, MockEmbeddingProvider)
        assert provider.seed == 3

    def test_http_spec(self):
        assert isinstance(make_provider("http://x/embed"), HttpEmbeddingProvider)

    def test_unknown_spec_rejected(self):
        with pytest.raises(ConfigurationError):
            make_provider("carrier-pigeon")
