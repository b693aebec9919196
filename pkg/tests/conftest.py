from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest

from sprachbund.registry import LanguageRecord, Registry


@pytest.fixture
def toy_registry() -> Registry:
    return Registry([
        LanguageRecord("aa", family="Alpha",
                       syntax={"word_order": "SVO", "adjective_position": "AN"}),
        LanguageRecord("bb", family="Alpha", syntax={"word_order": "SVO"}),
        LanguageRecord("cc", family="Beta", syntax={"word_order": "SOV"}),
        LanguageRecord("dd", family="Beta"),
        LanguageRecord("ee", family=None),
    ])


def _default_vector(text: str, dim: int) -> list[float]:
    seed = sum(text.encode("utf-8")) % (2 ** 31)
    rng = np.random.default_rng(seed)
    return [float(x) for x in rng.standard_normal(dim)]


class StubEmbeddingServer:
    """Tiny in-process embedding service for exercising the HTTP client.

    GET /info -> {"dim": dim}; POST /embed -> {"vectors": [...]} with
    configurable misbehavior: fail the first N posts with a 500, truncate the
    response of a given batch, or answer null for chosen texts.
    """

    def __init__(self, dim: int = 4, fail_posts: int = 0,
                 truncate_batch: int | None = None,
                 null_texts: frozenset[str] = frozenset(),
                 malformed: bool = False, wrong_dim: int | None = None):
        self.dim = dim
        self.fail_posts = fail_posts
        self.truncate_batch = truncate_batch
        self.null_texts = set(null_texts)
        self.malformed = malformed
        self.wrong_dim = wrong_dim
        self.info_requests = 0
        self.embed_requests = 0
        self.batch_sizes: list[int] = []
        self.auth_headers: list[str | None] = []
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def _send(self, code: int, payload: dict):
                body = json.dumps(payload).encode("utf-8")
                self.send_response(code)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def do_GET(self):
                if self.path == "/info":
                    outer.info_requests += 1
                    self._send(200, {"dim": outer.dim})
                else:
                    self._send(404, {})

            def do_POST(self):
                if self.path != "/embed":
                    self._send(404, {})
                    return
                outer.embed_requests += 1
                outer.auth_headers.append(self.headers.get("Authorization"))
                if outer.embed_requests <= outer.fail_posts:
                    self._send(500, {"error": "flaky"})
                    return
                if outer.malformed:
                    self._send(200, {"unexpected": True})
                    return
                length = int(self.headers["Content-Length"])
                texts = json.loads(self.rfile.read(length))["texts"]
                outer.batch_sizes.append(len(texts))
                vec_dim = outer.wrong_dim or outer.dim
                vectors = [
                    None if t in outer.null_texts
                    else _default_vector(t, vec_dim)
                    for t in texts
                ]
                if outer.truncate_batch == len(outer.batch_sizes):
                    vectors = vectors[:-1]
                self._send(200, {"vectors": vectors})

        self._server = HTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever,
                                        daemon=True)
        self._thread.start()

    @property
    def endpoint(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def close(self):
        self._server.shutdown()
        self._server.server_close()


@pytest.fixture
def embedding_server():
    servers = []

    def factory(**kwargs) -> StubEmbeddingServer:
        server = StubEmbeddingServer(**kwargs)
        servers.append(server)
        return server

    yield factory
    for server in servers:
        server.close()
