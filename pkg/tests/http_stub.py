"""In-process HTTP server speaking the scoring wire protocol, for tests."""

from __future__ import annotations

import json
import threading
from contextlib import contextmanager
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


class _Handler(BaseHTTPRequestHandler):
    def do_POST(self):
        server = self.server
        length = int(self.headers.get("Content-Length", 0))
        raw = self.rfile.read(length)
        with server.lock:
            server.requests.append({"path": self.path,
                                    "headers": dict(self.headers),
                                    "body": json.loads(raw)})
            if server.fail_remaining > 0:
                server.fail_remaining -= 1
                self._respond(server.fail_status, b'{"error": "induced failure"}')
                return
        if server.canned_response is not None:
            self._respond(200, server.canned_response)
            return
        if self.path != "/v1/score":
            self._respond(404, b'{"error": "not found"}')
            return
        body = json.loads(raw)
        continuations = body.get("continuations", [])
        if any(c == "" for c in continuations):
            self._respond(422, b'{"error": "empty continuation"}')
            return
        nll = [server.fn(body.get("prefix", ""), c) for c in continuations]
        self._respond(200, json.dumps({"nll": nll}).encode("utf-8"))

    def _respond(self, status: int, data: bytes):
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


def default_fn(prefix: str, continuation: str) -> float:
    """Deterministic stand-in NLL: varies with the continuation bytes."""
    return round(sum(continuation.encode("utf-8")) % 97 / 10 + 0.01 * len(continuation), 6)


@contextmanager
def score_server(fn=default_fn, fail_first: int = 0, fail_status: int = 500,
                 canned_response: bytes | None = None):
    """Serve the wire protocol on a random localhost port.

    ``fail_first`` makes the first N requests return ``fail_status``;
    ``canned_response`` short-circuits every request with a fixed 200 body.
    """
    server = ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
    server.fn = fn
    server.requests = []
    server.lock = threading.Lock()
    server.fail_remaining = fail_first
    server.fail_status = fail_status
    server.canned_response = canned_response
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield server, f"http://127.0.0.1:{server.server_address[1]}"
    finally:
        server.shutdown()
        server.server_close()
