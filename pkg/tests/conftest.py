import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest


class _Service:
    """Tiny in-process HTTP server with per-path handlers for service mocks.

    A handler takes (body bytes, headers) and returns (status, payload);
    dict payloads are sent as JSON, bytes verbatim.
    """

    def __init__(self):
        self.routes = {}
        self.requests = []
        service = self

        class Handler(BaseHTTPRequestHandler):
            def _serve(self, method):
                length = int(self.headers.get("Content-Length") or 0)
                body = self.rfile.read(length) if length else b""
                service.requests.append((method, self.path, body, dict(self.headers)))
                handler = service.routes.get((method, self.path))
                if handler is None:
                    self.send_response(404)
                    self.end_headers()
                    return
                status, payload = handler(body, self.headers)
                if isinstance(payload, (dict, list)):
                    payload = json.dumps(payload).encode("utf-8")
                    content_type = "application/json"
                else:
                    content_type = "application/octet-stream"
                self.send_response(status)
                self.send_header("Content-Type", content_type)
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

            def do_POST(self):
                self._serve("POST")

            def do_GET(self):
                self._serve("GET")

            def log_message(self, *args):
                pass

        self.server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self.thread.start()

    @property
    def url(self):
        host, port = self.server.server_address
        return f"http://{host}:{port}"

    def close(self):
        self.server.shutdown()
        self.server.server_close()


@pytest.fixture
def http_service():
    started = []

    def factory(routes):
        service = _Service()
        service.routes.update(routes)
        started.append(service)
        return service

    yield factory
    for service in started:
        service.close()
