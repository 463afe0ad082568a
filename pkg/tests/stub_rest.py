"""In-process REST collection stub for telemetry delivery tests."""

from __future__ import annotations

import http.server
import threading
from pathlib import Path


class StubCollector(http.server.ThreadingHTTPServer):
    """Captures every POST; can snapshot a sink's local file at receipt time."""

    def __init__(self):
        self.posts: list[tuple[str, str, str]] = []  # (path, session header, body)
        self.local_snapshot_complete: list[bool] = []
        self.sink_path: Path | None = None
        self.lock = threading.Lock()
        super().__init__(("127.0.0.1", 0), _StubHandler)

    @property
    def endpoint(self) -> str:
        return f"http://127.0.0.1:{self.server_address[1]}"


class _StubHandler(http.server.BaseHTTPRequestHandler):
    def do_POST(self):
        body = self.rfile.read(int(self.headers.get("Content-Length", 0))).decode("utf-8")
        server: StubCollector = self.server  # type: ignore[assignment]
        with server.lock:
            server.posts.append((self.path, self.headers.get("X-Session", ""), body))
            if server.sink_path is not None:
                written = server.sink_path.read_text()
                server.local_snapshot_complete.append(
                    all(line in written for line in body.splitlines())
                )
        self.send_response(200)
        self.end_headers()

    def log_message(self, *args):  # quiet
        pass


class running:
    """Context manager: serve a StubCollector on a daemon thread."""

    def __init__(self):
        self.server = StubCollector()

    def __enter__(self) -> StubCollector:
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self.thread.start()
        return self.server

    def __exit__(self, *exc) -> None:
        self.server.shutdown()
        self.thread.join()
