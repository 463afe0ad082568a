"""Durable local logging with batched REST delivery.

Every record is appended and flushed to the session file before it is
handed to the delivery worker, so the local file never misses anything the
endpoint saw. Failed batches are retried per policy and then parked in a
dead-letter file next to the session log.
"""

from __future__ import annotations

import queue
import threading
import time
import urllib.error
import urllib.request
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from towerlab.telemetry.records import LogRecord
from towerlab.telemetry.xmlfmt import serialize_record


@dataclass
class SinkConfig:
    endpoint: str | None = None  # base URL; None disables delivery
    batch_size: int = 50
    flush_interval: float = 5.0  # seconds before a partial batch ships
    max_attempts: int = 3
    backoff_seconds: float = 0.2
    request_timeout: float = 5.0

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ValueError("batch size must be >= 1")


def session_file_name(room_key: str, session_start_ms: int) -> str:
    stamp = datetime.fromtimestamp(session_start_ms / 1000.0, tz=timezone.utc)
    return f"{room_key}_{stamp.strftime('%Y%m%dT%H%M%SZ')}.log"


class TelemetrySink:
    """Single-writer sink for one session."""

    def __init__(
        self,
        directory: str | Path,
        room_key: str,
        session_start_ms: int,
        config: SinkConfig | None = None,
    ):
        self.config = config or SinkConfig()
        self.room_key = room_key
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        name = session_file_name(room_key, session_start_ms)
        self.log_path = directory / name
        self.dead_letter_path = directory / name.replace(".log", ".deadletter.log")
        self._file = open(self.log_path, "a", encoding="utf-8")
        self._lock = threading.Lock()
        self._pending: list[str] = []
        self._batches: queue.Queue[list[str] | None] = queue.Queue()
        self._worker: threading.Thread | None = None
        self._closed = False
        if self.config.endpoint:
            self._worker = threading.Thread(target=self._deliver_loop, daemon=True)
            self._worker.start()

    # -- producing ---------------------------------------------------------

    def record_and_flush(self, record: LogRecord) -> None:
        """Append one record durably and queue it for delivery."""
        line = serialize_record(record)
        with self._lock:
            if self._closed:
                raise RuntimeError("sink already closed")
            self._file.write(line + "\n")
            self._file.flush()
            self._pending.append(line)
            if len(self._pending) >= self.config.batch_size:
                self._batches.put(self._pending)
                self._pending = []

    def flush(self) -> None:
        """Ship any partial batch now."""
        with self._lock:
            if self._pending:
                self._batches.put(self._pending)
                self._pending = []

    def close(self) -> None:
        self.flush()
        with self._lock:
            self._closed = True
        if self._worker is not None:
            self._batches.put(None)
            self._worker.join()
        self._file.close()

    # -- delivery ----------------------------------------------------------

    def _deliver_loop(self) -> None:
        while True:
            try:
                batch = self._batches.get(timeout=self.config.flush_interval)
            except queue.Empty:
                self.flush()  # interval elapsed: promote the partial batch
                continue
            if batch is None:
                return
            if not self._post_with_retry(batch):
                self._dead_letter(batch)

    def _post_with_retry(self, batch: list[str]) -> bool:
        url = self.config.endpoint.rstrip("/") + "/log"
        body = "\n".join(batch).encode("utf-8")
        for attempt in range(self.config.max_attempts):
            try:
                request = urllib.request.Request(
                    url,
                    data=body,
                    headers={
                        "Content-Type": "text/plain; charset=utf-8",
                        "X-Session": self.room_key,
                    },
                    method="POST",
                )
                with urllib.request.urlopen(request, timeout=self.config.request_timeout) as resp:
                    if 200 <= resp.status < 300:
                        return True
            except (urllib.error.URLError, OSError, ValueError):
                pass
            if attempt + 1 < self.config.max_attempts:
                time.sleep(self.config.backoff_seconds * (2**attempt))
        return False

    def _dead_letter(self, batch: list[str]) -> None:
        with open(self.dead_letter_path, "a", encoding="utf-8") as dead:
            for line in batch:
                dead.write(line + "\n")
            dead.flush()
