"""Minimal ingest endpoint for probe submissions.

POST /v1/records accepts one wire-format UserRecord, validates it,
assigns a user id, and appends it to the active dataset file.  Repeat
submissions from the same (ipDigest, ua) pair are accepted but flagged
as duplicates; the analysis-side dedup filter is what actually drops
them, mirroring the post-hoc filtering of the field protocol.
GET /v1/health answers 200.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from . import data

MAX_BODY_BYTES = 1 << 20


class IngestServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, bind_address: tuple[str, int], dataset_path: str):
        super().__init__(bind_address, _IngestHandler)
        self.dataset_path = dataset_path
        self.write_lock = threading.Lock()
        self.seen_pairs: set[tuple[str, str]] = set()
        self.record_count = 0
        self._load_existing()

    def _load_existing(self) -> None:
        try:
            existing = data.load(self.dataset_path)
        except FileNotFoundError:
            return
        self.record_count = len(existing.records)
        for rec in existing.records:
            self.seen_pairs.add((rec.ip_digest, rec.ua))

    def next_user_id(self) -> str:
        self.record_count += 1
        return f"r{self.record_count:06d}"


class _IngestHandler(BaseHTTPRequestHandler):
    server: IngestServer

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _reply(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        if self.path == "/v1/health":
            self._reply(200, {"status": "ok"})
        else:
            self._reply(404, {"error": "not found"})

    def do_POST(self):
        if self.path != "/v1/records":
            self._reply(404, {"error": "not found"})
            return
        length = int(self.headers.get("Content-Length") or 0)
        if length > MAX_BODY_BYTES:
            # drain so the client finishes its upload before seeing the error
            remaining = length
            while remaining > 0:
                chunk = self.rfile.read(min(remaining, 1 << 16))
                if not chunk:
                    break
                remaining -= len(chunk)
            self._reply(413, {"error": "record too large"})
            return
        raw = self.rfile.read(length)
        try:
            payload = json.loads(raw)
        except json.JSONDecodeError as exc:
            self._reply(400, {"error": f"bad JSON: {exc}"})
            return
        try:
            data.validate_record_dict(payload, require_user_id=False)
        except data.SchemaError as exc:
            self._reply(400, {"error": "schema violation", "path": exc.path})
            return
        if not payload.get("ipDigest"):
            payload["ipDigest"] = data.ip_digest(self.client_address[0])
        pair = (payload["ipDigest"], payload["ua"])
        with self.server.write_lock:
            duplicate = pair in self.server.seen_pairs
            user_id = self.server.next_user_id()
            payload["userId"] = user_id
            data.append_record(self.server.dataset_path, payload)
            self.server.seen_pairs.add(pair)
        self._reply(
            200 if duplicate else 201, {"userId": user_id, "duplicate": duplicate}
        )


def serve_ingest(bind_address: str, dataset_path: str) -> IngestServer:
    """Bind the ingest endpoint; caller drives serve_forever()/shutdown()."""
    host, _, port = bind_address.partition(":")
    return IngestServer((host or "127.0.0.1", int(port or 0)), dataset_path)
