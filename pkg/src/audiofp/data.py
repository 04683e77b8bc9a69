"""Record schema, dataset persistence, and ingest filtering.

Datasets are line-delimited JSON, one record per line, with the exact
wire field names used by the ingest endpoint (userId, ipDigest, ua,
audioConfig, perVector, canvas, fonts, country, timestamp).  Network
addresses are only ever stored as salted digests.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field

from . import vectors as _vectors

_WIRE_VECTORS = [v.value for v in _vectors.VECTOR_ORDER]


class SchemaError(ValueError):
    """A record violated the wire schema; ``path`` names the bad field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class DatasetFormatError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class AudioConfig:
    sample_rate: float = 44100.0
    max_channel_count: int = 2
    base_latency: float = 0.0


@dataclass
class UserRecord:
    user_id: str
    ip_digest: str
    ua: str
    audio_config: AudioConfig
    per_vector: dict
    canvas: str
    fonts: str
    country: str | None = None
    timestamp: float = 0.0

    def iteration_floor(self) -> int:
        """Iterations guaranteed on every vector; 0 if any vector is missing."""
        counts = [
            len(self.per_vector.get(v, ())) for v in _vectors.VECTOR_ORDER
        ]
        return min(counts) if counts else 0

    def is_complete(self, k: int) -> bool:
        return self.iteration_floor() >= k


@dataclass
class Dataset:
    records: list[UserRecord] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        ids = [r.user_id for r in self.records]
        if len(set(ids)) != len(ids):
            raise ValueError("user ids must be unique")


def ip_digest(address: str, salt: str = "audiofp") -> str:
    """Salted digest of a network address; raw addresses are never stored."""
    return hashlib.md5(f"{salt}|{address}".encode()).hexdigest()


# ---------------------------------------------------------------------------
# filtering

def dedup(records: list[UserRecord]) -> list[UserRecord]:
    """One record per (ipDigest, ua) pair, input order preserved.

    The survivor is the most complete record of the pair (then the
    earliest by timestamp and input order), so filtering incomplete
    records before or after deduplication yields the same corpus.
    """
    best: dict[tuple[str, str], tuple] = {}
    for idx, rec in enumerate(records):
        key = (rec.ip_digest, rec.ua)
        rank = (-rec.iteration_floor(), rec.timestamp, idx)
        if key not in best or rank < best[key][0]:
            best[key] = (rank, idx)
    keep = {idx for _, idx in best.values()}
    return [rec for idx, rec in enumerate(records) if idx in keep]


def prune_incomplete(records: list[UserRecord], k: int) -> list[UserRecord]:
    """Drop records missing any vector or with fewer than k iterations."""
    return [rec for rec in records if rec.is_complete(k)]


def without_timings(rec: UserRecord) -> UserRecord:
    """Copy with elapsed zeroed; batch outputs stay byte-reproducible."""
    from . import vectors as v

    stripped = {
        vec: [v.IterationResult(r.fingerprint, 0.0) for r in results]
        for vec, results in rec.per_vector.items()
    }
    return UserRecord(
        user_id=rec.user_id,
        ip_digest=rec.ip_digest,
        ua=rec.ua,
        audio_config=rec.audio_config,
        per_vector=stripped,
        canvas=rec.canvas,
        fonts=rec.fonts,
        country=rec.country,
        timestamp=rec.timestamp,
    )


# ---------------------------------------------------------------------------
# wire format

def record_to_dict(rec: UserRecord) -> dict:
    return {
        "userId": rec.user_id,
        "ipDigest": rec.ip_digest,
        "ua": rec.ua,
        "audioConfig": {
            "sampleRate": rec.audio_config.sample_rate,
            "maxChannelCount": rec.audio_config.max_channel_count,
            "baseLatency": rec.audio_config.base_latency,
        },
        "perVector": {
            v.value: [
                {"digest": r.fingerprint.digest, "elapsedMs": r.elapsed * 1000.0}
                for r in rec.per_vector.get(v, ())
            ]
            for v in _vectors.VECTOR_ORDER
        },
        "canvas": rec.canvas,
        "fonts": rec.fonts,
        "country": rec.country,
        "timestamp": rec.timestamp,
    }


def _expect(d: dict, key: str, types, path: str):
    if key not in d:
        raise SchemaError(f"{path}{key}", "missing field")
    value = d[key]
    if not isinstance(value, types):
        raise SchemaError(f"{path}{key}", f"expected {types}, got {type(value).__name__}")
    return value


def validate_record_dict(d: dict, require_user_id: bool = True) -> None:
    """Schema and invariant check; raises SchemaError naming the field."""
    if not isinstance(d, dict):
        raise SchemaError("", "record must be an object")
    if require_user_id:
        _expect(d, "userId", str, "")
    elif "userId" in d and not isinstance(d["userId"], str):
        raise SchemaError("userId", "expected str")
    if "ipDigest" in d and d["ipDigest"] is not None:
        if not isinstance(d["ipDigest"], str) or not d["ipDigest"]:
            raise SchemaError("ipDigest", "expected non-empty str")
    _expect(d, "ua", str, "")
    cfg = _expect(d, "audioConfig", dict, "")
    sr = _expect(cfg, "sampleRate", (int, float), "audioConfig.")
    if not sr > 0:
        raise SchemaError("audioConfig.sampleRate", "must be > 0")
    _expect(cfg, "maxChannelCount", int, "audioConfig.")
    if _expect(cfg, "baseLatency", (int, float), "audioConfig.") < 0:
        raise SchemaError("audioConfig.baseLatency", "must be >= 0")
    pv = _expect(d, "perVector", dict, "")
    for name in _WIRE_VECTORS:
        if name not in pv:
            raise SchemaError(f"perVector.{name}", "missing vector")
        if not isinstance(pv[name], list):
            raise SchemaError(f"perVector.{name}", "expected a list")
        for i, entry in enumerate(pv[name]):
            where = f"perVector.{name}[{i}]"
            if not isinstance(entry, dict):
                raise SchemaError(where, "expected an object")
            digest = _expect(entry, "digest", str, where + ".")
            if len(digest) != 32 or any(c not in "0123456789abcdef" for c in digest):
                raise SchemaError(where + ".digest", "expected 32 lowercase hex chars")
            if _expect(entry, "elapsedMs", (int, float), where + ".") < 0:
                raise SchemaError(where + ".elapsedMs", "must be >= 0")
    for name in pv:
        if name not in _WIRE_VECTORS:
            raise SchemaError(f"perVector.{name}", "unknown vector")
    _expect(d, "canvas", str, "")
    _expect(d, "fonts", str, "")
    if d.get("country") is not None and not isinstance(d["country"], str):
        raise SchemaError("country", "expected str or null")
    _expect(d, "timestamp", (int, float), "")


def record_from_dict(d: dict) -> UserRecord:
    validate_record_dict(d)
    cfg = d["audioConfig"]
    per_vector = {}
    for v in _vectors.VECTOR_ORDER:
        per_vector[v] = [
            _vectors.IterationResult(
                _vectors.ElementaryFingerprint(v, entry["digest"]),
                entry["elapsedMs"] / 1000.0,
            )
            for entry in d["perVector"][v.value]
        ]
    return UserRecord(
        user_id=d["userId"],
        ip_digest=d.get("ipDigest") or "",
        ua=d["ua"],
        audio_config=AudioConfig(
            sample_rate=float(cfg["sampleRate"]),
            max_channel_count=int(cfg["maxChannelCount"]),
            base_latency=float(cfg["baseLatency"]),
        ),
        per_vector=per_vector,
        canvas=d["canvas"],
        fonts=d["fonts"],
        country=d.get("country"),
        timestamp=float(d["timestamp"]),
    )


def record_to_line(rec: UserRecord) -> str:
    return json.dumps(record_to_dict(rec), separators=(",", ":"), sort_keys=True)


# ---------------------------------------------------------------------------
# persistence

def save(dataset: Dataset, path) -> None:
    """Atomic write: the file appears complete or not at all."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            if dataset.meta:
                fh.write("#meta " + json.dumps(dataset.meta, sort_keys=True) + "\n")
            for rec in dataset.records:
                fh.write(record_to_line(rec) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load(path) -> Dataset:
    """Parse a dataset file; a malformed line fails the whole load."""
    records = []
    meta: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#meta "):
                try:
                    meta = json.loads(line[len("#meta "):])
                except json.JSONDecodeError as exc:
                    raise DatasetFormatError(line_no, f"bad meta: {exc}") from exc
                continue
            try:
                d = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetFormatError(line_no, f"bad JSON: {exc}") from exc
            try:
                records.append(record_from_dict(d))
            except SchemaError as exc:
                raise DatasetFormatError(line_no, str(exc)) from exc
    return Dataset(records=records, meta=meta)


def append_record(path, rec_dict: dict) -> None:
    """Append one validated wire record to a dataset file."""
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(rec_dict, separators=(",", ":"), sort_keys=True) + "\n")
