import hashlib
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from audiofp.data import (
    AudioConfig,
    Dataset,
    DatasetFormatError,
    SchemaError,
    UserRecord,
    dedup,
    ip_digest,
    load,
    prune_incomplete,
    record_from_dict,
    record_to_dict,
    save,
    validate_record_dict,
)
from audiofp.vectors import VECTOR_ORDER, ElementaryFingerprint, IterationResult


def make_record(user_id="u1", ip="ip-a", ua="ua-a", k=3, missing=(), timestamp=0.0):
    per_vector = {}
    for v in VECTOR_ORDER:
        if v.value in missing:
            continue
        per_vector[v] = [
            IterationResult(
                ElementaryFingerprint(
                    v, hashlib.md5(f"{user_id}|{v.value}|{i}".encode()).hexdigest()
                ),
                0.01 * (i + 1),
            )
            for i in range(k)
        ]
    return UserRecord(
        user_id=user_id,
        ip_digest=ip_digest(ip),
        ua=ua,
        audio_config=AudioConfig(44100.0, 2, 0.01),
        per_vector=per_vector,
        canvas="c" * 32,
        fonts="f" * 32,
        country="US",
        timestamp=timestamp,
    )


class TestDedup:
    def test_same_pair_keeps_one(self):
        records = [make_record("u1", "ip", "ua"), make_record("u2", "ip", "ua")]
        assert [r.user_id for r in dedup(records)] == ["u1"]

    def test_same_ip_different_ua_keeps_both(self):
        records = [make_record("u1", "ip", "ua-a"), make_record("u2", "ip", "ua-b")]
        assert len(dedup(records)) == 2

    def test_keeps_earliest_among_equally_complete(self):
        records = [
            make_record("late", "ip", "ua", timestamp=100.0),
            make_record("early", "ip", "ua", timestamp=5.0),
        ]
        assert [r.user_id for r in dedup(records)] == ["early"]

    def test_survivor_is_most_complete(self):
        records = [
            make_record("partial", "ip", "ua", k=2, timestamp=1.0),
            make_record("full", "ip", "ua", k=3, timestamp=9.0),
        ]
        assert [r.user_id for r in dedup(records)] == ["full"]

    def test_idempotent(self):
        records = [
            make_record("u1", "ip", "ua"),
            make_record("u2", "ip", "ua"),
            make_record("u3", "ip2", "ua"),
        ]
        once = dedup(records)
        assert dedup(once) == once

    @given(
        st.lists(
            st.tuples(
                st.integers(0, 2),  # ip choice
                st.integers(0, 2),  # ua choice
                st.integers(0, 4),  # iteration count
                st.floats(0, 100, allow_nan=False),
            ),
            max_size=12,
        ),
        st.integers(1, 4),
    )
    @settings(max_examples=60, deadline=None)
    def test_prune_dedup_commute(self, specs, k):
        records = [
            make_record(f"u{i}", f"ip{ip}", f"ua{ua}", k=kk, timestamp=ts)
            for i, (ip, ua, kk, ts) in enumerate(specs)
        ]
        a = [r.user_id for r in prune_incomplete(dedup(records), k)]
        b = [r.user_id for r in dedup(prune_incomplete(records, k))]
        assert a == b


class TestPrune:
    def test_drops_missing_vector(self):
        rec = make_record(missing=("FM",))
        assert prune_incomplete([rec], 3) == []

    def test_keeps_full_record(self):
        rec = make_record(k=3)
        assert prune_incomplete([rec], 3) == [rec]

    def test_drops_short_iterations(self):
        rec = make_record(k=29)
        assert prune_incomplete([rec], 30) == []


class TestRoundTrip:
    def test_save_load_identity(self, tmp_path):
        records = [
            make_record(f"u{i}", f"ip{i}", f"ua{i % 13}", k=1 + i % 4, timestamp=float(i))
            for i in range(1000)
        ]
        ds = Dataset(records=records, meta={"k": 3, "toolVersion": "t"})
        path = tmp_path / "ds.jsonl"
        save(ds, path)
        loaded = load(path)
        assert loaded.meta == {"k": 3, "toolVersion": "t"}
        assert loaded.records == records

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        ds = load(path)
        assert ds.records == []

    def test_truncated_line_names_line_number(self, tmp_path):
        good = json.dumps(record_to_dict(make_record()))
        path = tmp_path / "bad.jsonl"
        path.write_text(good + "\n" + good[: len(good) // 2] + "\n")
        with pytest.raises(DatasetFormatError) as err:
            load(path)
        assert err.value.line_no == 2

    def test_schema_violation_names_line(self, tmp_path):
        d = record_to_dict(make_record())
        del d["perVector"]["FM"]
        path = tmp_path / "bad.jsonl"
        path.write_text(json.dumps(d) + "\n")
        with pytest.raises(DatasetFormatError) as err:
            load(path)
        assert "perVector.FM" in str(err.value)

    def test_wire_field_names(self):
        d = record_to_dict(make_record())
        assert set(d) == {
            "userId", "ipDigest", "ua", "audioConfig", "perVector",
            "canvas", "fonts", "country", "timestamp",
        }
        assert set(d["audioConfig"]) == {"sampleRate", "maxChannelCount", "baseLatency"}
        assert set(d["perVector"]) == {
            "DC", "FFT", "Hybrid", "CustomSignal", "MergedSignals", "AM", "FM"
        }
        entry = d["perVector"]["DC"][0]
        assert set(entry) == {"digest", "elapsedMs"}

    def test_round_trip_dict(self):
        rec = make_record()
        assert record_from_dict(record_to_dict(rec)) == rec


class TestValidate:
    def test_missing_vector_path(self):
        d = record_to_dict(make_record())
        del d["perVector"]["AM"]
        with pytest.raises(SchemaError) as err:
            validate_record_dict(d)
        assert err.value.path == "perVector.AM"

    def test_bad_digest_path(self):
        d = record_to_dict(make_record())
        d["perVector"]["DC"][0]["digest"] = "nope"
        with pytest.raises(SchemaError) as err:
            validate_record_dict(d)
        assert err.value.path == "perVector.DC[0].digest"

    def test_unknown_vector_rejected(self):
        d = record_to_dict(make_record())
        d["perVector"]["Sneaky"] = []
        with pytest.raises(SchemaError):
            validate_record_dict(d)

    def test_user_id_optional_for_ingest(self):
        d = record_to_dict(make_record())
        del d["userId"]
        validate_record_dict(d, require_user_id=False)
        with pytest.raises(SchemaError):
            validate_record_dict(d, require_user_id=True)

    def test_duplicate_user_ids_rejected(self):
        with pytest.raises(ValueError):
            Dataset(records=[make_record("same"), make_record("same", ip="other")])
