import csv
import json

import pytest

from audiofp.cli import main
from audiofp.data import load


@pytest.fixture()
def device_file(tmp_path):
    path = tmp_path / "device.json"
    path.write_text(
        json.dumps(
            {"classId": "cli-class", "perturbSeed": 4, "variantCount": 5, "ficklenessP": 0.5}
        )
    )
    return str(path)


@pytest.fixture()
def config_file(tmp_path):
    path = tmp_path / "pop.json"
    path.write_text(
        json.dumps(
            {
                "numUsers": 18,
                "numClasses": 3,
                "seed": 12,
                "iterations": 6,
                "browserMix": {"chrome": 0.9, "firefox": 0.1},
                "familyFickleness": {
                    "chrome": {"variantCount": 4, "ficklenessP": 0.3},
                    "firefox": {"variantCount": 1, "ficklenessP": 0.0},
                },
            }
        )
    )
    return str(path)


@pytest.fixture()
def dataset_file(tmp_path, config_file):
    out = str(tmp_path / "dataset.jsonl")
    assert main(["simulate", "--config", config_file, "--out", out]) == 0
    return out


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestFingerprint:
    def test_k1_writes_7_fingerprints(self, device_file, tmp_path):
        out = str(tmp_path / "rec.jsonl")
        assert main(["fingerprint", "--device", device_file, "--iterations", "1", "--out", out]) == 0
        rec = load(out).records[0]
        assert sum(len(r) for r in rec.per_vector.values()) == 7

    def test_k30_writes_210(self, device_file, tmp_path):
        out = str(tmp_path / "rec.jsonl")
        assert main(["fingerprint", "--device", device_file, "--iterations", "30", "--out", out]) == 0
        rec = load(out).records[0]
        assert sum(len(r) for r in rec.per_vector.values()) == 210

    def test_repeat_identical_file(self, device_file, tmp_path):
        out1 = str(tmp_path / "a.jsonl")
        out2 = str(tmp_path / "b.jsonl")
        main(["fingerprint", "--device", device_file, "--iterations", "3", "--out", out1])
        main(["fingerprint", "--device", device_file, "--iterations", "3", "--out", out2])
        assert open(out1).read() == open(out2).read()

    def test_bad_profile_exits_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{}")
        assert main(["fingerprint", "--device", str(bad), "--iterations", "1",
                     "--out", str(tmp_path / "x.jsonl")]) == 2

    def test_unknown_flag_rejected(self, device_file, tmp_path):
        with pytest.raises(SystemExit) as err:
            main(["fingerprint", "--device", device_file, "--frobnicate", "1",
                  "--out", str(tmp_path / "x.jsonl")])
        assert err.value.code == 2


class TestSimulate:
    def test_zero_users_empty_dataset(self, tmp_path, config_file):
        cfg = json.loads(open(config_file).read())
        cfg["numUsers"] = 0
        empty_cfg = tmp_path / "empty.json"
        empty_cfg.write_text(json.dumps(cfg))
        out = str(tmp_path / "empty.jsonl")
        assert main(["simulate", "--config", str(empty_cfg), "--out", out]) == 0
        assert load(out).records == []

    def test_fixed_seed_identical_files(self, tmp_path, config_file):
        out1 = str(tmp_path / "a.jsonl")
        out2 = str(tmp_path / "b.jsonl")
        main(["simulate", "--config", config_file, "--out", out1])
        main(["simulate", "--config", config_file, "--out", out2])
        assert open(out1).read() == open(out2).read()

    def test_seed_echoed_in_meta(self, dataset_file):
        assert load(dataset_file).meta["seed"] == 12

    def test_invalid_config_exit_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"numUsers": 5}))
        assert main(["simulate", "--config", str(bad), "--out", str(tmp_path / "x")]) == 2


class TestAnalyze:
    def test_diversity_single_class_entropy_zero(self, tmp_path):
        cfg = tmp_path / "one.json"
        cfg.write_text(
            json.dumps(
                {
                    "numUsers": 8,
                    "numClasses": 1,
                    "seed": 3,
                    "iterations": 4,
                    "familyFickleness": {
                        "chrome": {"variantCount": 1, "ficklenessP": 0.0},
                        "firefox": {"variantCount": 1, "ficklenessP": 0.0},
                    },
                }
            )
        )
        ds = str(tmp_path / "one.jsonl")
        main(["simulate", "--config", str(cfg), "--out", ds])
        out = str(tmp_path / "div.csv")
        assert main(["analyze", "diversity", "--dataset", ds, "--out", out]) == 0
        rows = read_csv(out)
        by_name = {r[0]: r for r in rows[1:]}
        for v in ("DC", "FFT", "AM", "Combined"):
            assert float(by_name[v][3]) == 0.0  # entropy column

    def test_stability_emits_rows(self, dataset_file, tmp_path):
        out = str(tmp_path / "stab.csv")
        assert main(["analyze", "stability", "--dataset", dataset_file,
                     "--s", "3", "--out", out]) == 0
        rows = read_csv(out)
        assert rows[0] == ["vector", "s", "avg_ami"]
        assert len(rows) == 8  # 7 vectors, one s value

    def test_match_on_quiet_corpus_is_one(self, tmp_path):
        cfg = tmp_path / "quiet.json"
        cfg.write_text(
            json.dumps(
                {
                    "numUsers": 10,
                    "numClasses": 2,
                    "seed": 9,
                    "iterations": 6,
                    "familyFickleness": {
                        "chrome": {"variantCount": 1, "ficklenessP": 0.0},
                        "firefox": {"variantCount": 1, "ficklenessP": 0.0},
                    },
                }
            )
        )
        ds = str(tmp_path / "quiet.jsonl")
        main(["simulate", "--config", str(cfg), "--out", ds])
        out = str(tmp_path / "match.csv")
        assert main(["analyze", "match", "--dataset", ds, "--s", "3", "--out", out]) == 0
        for row in read_csv(out)[1:]:
            assert float(row[2]) == 1.0

    def test_s_out_of_range_exit_2(self, dataset_file, tmp_path):
        assert main(["analyze", "stability", "--dataset", dataset_file,
                     "--s", "99", "--out", str(tmp_path / "x.csv")]) == 2

    def test_compare_and_ua_reports(self, dataset_file, tmp_path):
        cmp_out = str(tmp_path / "cmp.csv")
        assert main(["analyze", "compare", "--dataset", dataset_file, "--out", cmp_out]) == 0
        rows = read_csv(cmp_out)
        assert rows[0] == ["row", "col", "value"]
        assert len(rows) == 1 + 49
        ua_out = str(tmp_path / "ua.csv")
        assert main(["analyze", "ua", "--dataset", dataset_file, "--out", ua_out]) == 0
        assert read_csv(ua_out)[0] == ["vector", "spanning_uas", "multi_user_uas"]

    def test_missing_dataset_exit_1(self, tmp_path):
        assert main(["analyze", "diversity", "--dataset", str(tmp_path / "nope.jsonl"),
                     "--out", str(tmp_path / "x.csv")]) == 1
