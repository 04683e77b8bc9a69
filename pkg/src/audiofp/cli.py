"""Batch driver: fingerprint, simulate, analyze, serve.

Exit codes: 0 success, 1 environment failure (I/O, bind), 2 usage or
validation error.  Every command is deterministic given its flags and
seeds; output files are written atomically.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from . import analysis, collate, data, server, simulate, vectors


class UsageError(Exception):
    pass


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise UsageError(f"{path}: not valid JSON ({exc})") from exc


def _profile_from_file(path: str) -> simulate.DeviceProfile:
    d = _load_json(path)
    try:
        return simulate.DeviceProfile(
            class_id=str(d["classId"]),
            perturb_seed=int(d.get("perturbSeed", 0)),
            variant_count=int(d.get("variantCount", 1)),
            fickleness_p=float(d.get("ficklenessP", 0.0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: bad device profile ({exc})") from exc


def _population_config(path: str) -> simulate.PopulationConfig:
    d = _load_json(path)
    try:
        kwargs = dict(
            num_users=int(d["numUsers"]),
            num_classes=int(d["numClasses"]),
            seed=int(d.get("seed", 0)),
            iterations=int(d.get("iterations", 30)),
            zipf_exponent=float(d.get("zipfExponent", 1.2)),
        )
        if "classWeights" in d:
            kwargs["class_weights"] = np.asarray(d["classWeights"], dtype=np.float64)
        if "browserMix" in d:
            kwargs["browser_mix"] = {k: float(v) for k, v in d["browserMix"].items()}
        if "familyFickleness" in d:
            kwargs["family_fickleness"] = {
                fam: (int(v["variantCount"]), float(v["ficklenessP"]))
                for fam, v in d["familyFickleness"].items()
            }
        return simulate.PopulationConfig(**kwargs)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: bad population config ({exc})") from exc


def _engine_record(profile: simulate.DeviceProfile, k: int, user_id: str) -> data.UserRecord:
    import hashlib

    engine = vectors.DEFAULT_ENGINE
    return data.UserRecord(
        user_id=user_id,
        ip_digest=hashlib.md5(f"engine|{profile.class_id}".encode()).hexdigest(),
        ua=f"audiofp-engine/0.1 ({profile.class_id})",
        audio_config=data.AudioConfig(
            sample_rate=engine.sample_rate, max_channel_count=1, base_latency=0.0
        ),
        per_vector=vectors.run_all(profile, k),
        canvas=hashlib.md5(f"canvas|{profile.class_id}".encode()).hexdigest(),
        fonts=hashlib.md5(f"fonts|{profile.class_id}".encode()).hexdigest(),
        country=None,
        timestamp=0.0,
    )


def cmd_fingerprint(args) -> int:
    profile = _profile_from_file(args.device)
    if args.iterations < 1:
        raise UsageError("--iterations must be >= 1")
    rec = _engine_record(profile, args.iterations, args.user_id)
    # measured timings are wall-clock noise; zero them so repeat runs match
    _atomic_write(args.out, data.record_to_line(data.without_timings(rec)) + "\n")
    total = sum(len(rs) for rs in rec.per_vector.values())
    print(f"wrote {args.out}: 1 record, {total} fingerprints")
    return 0


def cmd_simulate(args) -> int:
    cfg = _population_config(args.config)
    records = [data.without_timings(r) for r in simulate.generate_population(cfg)]
    dataset = data.Dataset(
        records=records,
        meta={
            "k": cfg.iterations,
            "createdAt": 1_616_000_000 + (cfg.seed % 100_000),
            "toolVersion": "audiofp-0.1.0",
            "seed": cfg.seed,
        },
    )
    data.save(dataset, args.out)
    print(f"wrote {args.out}: {len(records)} records (seed {cfg.seed})")
    return 0


def _load_records(path: str):
    try:
        dataset = data.load(path)
    except data.DatasetFormatError as exc:
        raise UsageError(f"{path}: {exc}") from exc
    records = data.prune_incomplete(
        data.dedup(dataset.records), dataset.meta.get("k", 1)
    )
    if not records:
        raise UsageError(f"{path}: no complete records")
    return records


def _vector_choices(arg: str | None):
    if arg is None:
        return vectors.VECTOR_ORDER
    for v in vectors.VECTOR_ORDER:
        if v.value == arg:
            return (v,)
    raise UsageError(f"unknown vector {arg!r}")


def cmd_analyze(args) -> int:
    records = _load_records(args.dataset)
    k = len(records[0].per_vector[vectors.VectorId.DC])
    vecs = _vector_choices(args.vector)
    if args.report == "stability":
        s_values = [args.s] if args.s else [s for s in range(1, 16) if s <= k]
        if any(not 1 <= s <= k for s in s_values):
            raise UsageError(f"--s must be in [1, {k}]")
        rep = analysis.stability_report(records, s_values, vecs)
        rows = [
            (v.value, s, f"{rep.averages[(v, s)]:.6f}")
            for v in vecs
            for s in s_values
        ]
        analysis.write_rows_csv(args.out, ["vector", "s", "avg_ami"], rows)
        print(analysis.format_table(["vector", "s", "avg_ami"], rows))
    elif args.report == "diversity":
        rows = []
        label_maps = []
        for v in vecs:
            labels = collate.collate_records(records, v).components().labels
            label_maps.append(labels)
            rows.append(_diversity_row(v.value, analysis.diversity_report(labels)))
        if len(vecs) == len(vectors.VECTOR_ORDER):
            rows.append(
                _diversity_row("Combined", analysis.combined_diversity(label_maps))
            )
            for name, getter in (
                ("Canvas", lambda r: r.canvas),
                ("Fonts", lambda r: r.fonts),
                ("UserAgent", lambda r: r.ua),
            ):
                values = {r.user_id: getter(r) for r in records}
                rows.append(_diversity_row(name, analysis.diversity_report(values)))
        analysis.write_rows_csv(
            args.out, ["vector", "distinct", "unique", "entropy", "normalized"], rows
        )
        print(
            analysis.format_table(
                ["vector", "distinct", "unique", "entropy", "normalized"], rows
            )
        )
    elif args.report == "match":
        s_values = [args.s] if args.s else [s for s in (3, 10, 15) if 2 * s <= k]
        if any(not 1 <= s <= k // 2 for s in s_values):
            raise UsageError(f"--s must be in [1, {k // 2}] for match scoring")
        rep = analysis.match_score_report(records, s_values, vecs)
        rows = [
            (v.value, s, f"{rep.scores[(v, s)]:.4f}") for v in vecs for s in s_values
        ]
        analysis.write_rows_csv(args.out, ["vector", "s", "match_score"], rows)
        print(analysis.format_table(["vector", "s", "match_score"], rows))
    elif args.report == "compare":
        clusterings = {
            v.value: collate.collate_records(records, v).components() for v in vecs
        }
        names, mat = analysis.compare_vectors(clusterings)
        analysis.write_matrix_csv(args.out, names, mat)
        rows = [
            (a, b, f"{mat[i][j]:.4f}")
            for i, a in enumerate(names)
            for j, b in enumerate(names)
            if i < j
        ]
        print(analysis.format_table(["vector_a", "vector_b", "ami"], rows))
    elif args.report == "ua":
        rows = []
        ua_by_user = {r.user_id: r.ua for r in records}
        for v in vecs:
            clustering = collate.collate_records(records, v).components()
            rep = analysis.ua_homogeneity(clustering, ua_by_user)
            rows.append((v.value, rep.spanning_uas, rep.multi_user_uas))
        analysis.write_rows_csv(
            args.out, ["vector", "spanning_uas", "multi_user_uas"], rows
        )
        print(
            analysis.format_table(["vector", "spanning_uas", "multi_user_uas"], rows)
        )
    return 0


def _diversity_row(name: str, rep: analysis.DiversityReport):
    return (
        name,
        rep.distinct,
        rep.unique,
        f"{rep.entropy_bits:.3f}",
        f"{rep.normalized:.3f}",
    )


def cmd_serve(args) -> int:
    try:
        srv = server.serve_ingest(args.bind, args.dataset)
    except OSError as exc:
        print(f"cannot bind {args.bind}: {exc}", file=sys.stderr)
        return 1
    host, port = srv.server_address[:2]
    print(f"ingest listening on {host}:{port}, dataset {args.dataset}")
    try:
        srv.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        srv.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="audiofp",
        description="Audio fingerprinting vectors, population simulation and analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fingerprint", help="run all vectors for one device profile")
    p.add_argument("--device", required=True, help="device profile JSON")
    p.add_argument("--iterations", type=int, default=30)
    p.add_argument("--out", required=True)
    p.add_argument("--user-id", default="local")
    p.set_defaults(func=cmd_fingerprint)

    p = sub.add_parser("simulate", help="generate a synthetic population dataset")
    p.add_argument("--config", required=True, help="population config JSON")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="emit a report over a dataset")
    p.add_argument("report", choices=["stability", "diversity", "match", "compare", "ua"])
    p.add_argument("--dataset", required=True)
    p.add_argument("--s", type=int, default=None, help="subset size")
    p.add_argument("--vector", default=None, help="restrict to one vector")
    p.add_argument("--out", required=True, help="CSV output path")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("serve", help="run the ingest endpoint")
    p.add_argument("--bind", default="127.0.0.1:8300")
    p.add_argument("--dataset", required=True)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
