"""Stability and diversity metrics over collated fingerprints.

Stability: split each user's iterations into equal subsets, collate each
subset separately, and compare the resulting user clusterings with the
Adjusted Mutual Information score; additionally, match-score evaluation
replays later subsets against a training graph.  Diversity: Shannon and
normalized entropy of the anonymity-set size distribution, tuple
combination across vectors, and user-agent homogeneity per cluster.
"""

from __future__ import annotations

import csv
import enum
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .collate import Clustering, CollationGraph, collate_records
from .vectors import VECTOR_ORDER


@dataclass(frozen=True)
class IterationSet:
    """Contiguous, disjoint index ranges covering the first floor(k/s)*s
    iterations; anything past the last full subset is ignored."""

    k: int
    s: int
    subsets: tuple[range, ...]


def split_iterations(k: int, s: int) -> IterationSet:
    if not 1 <= s <= k:
        raise ValueError(f"subset size {s} must be in [1, {k}]")
    m = k // s
    return IterationSet(k, s, tuple(range(i * s, (i + 1) * s) for i in range(m)))


# ---------------------------------------------------------------------------
# adjusted mutual information

def _canonical_codes(labels_by_user: dict, users: list) -> np.ndarray:
    """Map labels to first-occurrence integer codes over sorted users, so
    the result depends on the partition structure, not the label names."""
    codes = {}
    out = np.empty(len(users), dtype=np.intp)
    for i, u in enumerate(users):
        lab = labels_by_user[u]
        out[i] = codes.setdefault(lab, len(codes))
    return out


def _entropy_nats(sizes: np.ndarray, n: int) -> float:
    p = sizes / n
    return float(-(p * np.log(p)).sum())


def expected_mutual_information(row_sizes, col_sizes, n: int) -> float:
    """Exact E[MI] under the permutation (hypergeometric) model, in nats.

    Sums the closed-form hypergeometric expectation over unique
    (row size, column size) pairs with multiplicity.
    """
    ua, ca = np.unique(np.asarray(row_sizes, dtype=np.int64), return_counts=True)
    ub, cb = np.unique(np.asarray(col_sizes, dtype=np.int64), return_counts=True)
    gln_n = gammaln(n + 1)
    log_n = math.log(n)
    total = 0.0
    for a, mult_a in zip(ua, ca):
        for b, mult_b in zip(ub, cb):
            lo = max(1, a + b - n)
            hi = min(a, b)
            nij = np.arange(lo, hi + 1, dtype=np.float64)
            log_w = (
                gammaln(a + 1)
                + gammaln(b + 1)
                + gammaln(n - a + 1)
                + gammaln(n - b + 1)
                - gln_n
                - gammaln(nij + 1)
                - gammaln(a - nij + 1)
                - gammaln(b - nij + 1)
                - gammaln(n - a - b + nij + 1)
            )
            terms = (nij / n) * (np.log(nij) + log_n - math.log(a * b)) * np.exp(log_w)
            total += float(mult_a) * float(mult_b) * float(terms.sum())
    return total


def _as_label_map(clustering) -> dict:
    return clustering.labels if isinstance(clustering, Clustering) else dict(clustering)


def ami(a, b) -> float:
    """Adjusted Mutual Information between two user clusterings.

    (MI - E[MI]) / (mean(H(a), H(b)) - E[MI]) with the exact
    hypergeometric E[MI]; arithmetic-mean normalization.  Identical
    partitions (up to relabeling) score exactly 1.0.
    """
    la, lb = _as_label_map(a), _as_label_map(b)
    if la.keys() != lb.keys():
        raise ValueError("clusterings cover different user sets")
    users = sorted(la)
    n = len(users)
    if n == 0:
        raise ValueError("empty clusterings")
    xa = _canonical_codes(la, users)
    xb = _canonical_codes(lb, users)
    contingency = Counter(zip(xa.tolist(), xb.tolist()))
    row_sizes = np.bincount(xa)
    col_sizes = np.bincount(xb)
    if len(contingency) == len(row_sizes) == len(col_sizes):
        # permutation contingency: the partitions are identical
        return 1.0
    mi = 0.0
    for (i, j), nij in sorted(contingency.items()):
        mi += (nij / n) * math.log(n * nij / (row_sizes[i] * col_sizes[j]))
    emi = expected_mutual_information(row_sizes, col_sizes, n)
    denom = 0.5 * (_entropy_nats(row_sizes, n) + _entropy_nats(col_sizes, n)) - emi
    if denom == 0.0:
        return 1.0
    return (mi - emi) / denom


# ---------------------------------------------------------------------------
# stability

@dataclass(frozen=True)
class StabilityReport:
    """Pairwise AMI among subset clusterings, per (vector, s)."""

    matrices: dict  # (vector, s) -> np.ndarray, symmetric, unit diagonal
    averages: dict  # (vector, s) -> mean off-diagonal AMI


def subset_clusterings(records, vector, s: int, k: int | None = None) -> list[Clustering]:
    if k is None:
        k = len(records[0].per_vector[vector])
    splits = split_iterations(k, s)
    out = []
    for rng in splits.subsets:
        graph = collate_records(records, vector, iterations=slice(rng.start, rng.stop))
        out.append(graph.components())
    return out


def stability_report(records, s_values, vectors=VECTOR_ORDER) -> StabilityReport:
    matrices: dict = {}
    averages: dict = {}
    for v in vectors:
        for s in s_values:
            clusterings = subset_clusterings(records, v, s)
            m = len(clusterings)
            mat = np.ones((m, m))
            pair_scores = []
            for i in range(m):
                for j in range(i + 1, m):
                    score = ami(clusterings[i], clusterings[j])
                    mat[i, j] = mat[j, i] = score
                    pair_scores.append(score)
            matrices[(v, s)] = mat
            averages[(v, s)] = float(np.mean(pair_scores)) if pair_scores else 1.0
    return StabilityReport(matrices, averages)


class MatchOutcome(enum.Enum):
    POSITIVE = "positive"
    NEW_CLUSTER = "new_cluster"
    MERGE = "merge"
    WRONG_CLUSTER = "wrong_cluster"


def classify_against_training(graph: CollationGraph, user: str, eval_fps) -> MatchOutcome:
    """Classify a user's evaluation fingerprints against the training graph.

    Positive only when the fingerprints touch exactly one existing
    component and it is the user's own.  Fingerprints absent from the
    training graph create no provisional nodes.
    """
    touched = set()
    for fp in eval_fps:
        comp = graph.fp_component(fp)
        if comp is not None:
            touched.add(comp)
    if not touched:
        return MatchOutcome.NEW_CLUSTER
    if len(touched) > 1:
        return MatchOutcome.MERGE
    return (
        MatchOutcome.POSITIVE
        if touched.pop() == graph.user_component(user)
        else MatchOutcome.WRONG_CLUSTER
    )


@dataclass(frozen=True)
class MatchScoreReport:
    scores: dict  # (vector, s) -> fraction of positive (user, subset) pairs


def match_score(records, vector, s: int) -> float:
    """Fraction of (user, evaluation-subset) pairs pointed to their own
    cluster by a training graph built from the first subset."""
    k = len(records[0].per_vector[vector])
    if k < 2 * s:
        raise ValueError(f"need at least 2 subsets of size {s}, have k={k}")
    splits = split_iterations(k, s)
    training = collate_records(records, vector, iterations=slice(0, s))
    positives = 0
    total = 0
    for rec in records:
        results = rec.per_vector[vector]
        for rng in splits.subsets[1:]:
            fps = {r.fingerprint.digest for r in results[rng.start : rng.stop]}
            outcome = classify_against_training(training, rec.user_id, fps)
            positives += outcome is MatchOutcome.POSITIVE
            total += 1
    return positives / total


def match_score_report(records, s_values=(15, 10, 3), vectors=VECTOR_ORDER) -> MatchScoreReport:
    return MatchScoreReport(
        {(v, s): match_score(records, v, s) for v in vectors for s in s_values}
    )


# ---------------------------------------------------------------------------
# diversity

@dataclass(frozen=True)
class ClusterCounts:
    total_users: int
    counts: tuple[int, ...]  # users per distinct fingerprint, each >= 1

    def __post_init__(self):
        if sum(self.counts) != self.total_users or any(c < 1 for c in self.counts):
            raise ValueError("counts must be >= 1 and sum to the user total")


@dataclass(frozen=True)
class DiversityReport:
    distinct: int
    unique: int
    entropy_bits: float
    normalized: float


def cluster_counts(values_by_user: dict) -> ClusterCounts:
    """Anonymity-set sizes from any per-user value map (cluster labels or
    opaque fingerprint strings)."""
    counter = Counter(values_by_user.values())
    return ClusterCounts(len(values_by_user), tuple(sorted(counter.values(), reverse=True)))


def shannon_entropy(c: ClusterCounts) -> float:
    """Bit entropy of the fingerprint distribution."""
    u = c.total_users
    return -sum((ui / u) * math.log2(ui / u) for ui in c.counts)


def normalized_entropy(entropy_bits: float, total_users: int) -> float:
    """Entropy divided by the maximum possible log2(U); needs U >= 2."""
    if total_users < 2:
        raise ValueError("normalized entropy needs at least 2 users")
    return entropy_bits / math.log2(total_users)


def diversity_report(values_by_user: dict) -> DiversityReport:
    c = cluster_counts(values_by_user)
    e = shannon_entropy(c)
    return DiversityReport(
        distinct=len(c.counts),
        unique=sum(1 for ui in c.counts if ui == 1),
        entropy_bits=e,
        normalized=normalized_entropy(e, c.total_users) if c.total_users >= 2 else 0.0,
    )


def combine_vectors(value_maps: list[dict], users=None) -> ClusterCounts:
    """Cluster users by equality of their per-vector value tuple."""
    if not value_maps:
        raise ValueError("need at least one value map")
    if users is None:
        users = list(value_maps[0])
    for m in value_maps:
        if set(m) != set(users):
            raise ValueError("all value maps must cover the same users")
    tuples = {u: tuple(m[u] for m in value_maps) for u in users}
    return cluster_counts(tuples)


def combined_diversity(value_maps: list[dict]) -> DiversityReport:
    c = combine_vectors(value_maps)
    e = shannon_entropy(c)
    return DiversityReport(
        distinct=len(c.counts),
        unique=sum(1 for ui in c.counts if ui == 1),
        entropy_bits=e,
        normalized=normalized_entropy(e, c.total_users) if c.total_users >= 2 else 0.0,
    )


# ---------------------------------------------------------------------------
# user-agent homogeneity

def ua_family(ua: str) -> str:
    return "firefox" if "Firefox/" in ua else "chrome"


@dataclass(frozen=True)
class UaHomogeneityReport:
    per_cluster: dict  # label -> (user count, distinct UAs, family mix Counter)
    spanning_uas: int  # UAs with >= 2 users that span more than one cluster
    multi_user_uas: int


def ua_homogeneity(clustering, ua_by_user: dict) -> UaHomogeneityReport:
    labels = _as_label_map(clustering)
    if labels.keys() != ua_by_user.keys():
        raise ValueError("UA map must cover exactly the clustered users")
    per_cluster: dict = {}
    clusters_by_ua: dict[str, set] = {}
    users_by_ua = Counter(ua_by_user.values())
    for user, label in labels.items():
        ua = ua_by_user[user]
        entry = per_cluster.setdefault(label, [0, set(), Counter()])
        entry[0] += 1
        entry[1].add(ua)
        entry[2][ua_family(ua)] += 1
        clusters_by_ua.setdefault(ua, set()).add(label)
    multi = {ua for ua, cnt in users_by_ua.items() if cnt >= 2}
    spanning = sum(1 for ua in multi if len(clusters_by_ua[ua]) > 1)
    return UaHomogeneityReport(
        per_cluster={
            lab: (cnt, len(uas), fams) for lab, (cnt, uas, fams) in per_cluster.items()
        },
        spanning_uas=spanning,
        multi_user_uas=len(multi),
    )


# ---------------------------------------------------------------------------
# cross-vector agreement

def compare_vectors(clusterings_by_vector: dict) -> tuple[list, np.ndarray]:
    """Pairwise AMI matrix across vectors (unit diagonal, symmetric)."""
    names = list(clusterings_by_vector)
    m = len(names)
    mat = np.ones((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            score = ami(clusterings_by_vector[names[i]], clusterings_by_vector[names[j]])
            mat[i, j] = mat[j, i] = score
    return names, mat


# ---------------------------------------------------------------------------
# emitters

def write_matrix_csv(path, names, matrix) -> None:
    """Long-form triples (row, col, value), one per line."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["row", "col", "value"])
        for i, a in enumerate(names):
            for j, b in enumerate(names):
                w.writerow([a, b, f"{matrix[i][j]:.6f}"])


def write_rows_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def format_table(header, rows) -> str:
    """Plain-text table: padded columns, one separator under the header."""
    cells = [list(map(str, header))] + [list(map(str, r)) for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    lines = []
    for idx, row in enumerate(cells):
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
        if idx == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)
