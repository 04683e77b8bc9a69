"""Fingerprint collation through a bipartite user/fingerprint graph.

Every user and every elementary fingerprint is a node; an observation
links the two.  A connected component is one collated fingerprint, and
the users inside it form one user cluster.  The workload only ever adds
edges, so connectivity runs on a union-find (path compression plus
union by rank) instead of a fully-dynamic structure.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Clustering:
    """Total labeling of users; the label is the minimum user id in the
    component, so identical edge sets yield identical labels."""

    labels: dict[str, str]

    def __len__(self) -> int:
        return len(self.labels)


class CollationGraph:
    """Incremental user/fingerprint graph with online connectivity.

    Fingerprint node keys carry the vector tag so a graph holding more
    than one vector's digests never cross-contaminates.  Single writer;
    reads are safe between insertion batches.
    """

    def __init__(self, vector: str | None = None):
        self.vector = "" if vector is None else str(vector)
        self._parent: dict = {}
        self._rank: dict = {}
        self._user_fps: dict[str, set] = {}
        self._components = 0

    # -- union-find core ----------------------------------------------------

    def _add_node(self, node) -> None:
        if node not in self._parent:
            self._parent[node] = node
            self._rank[node] = 0
            self._components += 1

    def _find(self, node):
        parent = self._parent
        root = node
        while parent[root] != root:
            root = parent[root]
        while parent[node] != root:  # path compression
            parent[node], node = root, parent[node]
        return root

    def _union(self, a, b) -> bool:
        ra, rb = self._find(a), self._find(b)
        if ra == rb:
            return False
        if self._rank[ra] < self._rank[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        if self._rank[ra] == self._rank[rb]:
            self._rank[ra] += 1
        self._components -= 1
        return True

    # -- public surface -----------------------------------------------------

    def fp_key(self, digest: str, vector: str | None = None):
        return ("f", self.vector if vector is None else str(vector), digest)

    def add_observation(self, user: str, fp: str, vector: str | None = None) -> bool:
        """Record that ``user`` produced fingerprint ``fp``.

        Idempotent for repeated pairs.  Returns True only when the edge
        merged two components that each already existed — the event in
        which previously distinct user clusters collapse into one.
        """
        ukey = ("u", user)
        fkey = self.fp_key(fp, vector)
        fps = self._user_fps.setdefault(user, set())
        if fkey in fps:
            return False
        both_existed = ukey in self._parent and fkey in self._parent
        self._add_node(ukey)
        self._add_node(fkey)
        fps.add(fkey)
        merged = self._union(ukey, fkey)
        return merged and both_existed

    def add_user_fingerprints(self, user: str, fps) -> int:
        """Bulk insert; returns how many cluster merges occurred."""
        return sum(1 for fp in fps if self.add_observation(user, fp))

    @property
    def user_nodes(self) -> set[str]:
        return set(self._user_fps)

    @property
    def fp_nodes(self) -> set:
        return {n for n in self._parent if n[0] == "f"}

    def component_count(self) -> int:
        return self._components

    def connected(self, user_a: str, user_b: str) -> bool:
        return self._find(("u", user_a)) == self._find(("u", user_b))

    def user_component(self, user: str):
        """Union-find root of a user's component (opaque token)."""
        return self._find(("u", user))

    def fp_component(self, fp: str, vector: str | None = None):
        key = self.fp_key(fp, vector)
        return self._find(key) if key in self._parent else None

    def components(self) -> Clustering:
        """One label per user; users share a label iff connected."""
        groups: dict = {}
        for user in self._user_fps:
            groups.setdefault(self._find(("u", user)), []).append(user)
        labels: dict[str, str] = {}
        for members in groups.values():
            rep = min(members)
            for user in members:
                labels[user] = rep
        return Clustering(labels)

    def edges(self):
        """All (user, fp-key) pairs, for export and external verification."""
        for user, fps in self._user_fps.items():
            for fkey in fps:
                yield user, fkey

    def export_edge_list(self, path) -> None:
        """One "user fp" pair per line; fp rendered as vector:digest."""
        with open(path, "w", encoding="utf-8") as fh:
            for user in sorted(self._user_fps):
                for fkey in sorted(self._user_fps[user]):
                    fh.write(f"{user} {fkey[1]}:{fkey[2]}\n")


def collate_records(records, vector, iterations: slice | None = None) -> CollationGraph:
    """Build a collation graph from user records for one vector.

    ``iterations`` restricts which iteration indices contribute (used by
    the subset-stability analyses); default is all of them.
    """
    g = CollationGraph(vector=getattr(vector, "value", vector))
    for rec in records:
        results = rec.per_vector[vector]
        if iterations is not None:
            results = results[iterations]
        for res in results:
            g.add_observation(rec.user_id, res.fingerprint.digest)
    return g


def distinct_per_user(records, vector) -> tuple[int, int, float]:
    """(min, max, mean) distinct raw digests per user, pre-collation."""
    counts = []
    for rec in records:
        results = rec.per_vector[vector]
        if not results:
            raise ValueError(f"user {rec.user_id} has no iterations for {vector}")
        counts.append(len({r.fingerprint.digest for r in results}))
    if not counts:
        raise ValueError("no records")
    return min(counts), max(counts), sum(counts) / len(counts)
