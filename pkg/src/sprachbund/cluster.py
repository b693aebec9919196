"""Agglomerative average-linkage clustering of languages under cosine distance.

Languages start as singleton clusters over the distance d(i, j) = 1 - sim.
At every step the two clusters with the smallest average pairwise distance
merge; exact ties go to the pair with the smallest (min node id, max node id).
Leaves are numbered 0..M-1 in matrix order and merged nodes M..2M-2, so the
whole dendrogram is reproducible on any platform.

Inter-cluster averages are maintained as exact pairwise-distance sums divided
by member-count products, which keeps the incremental update mathematically
identical to recomputing the mean from scratch.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .simmatrix import SimilarityMatrix


@dataclass(frozen=True)
class Merge:
    left: int
    right: int
    distance: float
    node_id: int


@dataclass(frozen=True)
class Dendrogram:
    """Full merge history over the matrix's languages (leaves in matrix order)."""

    languages: tuple[str, ...]
    merges: tuple[Merge, ...]

    def __post_init__(self):
        m = len(self.languages)
        if len(self.merges) != m - 1:
            raise ValidationError(
                f"{m} leaves require {m - 1} merges, got {len(self.merges)}")
        for i, mg in enumerate(self.merges):
            if mg.node_id != m + i:
                raise ValidationError("merge node ids must run M..2M-2 in order")
            if mg.distance < 0:
                raise ValidationError("merge distances must be non-negative")

    @property
    def leaf_count(self) -> int:
        return len(self.languages)

    def to_json(self) -> dict:
        return {
            "languages": list(self.languages),
            "merges": [
                {"left": m.left, "right": m.right,
                 "distance": m.distance, "id": m.node_id}
                for m in self.merges
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Dendrogram":
        return cls(
            tuple(doc["languages"]),
            tuple(Merge(m["left"], m["right"], float(m["distance"]), m["id"])
                  for m in doc["merges"]),
        )


@dataclass(frozen=True)
class SprachbundAssignment:
    """A k-way partition of the language set into disjoint clusters."""

    k: int
    members: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if self.k != len(self.members):
            raise ValidationError(
                f"k={self.k} but {len(self.members)} clusters given")
        seen: set[str] = set()
        for cluster in self.members:
            if not cluster:
                raise ValidationError("clusters must be non-empty")
            for code in cluster:
                if code in seen:
                    raise ValidationError(
                        f"language {code!r} appears in more than one cluster")
                seen.add(code)

    @property
    def languages(self) -> frozenset[str]:
        return frozenset(c for cluster in self.members for c in cluster)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "clusters": [{"pivot": None, "members": list(c)}
                         for c in self.members],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SprachbundAssignment":
        return cls(int(doc["k"]),
                   tuple(tuple(c["members"]) for c in doc["clusters"]))


def agglomerate(matrix: SimilarityMatrix) -> Dendrogram:
    """Average-linkage agglomeration on d = 1 - similarity."""
    m = len(matrix)
    if m < 2:
        raise ValidationError("clustering needs at least 2 languages")
    dist = 1.0 - matrix.values

    # sums[(a, b)] with a < b holds the total pairwise distance between the
    # members of clusters a and b; the average is sums / (size_a * size_b)
    sums: dict[tuple[int, int], float] = {}
    sizes: dict[int, int] = {i: 1 for i in range(m)}
    for i in range(m):
        for j in range(i + 1, m):
            sums[(i, j)] = float(dist[i, j])

    active = list(range(m))
    merges: list[Merge] = []
    next_id = m
    while len(active) > 1:
        best_key: tuple[float, int, int] | None = None
        for ai in range(len(active)):
            a = active[ai]
            for bi in range(ai + 1, len(active)):
                b = active[bi]
                avg = sums[(a, b)] / (sizes[a] * sizes[b])
                key = (avg, a, b)
                if best_key is None or key < best_key:
                    best_key = key
        avg, a, b = best_key
        merges.append(Merge(a, b, avg, next_id))
        sizes[next_id] = sizes[a] + sizes[b]
        for o in active:
            if o == a or o == b:
                continue
            sums[(min(o, next_id), max(o, next_id))] = (
                sums[(min(a, o), max(a, o))] + sums[(min(b, o), max(b, o))])
        active.remove(a)
        active.remove(b)
        active.append(next_id)
        next_id += 1
    return Dendrogram(matrix.languages, tuple(merges))


def cut(dendrogram: Dendrogram, k: int) -> SprachbundAssignment:
    """Undo the last k-1 merges; the k remaining subtrees are the clusters.

    Clusters are sorted by their smallest member code, members sorted within.
    """
    m = dendrogram.leaf_count
    if not 1 <= k <= m:
        raise ValidationError(f"k must be in [1, {m}], got {k}")
    groups: dict[int, list[str]] = {i: [dendrogram.languages[i]]
                                    for i in range(m)}
    for merge in dendrogram.merges[:m - k]:
        groups[merge.node_id] = groups.pop(merge.left) + groups.pop(merge.right)
    clusters = sorted((tuple(sorted(g)) for g in groups.values()),
                      key=lambda c: c[0])
    return SprachbundAssignment(k=k, members=tuple(clusters))


def random_baseline(languages: Sequence[str], sizes: Sequence[int],
                    seed: int) -> SprachbundAssignment:
    """Random clusters with prescribed sizes: seeded shuffle, then split.

    Cluster order follows ``sizes``; members are sorted within each cluster.
    """
    sizes = list(sizes)
    if any(s < 1 for s in sizes):
        raise ValidationError("all cluster sizes must be >= 1")
    if sum(sizes) != len(languages):
        raise ValidationError(
            f"sizes sum to {sum(sizes)} but there are {len(languages)} languages")
    pool = list(languages)
    rng = random.Random(seed)
    rng.shuffle(pool)
    clusters = []
    start = 0
    for size in sizes:
        clusters.append(tuple(sorted(pool[start:start + size])))
        start += size
    return SprachbundAssignment(k=len(sizes), members=tuple(clusters))


def silhouette(matrix: SimilarityMatrix,
               assignment: SprachbundAssignment) -> float:
    """Mean silhouette score of the assignment under d = 1 - sim.

    Singleton clusters contribute 0; so do points with a = b = 0.
    """
    if assignment.k < 2:
        raise ValidationError("silhouette needs at least 2 clusters")
    dist = 1.0 - matrix.values
    cluster_idx = [
        np.asarray([matrix.index(code) for code in cluster])
        for cluster in assignment.members
    ]
    scores = []
    for ci, own in enumerate(cluster_idx):
        for i in own:
            if len(own) == 1:
                scores.append(0.0)
                continue
            a = float(dist[i, own].sum() / (len(own) - 1))
            b = min(float(dist[i, other].mean())
                    for cj, other in enumerate(cluster_idx) if cj != ci)
            denom = max(a, b)
            scores.append(0.0 if denom == 0.0 else (b - a) / denom)
    return float(np.mean(scores))
