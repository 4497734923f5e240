"""Reference-set similarity, novelty and Butina clustering."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..molgraph.fingerprint import Fingerprint, FingerprintMatrix


@dataclass
class ReferenceIndex:
    """Fingerprints of the known-compound set; read-only once built."""

    fps: list[Fingerprint]
    metric: str = "tanimoto"
    matrix: FingerprintMatrix = field(init=False, repr=False)

    def __post_init__(self):
        self.matrix = FingerprintMatrix(self.fps)
        self._members = set(self.fps)

    def __len__(self) -> int:
        return len(self.fps)

    def max_similarity(self, fp: Fingerprint) -> float:
        if not self.fps:
            return 0.0
        if fp in self._members:
            return 1.0
        return float(self.matrix.similarities(fp, self.metric).max())


@dataclass(frozen=True)
class NoveltyResult:
    score: float
    warning: str | None = None


def novelty(fp: Fingerprint, index: ReferenceIndex) -> NoveltyResult:
    """1 - max similarity to any reference; 1.0 with a warning for an empty index."""
    if len(index) == 0:
        return NoveltyResult(1.0, "empty reference index")
    return NoveltyResult(min(1.0, max(0.0, 1.0 - index.max_similarity(fp))))


def similarity_matrix(fps: list[Fingerprint], metric: str = "tanimoto") -> np.ndarray:
    m = FingerprintMatrix(fps)
    return np.stack([m.similarities(fp, metric) for fp in fps]) if fps else np.zeros((0, 0))


def neighbor_lists(fps: list[Fingerprint], threshold: float) -> list[list[int]]:
    """Indices j != i with Tanimoto distance 1 - sim(i, j) <= threshold."""
    sims = similarity_matrix(fps)
    out = []
    for i in range(len(fps)):
        row = np.flatnonzero(1.0 - sims[i] <= threshold)
        out.append([int(j) for j in row if j != i])
    return out


@dataclass(frozen=True)
class ClusterResult:
    clusters: list[list[int]]  # leader first, then members ascending
    n_chemotypes: int
    mean_intra_similarity: float | None  # None when every cluster is a singleton

    def labels(self, n: int) -> list[int]:
        lab = [-1] * n
        for c, members in enumerate(self.clusters):
            for i in members:
                lab[i] = c
        return lab


def cluster_diversity(fps: list[Fingerprint], threshold: float = 0.35) -> ClusterResult:
    """Butina leader clustering on Tanimoto distance.

    Candidates are visited by descending neighbour count, lower index first
    on ties.  An unassigned candidate becomes a leader and takes all of its
    still-unassigned neighbours.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    n = len(fps)
    sims = similarity_matrix(fps)
    nbrs = [[int(j) for j in np.flatnonzero(1.0 - sims[i] <= threshold) if j != i] for i in range(n)]
    order = sorted(range(n), key=lambda i: (-len(nbrs[i]), i))
    assigned = [False] * n
    clusters = []
    for i in order:
        if assigned[i]:
            continue
        assigned[i] = True
        members = [j for j in nbrs[i] if not assigned[j]]
        for j in members:
            assigned[j] = True
        clusters.append([i] + sorted(members))
    pair_sims = []
    for c in clusters:
        for a in range(len(c)):
            for b in range(a + 1, len(c)):
                pair_sims.append(sims[c[a], c[b]])
    mean = float(np.mean(pair_sims)) if pair_sims else None
    return ClusterResult(clusters, len(clusters), mean)
