"""Distribution-learning metrics for generated SMILES batches."""

from __future__ import annotations

import math
from collections import Counter
from functools import lru_cache
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from ..molgraph.brics import brics_fragment
from ..molgraph.canon import write_canonical
from ..molgraph.descriptors import descriptors
from ..molgraph.fingerprint import Fingerprint, FingerprintMatrix, morgan_fingerprint, tanimoto
from ..molgraph.io import mol_from_smiles, try_canonical
from ..molgraph.scaffold import murcko_scaffold


@dataclass
class Parsed:
    """Canonical forms of a batch; None marks an invalid entry."""

    raw: list[str]
    canon: list[str | None]

    @classmethod
    def of(cls, batch) -> "Parsed":
        batch = list(batch)
        return cls(batch, [_canon(s) for s in batch])

    @property
    def valid(self) -> list[str]:
        return [c for c in self.canon if c is not None]

    @property
    def unique(self) -> list[str]:
        return sorted(set(self.valid))


# per-molecule work is memoized: benchmarks revisit the same strings often
_CACHE = 1 << 16


@lru_cache(maxsize=_CACHE)
def _canon(s: str) -> str | None:
    return try_canonical(s)


@lru_cache(maxsize=_CACHE)
def _fp(s: str) -> Fingerprint:
    return morgan_fingerprint(mol_from_smiles(s))


@lru_cache(maxsize=_CACHE)
def _frags(s: str) -> tuple[str, ...]:
    return tuple(f.smiles for f in brics_fragment(mol_from_smiles(s)))


@lru_cache(maxsize=_CACHE)
def _scaffold(s: str) -> str:
    return write_canonical(murcko_scaffold(mol_from_smiles(s)))


@lru_cache(maxsize=_CACHE)
def _desc(s: str) -> tuple[float, ...]:
    return tuple(descriptors(mol_from_smiles(s)).as_list())


def _parsed(batch) -> Parsed:
    return batch if isinstance(batch, Parsed) else Parsed.of(batch)


def validity(batch) -> float:
    p = _parsed(batch)
    return len(p.valid) / len(p.raw) if p.raw else 0.0


def uniqueness_at(batch, k: int) -> float:
    """Distinct canonical SMILES among the first k valid entries, over the entries taken."""
    p = _parsed(batch)
    if k < 1:
        raise ValueError("k must be positive")
    if k > len(p.raw):
        raise ValueError("k exceeds batch size")
    first = p.valid[:k]
    return len(set(first)) / len(first) if first else 0.0


def novelty_fraction(batch, training_set) -> float:
    """Share of valid unique molecules whose canonical form is absent from the training set."""
    u = _parsed(batch).unique
    if not u:
        return 0.0
    train = set(_parsed(training_set).valid)
    return sum(1 for s in u if s not in train) / len(u)


def fingerprints(smiles: list[str]) -> list[Fingerprint]:
    return [_fp(s) for s in smiles]


def internal_diversity(batch, p: int = 1) -> float:
    """1 - mean over ordered pairs i != j of tanimoto^p, over valid unique molecules.

    Streams one similarity row at a time; the sum is exactly rounded
    (math.fsum) so it is independent of summation order.
    """
    if p not in (1, 2):
        raise ValueError("p must be 1 or 2")
    u = _parsed(batch).unique
    n = len(u)
    if n < 2:
        return 0.0
    fps = fingerprints(u)
    m = FingerprintMatrix(fps)
    parts = []
    for i, fp in enumerate(fps):
        row = m.similarities(fp)
        row = np.delete(row, i)
        parts.append(row ** p if p == 2 else row)
    total = math.fsum(np.concatenate(parts))
    return min(1.0, max(0.0, 1.0 - total / (n * (n - 1))))


def internal_diversity_bruteforce(batch, p: int = 1) -> float:
    """O(n^2) reference for internal_diversity."""
    u = _parsed(batch).unique
    n = len(u)
    if n < 2:
        return 0.0
    fps = fingerprints(u)
    vals = [tanimoto(fps[i], fps[j]) ** p for i in range(n) for j in range(n) if i != j]
    return min(1.0, max(0.0, 1.0 - math.fsum(vals) / (n * (n - 1))))


def snn(batch, reference) -> float:
    """Mean over valid batch molecules of the max Tanimoto to any reference molecule."""
    gen = _parsed(batch).valid
    ref = _parsed(reference).unique
    if not gen or not ref:
        return 0.0
    m = FingerprintMatrix(fingerprints(ref))
    best = [float(m.similarities(fp).max()) for fp in fingerprints(gen)]
    return min(1.0, max(0.0, math.fsum(best) / len(best)))


def _count_cosine(a: Counter, b: Counter) -> float:
    """Cosine of two count vectors; exact 1.0 when proportional, 0 if either is empty."""
    if not a or not b:
        return 0.0
    dot = sum(v * b[k] for k, v in a.items() if k in b)
    na = sum(v * v for v in a.values())
    nb = sum(v * v for v in b.values())
    if dot * dot == na * nb:
        return 1.0
    return min(1.0, dot / math.sqrt(na * nb))


def fragment_counts(smiles: list[str]) -> Counter:
    c: Counter = Counter()
    for s in smiles:
        c.update(_frags(s))
    return c


def scaffold_counts(smiles: list[str]) -> Counter:
    """Murcko scaffold counts; acyclic molecules share the empty scaffold."""
    return Counter(_scaffold(s) for s in smiles)


def frag_scaf_similarity(batch, reference) -> dict[str, float]:
    gen = _parsed(batch).valid
    ref = _parsed(reference).valid
    return {
        "frag_cosine": _count_cosine(fragment_counts(gen), fragment_counts(ref)),
        "scaf_cosine": _count_cosine(scaffold_counts(gen), scaffold_counts(ref)),
    }


def descriptor_frechet(batch, reference) -> float | None:
    """Fréchet distance between Gaussian fits of the descriptor vectors.

    A descriptor-space stand-in for the neural FCD; not bounded to [0, 1].
    None when either set has fewer than two valid molecules.
    """
    gen = _parsed(batch).valid
    ref = _parsed(reference).valid
    if len(gen) < 2 or len(ref) < 2:
        return None
    x = np.array([_desc(s) for s in gen])
    y = np.array([_desc(s) for s in ref])
    mu1, mu2 = x.mean(axis=0), y.mean(axis=0)
    s1, s2 = np.cov(x, rowvar=False), np.cov(y, rowvar=False)
    covmean = linalg.sqrtm(s1 @ s2)
    if np.iscomplexobj(covmean):
        covmean = covmean.real
    d = float(((mu1 - mu2) ** 2).sum() + np.trace(s1 + s2 - 2.0 * covmean))
    return max(0.0, d)
