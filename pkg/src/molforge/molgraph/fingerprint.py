"""Circular (Morgan-style) fingerprints and bit-vector similarity.

Hashing uses the splitmix64 finalizer so that bits are stable across
platforms and Python versions (``hash()`` is salted per process and is
never used here).  Bits will not match any other toolkit's Morgan bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import Molecule, NotSanitizedError

MASK64 = (1 << 64) - 1
DEFAULT_WIDTH = 2048
DEFAULT_RADIUS = 2


def mix64(x: int) -> int:
    """splitmix64 finalizer: a bijective 64-bit avalanche mix."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def hash_seq(values: Iterable[int]) -> int:
    """Order-sensitive 64-bit hash of a sequence of small integers."""
    h = 0x84222325CBF29CE4
    for v in values:
        h = mix64(h ^ (v & MASK64))
    return h


def _check_width(width: int) -> None:
    if width < 8 or width & (width - 1):
        raise ValueError(f"fingerprint width must be a power of two >= 8, got {width}")


@dataclass(frozen=True, eq=False)
class Fingerprint:
    """Fixed-width bit vector stored as packed bytes (big-endian bit order)."""

    packed: np.ndarray
    width: int = DEFAULT_WIDTH
    radius: int = DEFAULT_RADIUS
    popcount: int = field(init=False)

    def __post_init__(self):
        _check_width(self.width)
        arr = np.ascontiguousarray(self.packed, dtype=np.uint8)
        if arr.shape != (self.width // 8,):
            raise ValueError("packed array does not match width")
        arr.setflags(write=False)
        object.__setattr__(self, "packed", arr)
        object.__setattr__(self, "popcount", int(np.bitwise_count(arr).sum()))

    @classmethod
    def from_bits(cls, on: Iterable[int], width: int = DEFAULT_WIDTH, radius: int = DEFAULT_RADIUS):
        _check_width(width)
        dense = np.zeros(width, dtype=np.uint8)
        idx = np.fromiter(on, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= width):
            raise ValueError("bit index out of range")
        dense[idx] = 1
        return cls(np.packbits(dense), width, radius)

    def on_bits(self) -> list[int]:
        return np.flatnonzero(np.unpackbits(self.packed)).tolist()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Fingerprint):
            return NotImplemented
        return self.width == other.width and bool(np.array_equal(self.packed, other.packed))

    def __hash__(self) -> int:
        return hash((self.width, self.packed.tobytes()))


def atom_invariants(mol: Molecule) -> list[int]:
    ring_atoms = mol.ring_atoms
    out = []
    for i, a in enumerate(mol.atoms):
        out.append(
            hash_seq(
                (
                    a.atomic_number,
                    len(mol.adjacency[i]),
                    a.formal_charge + 8,
                    a.implicit_h,
                    int(a.aromatic),
                    int(i in ring_atoms),
                )
            )
        )
    return out


def morgan_environments(mol: Molecule, radius: int = DEFAULT_RADIUS) -> set[int]:
    """Set of 64-bit environment identifiers for radii 0..radius."""
    if not mol.sanitized:
        raise NotSanitizedError("fingerprints require a sanitized molecule")
    if radius < 0:
        raise ValueError("radius must be non-negative")
    cur = atom_invariants(mol)
    envs = set(cur)
    bonds = mol.bonds
    for r in range(1, radius + 1):
        nxt = []
        for i, row in enumerate(mol.adjacency):
            nbrs = sorted((int(bonds[k].order), cur[j]) for j, k in row)
            flat = [r, cur[i]]
            for o, h in nbrs:
                flat.append(o)
                flat.append(h)
            nxt.append(hash_seq(flat))
        cur = nxt
        envs.update(cur)
    return envs


def morgan_fingerprint(mol: Molecule, radius: int = DEFAULT_RADIUS, width: int = DEFAULT_WIDTH) -> Fingerprint:
    _check_width(width)
    envs = morgan_environments(mol, radius)
    return Fingerprint.from_bits((h % width for h in envs), width, radius)


def _pair_counts(a: Fingerprint, b: Fingerprint) -> tuple[int, int, int]:
    if a.width != b.width:
        raise ValueError(f"fingerprint width mismatch: {a.width} vs {b.width}")
    both = int(np.bitwise_count(np.bitwise_and(a.packed, b.packed)).sum())
    return both, a.popcount, b.popcount


def tanimoto(a: Fingerprint, b: Fingerprint) -> float:
    both, na, nb = _pair_counts(a, b)
    union = na + nb - both
    return both / union if na and nb else 0.0


def cosine(a: Fingerprint, b: Fingerprint) -> float:
    both, na, nb = _pair_counts(a, b)
    if not (na and nb):
        return 0.0
    if na == nb and both == na:
        return 1.0
    return min(1.0, both / float(np.sqrt(na * nb)))


METRICS = {"tanimoto": tanimoto, "cosine": cosine}


def similarity(a: Fingerprint, b: Fingerprint, metric: str = "tanimoto") -> float:
    try:
        fn = METRICS[metric]
    except KeyError:
        raise ValueError(f"unknown similarity metric {metric!r}") from None
    return fn(a, b)


class FingerprintMatrix:
    """Row-stacked fingerprints for one-vs-many similarity."""

    def __init__(self, fps: Sequence[Fingerprint], width: int | None = None):
        if width is None:
            width = fps[0].width if fps else DEFAULT_WIDTH
        for fp in fps:
            if fp.width != width:
                raise ValueError("fingerprint width mismatch in matrix")
        self.width = width
        self.rows = (
            np.stack([fp.packed for fp in fps]) if fps else np.zeros((0, width // 8), np.uint8)
        )
        self.counts = np.bitwise_count(self.rows).sum(axis=1).astype(np.int64)

    def __len__(self) -> int:
        return self.rows.shape[0]

    def intersections(self, fp: Fingerprint) -> np.ndarray:
        if fp.width != self.width:
            raise ValueError(f"fingerprint width mismatch: {fp.width} vs {self.width}")
        return np.bitwise_count(self.rows & fp.packed).sum(axis=1).astype(np.int64)

    def similarities(self, fp: Fingerprint, metric: str = "tanimoto") -> np.ndarray:
        both = self.intersections(fp)
        na = fp.popcount
        nb = self.counts
        out = np.zeros(len(self), dtype=np.float64)
        ok = (nb > 0) & (na > 0)
        if metric == "tanimoto":
            out[ok] = both[ok] / (na + nb[ok] - both[ok])
        elif metric == "cosine":
            out[ok] = np.minimum(1.0, both[ok] / np.sqrt(na * nb[ok].astype(np.float64)))
            out[ok & (nb == na) & (both == na)] = 1.0
        else:
            raise ValueError(f"unknown similarity metric {metric!r}")
        return out
