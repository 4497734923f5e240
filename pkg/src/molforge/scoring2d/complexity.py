"""MCE-18 and the fragment-frequency synthetic accessibility score (ReRSA)."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from ..molgraph.brics import brics_fragment
from ..molgraph.core import Molecule
from ..molgraph.descriptors import DescriptorVector, descriptors, is_sp3_carbon
from ..molgraph.elements import data_path


def quadratic_index(mol: Molecule) -> float:
    """Normalized quadratic index Q1 = 3 - 2N + M/2 over the heavy-atom graph.

    M is the sum of squared heavy-atom degrees (first Zagreb index).
    """
    heavy = [i for i, a in enumerate(mol.atoms) if a.element not in ("H", "*")]
    hs = set(heavy)
    m = 0
    for i in heavy:
        d = sum(1 for j, _ in mol.adjacency[i] if j in hs)
        m += d * d
    return 3 - 2 * len(heavy) + m / 2


def mce18(mol: Molecule, desc: DescriptorVector | None = None) -> float:
    """(AR + NAR + CHIRAL + SPIRO + (sp3 + Cyc - Acyc)/(1 + sp3)) * Q1, floored at 0.

    Cyc and Acyc are the shares of sp3 carbons that are in / not in a ring.
    """
    if desc is None:
        desc = descriptors(mol)
    ring_atoms = mol.ring_atoms
    sp3 = [i for i in range(len(mol.atoms)) if is_sp3_carbon(mol, i)]
    cyc = sum(1 for i in sp3 if i in ring_atoms) / len(sp3) if sp3 else 0.0
    acyc = 1.0 - cyc if sp3 else 0.0
    fsp3 = desc.fraction_sp3
    flags = (
        (desc.aromatic_rings > 0)
        + (desc.aliphatic_rings > 0)
        + (desc.chiral_centers > 0)
        + (desc.spiro_atoms > 0)
    )
    score = (flags + (fsp3 + cyc - acyc) / (1 + fsp3)) * quadratic_index(mol)
    return max(0.0, score)


@dataclass
class FragmentStats:
    """Fragment -> count table built from a reference corpus."""

    counts: dict[str, int]

    def __post_init__(self):
        if not self.counts:
            raise ValueError("fragment statistics are empty")
        self.max_count = max(self.counts.values())

    def frequency(self, frag: str) -> float:
        return self.counts.get(frag, 0) / self.max_count

    @classmethod
    def from_molecules(cls, mols) -> "FragmentStats":
        c: Counter = Counter()
        for m in mols:
            c.update(f.smiles for f in brics_fragment(m))
        return cls(dict(c))

    @classmethod
    def load(cls, path: str | None = None) -> "FragmentStats":
        path = path or data_path("fragment_stats.txt")
        counts = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip() or line.startswith("#"):
                    continue
                parts = line.rstrip("\n").split("\t")
                if len(parts) != 2:
                    raise ValueError(f"{path}:{lineno}: expected '<fragment>\\t<count>'")
                counts[parts[0]] = int(parts[1])
        return cls(counts)

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("# fragment\tcount\n")
            for frag, n in sorted(self.counts.items(), key=lambda kv: (-kv[1], kv[0])):
                fh.write(f"{frag}\t{n}\n")


@dataclass(frozen=True)
class RersaConfig:
    floor: float = 1e-3  # frequencies below this count as this
    rarity_weight: float = 6.0
    macrocycle_penalty: float = 1.0  # any SSSR ring larger than 8
    spiro_penalty: float = 0.5  # per spiro atom
    chiral_penalty: float = 1.0  # four or more chiral centres
    size_penalty: float = 1.0  # more than 50 heavy atoms


def rersa(mol: Molecule, stats: FragmentStats, cfg: RersaConfig = RersaConfig(),
          desc: DescriptorVector | None = None) -> float:
    """1 (easy) .. 10 (hard): fragment rarity plus structural penalties."""
    if desc is None:
        desc = descriptors(mol)
    frags = [f.smiles for f in brics_fragment(mol)]
    norm = -math.log10(cfg.floor)
    rarity = sum(-math.log10(max(stats.frequency(f), cfg.floor)) / norm for f in frags) / len(frags)
    score = 1.0 + cfg.rarity_weight * rarity
    if any(len(r) > 8 for r in mol.rings):
        score += cfg.macrocycle_penalty
    score += cfg.spiro_penalty * desc.spiro_atoms
    if desc.chiral_centers >= 4:
        score += cfg.chiral_penalty
    if desc.heavy_atoms > 50:
        score += cfg.size_penalty
    return min(10.0, max(1.0, score))
