"""Privileged fragments: BRICS fragments enriched in actives over a background set."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from ..molgraph.brics import brics_fragment
from ..molgraph.core import Molecule
from ..molgraph.io import mol_from_smiles
from ..molgraph.smarts import Query, has_match


@dataclass(frozen=True)
class PrivilegedFragment:
    smiles: str
    enrichment: float
    active_count: int
    query: Query = field(compare=False, repr=False)

    @classmethod
    def make(cls, smiles: str, enrichment: float, active_count: int = 0) -> "PrivilegedFragment":
        return cls(smiles, enrichment, active_count, Query.from_molecule(mol_from_smiles(smiles)))


def _fragment_sets(mols) -> list[set[str]]:
    return [{f.smiles for f in brics_fragment(m)} for m in mols]


def pf_mine(actives, background, min_enrichment: float = 2.0,
            floor: float = 0.01, min_active: int = 2) -> list[PrivilegedFragment]:
    """Fragments with enrichment = freq_active / max(freq_background, floor).

    Frequencies are the share of molecules containing the fragment.  Kept
    when enrichment >= min_enrichment and at least ``min_active`` actives
    contain it; sorted by enrichment descending then SMILES.
    """
    actives, background = list(actives), list(background)
    if not actives or not background:
        raise ValueError("pf_mine needs non-empty active and background sets")
    act = Counter(s for fs in _fragment_sets(actives) for s in fs)
    bg = Counter(s for fs in _fragment_sets(background) for s in fs)
    out = []
    for smi, n in act.items():
        if n < min_active:
            continue
        e = (n / len(actives)) / max(bg[smi] / len(background), floor)
        if e >= min_enrichment:
            out.append(PrivilegedFragment.make(smi, e, n))
    out.sort(key=lambda p: (-p.enrichment, p.smiles))
    return out


@dataclass(frozen=True)
class PFScore:
    score: float
    present: tuple[str, ...]
    warning: str | None = None


def pf_score(mol: Molecule, pfs) -> PFScore:
    """Enrichment-weighted share of privileged fragments found in ``mol``."""
    pfs = list(pfs)
    if not pfs:
        return PFScore(0.5, (), "empty privileged-fragment set")
    total = sum(p.enrichment for p in pfs)
    present = [p for p in pfs if has_match(mol, p.query)]
    if total <= 0:
        return PFScore(len(present) / len(pfs), tuple(p.smiles for p in present))
    got = sum(p.enrichment for p in present)
    return PFScore(min(1.0, got / total), tuple(p.smiles for p in present))
