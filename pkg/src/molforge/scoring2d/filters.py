"""Rule-based filters: MCF screen, RO5, T-index, drug-likeness, FLEX."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..molgraph.core import Molecule
from ..molgraph.descriptors import DescriptorVector, descriptors
from ..molgraph.smarts import has_match
from .rules import RuleSet, load_drug_likeness, load_mcf


@dataclass(frozen=True)
class MCFVerdict:
    passed: bool
    hard_hits: tuple[str, ...] = ()
    soft_hits: tuple[str, ...] = ()

    @property
    def hits(self) -> tuple[str, ...]:
        return self.hard_hits + self.soft_hits


def mcf_screen(mol: Molecule, ruleset: RuleSet | None = None) -> MCFVerdict:
    """Fail iff a hard rule matches; soft hits are reported only."""
    if ruleset is None:
        ruleset = load_mcf()
    hard, soft = [], []
    for rule in ruleset.rules:
        if has_match(mol, rule.query):
            (hard if rule.severity == "hard" else soft).append(rule.id)
    return MCFVerdict(not hard, tuple(hard), tuple(soft))


@dataclass(frozen=True)
class RO5Result:
    violations: int
    passed: bool


def ro5(desc: DescriptorVector, max_violations: int = 1) -> RO5Result:
    """Lipinski: mw <= 500, logP <= 5, HBD <= 5, HBA <= 10 (all inclusive)."""
    v = (desc.mw > 500) + (desc.logp_est > 5) + (desc.hbd > 5) + (desc.hba > 10)
    return RO5Result(int(v), v <= max_violations)


@dataclass(frozen=True)
class TIndexConfig:
    lo: float = 0.05
    hi: float = 0.60
    min_heavy_atoms: int = 10


@dataclass(frozen=True)
class TIndexResult:
    passed: bool
    ratio: float


def t_index(desc: DescriptorVector, cfg: TIndexConfig = TIndexConfig()) -> TIndexResult:
    """Heteroatom share of heavy atoms; molecules below the size floor always pass."""
    ratio = desc.heteroatoms / desc.heavy_atoms if desc.heavy_atoms else 0.0
    if desc.heavy_atoms < cfg.min_heavy_atoms:
        return TIndexResult(True, ratio)
    return TIndexResult(cfg.lo <= ratio <= cfg.hi, ratio)


def drug_likeness(desc: DescriptorVector, rules=None) -> float:
    if rules is None:
        rules = load_drug_likeness()
    if not rules:
        raise ValueError("drug-likeness rule set is empty")
    return sum(r.satisfied(desc) for r in rules) / len(rules)


def flex(desc_or_mol) -> float:
    """Rotatable bonds per heavy-atom bond slot; 0 = rigid."""
    desc = desc_or_mol if isinstance(desc_or_mol, DescriptorVector) else descriptors(desc_or_mol)
    return desc.rotatable_bonds / max(desc.heavy_atoms - 1, 1)
