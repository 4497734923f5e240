"""Screening context: runs every 2D module on a candidate and builds its report."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from ..molgraph.core import MolError
from ..molgraph.descriptors import descriptors
from ..molgraph.fingerprint import DEFAULT_RADIUS, DEFAULT_WIDTH, morgan_fingerprint
from ..molgraph.io import mol_from_smiles
from ..molgraph.canon import write_canonical
from .complexity import FragmentStats, RersaConfig, mce18, rersa
from .filters import TIndexConfig, drug_likeness, flex, mcf_screen, ro5, t_index
from .pf import pf_score
from .reward import RewardWeights, ScoreReport, drug_likeness_weights, reward
from .rules import RuleSet, load_drug_likeness, load_mcf
from .similarity import ReferenceIndex, novelty
from .som import SOMGrid, som_classify

MODULES = ("mcf", "t_index", "ro5", "drug_likeness", "mce18", "rersa", "novelty",
           "similarity", "pf", "flex", "som")


@dataclass
class ScoringContext:
    """Everything the screening cascade needs; read-only once built."""

    weights: RewardWeights = field(default_factory=drug_likeness_weights)
    mcf: RuleSet | None = None
    drug_rules: tuple | None = None
    t_cfg: TIndexConfig = field(default_factory=TIndexConfig)
    frag_stats: FragmentStats | None = None
    rersa_cfg: RersaConfig = field(default_factory=RersaConfig)
    known: ReferenceIndex | None = None  # novelty reference
    reference: ReferenceIndex | None = None  # similarity_to_reference (cosine)
    pfs: list | None = None
    som: SOMGrid | None = None
    modules: tuple[str, ...] = MODULES
    max_violations: int = 1
    fp_radius: int = DEFAULT_RADIUS
    fp_width: int = DEFAULT_WIDTH

    def __post_init__(self):
        unknown = set(self.modules) - set(MODULES)
        if unknown:
            raise ValueError(f"unknown scoring modules: {sorted(unknown)}")
        if self.mcf is None:
            self.mcf = load_mcf()
        if self.drug_rules is None:
            self.drug_rules = load_drug_likeness()
        if self.frag_stats is None and "rersa" in self.modules:
            self.frag_stats = FragmentStats.load()


def evaluate(smiles: str, ctx: ScoringContext, cascade: bool = True) -> ScoreReport:
    """Score one candidate.

    Cascade order: sanitize, MCF hard rules, T-index, descriptors, the other
    2D scores, reward.  With ``cascade`` a failed gate stops scoring; without
    it every module runs and the gates are applied at the end.  The reward
    is the same either way.
    """
    try:
        mol = mol_from_smiles(smiles)
    except (MolError, ValueError) as e:
        return ScoreReport(smiles, valid=False, hard_fail=True, gate="valence", warnings=(str(e),))
    rep = ScoreReport(write_canonical(mol))
    on = set(ctx.modules)
    warnings = []

    def gate(name: str) -> bool:
        if rep.gate is None:
            rep.gate = name
        rep.hard_fail = True
        return cascade

    if "mcf" in on:
        v = mcf_screen(mol, ctx.mcf)
        rep.mcf_pass, rep.mcf_hits = v.passed, v.hits
        if not v.passed and gate("mcf"):
            return rep
    desc = descriptors(mol)
    if "t_index" in on:
        t = t_index(desc, ctx.t_cfg)
        rep.t_index_pass, rep.t_index_ratio = t.passed, t.ratio
        if not t.passed and gate("t_index"):
            return rep
    rep.descriptors = desc.as_dict()
    if "ro5" in on:
        r = ro5(desc, ctx.max_violations)
        rep.ro5_violations, rep.ro5_pass = r.violations, r.passed
    if "drug_likeness" in on:
        rep.drug_likeness = drug_likeness(desc, ctx.drug_rules)
    if "mce18" in on:
        rep.mce18 = mce18(mol, desc)
    if "rersa" in on:
        rep.rersa = rersa(mol, ctx.frag_stats, ctx.rersa_cfg, desc)
    if "flex" in on:
        rep.flex = flex(desc)
    fp = None
    if {"novelty", "similarity"} & on:
        fp = morgan_fingerprint(mol, ctx.fp_radius, ctx.fp_width)
    if "novelty" in on and ctx.known is not None:
        n = novelty(fp, ctx.known)
        rep.novelty = n.score
        if n.warning:
            warnings.append(n.warning)
    if "similarity" in on and ctx.reference is not None and len(ctx.reference):
        rep.similarity_to_reference = ctx.reference.max_similarity(fp)
    if "pf" in on and ctx.pfs is not None:
        p = pf_score(mol, ctx.pfs)
        rep.pf_score = p.score
        if p.warning:
            warnings.append(p.warning)
    if "som" in on and ctx.som is not None:
        v = som_classify(ctx.som, desc.as_list())
        rep.som_class, rep.som_confidence = v.label, v.confidence
        if ctx.weights.som_target is not None:
            rep.som_target_fraction = som_target_fraction(ctx.som, desc.as_list(), ctx.weights.som_target)
    rep.warnings = tuple(warnings)
    rep.reward = reward(rep, ctx.weights)
    return rep


def som_target_fraction(grid: SOMGrid, vector, target) -> float:
    """Share of the target class in the deciding neuron's histogram (ZOOM-aware)."""
    v = som_classify(grid, vector)
    g = grid
    k = int(g.bmus(vector)[0])
    for _ in range(v.depth):
        g = g.children[k]
        k = int(g.bmus(vector)[0])
    row = g.neuron_labels[k]
    if target not in g.classes or row.sum() == 0:
        return 0.0
    return float(row[g.classes.index(target)] / row.sum())


def screen(smiles_list, ctx: ScoringContext, cascade: bool = True) -> list[ScoreReport]:
    return [evaluate(s, ctx, cascade) for s in smiles_list]


def with_weights(ctx: ScoringContext, weights: RewardWeights) -> ScoringContext:
    return replace(ctx, weights=weights)
