"""2D filter and scoring modules plus the composite reward."""

from .rules import MCFRule, MorphRule, RuleFileError, RuleSet, load_drug_likeness, load_mcf, load_morph
from .filters import MCFVerdict, RO5Result, TIndexConfig, TIndexResult, drug_likeness, flex, mcf_screen, ro5, t_index
from .complexity import FragmentStats, RersaConfig, mce18, quadratic_index, rersa
from .similarity import ClusterResult, ReferenceIndex, cluster_diversity, neighbor_lists, novelty
from .pf import PFScore, PrivilegedFragment, pf_mine, pf_score
from .som import SOMGrid, SOMVerdict, accuracy, quantization_error, som_classify, som_train, zoom_refine
from .morph import morph, morph_variants
from .reward import RewardWeights, ScoreReport, drug_likeness_weights, range_score, reward
from .pipeline import MODULES, ScoringContext, evaluate, screen

__all__ = [
    "MCFRule", "MorphRule", "RuleFileError", "RuleSet", "load_drug_likeness", "load_mcf", "load_morph",
    "MCFVerdict", "RO5Result", "TIndexConfig", "TIndexResult", "drug_likeness", "flex", "mcf_screen",
    "ro5", "t_index", "FragmentStats", "RersaConfig", "mce18", "quadratic_index", "rersa",
    "ClusterResult", "ReferenceIndex", "cluster_diversity", "neighbor_lists", "novelty",
    "PFScore", "PrivilegedFragment", "pf_mine", "pf_score", "SOMGrid", "SOMVerdict", "accuracy",
    "quantization_error", "som_classify", "som_train", "zoom_refine", "morph", "morph_variants",
    "RewardWeights", "ScoreReport", "drug_likeness_weights", "range_score", "reward",
    "MODULES", "ScoringContext", "evaluate", "screen",
]
