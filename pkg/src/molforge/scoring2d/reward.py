"""Per-candidate score report and the gated weighted-mean reward."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from ..molgraph.descriptors import FIELD_NAMES

# score components taken directly from a report, each already mapped to [0, 1]
SCORE_COMPONENTS = (
    "drug_likeness",
    "rersa",
    "novelty",
    "similarity",
    "pf_score",
    "rigidity",
    "mce18",
    "ro5",
    "som",
)
RANGE_COMPONENTS = FIELD_NAMES


@dataclass(frozen=True)
class RewardWeights:
    """Non-negative component weights plus desired ranges for descriptor fields.

    A weight keyed by a descriptor field name (e.g. ``mw``) needs a matching
    entry in ``ranges``.  Weights are normalized at use.
    """

    weights: dict[str, float]
    ranges: dict[str, tuple[float, float]] = field(default_factory=dict)
    mce18_cap: float = 100.0
    band: float = 0.25
    som_target: object | None = None

    def __post_init__(self):
        for k, w in self.weights.items():
            if k not in SCORE_COMPONENTS and k not in RANGE_COMPONENTS:
                raise ValueError(f"unknown reward component {k!r}")
            if not w >= 0:
                raise ValueError(f"weight for {k!r} must be non-negative")
            if k in RANGE_COMPONENTS and k not in self.ranges:
                raise ValueError(f"range component {k!r} has no desired range")
        if not any(w > 0 for w in self.weights.values()):
            raise ValueError("at least one reward weight must be positive")
        for k, (lo, hi) in self.ranges.items():
            if k not in RANGE_COMPONENTS:
                raise ValueError(f"unknown range property {k!r}")
            if lo > hi:
                raise ValueError(f"range for {k!r} has min > max")
        if self.mce18_cap <= 0 or self.band <= 0:
            raise ValueError("mce18_cap and band must be positive")

    def normalized(self) -> dict[str, float]:
        total = sum(self.weights.values())
        return {k: w / total for k, w in self.weights.items()}

    @classmethod
    def from_dict(cls, d: dict) -> "RewardWeights":
        ranges = {k: (float(v[0]), float(v[1])) for k, v in d.get("ranges", {}).items()}
        return cls(
            {k: float(v) for k, v in d["weights"].items()},
            ranges,
            float(d.get("mce18_cap", 100.0)),
            float(d.get("band", 0.25)),
            d.get("som_target"),
        )

    def to_dict(self) -> dict:
        return {
            "weights": dict(self.weights),
            "ranges": {k: list(v) for k, v in self.ranges.items()},
            "mce18_cap": self.mce18_cap,
            "band": self.band,
            "som_target": self.som_target,
        }


def drug_likeness_weights() -> RewardWeights:
    """Default drug-likeness composite used when a config gives no weights.

    Rule-based drug-likeness and synthetic accessibility plus desirability
    ranges for size, lipophilicity, polarity, saturation and aromatic ring
    count.  The ranges sit inside the rule-of-five limits so the composite
    still separates molecules that already pass every rule.
    """
    return RewardWeights(
        {"drug_likeness": 0.3, "rersa": 0.2, "mw": 0.1, "logp_est": 0.1, "tpsa_est": 0.1,
         "fraction_sp3": 0.1, "aromatic_rings": 0.1},
        {"mw": (300.0, 450.0), "logp_est": (1.5, 3.5), "tpsa_est": (40.0, 100.0),
         "fraction_sp3": (0.3, 0.6), "aromatic_rings": (1.0, 2.0)},
    )


def range_score(value: float, lo: float, hi: float, band: float = 0.25) -> float:
    """1 inside [lo, hi], falling linearly to 0 at band x (hi - lo) outside it.

    A zero-width range uses band x max(|lo|, 1) as the margin.
    """
    if lo <= value <= hi:
        return 1.0
    margin = band * (hi - lo) if hi > lo else band * max(abs(lo), 1.0)
    gap = lo - value if value < lo else value - hi
    return max(0.0, 1.0 - gap / margin)


@dataclass
class ScoreReport:
    canonical_smiles: str
    valid: bool = True
    hard_fail: bool = False
    gate: str | None = None  # first failing gate: valence | mcf | t_index
    mcf_pass: bool | None = None
    mcf_hits: tuple[str, ...] = ()
    ro5_violations: int | None = None
    ro5_pass: bool | None = None
    mce18: float | None = None
    t_index_pass: bool | None = None
    t_index_ratio: float | None = None
    drug_likeness: float | None = None
    rersa: float | None = None
    novelty: float | None = None
    similarity_to_reference: float | None = None
    pf_score: float | None = None
    flex: float | None = None
    som_class: object | None = None
    som_confidence: float | None = None
    som_target_fraction: float | None = None
    descriptors: dict | None = None
    warnings: tuple[str, ...] = ()
    reward: float = 0.0

    def as_dict(self) -> dict:
        d = asdict(self)
        d["mcf_hits"] = list(self.mcf_hits)
        d["warnings"] = list(self.warnings)
        return d


def component_scores(report: ScoreReport, weights: RewardWeights) -> dict[str, float]:
    """Normalized [0, 1] value of every weighted component that the report carries."""
    out: dict[str, float] = {}
    for k in weights.weights:
        v = None
        if k == "drug_likeness":
            v = report.drug_likeness
        elif k == "rersa" and report.rersa is not None:
            v = (10.0 - report.rersa) / 9.0
        elif k == "novelty":
            v = report.novelty
        elif k == "similarity":
            v = report.similarity_to_reference
        elif k == "pf_score":
            v = report.pf_score
        elif k == "rigidity" and report.flex is not None:
            v = 1.0 - report.flex
        elif k == "mce18" and report.mce18 is not None:
            v = report.mce18 / weights.mce18_cap
        elif k == "ro5" and report.ro5_violations is not None:
            v = 1.0 - report.ro5_violations / 4.0
        elif k == "som":
            v = report.som_target_fraction
        elif k in RANGE_COMPONENTS and report.descriptors is not None:
            lo, hi = weights.ranges[k]
            v = range_score(float(report.descriptors[k]), lo, hi, weights.band)
        if v is not None:
            out[k] = min(1.0, max(0.0, float(v)))
    return out


def reward(report: ScoreReport, weights: RewardWeights) -> float:
    """0 under any hard gate, else the weighted mean of available components.

    Components the report cannot supply (no reference set, no SOM) drop out
    and the remaining weights are renormalized.
    """
    if report.hard_fail or not report.valid:
        return 0.0
    comps = component_scores(report, weights)
    total = sum(weights.weights[k] for k in comps)
    if total <= 0:
        return 0.0
    r = sum(weights.weights[k] * v for k, v in comps.items()) / total
    return min(1.0, max(0.0, r))
