"""Weighted multi-key ranking of score reports."""

from __future__ import annotations

RANK_KEYS = (
    "reward", "drug_likeness", "rersa", "novelty", "similarity_to_reference", "pf_score",
    "flex", "mce18", "ro5_violations", "t_index_ratio", "som_confidence",
)


def check_ranking_spec(spec: dict) -> None:
    if not isinstance(spec, dict) or not spec:
        raise ValueError("ranking spec must be a non-empty {key: weight} mapping")
    for k, w in spec.items():
        if k not in RANK_KEYS:
            raise ValueError(f"unknown ranking key {k!r}")
        if not isinstance(w, (int, float)) or isinstance(w, bool):
            raise ValueError(f"ranking weight for {k!r} must be a number")


def rank_score(report, spec: dict) -> float:
    """Sum of weight x field value; missing fields count as 0.

    A negative weight ranks lower values first (e.g. rersa, flex).
    """
    total = 0.0
    for k, w in spec.items():
        v = getattr(report, k)
        if v is not None:
            total += w * float(v)
    return total


def rank(reports, spec: dict | None = None) -> list:
    """Descending weighted score; ties by canonical SMILES; hard fails last."""
    spec = spec or {"reward": 1.0}
    check_ranking_spec(spec)
    return sorted(reports, key=lambda r: (r.hard_fail, -rank_score(r, spec), r.canonical_smiles))
