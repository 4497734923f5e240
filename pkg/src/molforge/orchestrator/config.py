"""Experiment configuration (JSON) and its validation."""

from __future__ import annotations

import copy
import json
import os
from dataclasses import dataclass, field

from ..generators import DEFAULT_ENSEMBLE, KINDS
from ..molgraph.descriptors import FIELD_NAMES
from ..scoring2d.reward import RewardWeights, drug_likeness_weights
from ..scoring2d.pipeline import MODULES

SCHEMA_VERSION = 1
RANGE_DEFAULT_WEIGHT = 0.1  # weight given to a property range that has none


class ConfigError(ValueError):
    """Invalid or incomplete experiment configuration (exit code 2)."""


class InputError(ValueError):
    """Unreadable or unparseable experiment input (exit code 3)."""


@dataclass
class Budgets:
    epochs: int = 10
    candidates_per_model_per_epoch: int = 200
    wall_clock_s: float | None = None  # safety net only


@dataclass
class ExperimentConfig:
    seed: int
    reference_ligands: list[str]
    output_dir: str
    mode: str = "LBDD"
    known_compound_refs: str | None = None
    property_ranges: dict = field(default_factory=dict)
    enabled_models: list[dict] = field(default_factory=lambda: copy.deepcopy(DEFAULT_ENSEMBLE))
    reward_weights: RewardWeights = field(default_factory=drug_likeness_weights)
    budgets: Budgets = field(default_factory=Budgets)
    ranking: dict = field(default_factory=lambda: {"reward": 1.0})
    modules: tuple[str, ...] = MODULES
    privileged_fragments: dict | None = None  # {"actives": path, "background": path, "min_enrichment": x}
    som: dict | None = None  # {"training": labeled .smi, "target": label, "width", "height", ...}
    threads: int | None = None
    source_text: str = ""  # verbatim config text, echoed into the report
    base_dir: str = "."

    def resolve(self, path: str) -> str:
        return path if os.path.isabs(path) else os.path.join(self.base_dir, path)


def _require(d: dict, key: str):
    if key not in d:
        raise ConfigError(f"missing required config key {key!r}")
    return d[key]


def parse_config(text: str, base_dir: str = ".") -> ExperimentConfig:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from None
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    known = {"mode", "seed", "reference_ligands", "known_compound_refs", "property_ranges",
             "enabled_models", "reward_weights", "budgets", "ranking", "modules",
             "privileged_fragments", "som", "threads", "output_dir", "schema_version"}
    unknown = set(d) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    mode = d.get("mode", "LBDD")
    if mode != "LBDD":
        raise ConfigError(f"unsupported mode {mode!r}; only LBDD is supported")
    seed = _require(d, "seed")
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise ConfigError("seed must be an integer in [0, 2^64)")
    refs = _require(d, "reference_ligands")
    if isinstance(refs, str):
        refs = [refs]
    if not refs or not all(isinstance(r, str) for r in refs):
        raise ConfigError("reference_ligands must be a path or a non-empty list of paths")
    out = _require(d, "output_dir")

    b = d.get("budgets", {})
    try:
        budgets = Budgets(**b)
    except TypeError as e:
        raise ConfigError(f"bad budgets: {e}") from None
    if budgets.epochs < 0 or budgets.candidates_per_model_per_epoch < 1:
        raise ConfigError("budgets must be positive")
    if budgets.wall_clock_s is not None and budgets.wall_clock_s <= 0:
        raise ConfigError("wall_clock_s must be positive")

    models = d.get("enabled_models", copy.deepcopy(DEFAULT_ENSEMBLE))
    if not isinstance(models, list) or not models:
        raise ConfigError("at least one model must be enabled")
    ids = set()
    for m in models:
        if not isinstance(m, dict) or "id" not in m or "kind" not in m:
            raise ConfigError("each model needs an 'id' and a 'kind'")
        if m["kind"] not in KINDS:
            raise ConfigError(f"unknown model kind {m['kind']!r}")
        if m["id"] in ids:
            raise ConfigError(f"duplicate model id {m['id']!r}")
        ids.add(m["id"])

    ranges = d.get("property_ranges", {})
    for k, v in ranges.items():
        if k not in FIELD_NAMES:
            raise ConfigError(f"unknown property in property_ranges: {k!r}")
        if not (isinstance(v, list) and len(v) == 2):
            raise ConfigError(f"property range for {k!r} must be [min, max]")
    try:
        rw = d.get("reward_weights")
        weights = RewardWeights.from_dict(rw) if rw is not None else drug_likeness_weights()
        if ranges:
            merged = dict(weights.ranges)
            merged.update({k: (float(v[0]), float(v[1])) for k, v in ranges.items()})
            w = dict(weights.weights)
            for k in ranges:
                w.setdefault(k, RANGE_DEFAULT_WEIGHT)
            weights = RewardWeights(w, merged, weights.mce18_cap, weights.band, weights.som_target)
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"bad reward_weights: {e}") from None

    ranking = d.get("ranking", {"reward": 1.0})
    from .rank import check_ranking_spec

    try:
        check_ranking_spec(ranking)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    modules = tuple(d.get("modules", MODULES))
    if set(modules) - set(MODULES):
        raise ConfigError(f"unknown modules: {sorted(set(modules) - set(MODULES))}")
    threads = d.get("threads")
    if threads is not None and (not isinstance(threads, int) or threads < 1):
        raise ConfigError("threads must be a positive integer")
    return ExperimentConfig(
        seed=seed, reference_ligands=list(refs), output_dir=out, mode=mode,
        known_compound_refs=d.get("known_compound_refs"), property_ranges=ranges,
        enabled_models=models, reward_weights=weights, budgets=budgets, ranking=ranking,
        modules=modules, privileged_fragments=d.get("privileged_fragments"), som=d.get("som"),
        threads=threads, source_text=text, base_dir=base_dir,
    )


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    return parse_config(text, os.path.dirname(os.path.abspath(path)))
