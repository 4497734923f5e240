"""Experiment configuration, the generate-screen-feedback loop, ranking and checkpoints."""

from .checkpoint import IntegrityError, read_checkpoint, write_checkpoint
from .config import Budgets, ConfigError, ExperimentConfig, InputError, load_config, parse_config
from .rank import RANK_KEYS, rank, rank_score
from .run import ExperimentResult, derive_seed, model_stats, ranked_csv, report_json, run

__all__ = [
    "IntegrityError", "read_checkpoint", "write_checkpoint", "Budgets", "ConfigError",
    "ExperimentConfig", "InputError", "load_config", "parse_config", "RANK_KEYS", "rank",
    "rank_score", "ExperimentResult", "derive_seed", "model_stats", "ranked_csv", "report_json", "run",
]
