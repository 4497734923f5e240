"""Benchmarking of generated molecule sets against reference and training sets."""

from .metrics import (
    descriptor_frechet,
    frag_scaf_similarity,
    internal_diversity,
    internal_diversity_bruteforce,
    novelty_fraction,
    snn,
    uniqueness_at,
    validity,
)
from .report import BenchmarkReport, benchmark_report, evaluate_batch, to_csv, to_json

__all__ = [
    "descriptor_frechet", "frag_scaf_similarity", "internal_diversity",
    "internal_diversity_bruteforce", "novelty_fraction", "snn", "uniqueness_at", "validity",
    "BenchmarkReport", "benchmark_report", "evaluate_batch", "to_csv", "to_json",
]
