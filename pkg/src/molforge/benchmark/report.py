"""Per-model benchmark table with CSV and JSON export."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, fields

from .metrics import (
    Parsed,
    descriptor_frechet,
    frag_scaf_similarity,
    internal_diversity,
    novelty_fraction,
    snn,
    uniqueness_at,
    validity,
)

SCHEMA_VERSION = 1
DEFAULT_K = 1000


@dataclass
class BenchmarkReport:
    model: str
    validity: float
    uniqueness_at_k: float
    novelty_fraction: float
    intdiv1: float
    intdiv2: float
    snn: float
    frag_cosine: float
    scaf_cosine: float
    k: int
    n_gen: int
    n_valid: int
    n_ref: int
    n_train: int
    descriptor_frechet: float | None = None
    warning: str | None = None

    BOUNDED = ("validity", "uniqueness_at_k", "novelty_fraction", "intdiv1", "intdiv2",
               "snn", "frag_cosine", "scaf_cosine")

    def as_dict(self) -> dict:
        return asdict(self)


def evaluate_batch(model: str, batch, reference, training_set, k: int | None = None) -> BenchmarkReport:
    gen = Parsed.of(batch)
    ref = Parsed.of(reference)
    train = Parsed.of(training_set)
    if not gen.raw:
        return BenchmarkReport(model, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0, 0, 0,
                               len(ref.raw), len(train.raw), None, "empty generated batch")
    kk = min(DEFAULT_K, len(gen.raw)) if k is None else min(k, len(gen.raw))
    fs = frag_scaf_similarity(gen, ref)
    warning = None if gen.valid else "no valid molecules in generated batch"
    return BenchmarkReport(
        model=model,
        validity=validity(gen),
        uniqueness_at_k=uniqueness_at(gen, kk),
        novelty_fraction=novelty_fraction(gen, train),
        intdiv1=internal_diversity(gen, 1),
        intdiv2=internal_diversity(gen, 2),
        snn=snn(gen, ref),
        frag_cosine=fs["frag_cosine"],
        scaf_cosine=fs["scaf_cosine"],
        k=kk,
        n_gen=len(gen.raw),
        n_valid=len(gen.valid),
        n_ref=len(ref.raw),
        n_train=len(train.raw),
        descriptor_frechet=descriptor_frechet(gen, ref),
        warning=warning,
    )


def benchmark_report(batches: dict, reference, training_set, k: int | None = None) -> list[BenchmarkReport]:
    """One row per model, in sorted model order."""
    return [evaluate_batch(m, batches[m], reference, training_set, k) for m in sorted(batches)]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def to_csv(rows: list[BenchmarkReport]) -> str:
    names = ["schema_version"] + [f.name for f in fields(BenchmarkReport)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for r in rows:
        d = r.as_dict()
        w.writerow([SCHEMA_VERSION] + [_fmt(d[n]) for n in names[1:]])
    return buf.getvalue()


def to_json(rows: list[BenchmarkReport]) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, "rows": [r.as_dict() for r in rows]},
                      indent=1, sort_keys=True) + "\n"
