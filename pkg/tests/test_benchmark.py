import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_spelling
from molforge.benchmark import benchmark_report, evaluate_batch, to_csv, to_json
from molforge.benchmark.metrics import (
    Parsed, descriptor_frechet, frag_scaf_similarity, internal_diversity,
    internal_diversity_bruteforce, novelty_fraction, snn, uniqueness_at, validity,
)
from molforge.molgraph.io import try_canonical

POOL = ["CCO", "OCC", "c1ccccc1", "Cc1ccccc1", "CC(=O)O", "C1CCCCC1", "CCN", "c1ccncc1",
        "CC(=O)Nc1ccc(O)cc1", "O=C(O)c1ccccc1O", "xx", "C1CC", "C(C)(C)(C)(C)C", "", "N#N"]


def test_trivial_values():
    assert validity(["CCO", "c1ccccc1", "C1CC", "CCN"]) == 0.75
    assert uniqueness_at(["CCO"] * 10, 10) == 0.1
    assert uniqueness_at(["CCO", "OCC", "CCN", "CCC"], 2) == 0.5
    assert novelty_fraction(["CCO"], ["OCC"]) == 0.0
    assert novelty_fraction(["CCN"], ["OCC"]) == 1.0
    assert novelty_fraction(["CCN", "CCO"], ["OCC"]) == 0.5
    assert internal_diversity(["c1ccccc1", "c1ccccc1"]) == 0.0
    assert internal_diversity(["C", "O", "N"]) == 1.0
    assert snn(["CC(=O)Nc1ccc(O)cc1"], ["CC(=O)Nc1ccc(O)cc1"]) == 1.0
    assert validity([]) == 0.0


def test_uniqueness_k_errors():
    with pytest.raises(ValueError):
        uniqueness_at(["CCO"], 0)
    with pytest.raises(ValueError):
        uniqueness_at(["CCO"], 2)


def test_frag_scaf_hand_computed():
    # counts (2, 1) vs (1, 2): cosine 4 / 5
    gen = ["c1ccccc1", "c1ccccc1", "C1CCCCC1"]
    ref = ["c1ccccc1", "C1CCCCC1", "C1CCCCC1"]
    fs = frag_scaf_similarity(gen, ref)
    assert fs["frag_cosine"] == pytest.approx(0.8, abs=1e-12)
    assert fs["scaf_cosine"] == pytest.approx(0.8, abs=1e-12)
    # toluene reduces to the benzene scaffold: (2, 1) vs (1, 0, 1) -> 2 / sqrt(10)
    fs = frag_scaf_similarity(["c1ccccc1", "Cc1ccccc1", "C1CCCCC1"], ["c1ccccc1", "c1ccncc1"])
    assert fs["scaf_cosine"] == pytest.approx(2 / math.sqrt(10), abs=1e-12)


def test_self_comparison_exact(seed_1k):
    mols = seed_1k[:60]
    r = evaluate_batch("self", mols, mols, mols)
    assert r.validity == 1.0 and r.novelty_fraction == 0.0 and r.snn == 1.0
    assert r.frag_cosine == 1.0 and r.scaf_cosine == 1.0
    assert r.descriptor_frechet == pytest.approx(0.0, abs=1e-6)


def test_acyclic_share_empty_scaffold():
    fs = frag_scaf_similarity(["CCCC", "CCO"], ["CCN"])
    assert fs["scaf_cosine"] == 1.0


def test_report_composes_metrics(seed_1k):
    gen, ref, train = seed_1k[:40] + ["xx", "CCO", "OCC"], seed_1k[40:80], seed_1k[:20]
    r = evaluate_batch("m", gen, ref, train, k=30)
    fs = frag_scaf_similarity(gen, ref)
    assert r.validity == validity(gen)
    assert r.uniqueness_at_k == uniqueness_at(gen, 30)
    assert r.novelty_fraction == novelty_fraction(gen, train)
    assert r.intdiv1 == internal_diversity(gen, 1) and r.intdiv2 == internal_diversity(gen, 2)
    assert r.snn == snn(gen, ref)
    assert (r.frag_cosine, r.scaf_cosine) == (fs["frag_cosine"], fs["scaf_cosine"])
    assert r.descriptor_frechet == descriptor_frechet(gen, ref)
    assert (r.n_gen, r.n_valid, r.k) == (43, 42, 30)


def test_empty_and_all_invalid_batches(seed_1k):
    r = evaluate_batch("e", [], seed_1k[:5], seed_1k[:5])
    assert r.warning and r.validity == 0.0 and r.n_gen == 0
    r = evaluate_batch("bad", ["xx", "C1CC"], seed_1k[:5], seed_1k[:5])
    assert r.warning and r.validity == 0.0 and r.descriptor_frechet is None


def test_reorder_invariance(seed_1k, rng):
    gen = seed_1k[100:160]
    shuffled = [random_spelling(s, rng) for s in gen[::-1]]
    a = evaluate_batch("m", gen, seed_1k[:50], seed_1k[:30], k=60).as_dict()
    b = evaluate_batch("m", shuffled, seed_1k[:50], seed_1k[:30], k=60).as_dict()
    assert a.pop("descriptor_frechet") == pytest.approx(b.pop("descriptor_frechet"), rel=1e-9)
    assert a == b


def test_intdiv_stream_matches_bruteforce(seed_1k):
    batch = seed_1k[200:300]
    for p in (1, 2):
        assert internal_diversity(batch, p) == internal_diversity_bruteforce(batch, p)


def test_uniqueness_bruteforce(seed_1k, rng):
    spellings = [random_spelling(s, rng) for s in rng.choice(seed_1k[:15], 50)]
    canon = [try_canonical(s) for s in spellings]
    distinct = sum(1 for i, c in enumerate(canon) if all(c != canon[j] for j in range(i)))
    assert uniqueness_at(spellings, 50) == distinct / 50


def test_report_table_exports(seed_1k):
    rows = benchmark_report({"b": seed_1k[:10], "a": seed_1k[10:20]}, seed_1k[:30], seed_1k[:30], k=5)
    assert [r.model for r in rows] == ["a", "b"]
    lines = to_csv(rows).splitlines()
    assert lines[0].startswith("schema_version,model,") and len(lines) == 3
    doc = json.loads(to_json(rows))
    assert doc["rows"][0]["model"] == "a" and doc["schema_version"] == 1


@settings(max_examples=300, deadline=None)
@given(st.lists(st.sampled_from(POOL), min_size=1, max_size=10),
       st.lists(st.sampled_from(POOL), min_size=1, max_size=6),
       st.lists(st.sampled_from(POOL), max_size=6))
def test_metrics_bounded(gen, ref, train):
    r = evaluate_batch("h", gen, ref, train)
    for name in r.BOUNDED:
        assert 0.0 <= getattr(r, name) <= 1.0, name
    if r.descriptor_frechet is not None:
        assert np.isfinite(r.descriptor_frechet) and r.descriptor_frechet >= 0.0


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from(POOL), min_size=1, max_size=10))
def test_member_is_never_novel(batch):
    assert novelty_fraction(batch, batch) == 0.0
    assert all(c is None or novelty_fraction([c], batch) == 0.0 for c in Parsed.of(batch).canon)
