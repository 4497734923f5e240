from collections import Counter

import numpy as np
import pytest

from molforge.generators import DEFAULT_ENSEMBLE, build_generator, from_state
from molforge.generators.base import CheckpointError, ConstantGenerator, dump_state, load_state
from molforge.generators.fragment import FragmentModel, frag_build, frag_sample
from molforge.generators.ga import MUTATIONS, GAModel, crossover, ga_epoch, ga_init, mutate
from molforge.generators.ngram import BOS, EOS, LMConfig, NGramModel, lm_feedback, lm_sample, lm_train
from molforge.molgraph import descriptors, mol_from_smiles, write_canonical
from molforge.molgraph.io import try_canonical
from molforge.molgraph.smiles import tokenize


def has_n(s):
    return "N" in s or "n" in s


def fsp3(s):
    return descriptors(mol_from_smiles(s)).fraction_sp3 if try_canonical(s) else 0.0


# -- n-gram LM ---------------------------------------------------------------------

def test_lm_degenerate_corpus():
    lm = lm_train(["C"], order=3)
    out = Counter(lm.sample(200, np.random.default_rng(0), temperature=1.0))
    assert out.most_common(1)[0][0] == "C"
    assert out["C"] > 100


def test_lm_counts_sum_to_context_occurrences(seed_1k):
    corpus = [write_canonical(mol_from_smiles(s)) for s in seed_1k[:100]]
    lm = lm_train(corpus, order=4)
    for k in range(4):
        occ = Counter()
        for s in corpus:
            seq = [BOS] * k + tokenize(s) + [EOS]
            for i in range(k, len(seq)):
                occ["\t".join(seq[i - k : i])] += 1
        table = lm.counts[k]
        assert set(table) == set(occ)
        for ctx, row in table.items():
            assert sum(row.values()) == occ[ctx]


def test_lm_train_errors_and_skips():
    with pytest.raises(ValueError):
        lm_train([], order=4)
    with pytest.raises(ValueError):
        lm_train(["C1CC"], order=4)
    with pytest.raises(ValueError):
        lm_train(["CCO"], order=9)
    _, skipped = NGramModel.train(["CCO", "C1CC", "xx"], LMConfig(order=3))
    assert skipped == 2


def test_lm_argmax_limit_ignores_seed(seed_1k):
    lm = lm_train(seed_1k[:200], order=4)
    a = lm_sample(lm, 3, 1e-4, 100, np.random.default_rng(0))
    b = lm_sample(lm, 3, 1e-4, 100, np.random.default_rng(99))
    assert a == b and len(set(a)) == 1


def test_lm_fixed_seed_reproducible(seed_1k):
    lm = lm_train(seed_1k[:200], order=4)
    assert lm.sample(20, np.random.default_rng(4)) == lm.sample(20, np.random.default_rng(4))
    with pytest.raises(ValueError):
        lm.sample(1, np.random.default_rng(0), temperature=0.0)


def test_lm_length_grows_with_max_len():
    lm = lm_train(["C" * k for k in range(30, 60)], order=4)
    short = np.mean([len(s) for s in lm.sample(50, np.random.default_rng(0), max_len=10)])
    long = np.mean([len(s) for s in lm.sample(50, np.random.default_rng(0), max_len=100)])
    assert long > short


def test_lm_feedback_zero_elite_only_decays(seed_1k):
    lm = lm_train(seed_1k[:50], order=3)
    before = {ctx: dict(row) for ctx, row in lm.counts[2].items()}
    lm_feedback(lm, [("CCO", 0.0), ("CCN", 0.0)])
    for ctx, row in before.items():
        for tok, c in row.items():
            assert lm.counts[2][ctx][tok] == pytest.approx(0.9 * c)
    assert lm.state.epoch == 1


def test_lm_feedback_raises_elite_likelihood(seed_1k):
    lm = lm_train(seed_1k[:100], order=4)
    elite = [("CC(=O)Nc1ccccc1", 1.0)]
    lls = [lm.log_likelihood("CC(=O)Nc1ccccc1")]
    for _ in range(2):
        lm_feedback(lm, elite)
        lls.append(lm.log_likelihood("CC(=O)Nc1ccccc1"))
    assert lls[0] < lls[1] < lls[2]


def test_lm_counts_nonnegative_after_feedback(seed_1k):
    lm = lm_train(seed_1k[:100], order=4)
    rng = np.random.default_rng(0)
    for _ in range(3):
        s = lm.propose(30, rng)
        lm.feedback([(x, float(rng.random())) for x in s])
    assert all(c >= 0 for table in lm.counts for row in table.values() for c in row.values())


def test_lm_toy_reward_contains_n(seed_1k):
    lm = lm_train(seed_1k[:300], order=4)
    before = np.mean([has_n(s) for s in lm.sample(300, np.random.default_rng(1))])
    rng = np.random.default_rng(0)
    for _ in range(5):
        s = lm.propose(100, rng)
        lm.feedback([(x, 1.0 if has_n(x) and try_canonical(x) else 0.0) for x in s])
    after = np.mean([has_n(s) for s in lm.sample(300, np.random.default_rng(1))])
    assert after > before


# -- GA ----------------------------------------------------------------------------

def test_ga_init_and_errors(seed_1k):
    ga = ga_init(seed_1k[:20], 30, np.random.default_rng(0))
    assert len(ga.population) == 30
    assert all(try_canonical(s) == s for s in ga.population)
    with pytest.raises(ValueError):
        ga_init(["C1CC", "xx"], 5, np.random.default_rng(0))


def test_ga_fsp3_toy_run(seed_1k):
    ga = ga_init(seed_1k[:50], 40, np.random.default_rng(0))
    rng = np.random.default_rng(0)
    fit = [fsp3(s) for s in ga.population]
    start = np.mean(fit)
    best = [max(fit)]
    for _ in range(10):
        ga_epoch(ga, fit, rng)
        assert len(ga.population) == 40
        fit = [fsp3(s) for s in ga.population]
        best.append(max(fit))
    assert np.mean(fit) > start
    assert all(b1 >= b0 for b0, b1 in zip(best, best[1:]))


def test_ga_fitness_alignment(seed_1k):
    ga = ga_init(seed_1k[:5], 6, np.random.default_rng(0))
    with pytest.raises(ValueError):
        ga.epoch([1.0], np.random.default_rng(0))


def test_mutations_and_crossover_sanitize(seed_1k):
    rng = np.random.default_rng(2)
    mols = [mol_from_smiles(s) for s in seed_1k[:30]]
    made = 0
    for m in mols:
        for op in MUTATIONS:
            out = mutate(m, rng, {op: 1.0})
            if out is not None:
                assert try_canonical(write_canonical(out)) == write_canonical(out)
                made += 1
    assert made > 60
    kids = [crossover(mols[i], mols[i + 1], rng) for i in range(0, 28, 2)]
    assert any(k is not None for k in kids)


# -- fragment sampler ----------------------------------------------------------------

def test_frag_uncleavable_corpus():
    model = frag_build(["c1ccccc1"])
    assert set(frag_sample(model, 10, np.random.default_rng(0))) == {"c1ccccc1"}
    with pytest.raises(ValueError):
        frag_build(["xx"])


def test_frag_outputs_sanitize(seed_1k):
    model = frag_build(seed_1k[:200])
    out = frag_sample(model, 50, np.random.default_rng(0))
    assert len(out) == 50
    assert all(try_canonical(s) == s for s in out)


def test_frag_reweighting_towards_n(seed_1k):
    model = frag_build(seed_1k[:200])
    n_idx = [k for k, f in enumerate(model.state.payload["fragments"]) if has_n(f)]
    before = model.probabilities()[n_idx].sum()
    out = model.propose(100, np.random.default_rng(0))
    model.feedback([(s, 1.0 if has_n(s) else 0.0) for s in out])
    assert model.probabilities()[n_idx].sum() > before


# -- contract / state ------------------------------------------------------------------

@pytest.fixture(scope="module")
def ensemble(seed_1k):
    rng = np.random.default_rng(0)
    return {spec["id"]: build_generator(spec, seed_1k[:200], 20, rng) for spec in DEFAULT_ENSEMBLE}


def test_propose_returns_exactly_n(ensemble):
    for gen in ensemble.values():
        for n in (1, 7, 25):
            assert len(gen.propose(n, np.random.default_rng(0))) == n


def test_state_roundtrip_reproduces_proposals(ensemble):
    for gen in ensemble.values():
        clone = from_state(load_state(gen.dumps()))
        assert clone.propose(10, np.random.default_rng(3)) == gen.propose(10, np.random.default_rng(3))


def test_feedback_changes_proposals(seed_1k):
    rng = np.random.default_rng(0)
    for spec in DEFAULT_ENSEMBLE:
        gen = build_generator(spec, seed_1k[:200], 20, rng)
        plain = from_state(load_state(gen.dumps()))
        first = gen.propose(20, np.random.default_rng(1))
        gen.feedback([(s, 1.0 if has_n(s) else 0.0) for s in first])
        plain.propose(20, np.random.default_rng(1))
        assert gen.propose(20, np.random.default_rng(2)) != plain.propose(20, np.random.default_rng(2)), spec["id"]


def test_stub_generator_contract():
    g = ConstantGenerator.create("CCO")
    assert g.propose(3, None) == ["CCO"] * 3
    g.feedback([("CCO", 1.0)])
    assert g.state.epoch == 1


def test_checkpoint_codec_errors(ensemble):
    text = next(iter(ensemble.values())).dumps()
    with pytest.raises(CheckpointError):
        load_state(text.split("\n", 1)[0])
    with pytest.raises(CheckpointError):
        load_state(text.replace('"version": 1', '"version": 2'))
    with pytest.raises(CheckpointError):
        load_state("{}\n[]\n{}\nend\n")
    assert dump_state(load_state(text)) == text
