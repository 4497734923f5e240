import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from molforge.molgraph import Fingerprint, descriptors, mol_from_smiles, morgan_fingerprint, tanimoto, write_canonical
from molforge.molgraph.descriptors import DescriptorVector
from molforge.scoring2d import (
    FragmentStats,
    PrivilegedFragment,
    ReferenceIndex,
    RewardWeights,
    ScoreReport,
    ScoringContext,
    SOMGrid,
    TIndexConfig,
    accuracy,
    cluster_diversity,
    drug_likeness,
    evaluate,
    flex,
    load_drug_likeness,
    mce18,
    mcf_screen,
    morph,
    morph_variants,
    neighbor_lists,
    novelty,
    pf_mine,
    pf_score,
    quadratic_index,
    quantization_error,
    range_score,
    rersa,
    reward,
    ro5,
    som_classify,
    som_train,
    t_index,
    zoom_refine,
)
from molforge.scoring2d.reward import SCORE_COMPONENTS, component_scores, drug_likeness_weights
from molforge.scoring2d.som import zoom_side

from conftest import canon, permuted

m = mol_from_smiles


def desc(smiles):
    return descriptors(m(smiles))


# -- MCF / RO5 / T-index / drug-likeness / flex --------------------------------------

def test_mcf_examples():
    v = mcf_screen(m("O=[N+]([O-])c1ccccc1"))
    assert not v.passed and "nitro_aromatic" in v.hard_hits
    assert mcf_screen(m("C")).passed


def test_mcf_soft_hit_is_not_fatal():
    v = mcf_screen(m("CCC=O"))
    assert v.passed and "aldehyde" in v.soft_hits


def test_ro5_examples():
    r = ro5(desc("C"))
    assert (r.violations, r.passed) == (0, True)
    big = dataclasses.replace(desc("C"), hbd=6, mw=600.0)
    assert ro5(big).violations == 2 and not ro5(big).passed
    edge = dataclasses.replace(desc("C"), mw=500.0)
    assert ro5(edge).violations == 0
    one = dataclasses.replace(desc("C"), mw=501.0)
    assert ro5(one).passed and not ro5(one, max_violations=0).passed


def test_t_index_examples():
    t = t_index(desc("C" * 20))
    assert t.ratio == 0.0 and not t.passed
    t = t_index(desc("OCCCCCCC(N)O"))
    assert t.ratio == pytest.approx(0.3) and t.passed
    assert t_index(desc("NC(N)(N)N")).passed


def test_drug_likeness_examples():
    assert drug_likeness(desc("CC(=O)Nc1ccc(O)cc1")) == 1.0
    assert drug_likeness(desc("C")) == 0.875


descriptor_vectors = st.builds(
    DescriptorVector,
    mw=st.floats(0, 1000), heavy_atoms=st.integers(0, 80), hbd=st.integers(0, 12),
    hba=st.integers(0, 20), rotatable_bonds=st.integers(0, 20), aromatic_rings=st.integers(0, 7),
    aliphatic_rings=st.integers(0, 5), fraction_sp3=st.floats(0, 1), chiral_centers=st.integers(0, 6),
    spiro_atoms=st.integers(0, 3), heteroatoms=st.integers(0, 30), carbons=st.integers(0, 60),
    logp_est=st.floats(-5, 10), tpsa_est=st.floats(0, 250),
)


@settings(max_examples=2000, deadline=None)
@given(descriptor_vectors, descriptor_vectors)
def test_drug_likeness_monotone_in_satisfied_rules(a, b):
    rules = load_drug_likeness()
    sa = {r.id for r in rules if r.satisfied(a)}
    sb = {r.id for r in rules if r.satisfied(b)}
    da, db = drug_likeness(a), drug_likeness(b)
    assert 0.0 <= da <= 1.0
    if sa >= sb:
        assert da >= db


def test_flex_examples():
    assert flex(m("c1ccccc1")) == 0.0
    assert flex(m("CCCCCC")) == pytest.approx(0.6)
    # closing a ring never raises flex
    assert flex(m("C1CCCCC1")) <= flex(m("CCCCCC"))


# -- MCE-18 ----------------------------------------------------------------------------

def test_mce18_benzene_equals_q1():
    # degrees (2,2,2,2,2,2): Q1 = 3 - 2*6 + 24/2 = 3
    assert quadratic_index(m("c1ccccc1")) == 3.0
    assert mce18(m("c1ccccc1")) == 3.0


def test_mce18_methane_hand_value():
    # Q1 = 3 - 2 + 0 = 1; flags 0; (sp3 + cyc - acyc)/(1 + sp3) = (1 + 0 - 1)/2 = 0
    assert quadratic_index(m("C")) == 1.0
    assert mce18(m("C")) == 0.0


def test_mce18_and_flex_permutation_invariant(corpus, rng):
    for s in corpus[:60]:
        p = permuted(s, rng)
        assert mce18(p) == mce18(m(s))
        assert flex(p) == flex(m(s))
        assert mce18(m(s)) >= 0.0


# -- ReRSA ----------------------------------------------------------------------------

@pytest.fixture
def toy_stats():
    return FragmentStats.from_molecules([m("CC(=O)Nc1ccccc1")] * 10 + [m("CCO")])


def test_rersa_common_fragments_score_low(toy_stats):
    assert rersa(m("CC(=O)Nc1ccccc1"), toy_stats) <= 2.0


def test_rersa_unknown_fragments_max_rarity(toy_stats):
    # every fragment below the frequency floor: 1 + 6 * 1
    assert rersa(m("CCCCCC1CCCCC1"), toy_stats) == 7.0


def test_rersa_spiro_penalty_monotone(toy_stats):
    assert rersa(m("C1CCC2(CC1)CCCC2"), toy_stats) >= rersa(m("C1CCCCC1"), toy_stats)


def test_rersa_bounds_and_empty_stats(corpus):
    stats = FragmentStats.load()
    for s in corpus[:100]:
        assert 1.0 <= rersa(m(s), stats) <= 10.0
    with pytest.raises(ValueError):
        rersa(m("CCO"), FragmentStats({}))


def test_fragment_stats_roundtrip(tmp_path, toy_stats):
    p = tmp_path / "stats.txt"
    toy_stats.save(str(p))
    assert FragmentStats.load(str(p)).counts == toy_stats.counts


# -- novelty / clustering -----------------------------------------------------------

def fp(s):
    return morgan_fingerprint(m(s))


def test_novelty_examples():
    refs = [fp(s) for s in ("c1ccccc1", "CCO", "CC(=O)O")]
    idx = ReferenceIndex(refs)
    for r in refs:
        assert novelty(r, idx).score == 0.0
    far = Fingerprint.from_bits([], 2048)
    assert novelty(far, idx).score == 1.0
    tol = fp("Cc1ccccc1")
    assert novelty(tol, ReferenceIndex([fp("c1ccccc1")])).score == 1.0 - tanimoto(tol, fp("c1ccccc1"))


def test_novelty_empty_index_warns():
    res = novelty(fp("CCO"), ReferenceIndex([]))
    assert res.score == 1.0 and res.warning


fps_strategy = st.lists(st.sets(st.integers(0, 63), min_size=1, max_size=12), min_size=1, max_size=25)


@settings(max_examples=300, deadline=None)
@given(fps_strategy, st.sampled_from([0.2, 0.35, 0.5, 0.8]))
def test_butina_members_within_threshold(bitsets, t):
    fps = [Fingerprint.from_bits(b, 64) for b in bitsets]
    res = cluster_diversity(fps, t)
    seen = sorted(i for c in res.clusters for i in c)
    assert seen == list(range(len(fps)))
    for c in res.clusters:
        for j in c[1:]:
            assert 1.0 - tanimoto(fps[c[0]], fps[j]) <= t
    assert cluster_diversity(fps, t).clusters == res.clusters
    for r in fps:
        assert novelty(r, ReferenceIndex(fps)).score == 0.0


def test_butina_examples():
    same = [fp("c1ccccc1")] * 5
    assert cluster_diversity(same, 0.35).n_chemotypes == 1
    disjoint = [Fingerprint.from_bits([i], 64) for i in range(6)]
    res = cluster_diversity(disjoint, 0.35)
    assert res.n_chemotypes == 6 and res.mean_intra_similarity is None
    with pytest.raises(ValueError):
        cluster_diversity(same, 1.0)


def test_butina_neighbor_lists_match_oracle():
    rng = np.random.default_rng(5)
    fps = [Fingerprint.from_bits(rng.choice(64, rng.integers(3, 20), replace=False).tolist(), 64)
           for _ in range(20)]
    oracle = [[j for j in range(20) if j != i and 1.0 - tanimoto(fps[i], fps[j]) <= 0.6] for i in range(20)]
    assert neighbor_lists(fps, 0.6) == oracle


# -- privileged fragments ---------------------------------------------------------------

AMINES = ["NCC", "NC(C)C", "NC1CC1", "NCCO", "NCc1ccccc1", "N1CCCC1"]


def test_pf_mine_toy_scaffold():
    actives = [m("c1ccc2cc(ccc2c1)S(=O)(=O)" + a) for a in AMINES]
    background = [m("CC(=O)" + a) for a in AMINES] + [m("c1ccccc1")] * 3
    pfs = pf_mine(actives, background)
    assert [p.smiles for p in pfs] == ["[12*]S(=O)(=O)c1ccc2ccccc2c1"]
    # present in every active, absent from background: 1 / floor
    assert pfs[0].enrichment == 100.0


def test_pf_mine_identical_sets():
    actives = [m("c1ccc2cc(ccc2c1)S(=O)(=O)" + a) for a in AMINES]
    assert pf_mine(actives, actives) == []
    assert all(p.enrichment <= 1.0 for p in pf_mine(actives, actives, min_enrichment=0.0))


def test_pf_score_examples():
    pfs = [PrivilegedFragment.make("[16*]c1ccccc1", 5.0), PrivilegedFragment.make("[1*]C(C)=O", 2.0)]
    assert pf_score(m("CC(=O)Nc1ccccc1"), pfs).score == 1.0
    assert pf_score(m("CCCC"), pfs).score == 0.0
    base = pf_score(m("CCCCN"), pfs).score
    assert pf_score(m("CCCCNc1ccccc1"), pfs).score >= base
    empty = pf_score(m("CCO"), [])
    assert empty.score == 0.5 and empty.warning


# -- SOM -------------------------------------------------------------------------

def blobs(rng, n=200, d=5, sep=6.0):
    x = np.vstack([rng.normal(0, 1, (n, d)), rng.normal(sep, 1, (n, d))])
    y = ["A"] * n + ["B"] * n
    return x, y


def test_som_single_vector_converges():
    v = np.array([[1.5, -2.0, 3.0]])
    g = som_train(v, ["A"], 3, 3, 20, np.random.default_rng(0))
    k = int(g.bmus(v)[0])
    np.testing.assert_allclose(g.codebook[k] * g.scale + g.mean, v[0], atol=1e-6)


def test_som_reproducible_and_qe_not_worse():
    x, y = blobs(np.random.default_rng(1), 60)
    a = som_train(x, y, 6, 6, 10, np.random.default_rng(9))
    b = som_train(x, y, 6, 6, 10, np.random.default_rng(9))
    assert np.array_equal(a.codebook, b.codebook)
    assert a.final_qe <= a.initial_qe
    assert quantization_error(a, x) == a.final_qe


def test_som_errors():
    with pytest.raises(ValueError):
        som_train(np.zeros((0, 3)), [], 2, 2, 1, np.random.default_rng(0))
    with pytest.raises(ValueError):
        som_train(np.zeros((3, 2)), ["a", "b"], 2, 2, 1, np.random.default_rng(0))
    g = som_train(np.eye(3), ["a", "b", "c"], 2, 2, 2, np.random.default_rng(0))
    with pytest.raises(ValueError, match="dimension"):
        som_classify(g, [1.0, 2.0])


def hand_grid(codebook, hist, classes=("A", "B")):
    cb = np.asarray(codebook, dtype=float)
    return SOMGrid(cb.shape[0], 1, cb, tuple(classes), np.asarray(hist, dtype=float),
                   np.zeros(cb.shape[1]), np.ones(cb.shape[1]))


def test_som_classify_pure_and_empty():
    g = hand_grid([[0.0, 0.0], [5.0, 5.0]], [[4, 0], [0, 0]])
    v = som_classify(g, [0.0, 0.0])
    assert (v.label, v.confidence) == ("A", 1.0)
    e = som_classify(g, [5.0, 5.0])
    assert e.label is None and e.confidence == 0.0


def test_som_classify_delegates_to_child():
    parent = hand_grid([[0.0, 0.0], [9.0, 9.0]], [[3, 2], [0, 5]])
    child = hand_grid([[-1.0, -1.0], [1.0, 1.0]], [[3, 0], [0, 2]])
    parent.children = {0: child}
    parent.zoom_threshold = 0.8
    v = som_classify(parent, [0.9, 0.9])
    assert (v.label, v.confidence, v.depth) == ("B", 1.0, 1)
    assert som_classify(parent, [-0.9, -0.9]).label == "A"
    parent.zoom_threshold = 0.5  # parent confident enough: no delegation
    assert som_classify(parent, [0.9, 0.9]).depth == 0


def test_zoom_pure_neurons_no_children():
    x, y = blobs(np.random.default_rng(2), 50, sep=20.0)
    g = som_train(x, y, 4, 4, 10, np.random.default_rng(0))
    assert zoom_refine(g, x, y, 0.8, np.random.default_rng(0)).children == {}


def test_zoom_child_side_for_40_vectors():
    assert zoom_side(40) == 15 == math.ceil(math.sqrt(200))
    assert zoom_side(1000) == 20
    rng = np.random.default_rng(4)
    x = np.vstack([rng.normal(0, 0.3, (20, 2)) + [1, 0], rng.normal(0, 0.3, (20, 2)) - [1, 0]])
    y = ["A"] * 20 + ["B"] * 20
    g = som_train(x, y, 1, 1, 5, np.random.default_rng(0))
    z = zoom_refine(g, x, y, 0.8, np.random.default_rng(0))
    assert list(z.children) == [0]
    assert (z.children[0].width, z.children[0].height) == (15, 15)
    assert accuracy(z, x, y) >= accuracy(g, x, y)


# -- morph ------------------------------------------------------------------------

def test_morph_acid_to_tetrazole():
    out = {write_canonical(v) for v in morph(m("CC(=O)O"), mode="bioisostere")}
    assert canon("Cc1nn[nH]n1") in out


def test_morph_no_match_and_sanitized(corpus):
    assert morph(m("CCCC"), mode="bioisostere") == []
    for s in corpus[:100]:
        res = morph_variants(m(s), mode="metabolic")
        outs = [write_canonical(v) for v, _ in res.variants]
        assert canon(s) not in outs
        assert len(outs) == len(set(outs))
        for o in outs:
            assert canon(o) == o
    with pytest.raises(ValueError):
        morph(m("CCO"), mode="other")


# -- reward ------------------------------------------------------------------------

def test_range_score():
    assert range_score(5, 0, 10) == 1.0
    assert range_score(12.5, 0, 10) == 0.0
    assert range_score(11.25, 0, 10) == 0.5
    assert range_score(-1.25, 0, 10) == 0.5
    assert range_score(3, 3, 3) == 1.0


WEIGHTS = RewardWeights(
    {"drug_likeness": 1.0, "rersa": 0.5, "novelty": 0.3, "mw": 0.2, "mce18": 0.4},
    {"mw": (200.0, 400.0)},
)


def full_report(dl=1.0, rs=1.0, nov=1.0, mw=300.0, mc=100.0):
    d = {k: 0 for k in DescriptorVector.__dataclass_fields__}
    d["mw"] = mw
    return ScoreReport("C", drug_likeness=dl, rersa=rs, novelty=nov, mce18=mc, descriptors=d)


def test_reward_gate_and_all_ones():
    assert reward(full_report(), WEIGHTS) == 1.0
    r = full_report()
    r.hard_fail = True
    assert reward(r, WEIGHTS) == 0.0
    assert reward(ScoreReport("x", valid=False), WEIGHTS) == 0.0


@settings(max_examples=2000, deadline=None)
@given(st.floats(0, 1), st.floats(1, 10), st.floats(0, 1), st.floats(0, 800), st.floats(0, 200),
       st.sampled_from(["dl", "rs", "nov", "mw", "mc"]), st.floats(0, 1))
def test_reward_monotone_and_bounded(dl, rs, nov, mw, mc, which, step):
    base = dict(dl=dl, rs=rs, nov=nov, mw=mw, mc=mc)
    r0 = reward(full_report(**base), WEIGHTS)
    assert 0.0 <= r0 <= 1.0
    comp0 = component_scores(full_report(**base), WEIGHTS)
    better = dict(base)
    if which == "rs":
        better["rs"] = max(1.0, rs - 9 * step)  # lower ReRSA is better
    elif which == "mw":
        better["mw"] = mw + (300.0 - mw) * step  # towards the range
    elif which == "mc":
        better["mc"] = mc + 100 * step
    else:
        better[which] = min(1.0, base[which] + step)
    comp1 = component_scores(full_report(**better), WEIGHTS)
    assert all(comp1[k] >= comp0[k] for k in comp0)
    assert reward(full_report(**better), WEIGHTS) >= r0 - 1e-12


def test_reward_weights_validation():
    with pytest.raises(ValueError):
        RewardWeights({"drug_likeness": -1.0})
    with pytest.raises(ValueError):
        RewardWeights({"drug_likeness": 0.0})
    with pytest.raises(ValueError):
        RewardWeights({"mw": 1.0})
    with pytest.raises(ValueError):
        RewardWeights({"bogus": 1.0})
    w = drug_likeness_weights()
    assert RewardWeights.from_dict(w.to_dict()) == w
    assert abs(sum(w.normalized().values()) - 1.0) < 1e-12


# -- screening cascade ---------------------------------------------------------------

def test_cascade_examples():
    ctx = ScoringContext()
    bad = evaluate("O=[N+]([O-])c1ccccc1", ctx)
    assert bad.hard_fail and bad.gate == "mcf" and bad.reward == 0.0
    assert bad.descriptors is None and bad.rersa is None
    ok = evaluate("CC(=O)Nc1ccc(O)cc1", ctx)
    assert not ok.hard_fail and ok.reward > 0
    assert None not in (ok.mcf_pass, ok.t_index_pass, ok.ro5_pass, ok.drug_likeness, ok.mce18,
                        ok.rersa, ok.flex, ok.descriptors)
    assert evaluate("C" * 20, ctx).gate == "t_index"
    assert evaluate("C1CC", ctx).gate == "valence"


def test_cascade_equals_full_evaluation(seed_1k):
    refs = [morgan_fingerprint(m(s)) for s in seed_1k[:50]]
    ctx = ScoringContext(known=ReferenceIndex(refs), reference=ReferenceIndex(refs, metric="cosine"))
    rng = np.random.default_rng(0)
    picks = [seed_1k[i] for i in rng.choice(len(seed_1k), 100, replace=False)]
    picks += ["O=[N+]([O-])c1ccccc1", "C" * 20, "C1CC"]
    for s in picks:
        assert evaluate(s, ctx, cascade=True).reward == evaluate(s, ctx, cascade=False).reward
