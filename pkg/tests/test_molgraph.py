import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from molforge.molgraph import (
    Fingerprint,
    FingerprintMatrix,
    MolError,
    NoCompatiblePairing,
    NotSanitizedError,
    SmartsError,
    SmilesError,
    ValenceError,
    brics_fragment,
    brics_recombine,
    brute_force_match,
    cosine,
    descriptors,
    mol_from_smiles,
    morgan_fingerprint,
    murcko_scaffold,
    parse_molfile,
    parse_smarts,
    parse_smiles,
    sanitize,
    similarity,
    substructure_match,
    tanimoto,
    write_canonical,
)
from molforge.molgraph.molfile import MolfileError, iter_sdf
from molforge.molgraph.core import BondOrder

from conftest import canon, permuted


# -- parsing ---------------------------------------------------------------------

def test_parse_methane():
    m = sanitize(parse_smiles("C"))
    assert m.num_heavy_atoms == 1
    assert m.formula() == "CH4"
    assert m.atoms[0].implicit_h == 4


def test_parse_benzene():
    m = sanitize(parse_smiles("c1ccccc1"))
    assert all(a.aromatic for a in m.atoms)
    assert [a.implicit_h for a in m.atoms] == [1] * 6
    assert len(m.rings) == 1 and len(m.rings[0]) == 6


@pytest.mark.parametrize("text,msg", [
    ("C(C", "unbalanced parenthesis at offset 3"),
    ("C1CC", "unclosed ring closure"),
    ("Xx", "unknown element"),
    ("C=1CCCCC#1", "bond-order conflict"),
])
def test_parse_errors_carry_offsets(text, msg):
    with pytest.raises(SmilesError, match=msg):
        parse_smiles(text) if "ring" not in msg else mol_from_smiles(text)


def test_pentavalent_carbon_rejected():
    with pytest.raises(ValenceError, match="atom 0"):
        sanitize(parse_smiles("C(C)(C)(C)(C)C"))


def test_percent_ring_closure_and_fragments():
    assert canon("C%12CC%12") == canon("C1CC1")
    m = mol_from_smiles("CCO.[Na+]")
    assert len(m.fragments()) == 2


def test_bracket_atoms():
    m = mol_from_smiles("[13CH3][NH3+]")
    assert m.atoms[0].isotope == 13
    assert m.atoms[1].formal_charge == 1


# -- canonical SMILES ----------------------------------------------------------------

def test_canonical_spellings_agree():
    assert canon("OCC") == canon("CCO")
    assert canon("C1=CC=CC=C1") == canon("c1ccccc1")


def test_canonical_requires_sanitized():
    with pytest.raises(NotSanitizedError):
        write_canonical(parse_smiles("CCO"))


def test_canonical_fixed_point_and_permutation(corpus, rng):
    for s in corpus[:200]:
        c1 = canon(s)
        assert canon(c1) == c1
        for _ in range(3):
            assert write_canonical(permuted(s, rng)) == c1, s


def test_chirality_survives_canonicalization(rng):
    r = canon("C[C@H](N)C(=O)O")
    s = canon("C[C@@H](N)C(=O)O")
    assert r != s
    for _ in range(10):
        assert write_canonical(permuted("C[C@H](N)C(=O)O", rng)) == r


# -- molfile -------------------------------------------------------------------

def _block(atoms, bonds, title="t"):
    lines = [title, "  test", "", f"{len(atoms):3d}{len(bonds):3d}  0  0  0  0  0  0  0  0999 V2000"]
    for el in atoms:
        lines.append(f"    0.0000    0.0000    0.0000 {el:<3} 0  0  0  0  0  0  0  0  0  0  0  0")
    for a, b, o in bonds:
        lines.append(f"{a:3d}{b:3d}{o:3d}  0")
    lines.append("M  END")
    return "\n".join(lines) + "\n"


def test_molfile_methane():
    m = sanitize(parse_molfile(_block(["C"], [])))
    assert m.formula() == "CH4"


def test_molfile_benzene_kekule_matches_smiles():
    bonds = [(i + 1, (i + 1) % 6 + 1, 2 if i % 2 == 0 else 1) for i in range(6)]
    m = sanitize(parse_molfile(_block(["C"] * 6, bonds)))
    assert write_canonical(m) == canon("c1ccccc1")


def test_molfile_bad_counts_line():
    with pytest.raises(MolfileError, match="malformed counts line"):
        parse_molfile("x\n\n\nabc\n")


def test_molfile_truncated_atom_block():
    block = _block(["C", "O"], [(1, 2, 1)]).splitlines()
    del block[5]
    with pytest.raises(MolfileError):
        parse_molfile("\n".join(block[:5]) + "\n")


def test_sdf_iterator(tmp_path):
    text = _block(["C"], [], "one") + "$$$$\n" + _block(["O"], [], "two") + "$$$$\n"
    import io
    recs = list(iter_sdf(io.StringIO(text)))
    assert [t for t, _ in recs] == ["one", "two"]


# -- fingerprints ---------------------------------------------------------------

def test_fingerprint_permutation_invariant(corpus, rng):
    for s in corpus[:50]:
        assert morgan_fingerprint(mol_from_smiles(s)) == morgan_fingerprint(permuted(s, rng))


def test_methane_radius0_single_bit():
    assert morgan_fingerprint(mol_from_smiles("C"), radius=0).popcount == 1


def test_benzene_pyridine_partial_overlap():
    a = morgan_fingerprint(mol_from_smiles("c1ccccc1"))
    b = morgan_fingerprint(mol_from_smiles("c1ccncc1"))
    inter = int(np.bitwise_count(a.packed & b.packed).sum())
    union = int(np.bitwise_count(a.packed | b.packed).sum())
    assert 0 < inter < union


def test_similarity_definitions():
    a = Fingerprint.from_bits([0, 1, 2, 3], 64)
    b = Fingerprint.from_bits([0], 64)
    assert tanimoto(a, b) == 0.25
    assert cosine(a, b) == 0.5
    assert similarity(a, a) == 1.0 and similarity(a, a, "cosine") == 1.0
    c = Fingerprint.from_bits([10, 11], 64)
    assert tanimoto(a, c) == 0.0 and cosine(a, c) == 0.0
    empty = Fingerprint.from_bits([], 64)
    assert tanimoto(empty, empty) == 0.0 and cosine(empty, a) == 0.0
    with pytest.raises(ValueError, match="width"):
        tanimoto(a, Fingerprint.from_bits([0], 128))


def test_fingerprint_width_must_be_power_of_two():
    with pytest.raises(ValueError):
        Fingerprint.from_bits([0], 100)


bits = st.sets(st.integers(0, 127), max_size=40)


@settings(max_examples=10_000, deadline=None)
@given(bits, bits)
def test_similarity_bounds_and_symmetry(x, y):
    a, b = Fingerprint.from_bits(x, 128), Fingerprint.from_bits(y, 128)
    for metric in ("tanimoto", "cosine"):
        s = similarity(a, b, metric)
        assert 0.0 <= s <= 1.0
        assert s == similarity(b, a, metric)
    if x:
        assert tanimoto(a, a) == 1.0 and cosine(a, a) == 1.0


def test_matrix_route_equals_pairwise(corpus):
    fps = [morgan_fingerprint(mol_from_smiles(s)) for s in corpus[:30]]
    m = FingerprintMatrix(fps)
    for fp in fps[:5]:
        row = m.similarities(fp)
        assert row.tolist() == [tanimoto(fp, g) for g in fps]


# -- descriptors ----------------------------------------------------------------

def test_descriptors_methane():
    d = descriptors(mol_from_smiles("C"))
    assert d.mw == pytest.approx(16.04, abs=0.01)
    assert (d.hbd, d.hba, d.rotatable_bonds, d.fraction_sp3) == (0, 0, 0, 1.0)


def test_descriptors_benzene():
    d = descriptors(mol_from_smiles("c1ccccc1"))
    assert (d.aromatic_rings, d.fraction_sp3, d.rotatable_bonds) == (1, 0.0, 0)


def test_descriptor_consistency(corpus):
    for s in corpus[:300]:
        d = descriptors(mol_from_smiles(s))
        assert d.heavy_atoms == d.carbons + d.heteroatoms
        assert 0.0 <= d.fraction_sp3 <= 1.0
        assert min(d.hbd, d.hba, d.rotatable_bonds, d.aromatic_rings, d.aliphatic_rings,
                   d.chiral_centers, d.spiro_atoms) >= 0


@pytest.mark.parametrize("n", range(2, 10))
def test_alkane_terminal_carbon_mass(n):
    big = descriptors(mol_from_smiles("C" * (n + 1))).mw
    small = descriptors(mol_from_smiles("C" * n)).mw
    assert big - small == pytest.approx(14.03, abs=0.01)


def test_descriptors_permutation_invariant(corpus, rng):
    for s in corpus[:50]:
        assert descriptors(mol_from_smiles(s)) == descriptors(permuted(s, rng))


def test_amide_not_rotatable():
    assert descriptors(mol_from_smiles("CC(=O)NC")).rotatable_bonds == 0
    assert descriptors(mol_from_smiles("CCCC")).rotatable_bonds == 1


# -- substructure -----------------------------------------------------------------

def test_substructure_examples():
    assert len(substructure_match(mol_from_smiles("CCO"), "[OH]")) == 1
    assert substructure_match(mol_from_smiles("C1CCCCC1"), "c1ccccc1") == []
    nitro = mol_from_smiles("[O-][N+](=O)c1ccccc1")
    hits = substructure_match(nitro, "[N+](=O)[O-]")
    assert len(hits) == 1
    n, o1, o2 = hits[0]
    assert nitro.atoms[n].element == "N" and nitro.atoms[n].formal_charge == 1
    assert nitro.bond_between(n, o1).order == BondOrder.DOUBLE
    assert nitro.atoms[o2].formal_charge == -1


@pytest.mark.parametrize("pattern", ["[$(CO)]", "[C@H]", "C.C", "[Cr5]", "C>>O"])
def test_unsupported_smarts_rejected(pattern):
    with pytest.raises((SmartsError, MolError)):
        parse_smarts(pattern)


def test_mappings_are_valid_embeddings(corpus):
    q = parse_smarts("[#6]~[#7,#8]")
    for s in corpus[:50]:
        m = mol_from_smiles(s)
        for a, b in substructure_match(m, q, unique=False):
            assert m.atoms[a].element == "C" and m.atoms[b].element in ("N", "O")
            assert m.bond_between(a, b) is not None


# -- scaffold / BRICS ----------------------------------------------------------------

def test_scaffold_examples():
    assert write_canonical(murcko_scaffold(mol_from_smiles("Cc1ccccc1"))) == canon("c1ccccc1")
    assert write_canonical(murcko_scaffold(mol_from_smiles("CCCCCC"))) == ""
    assert write_canonical(murcko_scaffold(mol_from_smiles("CCCc1ccc(cc1)-c1ccccc1"))) == canon("c1ccc(cc1)-c1ccccc1")


def test_brics_examples():
    assert len(brics_fragment(mol_from_smiles("CC"))) == 1
    frags = sorted(f.smiles for f in brics_fragment(mol_from_smiles("CCOC(=O)c1ccccc1")))
    assert frags == sorted(["[1*]C(=O)c1ccccc1", "[3*]OCC"])


def test_brics_fragment_multiset_permutation_invariant(corpus, rng):
    for s in corpus[:60]:
        a = sorted(f.smiles for f in brics_fragment(mol_from_smiles(s)))
        assert sorted(f.smiles for f in brics_fragment(permuted(s, rng))) == a


def test_brics_forced_reassembly(corpus):
    for s in corpus[:100]:
        m = mol_from_smiles(s)
        rebuilt = brics_recombine(brics_fragment(m), forced=True)
        assert write_canonical(rebuilt) == write_canonical(m), s


def test_recombine_single_closed_fragment_unchanged():
    frag = brics_fragment(mol_from_smiles("CC"))
    assert write_canonical(brics_recombine(frag, np.random.default_rng(0))) == "CC"


def test_recombine_incompatible_types():
    # two ester acyl attachments ([1*]) cannot pair with each other
    frags = brics_fragment(mol_from_smiles("CCOC(=O)c1ccccc1"))
    acyl = [f for f in frags if f.smiles.startswith("[1*]")]
    with pytest.raises(NoCompatiblePairing):
        brics_recombine(acyl + acyl, np.random.default_rng(0))


def test_random_recombination_outputs_sanitize(corpus):
    rng = np.random.default_rng(3)
    frags = [f for s in corpus[:40] for f in brics_fragment(mol_from_smiles(s)) if f.attachments]
    made = 0
    for _ in range(50):
        pick = [frags[i] for i in rng.choice(len(frags), 3, replace=False)]
        try:
            m = brics_recombine(pick, rng)
        except NoCompatiblePairing:
            continue
        assert canon(write_canonical(m)) == write_canonical(m)
        made += 1
    assert made > 10
