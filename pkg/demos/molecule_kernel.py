"""Walk through the molecule kernel: parse, canonicalize, fingerprint, match, fragment."""

import numpy as np

from molforge.molgraph import (
    brics_fragment, brics_recombine, descriptors, has_match, mol_from_smiles, morgan_fingerprint,
    murcko_scaffold, tanimoto, write_canonical,
)

# two spellings of paracetamol collapse to one canonical string
a = mol_from_smiles("CC(=O)Nc1ccc(O)cc1")
b = mol_from_smiles("Oc1ccc(NC(C)=O)cc1")
print("canonical:", write_canonical(a), "| same molecule:", write_canonical(a) == write_canonical(b))

d = descriptors(a)
print(f"mw {d.mw:.3f}  hbd {d.hbd}  hba {d.hba}  rotatable {d.rotatable_bonds}  logP~{d.logp_est:.2f}")

# similarity to a close analogue and to something unrelated
phenacetin = mol_from_smiles("CCOc1ccc(NC(C)=O)cc1")
hexane = mol_from_smiles("CCCCCC")
fa = morgan_fingerprint(a)
print("tanimoto vs phenacetin:", round(tanimoto(fa, morgan_fingerprint(phenacetin)), 3))
print("tanimoto vs hexane:    ", round(tanimoto(fa, morgan_fingerprint(hexane)), 3))

print("has amide:", has_match(a, "C(=O)N"), "| has carboxylic acid:", has_match(a, "C(=O)[OH]"))
print("scaffold:", write_canonical(murcko_scaffold(a)))

frags = brics_fragment(a)
print("fragments:", [f.smiles for f in frags])
print("forced reassembly:", write_canonical(brics_recombine(frags, forced=True)))
print("random recombination:", write_canonical(brics_recombine(frags, np.random.default_rng(0))))
