"""Assemble the shipped public SMILES corpus.

Offline helper: needs RDKit, which is *not* a runtime dependency of molforge.
Sources are the NCI open-database sample and two ChEMBL extracts that ship
inside the RDKit distribution (BSD licensed data files).

    /root/oracle/bin/python tools/build_corpus.py > src/molforge/data/corpus.smi
"""
import os
import sys

from rdkit import Chem, RDLogger

RDLogger.DisableLog("rdApp.*")

ALLOWED = {"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"}


def rdkit_data(*parts):
    import rdkit
    return os.path.join(os.path.dirname(rdkit.__file__), *parts)


SOURCES = [
    ("nci", rdkit_data("Data", "NCI", "first_5K.smi"), 1050),
    ("chembl2321810", rdkit_data("Contrib", "FreeWilson", "data", "CHEMBL2321810.smi"), 150),
    ("chembl11265", rdkit_data("Contrib", "fraggle", "data", "ChEMBL_11265_actives.smi"), 100),
]


def keep(smi):
    if "." in smi or "/" in smi or "\\" in smi:
        return False
    mol = Chem.MolFromSmiles(smi)
    if mol is None:
        return False
    n = mol.GetNumHeavyAtoms()
    if not 6 <= n <= 50:
        return False
    for atom in mol.GetAtoms():
        if atom.GetSymbol() not in ALLOWED or atom.GetIsotope() or atom.GetNumRadicalElectrons():
            return False
    return True


def main():
    print("# molforge public corpus: NCI open database sample + ChEMBL extracts")
    print("# columns: SMILES<TAB>name ; source spellings kept verbatim")
    seen = set()
    for tag, path, quota in SOURCES:
        taken = 0
        with open(path) as fh:
            for line in fh:
                parts = line.split()
                if not parts or parts[0].lower() == "smiles":
                    continue
                smi, name = parts[0], (parts[1] if len(parts) > 1 else str(taken))
                if not keep(smi):
                    continue
                key = Chem.CanonSmiles(smi)
                if key in seen:
                    continue
                seen.add(key)
                print(f"{smi}\t{tag}:{name}")
                taken += 1
                if taken >= quota:
                    break
        print(f"{tag}: {taken}", file=sys.stderr)


if __name__ == "__main__":
    main()
