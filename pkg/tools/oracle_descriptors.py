"""Offline oracle: descriptor golden file from RDKit.

Run with an interpreter that has RDKit (not a runtime dependency):

    python tools/oracle_descriptors.py > tests/data/descriptor_golden.tsv

Counts follow the package's definitions but are computed from RDKit's own
perception (its ring finding, aromaticity and H assignment), so the test
compares two independent routes.  mw is RDKit's Descriptors.MolWt.
"""

import sys
from pathlib import Path

from rdkit import Chem, RDLogger
from rdkit.Chem import Descriptors

RDLogger.DisableLog("rdApp.*")
CORPUS = Path(__file__).resolve().parents[1] / "src" / "molforge" / "data" / "corpus.smi"


def is_amide(bond):
    for c, n in ((bond.GetBeginAtom(), bond.GetEndAtom()), (bond.GetEndAtom(), bond.GetBeginAtom())):
        if c.GetSymbol() != "C" or n.GetSymbol() != "N":
            continue
        for b in c.GetBonds():
            o = b.GetOtherAtom(c)
            if b.GetBondType() == Chem.BondType.DOUBLE and o.GetSymbol() in ("O", "S"):
                return True
    return False


def rotatable(mol):
    n = 0
    for b in mol.GetBonds():
        if b.GetBondType() != Chem.BondType.SINGLE or b.IsInRing():
            continue
        a, c = b.GetBeginAtom(), b.GetEndAtom()
        if a.GetAtomicNum() <= 1 or c.GetAtomicNum() <= 1:
            continue
        if a.GetDegree() < 2 or c.GetDegree() < 2:
            continue
        if is_amide(b):
            continue
        n += 1
    return n


def main():
    rows = []
    for line in CORPUS.read_text().splitlines():
        if line and not line.startswith("#"):
            rows.append(line.split("\t"))
    picked = rows[:: len(rows) // 100][:100]
    print("# smiles\tmw\thbd\thba\trotatable  (RDKit oracle, see tools/oracle_descriptors.py)")
    for smi, _name in picked:
        mol = Chem.MolFromSmiles(smi)
        hbd = sum(1 for a in mol.GetAtoms() if a.GetSymbol() in ("N", "O") and a.GetTotalNumHs() > 0)
        hba = sum(1 for a in mol.GetAtoms() if a.GetSymbol() in ("N", "O"))
        print(f"{smi}\t{Descriptors.MolWt(mol):.4f}\t{hbd}\t{hba}\t{rotatable(mol)}")


if __name__ == "__main__":
    sys.exit(main())
