"""Count-based descriptors plus table-driven logP and TPSA estimates."""

from __future__ import annotations

import functools
from dataclasses import asdict, dataclass, fields

from .canon import refine_classes
from .core import BondOrder, Molecule, NotSanitizedError
from .elements import ATOMIC_WEIGHT, read_table

HALOGENS = frozenset({"F", "Cl", "Br", "I"})


@dataclass(frozen=True)
class DescriptorVector:
    mw: float
    heavy_atoms: int
    hbd: int
    hba: int
    rotatable_bonds: int
    aromatic_rings: int
    aliphatic_rings: int
    fraction_sp3: float
    chiral_centers: int
    spiro_atoms: int
    heteroatoms: int
    carbons: int
    logp_est: float
    tpsa_est: float

    def as_dict(self) -> dict:
        return asdict(self)

    def as_list(self) -> list[float]:
        return [float(getattr(self, f.name)) for f in fields(self)]


FIELD_NAMES = tuple(f.name for f in fields(DescriptorVector))


@functools.lru_cache(maxsize=None)
def logp_table() -> dict[str, float]:
    table = {}
    for lineno, line in read_table("logp.txt"):
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"logp.txt:{lineno}: expected '<type> <value>'")
        table[parts[0]] = float(parts[1])
    return table


@functools.lru_cache(maxsize=None)
def tpsa_table() -> list[tuple]:
    rows = []
    for lineno, line in read_table("tpsa.txt"):
        p = line.split()
        if len(p) != 9:
            raise ValueError(f"tpsa.txt:{lineno}: expected 9 fields")
        ring3 = None if p[7] == "*" else bool(int(p[7]))
        rows.append((p[0], int(p[1]), int(p[2]), *map(int, p[3:7]), ring3, float(p[8])))
    return rows


def _is_heavy(el: str) -> bool:
    return el not in ("H", "*")


def _bond_counts(mol: Molecule, i: int) -> tuple[int, int, int, int]:
    c = [0, 0, 0, 0]
    for j, k in mol.adjacency[i]:
        if not _is_heavy(mol.atoms[j].element):
            continue
        c[int(mol.bonds[k].order) - 1] += 1
    return c[0], c[1], c[2], c[3]


def _total_h(mol: Molecule, i: int) -> int:
    return mol.atoms[i].implicit_h + sum(1 for j, _ in mol.adjacency[i] if mol.atoms[j].element == "H")


def is_sp3_carbon(mol: Molecule, i: int) -> bool:
    a = mol.atoms[i]
    if a.element != "C" or a.aromatic:
        return False
    return all(mol.bonds[k].order is BondOrder.SINGLE for _, k in mol.adjacency[i])


def is_amide_bond(mol: Molecule, k: int) -> bool:
    """C(=O)-N single bond (the carbonyl may also be C=S)."""
    b = mol.bonds[k]
    for c, n in ((b.begin, b.end), (b.end, b.begin)):
        if mol.atoms[c].element != "C" or mol.atoms[n].element != "N":
            continue
        for j, kk in mol.adjacency[c]:
            if mol.bonds[kk].order is BondOrder.DOUBLE and mol.atoms[j].element in ("O", "S"):
                return True
    return False


def rotatable_bonds(mol: Molecule) -> int:
    ring_bonds = mol.ring_bonds
    count = 0
    heavy_deg = [
        sum(1 for j, _ in row if _is_heavy(mol.atoms[j].element)) for row in mol.adjacency
    ]
    for k, b in enumerate(mol.bonds):
        if b.order is not BondOrder.SINGLE or k in ring_bonds:
            continue
        if not (_is_heavy(mol.atoms[b.begin].element) and _is_heavy(mol.atoms[b.end].element)):
            continue
        if heavy_deg[b.begin] < 2 or heavy_deg[b.end] < 2:
            continue
        if is_amide_bond(mol, k):
            continue
        count += 1
    return count


def ring_is_aromatic(mol: Molecule, ring) -> bool:
    return all(mol.atoms[i].aromatic for i in ring) and all(
        mol.bond_between(ring[t], ring[(t + 1) % len(ring)]).order is BondOrder.AROMATIC
        for t in range(len(ring))
    )


def chiral_center_count(mol: Molecule) -> int:
    """Atoms that could carry a tetrahedral tag, whether or not one is written.

    Counted: four single-bonded substituents (at most one H) in distinct
    symmetry classes, and three-coordinate S/P with a lone pair.  Neutral
    trivalent N is skipped because it inverts freely.
    """
    classes = refine_classes(mol, use_chirality=False)
    count = 0
    for i, a in enumerate(mol.atoms):
        adj = mol.adjacency[i]
        n_sub = len(adj) + a.implicit_h
        if a.implicit_h > 1:
            continue
        if n_sub == 4 and a.element in ("C", "Si", "N", "P", "S"):
            if a.element == "N" and a.formal_charge != 1:
                continue
            if any(mol.bonds[k].order is not BondOrder.SINGLE for _, k in adj):
                continue
        elif n_sub == 3 and a.element in ("S", "P") and not a.implicit_h and not a.aromatic:
            pass
        else:
            continue
        ranks = [classes[j] for j, _ in adj]
        if len(set(ranks)) == len(ranks):
            count += 1
    return count


def spiro_atoms(mol: Molecule) -> list[int]:
    """Atoms where two SSSR rings meet at that single atom."""
    out = []
    rings = [set(r) for r in mol.rings]
    for i in range(len(mol.atoms)):
        mine = [r for r in rings if i in r]
        if len(mine) < 2:
            continue
        if any((mine[x] & mine[y]) == {i} for x in range(len(mine)) for y in range(x + 1, len(mine))):
            out.append(i)
    return out


def logp_type(mol: Molecule, i: int) -> str:
    a = mol.atoms[i]
    el = a.element
    nbr_el = [mol.atoms[j].element for j, _ in mol.adjacency[i]]
    orders = [mol.bonds[k].order for _, k in mol.adjacency[i]]
    if el == "C":
        hetero = any(e in ("N", "O", "S") or e in HALOGENS for e in nbr_el)
        if a.aromatic:
            base = "C.ar"
        elif BondOrder.TRIPLE in orders or orders.count(BondOrder.DOUBLE) > 1:
            base = "C.sp"
        elif BondOrder.DOUBLE in orders:
            base = "C.sp2"
        else:
            base = "C.sp3"
        return base + ".X" if hetero else base
    if el == "N":
        if a.formal_charge:
            return "N.charged"
        if a.aromatic:
            return "N.ar"
        if BondOrder.TRIPLE in orders:
            return "N.sp"
        if BondOrder.DOUBLE in orders:
            return "N.sp2"
        for j, k in mol.adjacency[i]:
            if mol.atoms[j].aromatic or is_amide_bond(mol, k):
                return "N.amide"
        return "N.amine"
    if el == "O":
        if a.formal_charge:
            return "O.charged"
        if a.aromatic:
            return "O.ar"
        if BondOrder.DOUBLE in orders:
            return "O.carbonyl"
        return "O.hydroxyl" if _total_h(mol, i) else "O.ether"
    if el == "S":
        if a.aromatic:
            return "S.ar"
        return "S.ox" if any(e == "O" for e in nbr_el) else "S"
    if el in ("P", "B") or el in HALOGENS:
        return el
    return "other"


def logp_estimate(mol: Molecule) -> float:
    table = logp_table()
    total = 0.0
    for i, a in enumerate(mol.atoms):
        if not _is_heavy(a.element):
            continue
        total += table.get(logp_type(mol, i), table["other"])
        if a.implicit_h:
            total += a.implicit_h * table["H.C" if a.element == "C" else "H.X"]
    return round(total, 4)


def tpsa_estimate(mol: Molecule) -> float:
    rows = tpsa_table()
    small = {x for r in mol.rings if len(r) == 3 for x in r}
    total = 0.0
    for i, a in enumerate(mol.atoms):
        if a.element not in ("N", "O"):
            continue
        key = a.element.lower() if a.aromatic else a.element
        counts = _bond_counts(mol, i)
        h = _total_h(mol, i)
        for el, q, hh, s, d, t, ar, ring3, value in rows:
            if (el, q, hh, (s, d, t, ar)) == (key, a.formal_charge, h, counts) and (
                ring3 is None or ring3 == (i in small)
            ):
                total += value
                break
    return round(total, 4)


def descriptors(mol: Molecule) -> DescriptorVector:
    if not mol.sanitized:
        raise NotSanitizedError("descriptors require a sanitized molecule")
    mw = 0.0
    heavy = carbons = hbd = hba = sp3 = 0
    for i, a in enumerate(mol.atoms):
        mw += ATOMIC_WEIGHT[a.element] + a.implicit_h * ATOMIC_WEIGHT["H"]
        if not _is_heavy(a.element):
            continue
        heavy += 1
        if a.element == "C":
            carbons += 1
            sp3 += is_sp3_carbon(mol, i)
        elif a.element in ("N", "O"):
            hba += 1
            if _total_h(mol, i) >= 1:
                hbd += 1
    arom_rings = sum(1 for r in mol.rings if ring_is_aromatic(mol, r))
    return DescriptorVector(
        mw=round(mw, 4),
        heavy_atoms=heavy,
        hbd=hbd,
        hba=hba,
        rotatable_bonds=rotatable_bonds(mol),
        aromatic_rings=arom_rings,
        aliphatic_rings=len(mol.rings) - arom_rings,
        fraction_sp3=sp3 / carbons if carbons else 0.0,
        chiral_centers=chiral_center_count(mol),
        spiro_atoms=len(spiro_atoms(mol)),
        heteroatoms=heavy - carbons,
        carbons=carbons,
        logp_est=logp_estimate(mol),
        tpsa_est=tpsa_estimate(mol),
    )
