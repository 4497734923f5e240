"""Mutable graph editing on the Kekulé form.

Editing happens on single/double/triple bonds with aromatic flags cleared,
so that sanitize can re-perceive aromaticity afterwards.  Neutral organic
atoms get their hydrogens back from the valence model; atoms whose H count
is fixed (charged atoms, [nH]-type atoms) keep an explicit count that is
adjusted when bonds are cut.  Chirality tags are dropped by every edit.
"""

from __future__ import annotations

from dataclasses import replace

from .core import Atom, Bond, BondOrder, Molecule
from .elements import ORGANIC_SUBSET, default_valence
from .perception import kekulize, ring_bond_flags


class MolBuilder:
    def __init__(self):
        self.atoms: list[Atom] = []
        self.bonds: dict[tuple[int, int], BondOrder] = {}

    @classmethod
    def from_molecule(cls, mol: Molecule) -> "MolBuilder":
        b = cls()
        if any(bd.order is BondOrder.AROMATIC for bd in mol.bonds):
            orders = kekulize(mol, ring_bond_flags(mol))
        else:
            orders = [bd.order for bd in mol.bonds]
        for k, bd in enumerate(mol.bonds):
            b.bonds[_key(bd.begin, bd.end)] = orders[k]
        used = [0] * len(mol.atoms)
        for (i, j), o in b.bonds.items():
            used[i] += int(o)
            used[j] += int(o)
        for i, a in enumerate(mol.atoms):
            h = a.implicit_h if mol.sanitized else (a.explicit_h or 0)
            if a.explicit_h is None and not mol.sanitized:
                eh = None
            elif (a.element in ORGANIC_SUBSET and a.formal_charge == 0
                  and default_valence(a.element, 0, used[i]) == used[i] + h):
                eh = None
            else:
                eh = h
            b.atoms.append(Atom(a.element, a.formal_charge, a.isotope, False, eh, 0, None))
        return b

    def copy(self) -> "MolBuilder":
        c = MolBuilder()
        c.atoms = list(self.atoms)
        c.bonds = dict(self.bonds)
        return c

    def __len__(self) -> int:
        return len(self.atoms)

    def neighbors(self, i: int) -> list[int]:
        return sorted(j if a == i else a for (a, j) in self.bonds if i in (a, j))

    def order(self, i: int, j: int) -> BondOrder | None:
        return self.bonds.get(_key(i, j))

    def valence_used(self, i: int) -> int:
        return sum(int(o) for (a, b), o in self.bonds.items() if i in (a, b))

    def add_atom(self, atom: Atom) -> int:
        self.atoms.append(replace(atom, aromatic=False, implicit_h=0, chirality=None))
        return len(self.atoms) - 1

    def add_bond(self, i: int, j: int, order: BondOrder = BondOrder.SINGLE) -> None:
        if i == j or _key(i, j) in self.bonds:
            raise ValueError(f"cannot bond atoms {i} and {j}")
        self.bonds[_key(i, j)] = order

    def set_order(self, i: int, j: int, order: BondOrder) -> None:
        k = _key(i, j)
        if k not in self.bonds:
            raise KeyError(k)
        old = self.bonds[k]
        self.bonds[k] = order
        delta = int(old) - int(order)
        for x in (i, j):
            self._adjust_fixed_h(x, delta)

    def remove_bond(self, i: int, j: int, cap: bool = True) -> BondOrder:
        """Delete a bond; atoms with a fixed H count are capped with H."""
        o = self.bonds.pop(_key(i, j))
        if cap:
            for x in (i, j):
                self._adjust_fixed_h(x, int(o))
        return o

    def _adjust_fixed_h(self, x: int, delta: int) -> None:
        a = self.atoms[x]
        if a.explicit_h is not None and not a.is_dummy:
            self.atoms[x] = replace(a, explicit_h=max(0, a.explicit_h + delta))

    def remove_atoms(self, drop, cap: bool = True) -> list[int]:
        """Delete atoms; return old->new index map (-1 for removed)."""
        drop = set(drop)
        for (i, j) in list(self.bonds):
            if i in drop or j in drop:
                o = self.bonds.pop((i, j))
                if cap:
                    for x in (i, j):
                        if x not in drop:
                            self._adjust_fixed_h(x, int(o))
        new_of = []
        keep = []
        for i in range(len(self.atoms)):
            if i in drop:
                new_of.append(-1)
            else:
                new_of.append(len(keep))
                keep.append(self.atoms[i])
        self.atoms = keep
        self.bonds = {_key(new_of[i], new_of[j]): o for (i, j), o in self.bonds.items()}
        return new_of

    def components(self) -> list[list[int]]:
        adj = [[] for _ in self.atoms]
        for i, j in self.bonds:
            adj[i].append(j)
            adj[j].append(i)
        seen = [False] * len(self.atoms)
        out = []
        for s in range(len(self.atoms)):
            if seen[s]:
                continue
            comp, stack = [], [s]
            seen[s] = True
            while stack:
                v = stack.pop()
                comp.append(v)
                for w in adj[v]:
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
            out.append(sorted(comp))
        return out

    def merge(self, other: "MolBuilder") -> int:
        """Append another builder's graph; return the index offset."""
        off = len(self.atoms)
        self.atoms.extend(other.atoms)
        for (i, j), o in other.bonds.items():
            self.bonds[(i + off, j + off)] = o
        return off

    def to_molecule(self) -> Molecule:
        bonds = tuple(Bond(i, j, o) for (i, j), o in sorted(self.bonds.items()))
        return Molecule(tuple(self.atoms), bonds)


def _key(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


def submolecule(mol: Molecule, keep) -> Molecule:
    """Unsanitized molecule of the ``keep`` atoms; cut bonds are capped with H."""
    b = MolBuilder.from_molecule(mol)
    keep = set(keep)
    b.remove_atoms([i for i in range(len(mol.atoms)) if i not in keep])
    return b.to_molecule()
