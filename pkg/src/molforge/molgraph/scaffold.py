"""Bemis-Murcko scaffolds."""

from __future__ import annotations

from .core import BondOrder, Molecule, NotSanitizedError
from .edit import submolecule
from .perception import sanitize

EMPTY_SCAFFOLD = ""  # canonical SMILES sentinel for acyclic molecules


def scaffold_atoms(mol: Molecule) -> set[int]:
    """Ring systems plus linkers, and exocyclic double-bonded atoms on them."""
    ring_atoms = mol.ring_atoms
    alive = set(range(len(mol.atoms)))
    deg = [len(row) for row in mol.adjacency]
    stack = [i for i in alive if deg[i] <= 1 and i not in ring_atoms]
    while stack:
        v = stack.pop()
        if v not in alive:
            continue
        alive.discard(v)
        for w, _ in mol.adjacency[v]:
            if w in alive:
                deg[w] -= 1
                if deg[w] <= 1 and w not in ring_atoms:
                    stack.append(w)
    if not alive & ring_atoms:
        return set()
    # keep =O, =N, =S hanging off the scaffold so ring valences stay intact
    extra = set()
    for v in alive:
        for w, k in mol.adjacency[v]:
            if w not in alive and len(mol.adjacency[w]) == 1 and mol.bonds[k].order is BondOrder.DOUBLE:
                extra.add(w)
    return alive | extra


def murcko_scaffold(mol: Molecule) -> Molecule:
    """Scaffold molecule; an acyclic input gives an empty molecule."""
    if not mol.sanitized:
        raise NotSanitizedError("murcko_scaffold requires a sanitized molecule")
    keep = scaffold_atoms(mol)
    return sanitize(submolecule(mol, keep))
