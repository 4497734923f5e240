"""Atom, Bond and Molecule value types."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import IntEnum
from typing import Iterable, Sequence

from .elements import ATOMIC_NUMBER, ATOMIC_WEIGHT

H_SLOT = -1  # stands in for the implicit hydrogen in chirality neighbour lists


class MolError(ValueError):
    """Base class for structure errors."""


class SmilesError(MolError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class ValenceError(MolError):
    def __init__(self, atom: int, message: str = ""):
        super().__init__(f"valence violation on atom {atom}" + (f": {message}" if message else ""))
        self.atom = atom


class KekulizeError(MolError):
    pass


class NotSanitizedError(MolError):
    pass


class BondOrder(IntEnum):
    SINGLE = 1
    DOUBLE = 2
    TRIPLE = 3
    AROMATIC = 4

    @property
    def valence(self) -> float:
        return 1.5 if self is BondOrder.AROMATIC else float(self)


@dataclass(frozen=True, slots=True)
class Atom:
    element: str
    formal_charge: int = 0
    isotope: int | None = None
    aromatic: bool = False
    # H count fixed by the input (bracket atom); None means derived by the valence model.
    explicit_h: int | None = None
    implicit_h: int = 0
    # "CCW" (@) or "CW" (@@), relative to neighbours in ascending index order
    # with the implicit hydrogen (if any) first.
    chirality: str | None = None

    @property
    def atomic_number(self) -> int:
        return ATOMIC_NUMBER[self.element]

    @property
    def weight(self) -> float:
        return ATOMIC_WEIGHT[self.element]

    @property
    def is_dummy(self) -> bool:
        return self.element == "*"


@dataclass(frozen=True, slots=True)
class Bond:
    begin: int
    end: int
    order: BondOrder = BondOrder.SINGLE

    def other(self, idx: int) -> int:
        return self.end if idx == self.begin else self.begin


@dataclass(frozen=True, eq=False)
class Molecule:
    atoms: tuple[Atom, ...]
    bonds: tuple[Bond, ...]
    rings: tuple[tuple[int, ...], ...] = ()
    sanitized: bool = False
    _cache: dict = field(default_factory=dict, repr=False, compare=False)
    # per atom, (neighbour, bond index) pairs in bond order; filled in __post_init__
    adjacency: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.atoms)
        lists: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        seen = set()
        for k, b in enumerate(self.bonds):
            i, j = b.begin, b.end
            if i == j:
                raise MolError(f"bond endpoints must differ (atom {i})")
            if not (0 <= i < n and 0 <= j < n):
                raise MolError(f"bond ({i}, {j}) out of range")
            key = (i, j) if i < j else (j, i)
            if key in seen:
                raise MolError(f"duplicate bond between atoms {key[0]} and {key[1]}")
            seen.add(key)
            lists[i].append((j, k))
            lists[j].append((i, k))
        object.__setattr__(self, "adjacency", tuple(tuple(x) for x in lists))

    def __len__(self) -> int:
        return len(self.atoms)

    @property
    def num_atoms(self) -> int:
        return len(self.atoms)

    @property
    def num_heavy_atoms(self) -> int:
        return sum(1 for a in self.atoms if a.element not in ("H", "*"))

    def neighbors(self, idx: int) -> list[int]:
        return [j for j, _ in self.adjacency[idx]]

    def degree(self, idx: int) -> int:
        return len(self.adjacency[idx])

    def heavy_degree(self, idx: int) -> int:
        return sum(1 for j, _ in self.adjacency[idx] if self.atoms[j].element != "H")

    def bond_between(self, i: int, j: int) -> Bond | None:
        for nb, k in self.adjacency[i]:
            if nb == j:
                return self.bonds[k]
        return None

    @property
    def ring_atoms(self) -> frozenset[int]:
        got = self._cache.get("ring_atoms")
        if got is None:
            got = frozenset(a for r in self.rings for a in r)
            self._cache["ring_atoms"] = got
        return got

    @property
    def ring_bonds(self) -> frozenset[int]:
        got = self._cache.get("ring_bonds")
        if got is None:
            from .perception import ring_bond_flags

            flags = ring_bond_flags(self)
            got = frozenset(k for k, f in enumerate(flags) if f)
            self._cache["ring_bonds"] = got
        return got

    def atom_ring_count(self, idx: int) -> int:
        return sum(1 for r in self.rings if idx in r)

    def fragments(self) -> list[list[int]]:
        """Connected components as sorted atom-index lists."""
        seen = [False] * len(self.atoms)
        comps = []
        for start in range(len(self.atoms)):
            if seen[start]:
                continue
            stack, comp = [start], []
            seen[start] = True
            while stack:
                a = stack.pop()
                comp.append(a)
                for nb, _ in self.adjacency[a]:
                    if not seen[nb]:
                        seen[nb] = True
                        stack.append(nb)
            comps.append(sorted(comp))
        return comps

    def formula(self) -> str:
        """Hill-order molecular formula (requires sanitized H counts)."""
        counts: dict[str, int] = {}
        for a in self.atoms:
            if a.is_dummy:
                continue
            counts[a.element] = counts.get(a.element, 0) + 1
            if a.implicit_h:
                counts["H"] = counts.get("H", 0) + a.implicit_h
        order = []
        if "C" in counts:
            order.append("C")
            if "H" in counts:
                order.append("H")
        order += sorted(k for k in counts if k not in order)
        return "".join(k + (str(counts[k]) if counts[k] > 1 else "") for k in order)

    def renumber(self, order: Sequence[int]) -> "Molecule":
        """Return the same molecule with atom ``order[i]`` moved to position ``i``.

        Chirality tags are re-expressed for the new neighbour indices.
        """
        n = len(self.atoms)
        if sorted(order) != list(range(n)):
            raise ValueError("order must be a permutation of atom indices")
        new_of = [0] * n
        for new, old in enumerate(order):
            new_of[old] = new
        atoms = []
        for old in order:
            a = self.atoms[old]
            if a.chirality:
                a = replace(a, chirality=remap_chirality(self, old, new_of))
            atoms.append(a)
        bonds = tuple(
            Bond(new_of[b.begin], new_of[b.end], b.order) for b in self.bonds
        )
        rings = tuple(tuple(new_of[x] for x in r) for r in self.rings)
        return Molecule(tuple(atoms), bonds, rings, self.sanitized)


def permutation_parity(seq: Sequence[int]) -> int:
    """0 for an even permutation of sorted(seq), 1 for odd."""
    seq = list(seq)
    parity = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                parity ^= 1
    return parity


def flip(tag: str | None) -> str | None:
    if tag is None:
        return None
    return "CW" if tag == "CCW" else "CCW"


def reference_neighbors(mol: Molecule, idx: int) -> list[int]:
    """Neighbour list that chirality tags are expressed against."""
    nbrs = sorted(mol.neighbors(idx))
    if mol.atoms[idx].implicit_h or mol.atoms[idx].explicit_h:
        nbrs.insert(0, H_SLOT)
    return nbrs


def tag_for_order(tag: str, reference: Sequence[int], written: Sequence[int]) -> str:
    """Translate a tag stated against ``reference`` into one against ``written``."""
    pos = {v: i for i, v in enumerate(reference)}
    parity = permutation_parity([pos[v] for v in written])
    return flip(tag) if parity else tag


def remap_chirality(mol: Molecule, idx: int, new_of: Sequence[int] | dict) -> str | None:
    """Tag of atom ``idx`` once neighbours are renumbered through ``new_of``."""
    tag = mol.atoms[idx].chirality
    if tag is None:
        return None
    ref = reference_neighbors(mol, idx)
    mapped = [H_SLOT if v == H_SLOT else new_of[v] for v in ref]
    ordered = sorted(mapped)
    return tag_for_order(tag, mapped, ordered)


def make_molecule(atoms: Iterable[Atom], bonds: Iterable[Bond]) -> Molecule:
    return Molecule(tuple(atoms), tuple(bonds))
