"""Rule-table fragmentation with typed attachment points, and recombination."""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .canon import write_canonical
from .core import Atom, BondOrder, Molecule, MolError, NotSanitizedError
from .edit import MolBuilder
from .elements import read_table
from .perception import sanitize
from .smarts import Query, parse_smarts, substructure_match


class NoCompatiblePairing(MolError):
    """No pair of open attachment points can be joined."""


@dataclass(frozen=True)
class CutRule:
    id: str
    pattern: str
    type_a: int
    type_b: int
    description: str
    query: Query


@dataclass(frozen=True)
class Fragment:
    """A fragment with dummy atoms marking attachment points.

    ``attachments`` holds (dummy atom index, type, cut id); the cut id pairs
    the two dummies produced by the same cleaved bond.
    """

    smiles: str
    mol: Molecule
    attachments: tuple[tuple[int, int, int], ...]

    @property
    def types(self) -> tuple[int, ...]:
        return tuple(sorted(t for _, t, _ in self.attachments))


@functools.lru_cache(maxsize=None)
def load_rules(name: str = "brics_rules.txt") -> tuple[CutRule, ...]:
    rules = []
    seen = set()
    for lineno, line in read_table(name):
        parts = line.split("\t")
        if len(parts) != 5:
            raise ValueError(f"{name}:{lineno}: expected 5 tab-separated fields")
        rid, pattern, ta, tb, desc = (p.strip() for p in parts)
        if rid in seen:
            raise ValueError(f"{name}:{lineno}: duplicate rule id {rid}")
        seen.add(rid)
        q = parse_smarts(pattern)
        if q.num_atoms < 2 or not any({a, b} == {0, 1} for a, b, _ in q.bonds):
            raise ValueError(f"{name}:{lineno}: pattern atoms 0 and 1 must be bonded")
        rules.append(CutRule(rid, pattern, int(ta), int(tb), desc, q))
    return tuple(rules)


@functools.lru_cache(maxsize=None)
def load_compat(name: str = "brics_compat.txt") -> frozenset[tuple[int, int]]:
    pairs = set()
    for lineno, line in read_table(name):
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"{name}:{lineno}: expected two types")
        a, b = int(parts[0]), int(parts[1])
        pairs.add((a, b))
        pairs.add((b, a))
    return frozenset(pairs)


def find_cuts(mol: Molecule, rules=None) -> list[tuple[int, int, int, str]]:
    """Cleavable bonds as (atom_a, atom_b, bond index, rule id), atom_a gets type_a."""
    if rules is None:
        rules = load_rules()
    taken: dict[int, tuple[int, int, int, str]] = {}
    for rule in rules:
        for m in substructure_match(mol, rule.query, unique=False):
            a, b = m[0], m[1]
            bond = mol.bond_between(a, b)
            k = next(kk for x, kk in mol.adjacency[a] if x == b)
            if k not in taken and bond is not None:
                taken[k] = (a, b, k, rule.id)
    return [taken[k] for k in sorted(taken)]


def brics_fragment(mol: Molecule, rules=None) -> list[Fragment]:
    """Cut every matching bond; fragments sorted by canonical SMILES.

    Dummy atoms carry the attachment type as their isotope label, so a
    fragment prints as e.g. ``[1*]C(=O)c1ccccc1``.
    """
    if not mol.sanitized:
        raise NotSanitizedError("brics_fragment requires a sanitized molecule")
    if rules is None:
        rules = load_rules()
    by_id = {r.id: r for r in rules}
    cuts = find_cuts(mol, rules)
    b = MolBuilder.from_molecule(mol)
    dummy_info: dict[int, tuple[int, int]] = {}
    for cut_id, (x, y, _k, rid) in enumerate(cuts):
        rule = by_id[rid]
        order = b.remove_bond(x, y, cap=False)
        for atom, typ in ((x, rule.type_a), (y, rule.type_b)):
            d = b.add_atom(Atom("*", isotope=typ, explicit_h=0))
            b.add_bond(atom, d, order)
            dummy_info[d] = (typ, cut_id)
    frags = []
    for comp in b.components():
        sub = b.copy()
        drop = [i for i in range(len(sub)) if i not in set(comp)]
        new_of = sub.remove_atoms(drop, cap=False)
        fmol = sanitize(sub.to_molecule())
        att = tuple(
            sorted((new_of[d], typ, cid) for d, (typ, cid) in dummy_info.items() if new_of[d] >= 0)
        )
        frags.append(Fragment(write_canonical(fmol), fmol, att))
    frags.sort(key=lambda f: (f.smiles, [c for _, _, c in f.attachments]))
    return frags


def _dummy_bond(b: MolBuilder, d: int) -> tuple[int, BondOrder]:
    nbrs = b.neighbors(d)
    if len(nbrs) != 1:
        raise MolError(f"attachment atom {d} must have exactly one neighbour")
    return nbrs[0], b.order(d, nbrs[0])


def join_attachments(b: MolBuilder, d1: int, d2: int) -> list[int]:
    """Replace dummies d1, d2 by a direct bond between their neighbours."""
    a1, o1 = _dummy_bond(b, d1)
    a2, o2 = _dummy_bond(b, d2)
    if o1 != o2:
        raise NoCompatiblePairing(f"bond orders differ at attachments {d1} and {d2}")
    if b.order(a1, a2) is not None or a1 == a2:
        raise NoCompatiblePairing("join would duplicate a bond")
    b.add_bond(a1, a2, o1)
    return b.remove_atoms([d1, d2], cap=False)


def cap_open(b: MolBuilder) -> None:
    """Remove leftover dummy atoms; neighbours regain the H."""
    dummies = [i for i, a in enumerate(b.atoms) if a.is_dummy]
    if dummies:
        b.remove_atoms(dummies, cap=True)


def brics_recombine(fragments, rng: np.random.Generator | None = None, forced: bool = False,
                    compat=None) -> Molecule:
    """Join fragments at compatible attachment points.

    ``forced`` pairs dummies by cut id (reassembling the parent molecule).
    Otherwise compatible pairs across different components are joined in a
    random order until none remain; leftover attachments are capped with H
    and only the component holding the first fragment is kept.  Raises
    :class:`NoCompatiblePairing` when attachments exist but none can pair.
    """
    fragments = list(fragments)
    if not fragments:
        raise ValueError("brics_recombine needs at least one fragment")
    if compat is None:
        compat = load_compat()
    b = MolBuilder()
    info: dict[int, tuple[int, int]] = {}
    for f in fragments:
        off = b.merge(MolBuilder.from_molecule(f.mol))
        for d, typ, cid in f.attachments:
            info[d + off] = (typ, cid)
    if not info:
        if len(fragments) == 1:
            return fragments[0].mol
        raise NoCompatiblePairing("fragments have no attachment points")

    def remap(new_of):
        return {new_of[d]: v for d, v in info.items() if new_of[d] >= 0}

    if forced:
        by_cut: dict[int, list[int]] = {}
        for d, (_, cid) in info.items():
            by_cut.setdefault(cid, []).append(d)
        pairs = [ds for ds in by_cut.values() if len(ds) == 2]
        if not pairs:
            raise NoCompatiblePairing("no matching cut ids")
        while pairs:
            d1, d2 = pairs.pop()
            new_of = join_attachments(b, d1, d2)
            info = remap(new_of)
            pairs = [[new_of[x] for x in ds] for ds in pairs]
    else:
        if rng is None:
            raise ValueError("random recombination needs an rng")
        joined = False
        while True:
            comp_of = {}
            for ci, comp in enumerate(b.components()):
                for x in comp:
                    comp_of[x] = ci
            ds = sorted(info)
            options = [
                (d1, d2)
                for t, d1 in enumerate(ds)
                for d2 in ds[t + 1 :]
                if (info[d1][0], info[d2][0]) in compat and comp_of[d1] != comp_of[d2]
            ]
            if not options:
                break
            d1, d2 = options[int(rng.integers(len(options)))]
            try:
                new_of = join_attachments(b, d1, d2)
            except NoCompatiblePairing:
                info.pop(d1)
                continue
            info = remap(new_of)
            joined = True
        if not joined:
            raise NoCompatiblePairing("no compatible attachment pair")
    cap_open(b)
    # removals keep relative order, so the first fragment holds the lowest index
    comps = b.components()
    if len(comps) > 1:
        keep = set(comps[0])
        b.remove_atoms([i for i in range(len(b)) if i not in keep])
    return sanitize(b.to_molecule())
