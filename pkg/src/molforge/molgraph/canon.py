"""Canonical atom ranking and SMILES writing."""

from __future__ import annotations


from .core import (
    H_SLOT,
    BondOrder,
    Molecule,
    NotSanitizedError,
    reference_neighbors,
    tag_for_order,
)
from .elements import AROMATIC_ORGANIC, ORGANIC_SUBSET


def _dense(keys) -> list[int]:
    lookup = {k: r for r, k in enumerate(sorted(set(keys)))}
    return [lookup[k] for k in keys]


def _refine(mol: Molecule, classes: list[int]) -> list[int]:
    bonds = mol.bonds
    nb = [[(j, int(bonds[k].order)) for j, k in row] for row in mol.adjacency]
    n_classes = len(set(classes))
    while True:
        keys = [
            (classes[i], tuple(sorted([(classes[j], o) for j, o in nb[i]])))
            for i in range(len(classes))
        ]
        new = _dense(keys)
        n_new = len(set(new))
        if n_new == n_classes:
            return new
        classes, n_classes = new, n_new


def _initial(mol: Molecule) -> list[tuple]:
    ring_bonds = mol.ring_bonds
    inv = []
    for i, a in enumerate(mol.atoms):
        adj = mol.adjacency[i]
        inv.append(
            (
                len(adj),
                a.atomic_number,
                a.isotope or 0,
                a.formal_charge,
                a.implicit_h,
                a.aromatic,
                sum(1 for _, k in adj if k in ring_bonds),
            )
        )
    return inv


def canonical_tag(mol: Molecule, i: int, classes: list[int]) -> str | None:
    """Chirality of atom ``i`` restated against neighbours ordered by class."""
    tag = mol.atoms[i].chirality
    if tag is None:
        return None
    ref = reference_neighbors(mol, i)
    target = sorted(ref, key=lambda v: -1 if v == H_SLOT else classes[v])
    return tag_for_order(tag, ref, target)


def refine_classes(mol: Molecule, use_chirality: bool = True) -> list[int]:
    """Symmetry classes by iterative neighbourhood refinement (no tie-breaking)."""
    classes = _refine(mol, _dense(_initial(mol)))
    if use_chirality and any(a.chirality for a in mol.atoms):
        extra = []
        for i in range(len(mol.atoms)):
            tag = canonical_tag(mol, i, classes)
            extra.append({None: 0, "CCW": 1, "CW": 2}[tag])
        classes = _refine(mol, _dense(list(zip(classes, extra))))
    return classes


def canonical_ranks(mol: Molecule) -> list[int]:
    """Distinct canonical ranks, ties broken deterministically."""
    cached = mol._cache.get("canon_ranks")
    if cached is not None:
        return cached
    classes = refine_classes(mol)
    n = len(classes)
    while len(set(classes)) < n:
        counts: dict[int, int] = {}
        for c in classes:
            counts[c] = counts.get(c, 0) + 1
        tied = min(c for c, m in counts.items() if m > 1)
        chosen = classes.index(tied)
        keys = [(c, 0 if i == chosen or c != tied else 1) for i, c in enumerate(classes)]
        classes = _refine(mol, _dense(keys))
    mol._cache["canon_ranks"] = classes
    return classes


def _bond_symbol(mol: Molecule, k: int) -> str:
    b = mol.bonds[k]
    if b.order is BondOrder.AROMATIC:
        return ""
    if b.order is BondOrder.DOUBLE:
        return "="
    if b.order is BondOrder.TRIPLE:
        return "#"
    if mol.atoms[b.begin].aromatic and mol.atoms[b.end].aromatic:
        return "-"
    return ""


def _atom_token(mol: Molecule, i: int, tag: str | None) -> str:
    a = mol.atoms[i]
    sym = a.element
    if a.aromatic:
        sym = sym.lower()
    organic = a.element in ORGANIC_SUBSET or a.is_dummy
    if a.aromatic and a.element not in AROMATIC_ORGANIC:
        organic = False
    bare = (
        organic
        and a.formal_charge == 0
        and a.isotope is None
        and tag is None
        and a.explicit_h is None  # sanitize clears it when the valence model agrees
    )
    if bare:
        return sym
    out = ["[", str(a.isotope) if a.isotope is not None else "", sym]
    if tag:
        out.append("@" if tag == "CCW" else "@@")
    if a.implicit_h:
        out.append("H" if a.implicit_h == 1 else f"H{a.implicit_h}")
    q = a.formal_charge
    if q:
        sign = "+" if q > 0 else "-"
        out.append(sign if abs(q) == 1 else f"{sign}{abs(q)}")
    out.append("]")
    return "".join(out)


def to_smiles(mol: Molecule, ranks: list[int]) -> str:
    """Write SMILES with a DFS that visits atoms in ``ranks`` order."""
    n = len(mol.atoms)
    if n == 0:
        return ""
    adj = [sorted(mol.adjacency[i], key=lambda t: ranks[t[0]]) for i in range(n)]
    visited = [False] * n
    parent = [-1] * n
    parent_bond = [-1] * n
    children: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    opens: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    closes: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    preorder: list[int] = []
    seen_ring_bond: set[int] = set()

    def dfs(root: int) -> None:
        visited[root] = True
        preorder.append(root)
        stack = [(root, iter(adj[root]))]
        while stack:
            v, it = stack[-1]
            for w, k in it:
                if k == parent_bond[v]:
                    continue
                if visited[w]:
                    if k not in seen_ring_bond:
                        seen_ring_bond.add(k)
                        opens[w].append((v, k))
                        closes[v].append((w, k))
                    continue
                visited[w] = True
                parent[w], parent_bond[w] = v, k
                children[v].append((w, k))
                preorder.append(w)
                stack.append((w, iter(adj[w])))
                break
            else:
                stack.pop()

    pos = {}
    starts = []
    for root in sorted(range(n), key=lambda i: ranks[i]):
        if not visited[root]:
            starts.append(root)
            dfs(root)
    for p, a in enumerate(preorder):
        pos[a] = p

    free_digits: list[int] = []
    next_digit = [1]
    digit_of: dict[int, int] = {}

    def take_digit() -> int:
        if free_digits:
            free_digits.sort()
            return free_digits.pop(0)
        d = next_digit[0]
        next_digit[0] += 1
        return d

    def fmt_digit(d: int) -> str:
        return str(d) if d < 10 else f"%{d:02d}"

    out: list[str] = []

    def emit(root: int) -> None:
        # explicit stack of actions to keep deep chains off the recursion limit
        actions: list = [("atom", root, None)]
        while actions:
            act = actions.pop()
            if act[0] == "text":
                out.append(act[1])
                continue
            _, v, via = act
            a = mol.atoms[v]
            written: list[int] = []
            if via is not None:
                out.append(_bond_symbol(mol, via))
                written.append(parent[v])
            if a.implicit_h:
                written.append(H_SLOT)
            ring_tokens = []
            for w, k in closes[v]:
                d = digit_of.pop(k)
                ring_tokens.append(fmt_digit(d))
                free_digits.append(d)
                written.append(w)
            for w, k in sorted(opens[v], key=lambda t: pos[t[0]]):
                d = take_digit()
                digit_of[k] = d
                ring_tokens.append(_bond_symbol(mol, k) + fmt_digit(d))
                written.append(w)
            kids = children[v]
            written.extend(w for w, _ in kids)
            tag = None
            if a.chirality:
                tag = tag_for_order(a.chirality, reference_neighbors(mol, v), written)
            out.append(_atom_token(mol, v, tag))
            out.extend(ring_tokens)
            # push in reverse: branches are parenthesised, last child continues the chain
            pending = []
            for idx, (w, k) in enumerate(kids):
                if idx < len(kids) - 1:
                    pending.append(("text", "("))
                    pending.append(("atom", w, k))
                    pending.append(("text", ")"))
                else:
                    pending.append(("atom", w, k))
            actions.extend(reversed(pending))

    for s_idx, root in enumerate(starts):
        if s_idx:
            out.append(".")
        emit(root)
    return "".join(out)


def write_canonical(mol: Molecule) -> str:
    """Deterministic canonical SMILES of a sanitized molecule."""
    if not mol.sanitized:
        raise NotSanitizedError("write_canonical requires a sanitized molecule")
    cached = mol._cache.get("canonical")
    if cached is None:
        cached = to_smiles(mol, canonical_ranks(mol))
        mol._cache["canonical"] = cached
    return cached
