"""Ring perception, kekulization, hydrogen assignment and aromaticity.

Aromaticity is a Hückel approximation: each candidate ring is tested for
4n+2 pi electrons on its own, then pairs of fused rings that both failed are
tested on their union (this catches azulene-like systems).  Candidates are
every simple cycle of at most 8 ring atoms plus any larger SSSR ring, so the
result does not depend on which of several equal-size rings the SSSR picks
in bridged systems.  It is not a quantum model.
"""

from __future__ import annotations

from dataclasses import replace

from .core import (
    Atom,
    Bond,
    BondOrder,
    KekulizeError,
    Molecule,
    ValenceError,
)
from .elements import ORGANIC_SUBSET, allowed_valences, default_valence

_KEKULE_BUDGET = 200_000


def ring_bond_flags(mol: Molecule) -> list[bool]:
    """True for every bond that lies on a cycle (i.e. is not a bridge)."""
    n = len(mol.atoms)
    adj = mol.adjacency
    disc = [-1] * n
    low = [0] * n
    is_bridge = [False] * len(mol.bonds)
    t = 0
    for root in range(n):
        if disc[root] >= 0:
            continue
        disc[root] = low[root] = t
        t += 1
        stack = [(root, -1, iter(adj[root]))]
        while stack:
            v, via, it = stack[-1]
            advanced = False
            for w, k in it:
                if k == via:
                    continue
                if disc[w] < 0:
                    disc[w] = low[w] = t
                    t += 1
                    stack.append((w, k, iter(adj[w])))
                    advanced = True
                    break
                low[v] = min(low[v], disc[w])
            if advanced:
                continue
            stack.pop()
            if stack:
                parent = stack[-1][0]
                low[parent] = min(low[parent], low[v])
                if low[v] > disc[parent]:
                    is_bridge[via] = True
    return [not b for b in is_bridge]


def _cycle_from_edges(edges: list[tuple[int, int]]) -> tuple[int, ...]:
    """Walk a simple cycle given as an edge list; returns atoms in ring order."""
    nbrs: dict[int, list[int]] = {}
    for a, b in edges:
        nbrs.setdefault(a, []).append(b)
        nbrs.setdefault(b, []).append(a)
    start = min(nbrs)
    ring = [start]
    prev, cur = start, min(nbrs[start])
    while cur != start:
        ring.append(cur)
        a, b = nbrs[cur]
        prev, cur = cur, (b if a == prev else a)
    return tuple(ring)


def sssr(mol: Molecule, ring_flags: list[bool] | None = None) -> tuple[tuple[int, ...], ...]:
    """Smallest set of smallest rings (a minimum cycle basis).

    Candidates come from Horton's construction restricted to each ring
    system; a greedy GF(2) elimination then keeps the shortest independent
    cycles.
    """
    if ring_flags is None:
        ring_flags = ring_bond_flags(mol)
    ring_bond_ids = [k for k, f in enumerate(ring_flags) if f]
    if not ring_bond_ids:
        return ()
    # ring systems = connected components of the ring-bond subgraph
    radj: dict[int, list[tuple[int, int]]] = {}
    for k in ring_bond_ids:
        b = mol.bonds[k]
        radj.setdefault(b.begin, []).append((b.end, k))
        radj.setdefault(b.end, []).append((b.begin, k))
    seen: set[int] = set()
    rings: list[tuple[int, ...]] = []
    for start in sorted(radj):
        if start in seen:
            continue
        comp, stack = [], [start]
        seen.add(start)
        while stack:
            v = stack.pop()
            comp.append(v)
            for w, _ in radj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comp.sort()
        comp_bonds = sorted({k for v in comp for _, k in radj[v]})
        nrings = len(comp_bonds) - len(comp) + 1
        if nrings == 1:
            rings.append(
                _cycle_from_edges([(mol.bonds[k].begin, mol.bonds[k].end) for k in comp_bonds])
            )
            continue
        rings.extend(_min_cycle_basis(mol, comp, comp_bonds, radj, nrings))
    return tuple(rings)


def _min_cycle_basis(mol, comp, comp_bonds, radj, nrings):
    bit = {k: 1 << i for i, k in enumerate(comp_bonds)}
    candidates: dict[int, tuple[int, list[int]]] = {}
    for r in comp:
        # BFS tree from r
        parent = {r: (None, None)}
        order = [r]
        head = 0
        while head < len(order):
            v = order[head]
            head += 1
            for w, k in sorted(radj[v]):
                if w not in parent:
                    parent[w] = (v, k)
                    order.append(w)

        def path(v):
            atoms, mask = [v], 0
            while parent[v][0] is not None:
                p, k = parent[v]
                mask |= bit[k]
                atoms.append(p)
                v = p
            return atoms, mask

        for k in comp_bonds:
            b = mol.bonds[k]
            x, y = b.begin, b.end
            if parent[x][1] == k or parent[y][1] == k:
                continue
            px, mx = path(x)
            py, my = path(y)
            if set(px) & set(py) != {r}:
                continue
            mask = mx | my | bit[k]
            if mask not in candidates:
                size = bin(mask).count("1")
                candidates[mask] = (size, sorted(set(px) | set(py)))
    ordered = sorted(candidates.items(), key=lambda kv: (kv[1][0], kv[1][1]))
    basis: list[int] = []  # reduced vectors, each with a distinct pivot
    pivots: list[int] = []
    chosen = []
    for mask, _ in ordered:
        v = mask
        for piv, row in zip(pivots, basis):
            if v & piv:
                v ^= row
        if v:
            piv = v & -v
            # keep basis reduced on the new pivot
            for i, row in enumerate(basis):
                if row & piv:
                    basis[i] = row ^ v
            basis.append(v)
            pivots.append(piv)
            chosen.append(mask)
            if len(chosen) == nrings:
                break
    out = []
    inv = {b: k for k, b in bit.items()}
    for mask in chosen:
        edges = []
        m = mask
        while m:
            low = m & -m
            b = mol.bonds[inv[low]]
            edges.append((b.begin, b.end))
            m ^= low
        out.append(_cycle_from_edges(edges))
    return out


def _bond_valence_sum(orders, adj, i):
    return sum(int(orders[k]) for _, k in adj[i])


def kekulize(mol: Molecule, ring_flags: list[bool]) -> list[BondOrder]:
    """Assign alternating single/double orders to aromatic ring bonds."""
    orders = [b.order for b in mol.bonds]
    adj = mol.adjacency
    for k, b in enumerate(mol.bonds):
        if b.order is BondOrder.AROMATIC and not ring_flags[k]:
            orders[k] = BondOrder.SINGLE
    in_ring = [False] * len(mol.atoms)
    for k, f in enumerate(ring_flags):
        if f:
            in_ring[mol.bonds[k].begin] = in_ring[mol.bonds[k].end] = True
    for i, a in enumerate(mol.atoms):
        if a.aromatic and not in_ring[i]:
            raise KekulizeError(f"non-ring atom {i} marked aromatic")
    arom_bonds = [k for k, o in enumerate(orders) if o is BondOrder.AROMATIC]
    if not arom_bonds:
        return orders
    arom_atoms = sorted({x for k in arom_bonds for x in (mol.bonds[k].begin, mol.bonds[k].end)})
    need = {}
    for i in arom_atoms:
        a = mol.atoms[i]
        used = (a.explicit_h or 0) + sum(
            1 if orders[k] is BondOrder.AROMATIC else int(orders[k]) for _, k in adj[i]
        )
        if a.explicit_h is None:
            target = default_valence(a.element, a.formal_charge, used)
            if target is None:
                raise ValenceError(i)
            need[i] = 1 if target - used >= 1 else 0
        else:
            vals = allowed_valences(a.element, a.formal_charge)
            if not vals or used in vals:
                need[i] = 0
            elif used + 1 in vals:
                need[i] = 1
            else:
                raise ValenceError(i)
    cand = {i for i in arom_atoms if need[i]}
    cadj: dict[int, list[tuple[int, int]]] = {i: [] for i in cand}
    for k in arom_bonds:
        b = mol.bonds[k]
        if b.begin in cand and b.end in cand:
            cadj[b.begin].append((b.end, k))
            cadj[b.end].append((b.begin, k))
    doubles = _perfect_matching(cand, cadj)
    if doubles is None:
        raise KekulizeError("cannot kekulize aromatic system")
    for k in arom_bonds:
        orders[k] = BondOrder.SINGLE
    for k in doubles:
        orders[k] = BondOrder.DOUBLE
    return orders


def _perfect_matching(nodes: set[int], adj: dict[int, list[tuple[int, int]]]):
    remaining = set(nodes)
    chosen: list[int] = []
    budget = [_KEKULE_BUDGET]

    def solve() -> bool:
        if not remaining:
            return True
        budget[0] -= 1
        if budget[0] < 0:
            return False
        best, best_opts = None, None
        for v in sorted(remaining):
            opts = [(u, k) for u, k in adj[v] if u in remaining]
            if not opts:
                return False
            if best is None or len(opts) < len(best_opts):
                best, best_opts = v, opts
                if len(opts) == 1:
                    break
        remaining.discard(best)
        for u, k in best_opts:
            remaining.discard(u)
            chosen.append(k)
            if solve():
                return True
            chosen.pop()
            remaining.add(u)
        remaining.add(best)
        return False

    return chosen if solve() else None


def assign_hydrogens(mol: Molecule, orders: list[BondOrder]) -> list[int]:
    adj = mol.adjacency
    hs = []
    for i, a in enumerate(mol.atoms):
        used = _bond_valence_sum(orders, adj, i)
        if a.explicit_h is None:
            if a.is_dummy:
                hs.append(0)
                continue
            target = default_valence(a.element, a.formal_charge, used)
            if target is None:
                raise ValenceError(i, f"{a.element} with bond valence {used}")
            hs.append(target - used)
        else:
            vals = allowed_valences(a.element, a.formal_charge)
            if vals is not None and used + a.explicit_h > vals[-1]:
                raise ValenceError(i, f"{a.element} with valence {used + a.explicit_h}")
            hs.append(a.explicit_h)
    return hs


def _pi_electrons(mol, orders, ring_flags, hs, i):
    """Pi electrons atom ``i`` donates to a ring, or None if it cannot be aromatic."""
    a = mol.atoms[i]
    adj = mol.adjacency[i]
    doubles = []
    for j, k in adj:
        o = orders[k]
        if o is BondOrder.TRIPLE:
            return None
        if o is BondOrder.DOUBLE:
            doubles.append((j, k))
    if len(adj) + hs[i] > 3:
        return None
    el, q = a.element, a.formal_charge
    if len(doubles) > 1:
        return None
    if doubles:
        j, k = doubles[0]
        if ring_flags[k]:
            return 1
        if el == "C" and mol.atoms[j].element in ("O", "S", "N"):
            return 0
        return None
    if el == "C":
        return {-1: 2, 1: 0}.get(q)
    if el in ("N", "P"):
        if q == 0 and len(adj) + hs[i] == 3:
            return 2
        return 2 if q == -1 else None
    if el in ("O", "S", "Se"):
        return 2 if q == 0 and len(adj) + hs[i] == 2 else None
    if el == "B" and q == 0 and len(adj) + hs[i] == 3:
        return 0
    return None


_CYCLE_MAX = 8
_CYCLE_CAP = 5000


def small_cycles(mol: Molecule, ring_flags: list[bool], max_len: int = _CYCLE_MAX):
    """Every simple cycle of 3..max_len atoms over ring bonds, or None past the cap.

    Each cycle starts at its lowest atom index and runs toward the lower of
    that atom's two cycle neighbours.
    """
    radj: dict[int, list[int]] = {}
    for k, b in enumerate(mol.bonds):
        if ring_flags[k]:
            radj.setdefault(b.begin, []).append(b.end)
            radj.setdefault(b.end, []).append(b.begin)
    out = []
    for s0 in sorted(radj):
        stack = [(s0, [s0])]
        while stack:
            v, path = stack.pop()
            for w in sorted(radj[v], reverse=True):
                if w == s0 and len(path) >= 3 and path[1] < path[-1]:
                    out.append(tuple(path))
                    if len(out) > _CYCLE_CAP:
                        return None
                elif w > s0 and w not in path and len(path) < max_len:
                    stack.append((w, path + [w]))
    out.sort(key=lambda c: (len(c), c))
    return out


def perceive_aromaticity(mol, orders, ring_flags, hs, rings):
    """Return the aromatic candidate rings (tuples of atom indices)."""
    cands = small_cycles(mol, ring_flags)
    if cands is None:
        cands = list(rings)
    else:
        cands = cands + [r for r in rings if len(r) > _CYCLE_MAX]
    contrib = {}
    aromatic = set()
    ok = []
    for r_idx, ring in enumerate(cands):
        total, valid = 0, True
        for i in ring:
            if i not in contrib:
                contrib[i] = _pi_electrons(mol, orders, ring_flags, hs, i)
            if contrib[i] is None:
                valid = False
                break
            total += contrib[i]
        ok.append(valid)
        if valid and total % 4 == 2:
            aromatic.add(r_idx)
    # fused pairs of individually non-aromatic, fully conjugated rings
    ring_bondsets = [
        {frozenset((r[t], r[(t + 1) % len(r)])) for t in range(len(r))} for r in cands
    ]
    single = set(aromatic)
    for x in range(len(cands)):
        if not ok[x] or x in single:
            continue
        for y in range(x + 1, len(cands)):
            if not ok[y] or y in single:
                continue
            if not ring_bondsets[x] & ring_bondsets[y]:
                continue
            union = set(cands[x]) | set(cands[y])
            if sum(contrib[i] for i in union) % 4 == 2:
                aromatic.update((x, y))
    return [cands[i] for i in sorted(aromatic)]


def sanitize(mol: Molecule) -> Molecule:
    """Perceive rings, kekulize, assign hydrogens and aromaticity.

    Raises :class:`ValenceError` or :class:`KekulizeError`.
    """
    from .canon import refine_classes

    ring_flags = ring_bond_flags(mol)
    orders = kekulize(mol, ring_flags)
    hs = assign_hydrogens(mol, orders)
    rings = sssr(mol, ring_flags)
    arom = perceive_aromaticity(mol, orders, ring_flags, hs, rings)
    arom_atoms = set()
    arom_pairs = set()
    for ring in arom:
        arom_atoms.update(ring)
        for t in range(len(ring)):
            arom_pairs.add(frozenset((ring[t], ring[(t + 1) % len(ring)])))
    bonds = tuple(
        Bond(b.begin, b.end, BondOrder.AROMATIC)
        if arom_pairs and frozenset((b.begin, b.end)) in arom_pairs
        else Bond(b.begin, b.end, o)
        for b, o in zip(mol.bonds, orders)
    )
    ring_bond_set = frozenset(k for k, f in enumerate(ring_flags) if f)
    draft = [
        Atom(a.element, a.formal_charge, a.isotope, i in arom_atoms, a.explicit_h, h, a.chirality)
        for i, (a, h) in enumerate(zip(mol.atoms, hs))
    ]
    out = Molecule(tuple(draft), bonds, rings, sanitized=True)
    out._cache["ring_bonds"] = ring_bond_set

    if any(a.chirality for a in draft):
        classes = refine_classes(out, use_chirality=False)
        for i, a in enumerate(draft):
            if a.chirality and not is_stereocenter(out, i, classes):
                draft[i] = replace(a, chirality=None)
    # explicit H is kept only where the valence model would not reproduce it
    final = []
    for i, a in enumerate(draft):
        writable = (a.element in ORGANIC_SUBSET or a.is_dummy) and a.formal_charge == 0
        eh = None if writable and predicted_hcount(out, i) == a.implicit_h else a.implicit_h
        final.append(a if eh == a.explicit_h else replace(a, explicit_h=eh))
    result = Molecule(tuple(final), bonds, rings, sanitized=True)
    result._cache["ring_bonds"] = ring_bond_set
    return result


def is_stereocenter(mol: Molecule, i: int, classes: list[int]) -> bool:
    a = mol.atoms[i]
    nbrs = mol.neighbors(i)
    n_sub = len(nbrs) + a.implicit_h
    if a.implicit_h > 1 or n_sub not in (3, 4):
        return False
    if any(mol.bonds[k].order is not BondOrder.SINGLE for _, k in mol.adjacency[i]) and n_sub == 4:
        return False
    ranks = [classes[j] for j in nbrs]
    return len(set(ranks)) == len(ranks)


def predicted_hcount(mol: Molecule, i: int) -> int | None:
    """H count an unbracketed spelling of atom ``i`` would receive on reading."""
    a = mol.atoms[i]
    if a.is_dummy:
        return 0
    adj = mol.adjacency[i]
    if a.aromatic:
        used = sum(
            1 if mol.bonds[k].order is BondOrder.AROMATIC else int(mol.bonds[k].order)
            for _, k in adj
        )
        target = default_valence(a.element, 0, used)
        if target is None:
            return None
        room = target - used
        return room - 1 if room >= 1 else room
    used = sum(int(mol.bonds[k].order) for _, k in adj)
    target = default_valence(a.element, 0, used)
    return None if target is None else target - used
