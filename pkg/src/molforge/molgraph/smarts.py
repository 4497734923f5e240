"""A SMARTS subset: parser, backtracking matcher and a brute-force oracle.

Supported atom primitives: element symbols (aliphatic upper case,
aromatic lower case), ``#n``, ``*``, ``A``, ``a``, ``Dn``, ``Hn``,
``Xn``, ``R`` / ``Rn`` / ``R0``, charges ``+``, ``-``, ``+n``, ``-n``,
``++``, ``--``.  Operators ``!``, ``&`` (and implicit conjunction), ``,``
and ``;``.  Bond primitives ``- = # : ~ @`` with the same operators.
Recursive SMARTS, chirality, ring-size ``r`` and component grouping are
rejected with :class:`SmartsError`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

from .core import BondOrder, Molecule, MolError
from .elements import ATOMIC_NUMBER, AROMATIC_BRACKET


class SmartsError(MolError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


AtomPred = Callable[["_AtomProps", int], bool]
BondPred = Callable[[Molecule, int], bool]


class _AtomProps:
    """Per-molecule atom properties the predicates read."""

    __slots__ = ("z", "aromatic", "charge", "degree", "total_h", "conn", "rings")

    def __init__(self, mol: Molecule):
        n = len(mol.atoms)
        h_nbrs = [0] * n
        for b in mol.bonds:
            if mol.atoms[b.begin].element == "H":
                h_nbrs[b.end] += 1
            if mol.atoms[b.end].element == "H":
                h_nbrs[b.begin] += 1
        ring_count = [0] * n
        for r in mol.rings:
            for i in r:
                ring_count[i] += 1
        self.z = [a.atomic_number for a in mol.atoms]
        self.aromatic = [a.aromatic for a in mol.atoms]
        self.charge = [a.formal_charge for a in mol.atoms]
        self.degree = [len(row) for row in mol.adjacency]
        self.total_h = [a.implicit_h + h_nbrs[i] for i, a in enumerate(mol.atoms)]
        self.conn = [self.degree[i] + mol.atoms[i].implicit_h for i in range(n)]
        self.rings = ring_count


def _props(mol: Molecule) -> _AtomProps:
    got = mol._cache.get("smarts_props")
    if got is None:
        got = _AtomProps(mol)
        mol._cache["smarts_props"] = got
    return got


# --- atom expression parsing -------------------------------------------------


def _element(sym: str, aromatic: bool | None) -> AtomPred:
    z = ATOMIC_NUMBER[sym]
    if aromatic is None:
        return lambda p, i: p.z[i] == z
    if aromatic:
        return lambda p, i: p.z[i] == z and p.aromatic[i]
    return lambda p, i: p.z[i] == z and not p.aromatic[i]


def _count_pred(attr: str, n: int) -> AtomPred:
    return lambda p, i: getattr(p, attr)[i] == n


_ORGANIC_ATOMS = {"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"}


class _AtomExprParser:
    """Recursive descent over the body of a bracket atom."""

    def __init__(self, text: str, base: int):
        self.s = text
        self.i = 0
        self.base = base

    def err(self, msg: str):
        raise SmartsError(msg, self.base + self.i)

    def parse(self) -> AtomPred:
        if not self.s:
            self.err("empty bracket atom")
        pred = self.low_and()
        if self.i != len(self.s):
            self.err(f"unexpected {self.s[self.i]!r} in atom expression")
        return pred

    def low_and(self) -> AtomPred:
        parts = [self.orexpr()]
        while self.peek() == ";":
            self.i += 1
            parts.append(self.orexpr())
        return parts[0] if len(parts) == 1 else (lambda p, i, ps=tuple(parts): all(f(p, i) for f in ps))

    def orexpr(self) -> AtomPred:
        parts = [self.high_and()]
        while self.peek() == ",":
            self.i += 1
            parts.append(self.high_and())
        return parts[0] if len(parts) == 1 else (lambda p, i, ps=tuple(parts): any(f(p, i) for f in ps))

    def high_and(self) -> AtomPred:
        parts = [self.unary()]
        while True:
            c = self.peek()
            if c == "&":
                self.i += 1
                parts.append(self.unary())
            elif c is not None and c not in ",;":
                parts.append(self.unary())
            else:
                break
        return parts[0] if len(parts) == 1 else (lambda p, i, ps=tuple(parts): all(f(p, i) for f in ps))

    def unary(self) -> AtomPred:
        if self.peek() == "!":
            self.i += 1
            inner = self.unary()
            return lambda p, i: not inner(p, i)
        return self.primitive()

    def peek(self):
        return self.s[self.i] if self.i < len(self.s) else None

    def number(self, default: int | None = None) -> int | None:
        j = self.i
        while j < len(self.s) and self.s[j].isdigit():
            j += 1
        if j == self.i:
            return default
        n = int(self.s[self.i : j])
        self.i = j
        return n

    def primitive(self) -> AtomPred:
        s, i = self.s, self.i
        c = self.peek()
        if c is None:
            self.err("missing atom primitive")
        if c == "$":
            self.err("recursive SMARTS is not supported")
        if c == "@":
            self.err("chirality in SMARTS is not supported")
        if c == "*":
            self.i += 1
            return lambda p, i: True
        if c == "#":
            self.i += 1
            z = self.number()
            if z is None:
                self.err("'#' needs an atomic number")
            return lambda p, i: p.z[i] == z
        if c in "+-":
            self.i += 1
            if self.peek() == c:
                self.i += 1
                mag = 2
            else:
                mag = self.number(1)
            q = mag if c == "+" else -mag
            return lambda p, i: p.charge[i] == q
        # two-letter elements before one-letter primitives
        two = s[i : i + 2]
        if len(two) == 2 and two[0].isupper() and two in ATOMIC_NUMBER and two not in ("Hf",):
            self.i += 2
            return _element(two, False if two in AROMATIC_BRACKET else None)
        if len(two) == 2 and two[0].islower() and two.capitalize() in AROMATIC_BRACKET and two in ("se", "as"):
            self.i += 2
            return _element(two.capitalize(), True)
        if c == "D":
            self.i += 1
            n = self.number(1)
            return _count_pred("degree", n)
        if c == "X":
            self.i += 1
            n = self.number(1)
            return _count_pred("conn", n)
        if c == "H":
            self.i += 1
            n = self.number(1)
            return _count_pred("total_h", n)
        if c == "R":
            self.i += 1
            n = self.number()
            if n is None:
                return lambda p, i: p.rings[i] > 0
            return _count_pred("rings", n)
        if c == "A":
            self.i += 1
            return lambda p, i: not p.aromatic[i] and p.z[i] != 0
        if c == "a":
            self.i += 1
            return lambda p, i: p.aromatic[i]
        if c.isupper() and c in ATOMIC_NUMBER:
            self.i += 1
            return _element(c, False if c in AROMATIC_BRACKET else None)
        if c.islower() and c.upper() in AROMATIC_BRACKET:
            self.i += 1
            return _element(c.upper(), True)
        self.err(f"unsupported atom primitive {c!r}")


# --- bond expression parsing --------------------------------------------------


def _bond_primitive(c: str) -> BondPred:
    if c == "-":
        return lambda m, k: m.bonds[k].order is BondOrder.SINGLE
    if c == "=":
        return lambda m, k: m.bonds[k].order is BondOrder.DOUBLE
    if c == "#":
        return lambda m, k: m.bonds[k].order is BondOrder.TRIPLE
    if c == ":":
        return lambda m, k: m.bonds[k].order is BondOrder.AROMATIC
    if c == "~":
        return lambda m, k: True
    if c == "@":
        return lambda m, k: k in m.ring_bonds
    raise AssertionError(c)


def _default_bond(m: Molecule, k: int) -> bool:
    return m.bonds[k].order in (BondOrder.SINGLE, BondOrder.AROMATIC)


_BOND_CHARS = set("-=#:~@!&,;/\\")


def _parse_bond_expr(text: str, base: int) -> BondPred:
    """Parse a run of bond characters, e.g. ``-!@`` or ``=,:``."""
    if "/" in text or "\\" in text:
        raise SmartsError("directional bonds are not supported in patterns", base)
    pos = [0]

    def peek():
        return text[pos[0]] if pos[0] < len(text) else None

    def unary():
        if peek() == "!":
            pos[0] += 1
            inner = unary()
            return lambda m, k: not inner(m, k)
        c = peek()
        if c is None or c not in "-=#:~@":
            raise SmartsError("malformed bond expression", base + pos[0])
        pos[0] += 1
        return _bond_primitive(c)

    def high():
        parts = [unary()]
        while peek() is not None and peek() not in ",;":
            if peek() == "&":
                pos[0] += 1
            parts.append(unary())
        return parts[0] if len(parts) == 1 else (lambda m, k, ps=tuple(parts): all(f(m, k) for f in ps))

    def orx():
        parts = [high()]
        while peek() == ",":
            pos[0] += 1
            parts.append(high())
        return parts[0] if len(parts) == 1 else (lambda m, k, ps=tuple(parts): any(f(m, k) for f in ps))

    parts = [orx()]
    while peek() == ";":
        pos[0] += 1
        parts.append(orx())
    if pos[0] != len(text):
        raise SmartsError("malformed bond expression", base + pos[0])
    return parts[0] if len(parts) == 1 else (lambda m, k, ps=tuple(parts): all(f(m, k) for f in ps))


# --- pattern ------------------------------------------------------------------


@dataclass(frozen=True)
class Query:
    """Compiled pattern: atom predicates plus (i, j, bond predicate) edges."""

    atoms: tuple
    bonds: tuple
    text: str = ""

    @property
    def num_atoms(self) -> int:
        return len(self.atoms)

    @classmethod
    def from_molecule(cls, mol: Molecule, match_charge: bool = True, skip_dummies: bool = True) -> "Query":
        """Exact-topology query from a molecule: element, aromaticity, charge, bond order.

        Hydrogen counts are not constrained, so the query matches the
        molecule embedded in any larger one.  Dummy atoms are dropped.
        """
        keep = [i for i, a in enumerate(mol.atoms) if not (skip_dummies and a.is_dummy)]
        new = {old: n for n, old in enumerate(keep)}
        atoms = []
        for old in keep:
            a = mol.atoms[old]
            if a.is_dummy:
                atoms.append(lambda p, i: True)
                continue
            z, ar, q = a.atomic_number, a.aromatic, a.formal_charge
            if match_charge:
                atoms.append(lambda p, i, z=z, ar=ar, q=q: p.z[i] == z and p.aromatic[i] == ar and p.charge[i] == q)
            else:
                atoms.append(lambda p, i, z=z, ar=ar: p.z[i] == z and p.aromatic[i] == ar)
        bonds = []
        for b in mol.bonds:
            if b.begin in new and b.end in new:
                o = b.order
                bonds.append((new[b.begin], new[b.end], lambda m, k, o=o: m.bonds[k].order is o))
        return cls(tuple(atoms), tuple(bonds), "")


def parse_smarts(text: str) -> Query:
    if not text or not text.strip():
        raise SmartsError("empty pattern", 0)
    atoms: list[AtomPred] = []
    bonds: list[tuple[int, int, BondPred]] = []
    branch: list[int] = []
    rings: dict[int, tuple[int, BondPred | None, int]] = {}
    prev: int | None = None
    bond_text = ""
    bond_off = 0
    i, n = 0, len(text)

    def take_bond() -> BondPred:
        nonlocal bond_text
        pred = _parse_bond_expr(bond_text, bond_off) if bond_text else _default_bond
        bond_text = ""
        return pred

    def add_atom(pred: AtomPred) -> None:
        nonlocal prev
        idx = len(atoms)
        atoms.append(pred)
        if prev is not None:
            bonds.append((prev, idx, take_bond()))
        elif bond_text:
            raise SmartsError("bond without preceding atom", bond_off)
        prev = idx

    while i < n:
        c = text[i]
        if c == "[":
            end = text.find("]", i)
            if end < 0:
                raise SmartsError("unterminated bracket atom", i)
            add_atom(_AtomExprParser(text[i + 1 : end], i + 1).parse())
            i = end + 1
        elif text.startswith(("Cl", "Br"), i):
            add_atom(_element(text[i : i + 2], None))
            i += 2
        elif c in "BCNOPSFI":
            add_atom(_element(c, False if c in AROMATIC_BRACKET else None))
            i += 1
        elif c in "cnops":
            add_atom(_element(c.upper(), True))
            i += 1
        elif c == "*":
            add_atom(lambda p, i: True)
            i += 1
        elif c == "A":
            add_atom(lambda p, i: not p.aromatic[i] and p.z[i] != 0)
            i += 1
        elif c == "a":
            add_atom(lambda p, i: p.aromatic[i])
            i += 1
        elif c in _BOND_CHARS:
            if prev is None:
                raise SmartsError("bond without preceding atom", i)
            if not bond_text:
                bond_off = i
            bond_text += c
            i += 1
        elif c == "(":
            if prev is None or bond_text:
                raise SmartsError("misplaced branch", i)
            branch.append(prev)
            i += 1
        elif c == ")":
            if not branch:
                raise SmartsError("unbalanced parenthesis", i)
            if bond_text:
                raise SmartsError("dangling bond", bond_off)
            prev = branch.pop()
            i += 1
        elif c.isdigit() or c == "%":
            if c == "%":
                digits = text[i + 1 : i + 3]
                if len(digits) != 2 or not digits.isdigit():
                    raise SmartsError("malformed %nn ring closure", i)
                num, width = int(digits), 3
            else:
                num, width = int(c), 1
            if prev is None:
                raise SmartsError("ring closure without preceding atom", i)
            pred = _parse_bond_expr(bond_text, bond_off) if bond_text else None
            bond_text = ""
            if num in rings:
                other, opred, _ = rings.pop(num)
                if other == prev:
                    raise SmartsError("ring closure to the same atom", i)
                bonds.append((other, prev, pred or opred or _default_bond))
            else:
                rings[num] = (prev, pred, i)
            i += width
        elif c == ".":
            raise SmartsError("disconnected patterns are not supported", i)
        elif c == "$":
            raise SmartsError("recursive SMARTS is not supported", i)
        else:
            raise SmartsError(f"unsupported pattern token {c!r}", i)
    if bond_text:
        raise SmartsError("dangling bond at end of pattern", bond_off)
    if branch:
        raise SmartsError("unbalanced parenthesis", n)
    if rings:
        num, (_, _, off) = next(iter(rings.items()))
        raise SmartsError(f"unclosed ring closure {num} (opened at {off})", n)
    return Query(tuple(atoms), tuple(bonds), text)


# --- matching -----------------------------------------------------------------


def _query_adjacency(q: Query):
    adj: list[list[tuple[int, BondPred]]] = [[] for _ in q.atoms]
    for a, b, pred in q.bonds:
        adj[a].append((b, pred))
        adj[b].append((a, pred))
    return adj


def _search_order(q: Query) -> tuple[list[int], list[int | None]]:
    """Query atoms in DFS order; parent[t] is an earlier mapped neighbour (or None)."""
    adj = _query_adjacency(q)
    seen = [False] * len(q.atoms)
    order: list[int] = []
    parent: list[int | None] = []
    for root in range(len(q.atoms)):
        if seen[root]:
            continue
        stack = [(root, None)]
        while stack:
            v, par = stack.pop()
            if seen[v]:
                continue
            seen[v] = True
            order.append(v)
            parent.append(par)
            for w, _ in reversed(adj[v]):
                if not seen[w]:
                    stack.append((w, v))
    return order, parent


def substructure_match(mol: Molecule, pattern: Query | str, unique: bool = True, max_matches: int | None = None) -> list[tuple[int, ...]]:
    """All embeddings of ``pattern`` in ``mol`` as tuples indexed by query atom.

    With ``unique`` (the default) embeddings covering the same atom set are
    reported once, keeping the lexicographically smallest mapping.
    """
    q = parse_smarts(pattern) if isinstance(pattern, str) else pattern
    nq = len(q.atoms)
    if nq == 0:
        return []
    props = _props(mol)
    madj = mol.adjacency
    qadj = _query_adjacency(q)
    order, parent = _search_order(q)
    qbond = {}
    for a, b, pred in q.bonds:
        qbond[(a, b)] = pred
        qbond[(b, a)] = pred
    mapping = [-1] * nq
    used = [False] * len(mol.atoms)
    results: list[tuple[int, ...]] = []

    def consistent(t: int, cand: int) -> bool:
        qa = order[t]
        if not q.atoms[qa](props, cand):
            return False
        for w, pred in qadj[qa]:
            mw = mapping[w]
            if mw < 0:
                continue
            k = -1
            for x, kk in madj[cand]:
                if x == mw:
                    k = kk
                    break
            if k < 0 or not pred(mol, k):
                return False
        return True

    def rec(t: int) -> bool:
        if t == nq:
            results.append(tuple(mapping))
            return max_matches is not None and not unique and len(results) >= max_matches
        qa = order[t]
        par = parent[t]
        cands = (x for x, _ in madj[mapping[par]]) if par is not None else range(len(mol.atoms))
        for cand in cands:
            if used[cand] or not consistent(t, cand):
                continue
            mapping[qa] = cand
            used[cand] = True
            stop = rec(t + 1)
            used[cand] = False
            mapping[qa] = -1
            if stop:
                return True
        return False

    rec(0)
    results.sort()
    if unique:
        seen = set()
        kept = []
        for m in results:
            key = frozenset(m)
            if key not in seen:
                seen.add(key)
                kept.append(m)
        results = kept
    if max_matches is not None:
        results = results[:max_matches]
    return results


def has_match(mol: Molecule, pattern: Query | str) -> bool:
    return bool(substructure_match(mol, pattern, unique=False, max_matches=1))


def brute_force_match(mol: Molecule, pattern: Query | str, unique: bool = True) -> list[tuple[int, ...]]:
    """Exhaustive oracle: test every injective assignment. Only for tiny inputs."""
    q = parse_smarts(pattern) if isinstance(pattern, str) else pattern
    props = _props(mol)
    out = []
    for perm in itertools.permutations(range(len(mol.atoms)), len(q.atoms)):
        if not all(q.atoms[t](props, perm[t]) for t in range(len(q.atoms))):
            continue
        ok = True
        for a, b, pred in q.bonds:
            bond = None
            for x, k in mol.adjacency[perm[a]]:
                if x == perm[b]:
                    bond = k
            if bond is None or not pred(mol, bond):
                ok = False
                break
        if ok:
            out.append(tuple(perm))
    out.sort()
    if unique:
        seen, kept = set(), []
        for m in out:
            if frozenset(m) not in seen:
                seen.add(frozenset(m))
                kept.append(m)
        out = kept
    return out
