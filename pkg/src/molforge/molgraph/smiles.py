"""SMILES reader and tokenizer."""

from __future__ import annotations

import re
from dataclasses import replace

from .core import (
    H_SLOT,
    Atom,
    Bond,
    BondOrder,
    Molecule,
    SmilesError,
    tag_for_order,
)
from .elements import AROMATIC_BRACKET, AROMATIC_ORGANIC, ATOMIC_NUMBER

_BOND_SYMBOLS = {
    "-": BondOrder.SINGLE,
    "=": BondOrder.DOUBLE,
    "#": BondOrder.TRIPLE,
    ":": BondOrder.AROMATIC,
    "/": BondOrder.SINGLE,  # directional bonds are read as plain single bonds
    "\\": BondOrder.SINGLE,
}

TOKEN_RE = re.compile(
    r"(\[[^\]]*\]|Br|Cl|%\d\d|[BCNOPSFI]|[bcnops]|\*|[()=#\-:/\\.+]|\d|@|.)"
)


def tokenize(smiles: str) -> list[str]:
    """Split a SMILES string into atom/bond/ring tokens (brackets kept whole)."""
    return TOKEN_RE.findall(smiles)


class _Pending:
    __slots__ = ("atom", "sym", "slot", "offset")

    def __init__(self, atom, sym, slot, offset):
        self.atom = atom
        self.sym = sym
        self.slot = slot
        self.offset = offset


def _read_bracket(text: str, start: int):
    """Parse ``[...]`` starting at ``start``; return (Atom, chirality, end)."""
    end = text.find("]", start)
    if end < 0:
        raise SmilesError("unterminated bracket atom", start)
    body = text[start + 1 : end]
    i = 0
    m = re.match(r"\d+", body)
    isotope = None
    if m:
        isotope = int(m.group())
        i = m.end()
    symbol = None
    aromatic = False
    for cand in (body[i : i + 2], body[i : i + 1]):
        if not cand:
            continue
        if cand == "*" or (cand in ATOMIC_NUMBER and cand[0].isupper()):
            symbol = cand
            break
        if cand[0].islower() and cand.capitalize() in AROMATIC_BRACKET:
            symbol, aromatic = cand.capitalize(), True
            break
    if symbol is None:
        raise SmilesError(f"unknown element symbol in [{body}]", start + 1 + i)
    i += len(symbol)
    chirality = None
    if body.startswith("@@", i):
        chirality, i = "CW", i + 2
    elif body.startswith("@", i):
        chirality, i = "CCW", i + 1
        m = re.match(r"TH([12])", body[i:])
        if m:
            chirality = "CCW" if m.group(1) == "1" else "CW"
            i += m.end()
        elif body[i : i + 1].isalpha() and body[i] != "H":
            raise SmilesError("unsupported chirality class", start + 1 + i)
    hcount = 0
    if body.startswith("H", i):
        i += 1
        m = re.match(r"\d+", body[i:])
        if m:
            hcount = int(m.group())
            i += m.end()
        else:
            hcount = 1
    charge = 0
    m = re.match(r"(\+\+|--|[+-]\d*)", body[i:])
    if m:
        tok = m.group()
        if tok in ("++", "--"):
            charge = 2 if tok == "++" else -2
        else:
            mag = int(tok[1:]) if len(tok) > 1 else 1
            charge = mag if tok[0] == "+" else -mag
        i += m.end()
    m = re.match(r":\d+", body[i:])
    if m:
        i += m.end()
    if i != len(body):
        raise SmilesError(f"unexpected characters in bracket atom [{body}]", start + 1 + i)
    atom = Atom(symbol, charge, isotope, aromatic, explicit_h=hcount)
    return atom, chirality, end + 1


def parse_smiles(text: str) -> Molecule:
    """Read a SMILES string into an unsanitized :class:`Molecule`.

    Atom order follows token order.  Errors are raised as
    :class:`SmilesError` carrying the byte offset of the problem.
    """
    if not text or not text.strip():
        raise SmilesError("empty SMILES", 0)
    text = text.strip()
    atoms: list[Atom] = []
    chir: list[str | None] = []
    written: list[list[int]] = []  # neighbour order as written, for chirality
    bonds: list[Bond] = []
    bonded: set[tuple[int, int]] = set()
    rings: dict[int, _Pending] = {}
    branch: list[int] = []
    prev: int | None = None
    bond_sym: str | None = None
    bond_off = 0
    n = len(text)
    i = 0

    def add_bond(a: int, b: int, sym: str | None, off: int) -> None:
        key = (min(a, b), max(a, b))
        if a == b or key in bonded:
            raise SmilesError("duplicate or self bond", off)
        if sym is None:
            order = (
                BondOrder.AROMATIC
                if atoms[a].aromatic and atoms[b].aromatic
                else BondOrder.SINGLE
            )
        else:
            order = _BOND_SYMBOLS[sym]
        bonded.add(key)
        bonds.append(Bond(a, b, order))

    def add_atom(atom: Atom, tag: str | None, off: int) -> None:
        nonlocal prev, bond_sym
        idx = len(atoms)
        atoms.append(atom)
        chir.append(tag)
        written.append([])
        if prev is not None:
            add_bond(prev, idx, bond_sym, bond_off)
            written[prev].append(idx)
            written[idx].append(prev)
        elif bond_sym is not None:
            raise SmilesError("bond without preceding atom", bond_off)
        if atom.explicit_h:
            written[idx].append(H_SLOT)
        bond_sym = None
        prev = idx

    while i < n:
        c = text[i]
        if c == "[":
            atom, tag, j = _read_bracket(text, i)
            add_atom(atom, tag, i)
            i = j
        elif text.startswith("Cl", i) or text.startswith("Br", i):
            add_atom(Atom(text[i : i + 2]), None, i)
            i += 2
        elif c in "BCNOPSFI":
            add_atom(Atom(c), None, i)
            i += 1
        elif c in "bcnops":
            add_atom(Atom(c.upper(), aromatic=True), None, i)
            i += 1
        elif c == "*":
            add_atom(Atom("*"), None, i)
            i += 1
        elif c in _BOND_SYMBOLS:
            if bond_sym is not None:
                raise SmilesError("two consecutive bond symbols", i)
            if prev is None:
                raise SmilesError("bond without preceding atom", i)
            bond_sym, bond_off = c, i
            i += 1
        elif c == "(":
            if prev is None:
                raise SmilesError("branch without preceding atom", i)
            if bond_sym is not None:
                raise SmilesError("bond symbol before branch", bond_off)
            branch.append(prev)
            i += 1
        elif c == ")":
            if not branch:
                raise SmilesError("unbalanced parenthesis", i)
            if bond_sym is not None:
                raise SmilesError("dangling bond at end of branch", bond_off)
            prev = branch.pop()
            i += 1
        elif c == ".":
            if bond_sym is not None:
                raise SmilesError("dangling bond before '.'", bond_off)
            if branch:
                raise SmilesError("unbalanced parenthesis", i)
            prev = None
            i += 1
        elif c.isdigit() or c == "%":
            if c == "%":
                digits = text[i + 1 : i + 3]
                if len(digits) != 2 or not digits.isdigit():
                    raise SmilesError("malformed %nn ring closure", i)
                num, width = int(digits), 3
            else:
                num, width = int(c), 1
            if prev is None:
                raise SmilesError("ring closure without preceding atom", i)
            if num in rings:
                opened = rings.pop(num)
                if bond_sym is not None and opened.sym is not None:
                    if _BOND_SYMBOLS[bond_sym] != _BOND_SYMBOLS[opened.sym]:
                        raise SmilesError(f"bond-order conflict on ring closure {num}", i)
                sym = bond_sym if bond_sym is not None else opened.sym
                add_bond(opened.atom, prev, sym, i)
                written[opened.atom][opened.slot] = prev
                written[prev].append(opened.atom)
            else:
                written[prev].append(-2)  # placeholder until the ring closes
                rings[num] = _Pending(prev, bond_sym, len(written[prev]) - 1, i)
            bond_sym = None
            i += width
        elif c.isalpha():
            raise SmilesError(f"unknown element symbol {c!r}", i)
        else:
            raise SmilesError(f"unexpected character {c!r}", i)

    if bond_sym is not None:
        raise SmilesError("dangling bond at end of input", bond_off)
    if branch:
        raise SmilesError("unbalanced parenthesis", n)
    if rings:
        num, opened = next(iter(rings.items()))
        raise SmilesError(f"unclosed ring closure {num} (opened at {opened.offset})", n)

    # Express chirality against ascending neighbour indices (H first).
    final = []
    for idx, atom in enumerate(atoms):
        tag = chir[idx]
        if tag is not None:
            order = written[idx]
            if len(order) >= 3:
                tag = tag_for_order(tag, order, sorted(order))
            else:
                tag = None
        if tag is not None:
            atom = replace(atom, chirality=tag)
        final.append(atom)
    return Molecule(tuple(final), tuple(bonds))
