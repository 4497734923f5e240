"""MDL V2000 molfile / SD file reader (coordinates are discarded)."""

from __future__ import annotations

from typing import Iterator, TextIO

from .core import Atom, Bond, BondOrder, MolError, Molecule
from .elements import ATOMIC_NUMBER


class MolfileError(MolError):
    pass


_CHARGE_CODES = {0: 0, 1: 3, 2: 2, 3: 1, 4: 0, 5: -1, 6: -2, 7: -3}
_BOND_TYPES = {1: BondOrder.SINGLE, 2: BondOrder.DOUBLE, 3: BondOrder.TRIPLE, 4: BondOrder.AROMATIC}


def _int(field: str, what: str) -> int:
    try:
        return int(field)
    except ValueError:
        raise MolfileError(f"malformed {what}: {field!r}") from None


def parse_molfile(text: str) -> Molecule:
    """Parse one V2000 block into an unsanitized Molecule.

    Explicit hydrogen atoms are folded into their neighbour's H count.
    """
    lines = text.splitlines()
    if len(lines) < 4:
        raise MolfileError("malformed counts line: block has fewer than 4 lines")
    counts = lines[3]
    if "V3000" in counts:
        raise MolfileError("V3000 molfiles are not supported")
    try:
        n_atoms, n_bonds = int(counts[0:3]), int(counts[3:6])
    except ValueError:
        raise MolfileError(f"malformed counts line: {counts!r}") from None
    if len(lines) < 4 + n_atoms + n_bonds:
        raise MolfileError("atom/bond block truncated")
    elems, charges, isotopes = [], [], []
    for t in range(n_atoms):
        line = lines[4 + t]
        if len(line) < 34:
            raise MolfileError(f"atom line {t + 1} truncated")
        sym = line[31:34].strip()
        if sym not in ATOMIC_NUMBER or sym == "*":
            sym = {"R": "*", "A": "*", "Q": "*"}.get(sym, sym)
        if sym not in ATOMIC_NUMBER:
            raise MolfileError(f"unknown element {sym!r} on atom line {t + 1}")
        code = _int(line[36:39], "charge field") if len(line) >= 39 and line[36:39].strip() else 0
        elems.append(sym)
        charges.append(_CHARGE_CODES.get(code, 0))
        isotopes.append(None)
    raw_bonds = []
    for t in range(n_bonds):
        line = lines[4 + n_atoms + t]
        if len(line) < 9:
            raise MolfileError(f"bond line {t + 1} truncated")
        a = _int(line[0:3], "bond line") - 1
        b = _int(line[3:6], "bond line") - 1
        typ = _int(line[6:9], "bond line")
        if typ not in _BOND_TYPES:
            raise MolfileError(f"unsupported bond type {typ} on bond line {t + 1}")
        if not (0 <= a < n_atoms and 0 <= b < n_atoms):
            raise MolfileError(f"bond line {t + 1} references a missing atom")
        raw_bonds.append((a, b, _BOND_TYPES[typ]))
    # property block: M  CHG / M  ISO replace the atom-line values
    saw_chg = False
    for line in lines[4 + n_atoms + n_bonds :]:
        if line.startswith("M  END"):
            break
        if line.startswith(("M  CHG", "M  ISO")):
            fields = line[6:].split()
            n = _int(fields[0], "property line")
            if len(fields) < 1 + 2 * n:
                raise MolfileError("property line truncated")
            if line.startswith("M  CHG") and not saw_chg:
                charges = [0] * n_atoms  # CHG supersedes all atom-line charges
                saw_chg = True
            for p in range(n):
                idx = _int(fields[1 + 2 * p], "property line") - 1
                val = _int(fields[2 + 2 * p], "property line")
                if not 0 <= idx < n_atoms:
                    raise MolfileError("property line references a missing atom")
                if line.startswith("M  CHG"):
                    charges[idx] = val
                else:
                    isotopes[idx] = val
    aromatic = [False] * n_atoms
    for a, b, o in raw_bonds:
        if o is BondOrder.AROMATIC:
            aromatic[a] = aromatic[b] = True
    # fold explicit hydrogens
    is_h = [e == "H" and isotopes[i] is None and charges[i] == 0 for i, e in enumerate(elems)]
    h_on = [0] * n_atoms
    for a, b, _ in raw_bonds:
        if is_h[a] and not is_h[b]:
            h_on[b] += 1
        elif is_h[b] and not is_h[a]:
            h_on[a] += 1
    keep = [i for i in range(n_atoms) if not (is_h[i] and _h_attached(i, raw_bonds, is_h))]
    new = {old: k for k, old in enumerate(keep)}
    atoms = []
    for old in keep:
        atoms.append(
            Atom(
                elems[old],
                charges[old],
                isotopes[old],
                aromatic[old],
                explicit_h=h_on[old] if h_on[old] else None,
            )
        )
    bonds = [Bond(new[a], new[b], o) for a, b, o in raw_bonds if a in new and b in new]
    return Molecule(tuple(atoms), tuple(bonds))


def _h_attached(i, raw_bonds, is_h) -> bool:
    """True when hydrogen atom i is bonded to exactly one heavy atom."""
    nb = [b if a == i else a for a, b, _ in raw_bonds if i in (a, b)]
    return len(nb) == 1 and not is_h[nb[0]]


def iter_sdf(stream: TextIO) -> Iterator[tuple[str, str]]:
    """Yield (title, molfile block) per record, split on '$$$$'."""
    buf: list[str] = []
    for line in stream:
        if line.rstrip("\r\n") == "$$$$":
            if any(x.strip() for x in buf):
                yield buf[0].rstrip("\r\n") if buf else "", "".join(buf)
            buf = []
        else:
            buf.append(line)
    if any(x.strip() for x in buf):
        yield buf[0].rstrip("\r\n"), "".join(buf)
