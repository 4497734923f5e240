"""Line-oriented .smi and .sdf input, .smi output."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Iterator

from .canon import write_canonical
from .core import MolError, Molecule
from .molfile import iter_sdf, parse_molfile
from .perception import sanitize
from .smiles import parse_smiles


@dataclass
class Record:
    """One input record; ``mol`` is None and ``error`` set when it failed."""

    index: int
    name: str
    source: str
    mol: Molecule | None = None
    error: str | None = None

    @property
    def smiles(self) -> str | None:
        return write_canonical(self.mol) if self.mol is not None else None


def iter_smi_lines(path: str) -> Iterator[tuple[str, str]]:
    """Yield (smiles, name); blank lines and '#' comments are skipped."""
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            if "\t" in line:
                smi, name = line.split("\t", 1)
            else:
                parts = line.split(None, 1)
                smi, name = parts[0], (parts[1] if len(parts) > 1 else "")
            yield smi.strip(), name.strip()


def read_smi(path: str) -> list[str]:
    return [s for s, _ in iter_smi_lines(path)]


def _load(text: str, parser) -> tuple[Molecule | None, str | None]:
    try:
        return sanitize(parser(text)), None
    except MolError as e:
        return None, str(e)


def read_records(path: str) -> Iterator[Record]:
    """Sanitized records from a .smi or .sdf/.mol file, failures included."""
    ext = os.path.splitext(path)[1].lower()
    if ext in (".sdf", ".mol", ".sd"):
        with open(path, encoding="utf-8") as fh:
            for i, (title, block) in enumerate(iter_sdf(fh)):
                mol, err = _load(block, parse_molfile)
                yield Record(i, title.strip(), block, mol, err)
    else:
        for i, (smi, name) in enumerate(iter_smi_lines(path)):
            mol, err = _load(smi, parse_smiles)
            yield Record(i, name, smi, mol, err)


def read_molecules(path: str) -> list[Molecule]:
    """Valid molecules only, in file order."""
    return [r.mol for r in read_records(path) if r.mol is not None]


def write_smi(path: str, rows: Iterable[tuple[str, str]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for smi, name in rows:
            fh.write(f"{smi}\t{name}\n" if name else f"{smi}\n")


def mol_from_smiles(smiles: str) -> Molecule:
    """parse + sanitize convenience."""
    return sanitize(parse_smiles(smiles))


def canonical(smiles: str) -> str:
    return write_canonical(mol_from_smiles(smiles))


def try_canonical(smiles: str) -> str | None:
    try:
        return canonical(smiles)
    except MolError:
        return None
