"""Element table, atomic weights and the valence model."""

from __future__ import annotations

import functools
import os
from importlib import resources

# Periods 1-4 plus iodine; '*' is the attachment/dummy atom used by fragments.
SYMBOLS = (
    "H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar "
    "K Ca Sc Ti V Cr Mn Fe Co Ni Cu Zn Ga Ge As Se Br Kr"
).split()

ATOMIC_NUMBER = {sym: i + 1 for i, sym in enumerate(SYMBOLS)}
ATOMIC_NUMBER["I"] = 53
ATOMIC_NUMBER["*"] = 0

# IUPAC conventional standard atomic weights (g/mol).
ATOMIC_WEIGHT = {
    "*": 0.0, "H": 1.008, "He": 4.003, "Li": 6.94, "Be": 9.012, "B": 10.812,
    "C": 12.011, "N": 14.007, "O": 15.999, "F": 18.998, "Ne": 20.180,
    "Na": 22.990, "Mg": 24.305, "Al": 26.982, "Si": 28.086, "P": 30.974,
    "S": 32.067, "Cl": 35.453, "Ar": 39.948, "K": 39.098, "Ca": 40.078,
    "Sc": 44.956, "Ti": 47.867, "V": 50.942, "Cr": 51.996, "Mn": 54.938,
    "Fe": 55.845, "Co": 58.933, "Ni": 58.693, "Cu": 63.546, "Zn": 65.38,
    "Ga": 69.723, "Ge": 72.630, "As": 74.922, "Se": 78.971, "Br": 79.904,
    "Kr": 83.798, "I": 126.904,
}

ORGANIC_SUBSET = frozenset({"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"})
AROMATIC_ORGANIC = frozenset({"B", "C", "N", "O", "P", "S"})
AROMATIC_BRACKET = frozenset({"B", "C", "N", "O", "P", "S", "Se", "As"})


def data_path(name: str) -> str:
    """Locate a shipped data file, honouring ``MOLFORGE_DATA_DIR``."""
    override = os.environ.get("MOLFORGE_DATA_DIR")
    if override:
        candidate = os.path.join(override, name)
        if os.path.exists(candidate):
            return candidate
    return str(resources.files("molforge") / "data" / name)


def read_table(name: str):
    """Yield (line number, line) for non-blank, non-comment lines of a data file.

    Only whole lines starting with '#' are comments, since '#' is also a
    bond symbol and an atomic-number prefix in patterns.
    """
    with open(data_path(name), encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            if line.strip() and not line.lstrip().startswith("#"):
                yield lineno, line.strip()


@functools.lru_cache(maxsize=None)
def valence_table() -> dict[tuple[str, int], tuple[int, ...]]:
    table = {}
    for lineno, line in read_table("valence.txt"):
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"valence.txt:{lineno}: expected 3 fields, got {len(parts)}")
        sym, charge, vals = parts
        table[(sym, int(charge))] = tuple(sorted(int(v) for v in vals.split(",")))
    return table


def allowed_valences(symbol: str, charge: int) -> tuple[int, ...] | None:
    return valence_table().get((symbol, charge))


def default_valence(symbol: str, charge: int, used: int) -> int | None:
    """Smallest allowed valence >= ``used``; None if the atom is overloaded."""
    vals = allowed_valences(symbol, charge)
    if vals is None:
        return used
    for v in vals:
        if v >= used:
            return v
    return None
