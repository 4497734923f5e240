"""Rebuild data/fragment_stats.txt from the shipped corpus.

    python tools/build_fragment_stats.py
"""

from pathlib import Path

from molforge.molgraph.elements import data_path
from molforge.molgraph.io import read_molecules
from molforge.scoring2d.complexity import FragmentStats

if __name__ == "__main__":
    out = Path(__file__).resolve().parents[1] / "src" / "molforge" / "data" / "fragment_stats.txt"
    FragmentStats.from_molecules(read_molecules(data_path("corpus.smi"))).save(str(out))
    print(out)
