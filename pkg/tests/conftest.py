import os

import numpy as np
import pytest

from molforge.molgraph import mol_from_smiles, parse_smiles, sanitize, write_canonical
from molforge.molgraph.canon import to_smiles
from molforge.molgraph.elements import data_path
from molforge.molgraph.io import read_smi

DATA = os.path.join(os.path.dirname(__file__), "data")


def data_file(name: str) -> str:
    return os.path.join(DATA, name)


def permuted(smiles: str, rng) -> object:
    """Sanitized molecule built from a random atom order of the parsed input."""
    m = parse_smiles(smiles)
    order = rng.permutation(len(m.atoms)).tolist()
    return sanitize(m.renumber(order))


def random_spelling(smiles: str, rng) -> str:
    """A SMILES string for the same molecule written in a random atom order."""
    m = mol_from_smiles(smiles)
    return to_smiles(m, rng.permutation(len(m.atoms)).tolist())


def canon(smiles: str) -> str:
    return write_canonical(mol_from_smiles(smiles))


@pytest.fixture(scope="session")
def corpus() -> list[str]:
    return read_smi(data_path("corpus.smi"))


@pytest.fixture(scope="session")
def seed_1k() -> list[str]:
    return read_smi(data_file("seed_1k.smi"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, shown in the terminal summary
ACCEPTANCE: dict[int, str] = {}


def record(criterion: int, ok: bool, detail: str) -> bool:
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[criterion] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
