"""Molecular kernel: parsing, perception, canonical SMILES, fingerprints,
descriptors, substructure search and fragmentation."""

from .core import (
    Atom,
    Bond,
    BondOrder,
    KekulizeError,
    Molecule,
    MolError,
    NotSanitizedError,
    SmilesError,
    ValenceError,
)
from .smiles import parse_smiles, tokenize
from .perception import sanitize
from .canon import canonical_ranks, write_canonical
from .molfile import MolfileError, iter_sdf, parse_molfile
from .fingerprint import (
    Fingerprint,
    FingerprintMatrix,
    cosine,
    morgan_fingerprint,
    similarity,
    tanimoto,
)
from .descriptors import DescriptorVector, descriptors
from .smarts import Query, SmartsError, brute_force_match, has_match, parse_smarts, substructure_match
from .scaffold import murcko_scaffold
from .brics import Fragment, NoCompatiblePairing, brics_fragment, brics_recombine
from .io import canonical, mol_from_smiles, read_records, read_smi, try_canonical, write_smi

__all__ = [
    "Atom",
    "Bond",
    "BondOrder",
    "KekulizeError",
    "Molecule",
    "MolError",
    "NotSanitizedError",
    "SmilesError",
    "ValenceError",
    "parse_smiles",
    "tokenize",
    "sanitize",
    "canonical_ranks",
    "write_canonical",
    "MolfileError",
    "iter_sdf",
    "parse_molfile",
    "Fingerprint",
    "FingerprintMatrix",
    "cosine",
    "morgan_fingerprint",
    "similarity",
    "tanimoto",
    "DescriptorVector",
    "descriptors",
    "Query",
    "SmartsError",
    "brute_force_match",
    "has_match",
    "parse_smarts",
    "substructure_match",
    "murcko_scaffold",
    "Fragment",
    "NoCompatiblePairing",
    "brics_fragment",
    "brics_recombine",
    "canonical",
    "mol_from_smiles",
    "read_records",
    "read_smi",
    "try_canonical",
    "write_smi",
]
