"""Rule-based structure morphing (bioisosteres, metabolic-stability edits)."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..molgraph.brics import join_attachments
from ..molgraph.canon import write_canonical
from ..molgraph.core import Atom, MolError, Molecule
from ..molgraph.edit import MolBuilder
from ..molgraph.perception import sanitize
from ..molgraph.smarts import substructure_match
from ..molgraph.smiles import parse_smiles
from .rules import MorphRule, load_morph

MODES = ("bioisostere", "metabolic")


@dataclass
class MorphOutcome:
    variants: list[tuple[Molecule, str]] = field(default_factory=list)  # (molecule, rule id)
    dropped: int = 0  # replacements that failed to sanitize


def apply_rule(mol: Molecule, rule: MorphRule, match: tuple[int, ...]) -> Molecule | None:
    """One substitution; None when the match is not a clean replacement site."""
    anchor = match[0]
    removed = set(match[1 : 1 + rule.n_removed])
    allowed = removed | {anchor}
    for r in removed:
        if any(j not in allowed for j, _ in mol.adjacency[r]):
            return None
    b = MolBuilder.from_molecule(mol)
    frag = MolBuilder.from_molecule(parse_smiles(rule.replacement))
    off = b.merge(frag)
    dummy = next(off + i for i, a in enumerate(frag.atoms) if a.is_dummy)
    # stand-in dummy on the anchor, then the generic attachment join
    stub = b.add_atom(Atom("*", explicit_h=0))
    b.add_bond(anchor, stub, b.order(dummy, b.neighbors(dummy)[0]))
    new_of = b.remove_atoms(sorted(removed), cap=True)
    join_attachments(b, new_of[stub], new_of[dummy])
    return sanitize(b.to_molecule())


def morph_variants(mol: Molecule, rules=None, mode: str = "bioisostere") -> MorphOutcome:
    if mode not in MODES:
        raise ValueError(f"unknown morph mode {mode!r}; expected one of {MODES}")
    if rules is None:
        rules = load_morph()
    original = write_canonical(mol)
    seen = {original}
    out = MorphOutcome()
    for rule in rules:
        if rule.mode != mode:
            continue
        for match in substructure_match(mol, rule.query, unique=False):
            try:
                variant = apply_rule(mol, rule, match)
            except MolError:
                out.dropped += 1
                continue
            if variant is None:
                continue
            smi = write_canonical(variant)
            if smi not in seen:
                seen.add(smi)
                out.variants.append((variant, rule.id))
    out.variants.sort(key=lambda t: write_canonical(t[0]))
    return out


def morph(mol: Molecule, rules=None, mode: str = "bioisostere") -> list[Molecule]:
    """Distinct sanitized variants (original excluded), sorted by canonical SMILES."""
    return [m for m, _ in morph_variants(mol, rules, mode).variants]
