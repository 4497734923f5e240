"""Rule coverage: every shipped rule has a matching and a non-matching molecule,
and MCF / morph verdicts do not depend on atom order."""

import numpy as np

from molforge.molgraph import mol_from_smiles, write_canonical
from molforge.molgraph.brics import find_cuts, load_rules
from molforge.scoring2d import load_drug_likeness, load_mcf, load_morph, mcf_screen, morph_variants
from molforge.molgraph.descriptors import descriptors
from molforge.molgraph.smarts import has_match

from conftest import data_file, permuted


def examples() -> dict[str, dict[str, tuple[str, str]]]:
    out: dict[str, dict[str, tuple[str, str]]] = {}
    with open(data_file("rule_examples.tsv"), encoding="utf-8") as fh:
        for line in fh:
            if not line.strip() or line.startswith("#"):
                continue
            f, rid, pos, neg = line.rstrip("\n").split("\t")
            out.setdefault(f, {})[rid] = (pos, neg)
    return out


def fires(kind: str, rule, smiles: str) -> bool:
    mol = mol_from_smiles(smiles)
    if kind == "mcf_rules.txt":
        return has_match(mol, rule.query)
    if kind == "drug_likeness.txt":
        return rule.satisfied(descriptors(mol))
    if kind == "morph_rules.txt":
        return any(r == rule.id for _, r in morph_variants(mol, (rule,), rule.mode).variants)
    if kind == "brics_rules.txt":
        return any(c[3] == rule.id for c in find_cuts(mol, (rule,)))
    raise KeyError(kind)


def shipped() -> dict[str, tuple]:
    return {
        "mcf_rules.txt": load_mcf().rules,
        "drug_likeness.txt": load_drug_likeness(),
        "morph_rules.txt": load_morph(),
        "brics_rules.txt": load_rules(),
    }


def coverage_failures() -> list[str]:
    ex = examples()
    bad = []
    for kind, rules in shipped().items():
        for rule in rules:
            pair = ex.get(kind, {}).get(rule.id)
            if pair is None:
                bad.append(f"{kind}:{rule.id} has no test molecules")
                continue
            pos, neg = pair
            if not fires(kind, rule, pos):
                bad.append(f"{kind}:{rule.id} positive {pos} does not fire")
            if fires(kind, rule, neg):
                bad.append(f"{kind}:{rule.id} negative {neg} fires")
    return bad


def reorder_failures(n_perm: int = 10, seed: int = 0) -> list[str]:
    """mcf_screen and morph outputs under random atom reorderings of every example."""
    rng = np.random.default_rng(seed)
    ex = examples()
    smiles = sorted({s for rules in ex.values() for pair in rules.values() for s in pair})
    bad = []
    for s in smiles:
        m = mol_from_smiles(s)
        v0 = mcf_screen(m)
        morph0 = {mode: sorted(write_canonical(v) for v, _ in morph_variants(m, mode=mode).variants)
                  for mode in ("bioisostere", "metabolic")}
        for _ in range(n_perm):
            p = permuted(s, rng)
            v = mcf_screen(p)
            if (v.passed, sorted(v.hard_hits), sorted(v.soft_hits)) != (
                    v0.passed, sorted(v0.hard_hits), sorted(v0.soft_hits)):
                bad.append(f"mcf verdict changed under reordering: {s}")
                break
            for mode, ref in morph0.items():
                got = sorted(write_canonical(x) for x, _ in morph_variants(p, mode=mode).variants)
                if got != ref:
                    bad.append(f"morph {mode} output changed under reordering: {s}")
            if bad and bad[-1].endswith(s):
                break
    return bad
