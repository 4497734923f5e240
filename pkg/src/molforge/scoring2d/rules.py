"""Loaders for the line-oriented rule files (MCF, drug-likeness, morph)."""

from __future__ import annotations

import functools
from dataclasses import dataclass

from ..molgraph.elements import read_table
from ..molgraph.smarts import Query, SmartsError, parse_smarts


class RuleFileError(ValueError):
    pass


@dataclass(frozen=True)
class MCFRule:
    id: str
    pattern: str
    severity: str  # "hard" | "soft"
    description: str
    query: Query


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[MCFRule, ...]
    source: str = ""

    def __len__(self) -> int:
        return len(self.rules)

    def ids(self) -> list[str]:
        return [r.id for r in self.rules]


def _split(name: str, lineno: int, line: str, n: int) -> list[str]:
    parts = [p.strip() for p in line.split("\t")]
    if len(parts) != n:
        raise RuleFileError(f"{name}:{lineno}: expected {n} tab-separated fields, got {len(parts)}")
    return parts


def _compile(name: str, lineno: int, pattern: str) -> Query:
    try:
        return parse_smarts(pattern)
    except SmartsError as e:
        raise RuleFileError(f"{name}:{lineno}: pattern {pattern!r} does not compile: {e}") from None


@functools.lru_cache(maxsize=None)
def load_mcf(name: str = "mcf_rules.txt") -> RuleSet:
    """Compile every rule up front so bad patterns fail at load time."""
    rules, seen = [], set()
    for lineno, line in read_table(name):
        rid, severity, pattern, desc = _split(name, lineno, line, 4)
        if severity not in ("hard", "soft"):
            raise RuleFileError(f"{name}:{lineno}: severity must be hard or soft")
        if rid in seen:
            raise RuleFileError(f"{name}:{lineno}: duplicate rule id {rid!r}")
        seen.add(rid)
        rules.append(MCFRule(rid, pattern, severity, desc, _compile(name, lineno, pattern)))
    return RuleSet(tuple(rules), name)


@dataclass(frozen=True)
class DrugLikenessRule:
    id: str
    field: str
    op: str
    lo: float
    hi: float
    description: str

    def satisfied(self, desc) -> bool:
        v = getattr(desc, self.field)
        if self.op == "<=":
            return v <= self.hi
        if self.op == ">=":
            return v >= self.lo
        return self.lo <= v <= self.hi


@functools.lru_cache(maxsize=None)
def load_drug_likeness(name: str = "drug_likeness.txt") -> tuple[DrugLikenessRule, ...]:
    from ..molgraph.descriptors import FIELD_NAMES

    rules = []
    for lineno, line in read_table(name):
        rid, field, op, value, desc = _split(name, lineno, line, 5)
        if field not in FIELD_NAMES:
            raise RuleFileError(f"{name}:{lineno}: unknown descriptor field {field!r}")
        if op == "in":
            lo, hi = (float(x) for x in value.split(","))
        elif op == "<=":
            lo, hi = float("-inf"), float(value)
        elif op == ">=":
            lo, hi = float(value), float("inf")
        else:
            raise RuleFileError(f"{name}:{lineno}: unknown operator {op!r}")
        rules.append(DrugLikenessRule(rid, field, op, lo, hi, desc))
    if not rules:
        raise RuleFileError(f"{name}: rule file is empty")
    return tuple(rules)


@dataclass(frozen=True)
class MorphRule:
    id: str
    mode: str
    pattern: str
    n_removed: int
    replacement: str
    description: str
    query: Query


@functools.lru_cache(maxsize=None)
def load_morph(name: str = "morph_rules.txt") -> tuple[MorphRule, ...]:
    rules = []
    for lineno, line in read_table(name):
        rid, mode, pattern, repl, desc = _split(name, lineno, line, 5)
        if mode not in ("bioisostere", "metabolic"):
            raise RuleFileError(f"{name}:{lineno}: mode must be bioisostere or metabolic")
        k, sep, smi = repl.partition(":")
        if not sep or not k.isdigit():
            raise RuleFileError(f"{name}:{lineno}: replacement must look like '<k>:<smiles>'")
        q = _compile(name, lineno, pattern)
        if int(k) >= q.num_atoms:
            raise RuleFileError(f"{name}:{lineno}: cannot remove {k} of {q.num_atoms} pattern atoms")
        if smi.count("*") != 1:
            raise RuleFileError(f"{name}:{lineno}: replacement needs exactly one '*'")
        rules.append(MorphRule(rid, mode, pattern, int(k), smi, desc, q))
    return tuple(rules)
