"""Graph-based genetic algorithm over molecules."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..molgraph.brics import Fragment, NoCompatiblePairing, brics_fragment, brics_recombine, load_compat
from ..molgraph.canon import write_canonical
from ..molgraph.core import Atom, BondOrder, MolError, Molecule
from ..molgraph.edit import MolBuilder
from ..molgraph.elements import default_valence
from ..molgraph.io import mol_from_smiles
from ..molgraph.perception import sanitize
from .base import Generator, GeneratorState

MUTATIONS = ("element_swap", "bond_order", "append_atom", "delete_atom", "ring_closure", "fragment_swap")
SWAP_ELEMENTS = ("C", "N", "O", "S", "F", "Cl")
APPEND_ELEMENTS = ("C", "C", "C", "N", "O", "F", "Cl")
MAX_VALENCE = {"C": 4, "N": 3, "O": 2, "S": 2, "F": 1, "Cl": 1, "Br": 1, "I": 1}


@dataclass(frozen=True)
class GAConfig:
    tournament: int = 3
    elite_fraction: float = 0.05
    crossover_rate: float = 0.6
    mutation_rate: float = 0.3
    max_retries: int = 10
    max_heavy_atoms: int = 60
    mutation_weights: dict = field(default_factory=lambda: {m: 1.0 for m in MUTATIONS})

    def __post_init__(self):
        bad = set(self.mutation_weights) - set(MUTATIONS)
        if bad:
            raise ValueError(f"unknown mutation operators: {sorted(bad)}")


# -- mutation operators: each returns a new Molecule or None -------------------

def _free_valence(b: MolBuilder, i: int) -> int:
    a = b.atoms[i]
    if a.formal_charge != 0 or a.element not in MAX_VALENCE:
        return 0
    return MAX_VALENCE[a.element] - b.valence_used(i)


def _finish(b: MolBuilder) -> Molecule | None:
    if not b.atoms:
        return None
    comps = b.components()
    if len(comps) > 1:
        return None
    try:
        return sanitize(b.to_molecule())
    except MolError:
        return None


def mut_element_swap(mol, rng, library=None):
    b = MolBuilder.from_molecule(mol)
    sites = [i for i, a in enumerate(b.atoms) if a.formal_charge == 0 and a.element in MAX_VALENCE]
    if not sites:
        return None
    i = sites[int(rng.integers(len(sites)))]
    used = b.valence_used(i)
    options = [e for e in SWAP_ELEMENTS if e != b.atoms[i].element and MAX_VALENCE[e] >= used]
    if not options:
        return None
    e = options[int(rng.integers(len(options)))]
    b.atoms[i] = Atom(e)
    return _finish(b)


def mut_bond_order(mol, rng, library=None):
    b = MolBuilder.from_molecule(mol)
    keys = sorted(b.bonds)
    if not keys:
        return None
    i, j = keys[int(rng.integers(len(keys)))]
    o = b.bonds[(i, j)]
    if o is BondOrder.SINGLE:
        if min(_free_valence(b, i), _free_valence(b, j)) < 1:
            return None
        b.bonds[(i, j)] = BondOrder.DOUBLE
    else:
        b.bonds[(i, j)] = BondOrder.SINGLE
    return _finish(b)


def mut_append_atom(mol, rng, library=None):
    b = MolBuilder.from_molecule(mol)
    sites = [i for i in range(len(b)) if _free_valence(b, i) >= 1]
    if not sites:
        return None
    i = sites[int(rng.integers(len(sites)))]
    e = APPEND_ELEMENTS[int(rng.integers(len(APPEND_ELEMENTS)))]
    j = b.add_atom(Atom(e))
    b.add_bond(i, j)
    return _finish(b)


def mut_delete_atom(mol, rng, library=None):
    b = MolBuilder.from_molecule(mol)
    if len(b) < 2:
        return None
    sites = [i for i in range(len(b)) if len(b.neighbors(i)) == 1]
    if not sites:
        return None
    i = sites[int(rng.integers(len(sites)))]
    b.remove_atoms([i])
    return _finish(b)


def _distances(b: MolBuilder, src: int) -> dict[int, int]:
    dist = {src: 0}
    frontier = [src]
    while frontier:
        nxt = []
        for v in frontier:
            for w in b.neighbors(v):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    nxt.append(w)
        frontier = nxt
    return dist


def mut_ring_closure(mol, rng, library=None):
    """Bond two atoms with free valence that are 2..5 bonds apart (ring of 3..6)."""
    b = MolBuilder.from_molecule(mol)
    sites = [i for i in range(len(b)) if _free_valence(b, i) >= 1]
    pairs = []
    for i in sites:
        d = _distances(b, i)
        pairs.extend((i, j) for j in sites if j > i and 2 <= d.get(j, 0) <= 5)
    if not pairs:
        return None
    i, j = pairs[int(rng.integers(len(pairs)))]
    b.add_bond(i, j)
    return _finish(b)


def mut_fragment_swap(mol, rng, library=None):
    """Replace one BRICS fragment by a library fragment with the same attachment types."""
    if not library:
        return None
    frags = brics_fragment(mol)
    if len(frags) < 2:
        return None
    k = int(rng.integers(len(frags)))
    options = [f for f in library if f.types == frags[k].types and f.smiles != frags[k].smiles]
    if not options:
        return None
    repl = options[int(rng.integers(len(options)))]
    parts = frags[:k] + frags[k + 1 :] + [repl]
    try:
        return brics_recombine(parts, rng=rng)
    except (MolError, ValueError):
        return None


OPERATORS = {
    "element_swap": mut_element_swap,
    "bond_order": mut_bond_order,
    "append_atom": mut_append_atom,
    "delete_atom": mut_delete_atom,
    "ring_closure": mut_ring_closure,
    "fragment_swap": mut_fragment_swap,
}


def mutate(mol: Molecule, rng, weights: dict, library=None) -> Molecule | None:
    names = [m for m in MUTATIONS if weights.get(m, 0) > 0]
    if not names:
        return None
    w = np.array([weights[m] for m in names], dtype=np.float64)
    op = names[int(rng.choice(len(names), p=w / w.sum()))]
    return OPERATORS[op](mol, rng, library)


def crossover(a: Molecule, b: Molecule, rng) -> Molecule | None:
    """Fragment exchange: a random non-empty share of each parent's BRICS fragments, recombined."""
    fa, fb = brics_fragment(a), brics_fragment(b)
    if len(fa) < 2 and len(fb) < 2:
        return None
    take_a = [f for f in fa if rng.random() < 0.5] or [fa[int(rng.integers(len(fa)))]]
    take_b = [f for f in fb if rng.random() < 0.5] or [fb[int(rng.integers(len(fb)))]]
    try:
        return brics_recombine(take_a + take_b, rng=rng)
    except (MolError, ValueError):
        return None


# -- model ------------------------------------------------------------------------

class GAModel(Generator):
    """Population of canonical SMILES with fitness from the last feedback.

    propose() returns the current population to be scored; feedback()
    records fitness and breeds the next population (ga_epoch).
    """

    kind = "ga"

    def __init__(self, state: GeneratorState):
        super().__init__(state)
        p = state.payload
        cfg = dict(p["config"])
        self.cfg = GAConfig(**cfg)
        self._library: list[Fragment] | None = None

    @property
    def population(self) -> list[str]:
        return self.state.payload["population"]

    @property
    def fitness(self) -> list[float] | None:
        return self.state.payload.get("fitness")

    @property
    def library(self) -> list[Fragment]:
        if self._library is None:
            lib = {}
            for smi in self.state.payload["seeds"]:
                for f in brics_fragment(mol_from_smiles(smi)):
                    if f.attachments:
                        lib.setdefault(f.smiles, f)
            self._library = [lib[k] for k in sorted(lib)]
        return self._library

    @classmethod
    def init(cls, seeds, population_size: int, rng, cfg: GAConfig = GAConfig(), seed: int = 0) -> "GAModel":
        """Sample seeds with replacement and apply one random mutation each (ga_init)."""
        mols = []
        for s in seeds:
            try:
                mols.append(mol_from_smiles(s) if isinstance(s, str) else s)
            except (MolError, ValueError):
                continue
        if not mols:
            raise ValueError("no valid GA seeds")
        seed_smiles = sorted({write_canonical(m) for m in mols})
        payload = {"config": _cfg_dict(cfg), "population": [], "fitness": None, "seeds": seed_smiles}
        model = cls(GeneratorState(cls.kind, payload, seed))
        pop = []
        for _ in range(population_size):
            parent = mols[int(rng.integers(len(mols)))]
            child = None
            for _ in range(cfg.max_retries):
                child = mutate(parent, rng, cfg.mutation_weights, model.library)
                if child is not None and child.num_heavy_atoms <= cfg.max_heavy_atoms:
                    break
                child = None
            pop.append(write_canonical(child if child is not None else parent))
        payload["population"] = pop
        return model

    def _select(self, fit: np.ndarray, rng) -> int:
        idx = rng.integers(len(fit), size=self.cfg.tournament)
        return int(max(idx, key=lambda i: (fit[i], -i)))

    def epoch(self, fitness, rng) -> list[str]:
        """Breed the next population (ga_epoch); returns it."""
        pop = self.population
        fit = np.asarray(fitness, dtype=np.float64)
        if len(fit) != len(pop):
            raise ValueError("fitness is not aligned with the population")
        n = len(pop)
        order = sorted(range(n), key=lambda i: (-fit[i], pop[i]))
        n_elite = min(n, max(1, math.ceil(self.cfg.elite_fraction * n)))
        new = [pop[i] for i in order[:n_elite]]
        mols = {}

        def mol_of(i):
            if i not in mols:
                mols[i] = mol_from_smiles(pop[i])
            return mols[i]

        while len(new) < n:
            i = self._select(fit, rng)
            child = None
            for _ in range(self.cfg.max_retries):
                cand = mol_of(i)
                if rng.random() < self.cfg.crossover_rate:
                    j = self._select(fit, rng)
                    cand = crossover(mol_of(i), mol_of(j), rng)
                if cand is not None and rng.random() < self.cfg.mutation_rate:
                    cand = mutate(cand, rng, self.cfg.mutation_weights, self.library)
                if cand is not None and cand.num_heavy_atoms <= self.cfg.max_heavy_atoms:
                    child = cand
                    break
            new.append(write_canonical(child) if child is not None else pop[i])
        self.state.payload["population"] = new
        self.state.payload["fitness"] = None
        return new

    # -- contract --------------------------------------------------------
    def propose(self, n, rng):
        """The current population, cycled or truncated to n entries."""
        pop = self.population
        if self.fitness is not None:
            pop = self.epoch(self.fitness, rng)
        return [pop[k % len(pop)] for k in range(n)]

    def feedback(self, scored) -> None:
        """Record the reward of each population member (0 when missing)."""
        by_smiles = {}
        for s, r in scored:
            by_smiles[s] = max(r, by_smiles.get(s, 0.0))
        self.state.payload["fitness"] = [float(by_smiles.get(s, 0.0)) for s in self.population]
        self.state.epoch += 1


def _cfg_dict(cfg: GAConfig) -> dict:
    d = dict(cfg.__dict__)
    d["mutation_weights"] = dict(cfg.mutation_weights)
    return d


def ga_init(seeds, population_size: int, rng, cfg: GAConfig = GAConfig()) -> GAModel:
    return GAModel.init(seeds, population_size, rng, cfg)


def ga_epoch(model: GAModel, fitness, rng) -> list[str]:
    return model.epoch(fitness, rng)
