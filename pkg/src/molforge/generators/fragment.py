"""Weighted BRICS fragment recombination sampler."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from ..molgraph.brics import Fragment, brics_fragment, brics_recombine, load_compat
from ..molgraph.canon import write_canonical
from ..molgraph.core import MolError
from ..molgraph.io import mol_from_smiles
from .base import Generator, GeneratorState


@dataclass(frozen=True)
class FragConfig:
    max_fragments: int = 4
    max_heavy_atoms: int = 50
    max_retries: int = 10
    learning_rate: float = 2.0  # exponent scale of the feedback re-weighting


class FragmentModel(Generator):
    """Fragment library with sampling weights.

    A sample starts from a weighted fragment, then adds up to
    max_fragments - 1 weighted partners that can pair with an open
    attachment, and joins them with brics_recombine.  Feedback multiplies
    each fragment's weight by exp(lr * (mean reward of candidates holding it
    - mean reward of the batch)), so fragments in better candidates gain
    probability.
    """

    kind = "fragment"

    def __init__(self, state: GeneratorState):
        super().__init__(state)
        self.cfg = FragConfig(**state.payload["config"])
        self._frags: list[Fragment] = [
            _fragment_from_smiles(s) for s in state.payload["fragments"]
        ]
        self._index = {f.smiles: k for k, f in enumerate(self._frags)}
        self._compat = load_compat()

    @property
    def weights(self) -> list[float]:
        return self.state.payload["weights"]

    @classmethod
    def build(cls, corpus, cfg: FragConfig = FragConfig(), seed: int = 0) -> "FragmentModel":
        counts: Counter = Counter()
        for smi in corpus:
            try:
                mol = mol_from_smiles(smi) if isinstance(smi, str) else smi
            except (MolError, ValueError):
                continue
            counts.update(f.smiles for f in brics_fragment(mol))
        if not counts:
            raise ValueError("fragment library is empty")
        frags = sorted(counts)
        payload = {"config": dict(cfg.__dict__), "fragments": frags,
                   "weights": [float(counts[f]) for f in frags]}
        return cls(GeneratorState(cls.kind, payload, seed))

    def probabilities(self) -> np.ndarray:
        w = np.asarray(self.weights, dtype=np.float64)
        return w / w.sum()

    def _pick(self, pool: list[int], rng) -> int:
        w = np.asarray([self.weights[k] for k in pool], dtype=np.float64)
        return pool[int(rng.choice(len(pool), p=w / w.sum()))]

    def _sample_one(self, rng) -> str:
        all_idx = list(range(len(self._frags)))
        best = None
        for _ in range(self.cfg.max_retries):
            chosen = [self._frags[self._pick(all_idx, rng)]]
            open_types = list(chosen[0].types)
            while open_types and len(chosen) < self.cfg.max_fragments:
                t = open_types.pop(int(rng.integers(len(open_types))))
                pool = [k for k, f in enumerate(self._frags)
                        if any((t, u) in self._compat for u in f.types)]
                if not pool:
                    continue
                f = self._frags[self._pick(pool, rng)]
                chosen.append(f)
                used = next(u for u in f.types if (t, u) in self._compat)
                rest = list(f.types)
                rest.remove(used)
                open_types.extend(rest)
            try:
                mol = brics_recombine(chosen, rng=rng)
            except (MolError, ValueError):
                continue
            smi = write_canonical(mol)
            if mol.num_heavy_atoms <= self.cfg.max_heavy_atoms:
                return smi
            best = best or smi
        return best if best is not None else self._frags[self._pick(all_idx, rng)].smiles

    def sample(self, n: int, rng) -> list[str]:
        return [self._sample_one(rng) for _ in range(n)]

    def propose(self, n, rng):
        return self.sample(n, rng)

    def feedback(self, scored) -> None:
        scored = list(scored)
        if not scored:
            self.state.epoch += 1
            return
        batch_mean = sum(r for _, r in scored) / len(scored)
        sums: dict[int, list[float]] = {}
        for smi, r in scored:
            try:
                mol = mol_from_smiles(smi)
            except (MolError, ValueError):
                continue
            for f in {f.smiles for f in brics_fragment(mol)}:
                k = self._index.get(f)
                if k is not None:
                    sums.setdefault(k, []).append(r)
        w = self.weights
        for k, rs in sums.items():
            w[k] *= math.exp(self.cfg.learning_rate * (sum(rs) / len(rs) - batch_mean))
        total = sum(w)
        for k in range(len(w)):
            w[k] = max(w[k] * len(w) / total, 1e-9)
        self.state.epoch += 1


def _fragment_from_smiles(smi: str) -> Fragment:
    mol = mol_from_smiles(smi)
    att = tuple(sorted((i, a.isotope or 0, -1) for i, a in enumerate(mol.atoms) if a.is_dummy))
    return Fragment(smi, mol, att)


def frag_build(corpus, seed: int = 0, **kw) -> FragmentModel:
    return FragmentModel.build(corpus, FragConfig(**kw), seed)


def frag_sample(model: FragmentModel, n: int, rng) -> list[str]:
    return model.sample(n, rng)
