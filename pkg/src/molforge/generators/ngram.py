"""Token-level n-gram SMILES language model with cross-entropy-method feedback."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..molgraph.canon import write_canonical
from ..molgraph.core import MolError
from ..molgraph.io import mol_from_smiles
from ..molgraph.smiles import tokenize
from .base import Generator, GeneratorState

BOS = "^"
EOS = "$"


@dataclass(frozen=True)
class LMConfig:
    order: int = 6
    temperature: float = 0.65
    max_len: int = 100  # tokens; openers are masked past 75% of it
    elite_fraction: float = 0.2
    elite_weight: float = 5.0
    decay: float = 0.9
    smoothing: float = 0.3  # pseudo-count mass per context


def _contexts(tokens: list[str], order: int):
    """(context, next token) pairs; context is the previous order-1 tokens."""
    seq = [BOS] * (order - 1) + tokens + [EOS]
    for i in range(order - 1, len(seq)):
        yield "\t".join(seq[i - order + 1 : i]), seq[i]


def _add_counts(counts: dict, smiles_list, order: int, weight: float) -> None:
    for smi in smiles_list:
        for ctx, tok in _contexts(tokenize(smi), order):
            row = counts.setdefault(ctx, {})
            row[tok] = row.get(tok, 0.0) + weight


class NGramModel(Generator):
    """Counts over token contexts of every length 0..order-1.

    The order-k distribution is the count distribution smoothed toward the
    order-(k-1) one with ``smoothing`` pseudo-counts; order 0 is add-one
    over the vocabulary.  Sampling masks tokens that would close an
    unopened branch or end the string with open branches or ring bonds, and
    past 75% of max_len it stops opening new ones.
    """

    kind = "ngram"

    def __init__(self, state: GeneratorState):
        super().__init__(state)
        p = state.payload
        self.cfg = LMConfig(**p["config"])
        self.vocab: list[str] = p["vocab"]
        # counts[k] maps a context of k tokens to next-token counts
        self.counts: list[dict] = p["counts"]
        self._cache: dict[str, np.ndarray] = {}
        self._index = {t: i for i, t in enumerate(self.vocab)}
        self._openers = [i for i, t in enumerate(self.vocab) if t == "(" or t.isdigit() or t.startswith("%")]

    # -- training ------------------------------------------------------
    @classmethod
    def train(cls, corpus, cfg: LMConfig = LMConfig(), seed: int = 0) -> tuple["NGramModel", int]:
        """Fit on the canonical forms of the parseable SMILES in ``corpus``.

        Returns (model, number of skipped unparseable lines).
        """
        if not 2 <= cfg.order <= 8:
            raise ValueError("order must lie in [2, 8]")
        good, skipped = [], 0
        for smi in corpus:
            try:
                good.append(write_canonical(mol_from_smiles(smi)))
            except (MolError, ValueError):
                skipped += 1
        if not good:
            raise ValueError("empty training corpus")
        counts = [dict() for _ in range(cfg.order)]
        for k in range(cfg.order):
            _add_counts(counts[k], good, k + 1, 1.0)
        vocab = sorted({t for row in counts[0].values() for t in row})
        payload = {"config": cfg.__dict__.copy(), "vocab": vocab, "counts": counts}
        return cls(GeneratorState(cls.kind, payload, seed)), skipped

    def _vec(self, row: dict) -> np.ndarray:
        v = np.zeros(len(self.vocab))
        for t, c in row.items():
            v[self._index[t]] = c
        return v

    def distribution(self, history: list[str]) -> np.ndarray:
        """P(next token | history) over ``vocab``."""
        padded = [BOS] * (self.cfg.order - 1) + history
        key = "\t".join(padded[len(padded) - self.cfg.order + 1 :])
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        row0 = self.counts[0].get("", {})
        p = self._vec(row0) + 1.0
        p /= p.sum()
        for k in range(1, self.cfg.order):
            ctx = "\t".join(padded[len(padded) - k :])
            row = self.counts[k].get(ctx)
            if not row:
                continue
            c = self._vec(row)
            p = (c + self.cfg.smoothing * p) / (c.sum() + self.cfg.smoothing)
        self._cache[key] = p
        return p

    # -- sampling ------------------------------------------------------
    def sample(self, n: int, rng, temperature: float | None = None, max_len: int | None = None) -> list[str]:
        t = self.cfg.temperature if temperature is None else temperature
        max_len = self.cfg.max_len if max_len is None else max_len
        if t <= 0:
            raise ValueError("temperature must be positive")
        return [self._sample_one(rng, t, max_len) for _ in range(n)]

    def _sample_one(self, rng, temperature: float, max_len: int) -> str:
        toks: list[str] = []
        depth = 0
        open_rings: dict[str, int] = {}  # digit -> atoms written when it opened
        n_atoms = 0
        close_i = self._index.get(")")
        eos_i = self._index[EOS]
        soft = int(0.75 * max_len)
        while len(toks) < max_len:
            p = self.distribution(toks).copy()
            if len(toks) >= soft:
                # wind down: no new branches or ring bonds
                p[self._openers] = 0.0
                for r in open_rings:
                    j = self._index.get(r)
                    if j is not None:
                        p[j] = self.distribution(toks)[j]
            for r, at in open_rings.items():
                j = self._index.get(r)
                if j is not None and n_atoms - at < 2:
                    p[j] = 0.0  # would bond an atom to itself or duplicate a bond
            if depth == 0 and close_i is not None:
                p[close_i] = 0.0
            if depth > 0 or open_rings:
                p[eos_i] = 0.0
            if not toks:
                p[eos_i] = 0.0
            if p.sum() <= 0:
                break
            if temperature < 1e-3:
                j = int(np.argmax(p))
            else:
                w = np.power(p, 1.0 / temperature) if temperature != 1.0 else p
                w = w / w.sum()
                j = int(np.searchsorted(np.cumsum(w), rng.random() * (1 - 1e-12), side="right"))
                j = min(j, len(w) - 1)
            tok = self.vocab[j]
            if tok == EOS:
                break
            if tok == "(":
                depth += 1
            elif tok == ")":
                depth -= 1
            elif tok.isdigit() or tok.startswith("%"):
                if tok in open_rings:
                    del open_rings[tok]
                else:
                    open_rings[tok] = n_atoms
            elif tok[0].isalpha() or tok[0] in "[*":
                n_atoms += 1
            toks.append(tok)
        return "".join(toks)

    def log_likelihood(self, smiles: str) -> float:
        toks = tokenize(smiles)
        ll = 0.0
        for i, tok in enumerate(toks + [EOS]):
            p = self.distribution(toks[:i])
            j = self._index.get(tok)
            ll += math.log(p[j]) if j is not None and p[j] > 0 else -1e9
        return ll

    # -- contract --------------------------------------------------------
    def propose(self, n, rng):
        return self.sample(n, rng)

    def feedback(self, scored) -> None:
        """Cross-entropy update: counts <- decay*counts + weight*elite counts.

        The elite is the top elite_fraction (at least one) of the candidates
        with positive reward; tokens outside the vocabulary are ignored.
        """
        scored = [(s, r) for s, r in scored if r > 0]
        scored.sort(key=lambda sr: (-sr[1], sr[0]))
        n_elite = math.ceil(self.cfg.elite_fraction * len(scored)) if scored else 0
        elite = [s for s, _ in scored[:n_elite] if all(t in self._index for t in tokenize(s))]
        for k in range(self.cfg.order):
            table = self.counts[k]
            for row in table.values():
                for tok in row:
                    row[tok] *= self.cfg.decay
            _add_counts(table, elite, k + 1, self.cfg.elite_weight)
        self._cache.clear()
        self.state.epoch += 1


def lm_train(corpus, order: int = 6, seed: int = 0, **kw) -> NGramModel:
    return NGramModel.train(corpus, LMConfig(order=order, **kw), seed)[0]


def lm_sample(model: NGramModel, n: int, temperature: float, max_len: int, rng) -> list[str]:
    return model.sample(n, rng, temperature, max_len)


def lm_feedback(model: NGramModel, scored, elite_fraction: float | None = None) -> NGramModel:
    if elite_fraction is not None:
        model.cfg = LMConfig(**{**model.cfg.__dict__, "elite_fraction": elite_fraction})
        model.state.payload["config"] = model.cfg.__dict__.copy()
    model.feedback(scored)
    return model
