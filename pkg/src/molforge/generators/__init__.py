"""Generative models behind a common propose/feedback contract."""

from __future__ import annotations

from .base import Candidate, CheckpointError, ConstantGenerator, Generator, GeneratorState, dump_state, load_state
from .fragment import FragConfig, FragmentModel, frag_build, frag_sample
from .ga import MUTATIONS, GAConfig, GAModel, crossover, ga_epoch, ga_init, mutate
from .ngram import LMConfig, NGramModel, lm_feedback, lm_sample, lm_train

KINDS: dict[str, type[Generator]] = {
    NGramModel.kind: NGramModel,
    GAModel.kind: GAModel,
    FragmentModel.kind: FragmentModel,
    ConstantGenerator.kind: ConstantGenerator,
}

# two LMs, two GAs with different operator mixes, one fragment sampler
DEFAULT_ENSEMBLE = [
    {"id": "lm4", "kind": "ngram", "params": {"order": 4}},
    {"id": "lm6", "kind": "ngram", "params": {"order": 6}},
    {"id": "ga_atom", "kind": "ga", "params": {"mutation_weights": {
        "element_swap": 2.0, "bond_order": 1.0, "append_atom": 2.0, "delete_atom": 2.0,
        "ring_closure": 1.0, "fragment_swap": 0.5}}},
    {"id": "ga_frag", "kind": "ga", "params": {"crossover_rate": 0.8, "mutation_weights": {
        "element_swap": 1.0, "bond_order": 0.5, "append_atom": 1.0, "delete_atom": 1.0,
        "ring_closure": 0.5, "fragment_swap": 3.0}}},
    {"id": "frag", "kind": "fragment", "params": {}},
]


def build_generator(spec: dict, corpus: list[str], batch_size: int, rng, seed: int = 0) -> Generator:
    """Instantiate one model from its config entry and the seed corpus."""
    kind = spec.get("kind")
    params = dict(spec.get("params", {}))
    if kind == "ngram":
        return NGramModel.train(corpus, LMConfig(**params), seed)[0]
    if kind == "ga":
        size = int(params.pop("population_size", batch_size))
        return GAModel.init(corpus, size, rng, GAConfig(**params), seed)
    if kind == "fragment":
        return FragmentModel.build(corpus, FragConfig(**params), seed)
    if kind == "constant":
        return ConstantGenerator.create(params.get("smiles", "CCO"), seed)
    raise ValueError(f"unknown generator kind {kind!r}")


def from_state(state: GeneratorState) -> Generator:
    try:
        cls = KINDS[state.kind]
    except KeyError:
        raise CheckpointError(f"unknown generator kind {state.kind!r}") from None
    return cls(state)


__all__ = [
    "Candidate", "CheckpointError", "ConstantGenerator", "Generator", "GeneratorState",
    "dump_state", "load_state", "FragConfig", "FragmentModel", "frag_build", "frag_sample",
    "MUTATIONS", "GAConfig", "GAModel", "crossover", "ga_epoch", "ga_init", "mutate",
    "LMConfig", "NGramModel", "lm_feedback", "lm_sample", "lm_train",
    "KINDS", "DEFAULT_ENSEMBLE", "build_generator", "from_state",
]
