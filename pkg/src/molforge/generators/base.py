"""Generator contract, shared state record and the text checkpoint codec."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

FORMAT = "molforge-generator"
VERSION = 1


class CheckpointError(ValueError):
    """Malformed, truncated or version-mismatched generator checkpoint."""


@dataclass
class Candidate:
    canonical_smiles: str
    source_model: str
    epoch: int
    score_report: object | None = None


@dataclass
class GeneratorState:
    """Per-model state.  ``payload`` layout depends on ``kind``."""

    kind: str
    payload: dict
    rng_seed: int = 0
    epoch: int = 0
    stats: list[dict] = field(default_factory=list)


class Generator:
    """Every model kind implements propose/feedback and text (de)serialization.

    propose(n, rng) returns exactly n strings (validity not guaranteed);
    feedback(scored) takes (smiles, reward) pairs for the last proposal.
    """

    kind = "base"

    def __init__(self, state: GeneratorState):
        if state.kind != self.kind:
            raise ValueError(f"state kind {state.kind!r} does not match {self.kind!r}")
        self.state = state

    def propose(self, n: int, rng) -> list[str]:
        raise NotImplementedError

    def feedback(self, scored) -> None:
        raise NotImplementedError

    def dumps(self) -> str:
        return dump_state(self.state)


def dump_state(state: GeneratorState) -> str:
    head = {"format": FORMAT, "version": VERSION, "kind": state.kind,
            "rng_seed": state.rng_seed, "epoch": state.epoch}
    return "\n".join([
        json.dumps(head, sort_keys=True),
        json.dumps(state.stats, sort_keys=True),
        json.dumps(state.payload, sort_keys=True),
        "end",
    ]) + "\n"


def load_state(text: str) -> GeneratorState:
    lines = text.split("\n")
    if len(lines) < 4 or lines[3] != "end":
        raise CheckpointError("truncated generator checkpoint")
    try:
        head = json.loads(lines[0])
        stats = json.loads(lines[1])
        payload = json.loads(lines[2])
    except json.JSONDecodeError as e:
        raise CheckpointError(f"unreadable generator checkpoint: {e}") from None
    if head.get("format") != FORMAT:
        raise CheckpointError("not a generator checkpoint")
    if head.get("version") != VERSION:
        raise CheckpointError(f"checkpoint version {head.get('version')} != {VERSION}")
    return GeneratorState(head["kind"], payload, head["rng_seed"], head["epoch"], stats)


class ConstantGenerator(Generator):
    """Stub model that always proposes the same SMILES (contract conformance)."""

    kind = "constant"

    @classmethod
    def create(cls, smiles: str = "CCO", seed: int = 0) -> "ConstantGenerator":
        return cls(GeneratorState(cls.kind, {"smiles": smiles}, seed))

    def propose(self, n, rng):
        return [self.state.payload["smiles"]] * n

    def feedback(self, scored):
        self.state.epoch += 1
