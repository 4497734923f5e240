"""The experiment loop: propose, deduplicate, screen, reward, feed back, checkpoint, rank."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import multiprocessing
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..generators import Generator, build_generator, dump_state, from_state, load_state
from ..molgraph.descriptors import descriptors
from ..molgraph.fingerprint import morgan_fingerprint
from ..molgraph.io import read_records, try_canonical
from ..scoring2d.complexity import FragmentStats
from ..scoring2d.pf import pf_mine
from ..scoring2d.pipeline import ScoringContext, evaluate
from ..scoring2d.reward import ScoreReport
from ..scoring2d.similarity import ReferenceIndex
from ..scoring2d.som import som_train, zoom_refine
from .checkpoint import IntegrityError, latest_checkpoint, read_checkpoint, write_checkpoint
from .config import SCHEMA_VERSION, ConfigError, ExperimentConfig, InputError
from .rank import rank

TOP_K = 100
_SCORE_CHUNK = 64

CSV_FIELDS = (
    "schema_version", "rank", "canonical_smiles", "reward", "source_model", "epoch", "hard_fail",
    "gate", "mcf_pass", "mcf_hits", "ro5_violations", "ro5_pass", "mce18", "t_index_pass",
    "t_index_ratio", "drug_likeness", "rersa", "novelty", "similarity_to_reference", "pf_score",
    "flex", "som_class", "som_confidence",
)


def derive_seed(master: int, name: str) -> int:
    """64-bit stream seed from the master seed and a stream name."""
    digest = hashlib.sha256(f"{master}:{name}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def default_threads() -> int:
    env = os.environ.get("MOLFORGE_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"MOLFORGE_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise ConfigError("MOLFORGE_THREADS must be positive")
        return n
    return os.cpu_count() or 1


@dataclass
class Found:
    report: ScoreReport
    source_model: str
    epoch: int


@dataclass
class ExperimentResult:
    ranked: list[Found]
    model_stats: dict[str, list[dict]]
    top_by_epoch: list[dict]
    dedup: dict
    epochs_completed: int
    stopped: str
    incidents: list[str]
    checkpoints: list[str]
    config_text: str
    progress: list[str] = field(default_factory=list)


# -- inputs -----------------------------------------------------------------------

def read_smiles_file(path: str) -> tuple[list[str], list[str], int]:
    """(canonical SMILES, names, skipped) from a .smi/.sdf file."""
    if not os.path.exists(path):
        raise ConfigError(f"input file not found: {path}")
    smiles, names, skipped = [], [], 0
    try:
        for rec in read_records(path):
            if rec.mol is None:
                skipped += 1
                continue
            smiles.append(rec.smiles)
            names.append(rec.name)
    except (OSError, UnicodeDecodeError, ValueError) as e:
        raise InputError(f"cannot read {path}: {e}") from None
    return smiles, names, skipped


def _read_many(cfg: ExperimentConfig, paths) -> list[str]:
    out = []
    for p in paths:
        smi, _, _ = read_smiles_file(cfg.resolve(p))
        out.extend(smi)
    return out


def build_context(cfg: ExperimentConfig, refs: list[str]) -> ScoringContext:
    from ..molgraph.io import mol_from_smiles

    ref_fps = [morgan_fingerprint(mol_from_smiles(s)) for s in refs]
    if cfg.known_compound_refs:
        known_smiles = _read_many(cfg, [cfg.known_compound_refs])
        known = ReferenceIndex([morgan_fingerprint(mol_from_smiles(s)) for s in known_smiles])
    else:
        known = ReferenceIndex(ref_fps)
    pfs = None
    if cfg.privileged_fragments:
        pc = cfg.privileged_fragments
        actives = [mol_from_smiles(s) for s in _read_many(cfg, [pc["actives"]])]
        bg_paths = [pc["background"]] if pc.get("background") else cfg.reference_ligands
        background = [mol_from_smiles(s) for s in _read_many(cfg, bg_paths)]
        if not actives or not background:
            raise InputError("privileged-fragment actives and background must be non-empty")
        pfs = pf_mine(actives, background, float(pc.get("min_enrichment", 2.0)))
    grid = None
    weights = cfg.reward_weights
    if cfg.som:
        sc = cfg.som
        smi, labels, _ = read_smiles_file(cfg.resolve(sc["training"]))
        if not smi:
            raise InputError("SOM training file has no valid molecules")
        vecs = np.array([descriptors(mol_from_smiles(s)).as_list() for s in smi])
        rng = np.random.default_rng(derive_seed(cfg.seed, "som"))
        grid = som_train(vecs, labels, int(sc.get("width", 20)), int(sc.get("height", 20)),
                         int(sc.get("epochs", 20)), rng)
        if sc.get("zoom_threshold") is not None:
            grid = zoom_refine(grid, vecs, labels, float(sc["zoom_threshold"]), rng)
        if weights.som_target is None and sc.get("target") is not None:
            from dataclasses import replace

            weights = replace(weights, som_target=sc["target"])
    return ScoringContext(
        weights=weights, frag_stats=FragmentStats.load(), known=known,
        reference=ReferenceIndex(ref_fps, metric="cosine"), pfs=pfs, som=grid,
        modules=cfg.modules,
    )


# -- worker jobs (fork-inherited globals) -------------------------------------------

_CTX: ScoringContext | None = None
_GENS: dict[str, Generator] = {}


def _score_chunk(smiles: list[str]) -> list[ScoreReport]:
    return [evaluate(s, _CTX) for s in smiles]


def _propose_job(model_id: str, n: int, rng_state: dict):
    gen = _GENS[model_id]
    rng = np.random.default_rng()
    rng.bit_generator.state = rng_state
    out = gen.propose(n, rng)
    state_text = gen.dumps() if gen.kind == "ga" else None
    return out, state_text, rng.bit_generator.state


# -- the experiment -----------------------------------------------------------------

class Experiment:
    def __init__(self, cfg: ExperimentConfig, threads: int | None = None, progress=None):
        self.cfg = cfg
        self.threads = threads or cfg.threads or default_threads()
        self.progress_cb = progress
        self.refs = _read_many(cfg, cfg.reference_ligands)
        if not self.refs:
            raise InputError("reference ligand files contain no valid molecules")
        self.ctx = build_context(cfg, self.refs)
        self.model_ids = [m["id"] for m in cfg.enabled_models]
        self.gens: dict[str, Generator] = {}
        self.rngs: dict[str, np.random.Generator] = {}
        self.found: dict[str, Found] = {}
        self.stats: dict[str, list[dict]] = {m: [] for m in self.model_ids}
        self.top_by_epoch: list[dict] = []
        self.incidents: list[str] = []
        self.failed: set[str] = set()
        self.progress: list[str] = []
        self.epoch = 0
        self.proposed_total = 0
        self.valid_total = 0
        self.checkpoints: list[str] = []

    # setup / restore
    def start(self) -> None:
        n = self.cfg.budgets.candidates_per_model_per_epoch
        for spec in self.cfg.enabled_models:
            seed = derive_seed(self.cfg.seed, spec["id"])
            rng = np.random.default_rng(seed)
            try:
                self.gens[spec["id"]] = build_generator(spec, self.refs, n, rng, seed)
            except (ValueError, TypeError) as e:
                raise ConfigError(f"model {spec['id']!r}: {e}") from None
            self.rngs[spec["id"]] = rng

    def restore(self, directory: str) -> None:
        files = read_checkpoint(directory)
        try:
            run = json.loads(files["run.json"])
            rng_states = json.loads(files["rng.json"])
            found = json.loads(files["dedup.json"])
        except (KeyError, json.JSONDecodeError) as e:
            raise IntegrityError(f"incomplete checkpoint: {e}") from None
        if run.get("config_sha256") != _sha(self.cfg.source_text):
            raise IntegrityError("checkpoint was written for a different config")
        self.epoch = run["epoch"]
        self.stats = run["stats"]
        self.top_by_epoch = run["top_by_epoch"]
        self.incidents = run["incidents"]
        self.failed = set(run["failed"])
        self.progress = run["progress"]
        self.proposed_total = run["proposed_total"]
        self.valid_total = run["valid_total"]
        self.checkpoints = run["checkpoints"]
        for mid in self.model_ids:
            name = f"model_{mid}.gen"
            if name not in files:
                raise IntegrityError(f"checkpoint lacks state for model {mid!r}")
            self.gens[mid] = from_state(load_state(files[name]))
            rng = np.random.default_rng()
            rng.bit_generator.state = rng_states[mid]
            self.rngs[mid] = rng
        for row in found:
            rep = row["report"]
            rep["mcf_hits"] = tuple(rep["mcf_hits"])
            rep["warnings"] = tuple(rep["warnings"])
            self.found[row["smiles"]] = Found(ScoreReport(**rep), row["model"], row["epoch"])

    def checkpoint(self) -> str:
        name = f"epoch_{self.epoch:04d}"
        self.checkpoints.append(name)
        run = {
            "epoch": self.epoch, "stats": self.stats, "top_by_epoch": self.top_by_epoch,
            "incidents": self.incidents, "failed": sorted(self.failed), "progress": self.progress,
            "proposed_total": self.proposed_total, "valid_total": self.valid_total,
            "checkpoints": self.checkpoints, "config_sha256": _sha(self.cfg.source_text),
        }
        files = {
            "run.json": json.dumps(run, sort_keys=True),
            "rng.json": json.dumps({m: self.rngs[m].bit_generator.state for m in self.model_ids},
                                   sort_keys=True),
            "dedup.json": json.dumps(
                [{"smiles": s, "model": f.source_model, "epoch": f.epoch, "report": f.report.as_dict()}
                 for s, f in sorted(self.found.items())], sort_keys=True),
        }
        for mid in self.model_ids:
            files[f"model_{mid}.gen"] = dump_state(self.gens[mid].state)
        return write_checkpoint(os.path.join(self.cfg.resolve(self.cfg.output_dir), "checkpoints", name),
                                files)

    # one epoch
    def _propose_all(self, pool) -> dict[str, list[str] | None]:
        n = self.cfg.budgets.candidates_per_model_per_epoch
        active = [m for m in self.model_ids if m not in self.failed]
        out: dict[str, list[str] | None] = {}
        if pool is None:
            for mid in active:
                try:
                    out[mid] = self.gens[mid].propose(n, self.rngs[mid])
                    if len(out[mid]) != n:
                        raise RuntimeError(f"proposed {len(out[mid])} items, expected {n}")
                except Exception as e:  # isolate a failing model
                    self._fail(mid, e)
                    out[mid] = None
            return out
        futures = {mid: pool.submit(_propose_job, mid, n, self.rngs[mid].bit_generator.state)
                   for mid in active}
        for mid in active:
            try:
                props, state_text, rng_state = futures[mid].result()
                if len(props) != n:
                    raise RuntimeError(f"proposed {len(props)} items, expected {n}")
            except Exception as e:
                self._fail(mid, e)
                out[mid] = None
                continue
            out[mid] = props
            self.rngs[mid].bit_generator.state = rng_state
            if state_text is not None:
                self.gens[mid] = from_state(load_state(state_text))
        return out

    def _fail(self, mid: str, err: Exception) -> None:
        self.failed.add(mid)
        self.incidents.append(f"epoch {self.epoch + 1}: model {mid} failed: {type(err).__name__}: {err}")

    def _score(self, smiles: list[str], pool) -> list[ScoreReport]:
        if pool is None or len(smiles) <= _SCORE_CHUNK:
            return [evaluate(s, self.ctx) for s in smiles]
        chunks = [smiles[i : i + _SCORE_CHUNK] for i in range(0, len(smiles), _SCORE_CHUNK)]
        out = []
        for part in pool.map(_score_chunk, chunks):
            out.extend(part)
        return out

    def step(self, pool=None) -> None:
        e = self.epoch + 1
        proposals = self._propose_all(pool)
        canon: dict[str, list[str | None]] = {}
        new_order: list[str] = []
        new_owner: dict[str, str] = {}
        for mid in self.model_ids:
            props = proposals.get(mid)
            if props is None:
                continue
            cs = [try_canonical(s) for s in props]
            canon[mid] = cs
            for c in cs:
                if c is not None and c not in self.found and c not in new_owner:
                    new_owner[c] = mid
                    new_order.append(c)
        reports = self._score(new_order, pool)
        for c, rep in zip(new_order, reports):
            self.found[c] = Found(rep, new_owner[c], e)
        epoch_rewards = {}
        for mid in self.model_ids:
            cs = canon.get(mid)
            if cs is None:
                continue
            valid = [c for c in cs if c is not None]
            rewards = [self.found[c].report.reward for c in valid]
            for c in valid:
                epoch_rewards[c] = self.found[c].report.reward
            n = len(cs)
            fresh = sum(1 for c in set(valid) if new_owner.get(c) == mid)
            survivors = sum(1 for c in valid if not self.found[c].report.hard_fail)
            row = {
                "epoch": e, "proposed": n, "valid": len(valid), "new_unique": fresh,
                "validity": len(valid) / n if n else 0.0,
                "uniqueness": fresh / n if n else 0.0,
                "mean_reward": float(np.mean(rewards)) if rewards else 0.0,
                "max_reward": float(max(rewards)) if rewards else 0.0,
                "survival": survivors / len(valid) if valid else 0.0,
            }
            self.stats[mid].append(row)
            self.proposed_total += n
            self.valid_total += len(valid)
            line = json.dumps({"model": mid, **row}, sort_keys=True)
            self.progress.append(line)
            if self.progress_cb:
                self.progress_cb(line)
            # feedback: raw proposals paired with rewards (0 for invalid strings)
            props = proposals[mid]
            scored = [(c if c is not None else p, self.found[c].report.reward if c is not None else 0.0)
                      for p, c in zip(props, cs)]
            try:
                self.gens[mid].feedback(scored)
            except Exception as err:
                self._fail(mid, err)
        top = sorted(epoch_rewards.values(), reverse=True)[:TOP_K]
        best = sorted((f.report.reward for f in self.found.values()), reverse=True)[:TOP_K]
        self.top_by_epoch.append({
            "epoch": e,
            "top_mean": float(np.mean(top)) if top else 0.0,
            "best_so_far_mean": float(np.mean(best)) if best else 0.0,
            "distinct_valid": len(epoch_rewards),
        })
        self.epoch = e

    def result(self, stopped: str) -> ExperimentResult:
        ranked_reports = rank([f.report for f in self.found.values()], self.cfg.ranking)
        ranked = [self.found[r.canonical_smiles] for r in ranked_reports]
        dedup = {"proposed": self.proposed_total, "valid": self.valid_total, "unique": len(self.found)}
        return ExperimentResult(ranked, self.stats, self.top_by_epoch, dedup, self.epoch, stopped,
                                self.incidents, self.checkpoints, self.cfg.source_text, self.progress)


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def run(cfg: ExperimentConfig, resume: str | None = None, stop_after: int | None = None,
        threads: int | None = None, progress=None, write: bool = True) -> ExperimentResult:
    """Run (or resume) an experiment and write ranked.csv, report.json and progress.log.

    ``resume`` is a checkpoint epoch directory or the run's checkpoints
    root (latest epoch is used).  ``stop_after`` ends the loop after that
    epoch, as an interruption would.
    """
    global _CTX, _GENS
    exp = Experiment(cfg, threads, progress)
    if resume:
        path = resume
        if not os.path.exists(os.path.join(path, "MANIFEST.json")):
            path = latest_checkpoint(resume) or latest_checkpoint(os.path.join(resume, "checkpoints"))
            if path is None:
                raise IntegrityError(f"no checkpoint found under {resume}")
        exp.restore(path)
    else:
        exp.start()
    t0 = time.monotonic()
    stopped = "epochs"
    cap = cfg.budgets.wall_clock_s
    while exp.epoch < cfg.budgets.epochs:
        if stop_after is not None and exp.epoch >= stop_after:
            stopped = "interrupted"
            break
        if cap is not None and time.monotonic() - t0 > cap:
            stopped = "wall_clock"
            break
        if not [m for m in exp.model_ids if m not in exp.failed]:
            stopped = "all_models_failed"
            break
        if exp.threads > 1:
            _CTX, _GENS = exp.ctx, exp.gens
            with ProcessPoolExecutor(exp.threads, mp_context=multiprocessing.get_context("fork")) as pool:
                exp.step(pool)
        else:
            exp.step(None)
        exp.checkpoint()
    res = exp.result(stopped)
    if write:
        write_outputs(res, cfg.resolve(cfg.output_dir))
    return res


# -- outputs --------------------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.6f}"
    if isinstance(v, (tuple, list)):
        return ";".join(str(x) for x in v)
    return str(v)


def ranked_csv(res: ExperimentResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for i, f in enumerate(res.ranked, 1):
        d = f.report.as_dict()
        d.update({"schema_version": SCHEMA_VERSION, "rank": i, "source_model": f.source_model,
                  "epoch": f.epoch})
        w.writerow([_fmt(d.get(k)) for k in CSV_FIELDS])
    return buf.getvalue()


def report_json(res: ExperimentResult) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "config": res.config_text,
        "epochs_completed": res.epochs_completed,
        "stopped": res.stopped,
        "dedup": res.dedup,
        "model_stats": res.model_stats,
        "top_by_epoch": res.top_by_epoch,
        "incidents": res.incidents,
        "checkpoint_manifest": res.checkpoints,
        "ranked": [{"rank": i, "source_model": f.source_model, "epoch": f.epoch, **f.report.as_dict()}
                   for i, f in enumerate(res.ranked, 1)],
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def write_outputs(res: ExperimentResult, out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    for name, text in (("ranked.csv", ranked_csv(res)), ("report.json", report_json(res)),
                       ("progress.log", "".join(line + "\n" for line in res.progress))):
        with open(os.path.join(out_dir, name), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def model_stats(res: ExperimentResult) -> dict[str, list[dict]]:
    return res.model_stats
