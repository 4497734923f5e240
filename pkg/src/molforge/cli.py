"""Command-line interface.

Payloads go to stdout, diagnostics to stderr.  Exit codes: 0 success,
1 runtime failure, 2 config/usage error, 3 input-format error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from collections import Counter

from . import __version__
from .benchmark import benchmark_report, to_csv, to_json
from .molgraph.brics import brics_fragment
from .molgraph.core import MolError
from .molgraph.canon import write_canonical
from .molgraph.fingerprint import morgan_fingerprint
from .molgraph.io import iter_smi_lines, read_records
from .molgraph.molfile import MolfileError
from .orchestrator.checkpoint import IntegrityError
from .orchestrator.config import SCHEMA_VERSION, ConfigError, InputError, load_config
from .orchestrator.run import default_threads, run
from .scoring2d.morph import MODES, morph_variants
from .scoring2d.pipeline import MODULES, ScoringContext, evaluate
from .scoring2d.reward import RewardWeights, drug_likeness_weights
from .scoring2d.rules import RuleFileError, load_morph
from .scoring2d.similarity import ReferenceIndex, cluster_diversity

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3

# report columns each module fills in the score table
MODULE_COLUMNS = {
    "mcf": ("mcf_pass", "mcf_hits"),
    "t_index": ("t_index_pass", "t_index_ratio"),
    "ro5": ("ro5", "ro5_violations"),
    "drug_likeness": ("drug_likeness",),
    "mce18": ("mce18",),
    "rersa": ("rersa",),
    "novelty": ("novelty",),
    "similarity": ("similarity_to_reference",),
    "pf": ("pf_score",),
    "flex": ("flex",),
    "som": ("som_class", "som_confidence"),
}


class UsageError(ValueError):
    pass


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


def _need_file(path: str) -> str:
    if not os.path.isfile(path):
        raise UsageError(f"input file not found: {path}")
    return path


def _records(path: str):
    try:
        return list(read_records(_need_file(path)))
    except (UnicodeDecodeError, MolfileError) as e:
        raise InputError(f"cannot read {path}: {e}") from None


def _raw_smiles(path: str) -> list[str]:
    try:
        return [s for s, _ in iter_smi_lines(_need_file(path))]
    except UnicodeDecodeError as e:
        raise InputError(f"cannot read {path}: {e}") from None


def _valid_mols(path: str, err) -> list[tuple[str, object]]:
    out = []
    for r in _records(path):
        if r.mol is None:
            print(f"warning: record {r.index + 1} skipped: {r.error}", file=err)
        else:
            out.append((r.name or str(r.index + 1), r.mol))
    return out


def _emit_csv(rows, out) -> None:
    w = csv.writer(out, lineterminator="\n")
    for row in rows:
        w.writerow(row)


# -- subcommands ------------------------------------------------------------------

def cmd_run(args, out, err) -> int:
    cfg = load_config(args.config)
    threads = args.threads if args.threads is not None else (cfg.threads or default_threads())
    if threads < 1:
        raise UsageError("--threads must be positive")

    def progress(line: str) -> None:
        print(line, file=err)

    res = run(cfg, resume=args.resume, threads=threads, progress=progress if args.verbose else None)
    summary = {
        "schema_version": SCHEMA_VERSION,
        "output_dir": cfg.resolve(cfg.output_dir),
        "epochs_completed": res.epochs_completed,
        "stopped": res.stopped,
        "ranked": len(res.ranked),
        "incidents": len(res.incidents),
    }
    out.write(json.dumps(summary, sort_keys=True) + "\n")
    return EXIT_OK


def _parse_modules(text: str) -> tuple[str, ...]:
    if text.strip() == "all":
        return MODULES
    mods = tuple(m.strip() for m in text.split(",") if m.strip())
    unknown = sorted(set(mods) - set(MODULES))
    if unknown or not mods:
        raise UsageError(f"unknown modules {unknown}; choose from {', '.join(MODULES)} or 'all'")
    return tuple(m for m in MODULES if m in mods)


def _load_weights(path: str | None) -> RewardWeights:
    if path is None:
        return drug_likeness_weights()
    try:
        with open(_need_file(path), encoding="utf-8") as fh:
            d = json.load(fh)
        return RewardWeights.from_dict(d if "weights" in d else {"weights": d})
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"bad weights file {path}: {e}") from None


def cmd_score(args, out, err) -> int:
    modules = _parse_modules(args.modules)
    weights = _load_weights(args.weights)
    ref = None
    if args.ref:
        fps = [morgan_fingerprint(m) for _, m in _valid_mols(args.ref, err)]
        ref = fps
    for m in ("novelty", "similarity"):
        if m in modules and ref is None and args.modules.strip() != "all":
            print(f"warning: module {m} needs --ref; column left empty", file=err)
    ctx = ScoringContext(
        weights=weights, modules=modules,
        known=ReferenceIndex(ref) if ref is not None else None,
        reference=ReferenceIndex(ref, metric="cosine") if ref is not None else None,
    )
    cols = [c for m in modules for c in MODULE_COLUMNS[m]]
    rows = [["schema_version", "index", "name", "input", "canonical_smiles", "valid", "hard_fail",
             "gate", *cols, "reward"]]
    for r in _records(args.inp):
        if r.mol is None:
            rows.append([SCHEMA_VERSION, r.index + 1, r.name, r.source.split("\n")[0], "", "false", "true",
                         "valence", *([""] * len(cols)), _fmt(0.0)])
            print(f"warning: record {r.index + 1} invalid: {r.error}", file=err)
            continue
        rep = evaluate(write_canonical(r.mol), ctx, cascade=False)
        d = rep.as_dict()
        d["ro5"] = None if rep.ro5_pass is None else ("pass" if rep.ro5_pass else "fail")
        src = r.source if "\n" not in r.source else r.name
        rows.append([SCHEMA_VERSION, r.index + 1, r.name, src, rep.canonical_smiles, "true",
                     _fmt(rep.hard_fail), rep.gate or "", *[_fmt(d[c]) for c in cols], _fmt(rep.reward)])
    _emit_csv(rows, out)
    return EXIT_OK


def cmd_benchmark(args, out, err) -> int:
    gen = _raw_smiles(args.gen)
    ref = _raw_smiles(args.ref)
    train = _raw_smiles(args.train)
    if args.k is not None and args.k < 1:
        raise UsageError("-k must be positive")
    name = os.path.splitext(os.path.basename(args.gen))[0]
    rows = benchmark_report({name: gen}, ref, train, args.k)
    for r in rows:
        if r.warning:
            print(f"warning: {r.model}: {r.warning}", file=err)
    csv_text, json_text = to_csv(rows), to_json(rows)
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        for fname, text in (("benchmark.csv", csv_text), ("benchmark.json", json_text)):
            with open(os.path.join(args.out_dir, fname), "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    out.write(json_text if args.json else csv_text)
    return EXIT_OK


def cmd_cluster(args, out, err) -> int:
    if not 0.0 < args.threshold < 1.0:
        raise UsageError("--threshold must lie in (0, 1)")
    mols = _valid_mols(args.inp, err)
    res = cluster_diversity([morgan_fingerprint(m) for _, m in mols], args.threshold)
    labels = res.labels(len(mols))
    leaders = {c[0] for c in res.clusters}
    rows = [["schema_version", "index", "name", "canonical_smiles", "cluster", "leader"]]
    for i, (name, m) in enumerate(mols):
        rows.append([SCHEMA_VERSION, i + 1, name, write_canonical(m), labels[i], _fmt(i in leaders)])
    _emit_csv(rows, out)
    print(f"{res.n_chemotypes} clusters from {len(mols)} molecules", file=err)
    return EXIT_OK


def cmd_morph(args, out, err) -> int:
    rules = load_morph(os.path.abspath(_need_file(args.rules))) if args.rules else None
    dropped = 0
    for name, m in _valid_mols(args.inp, err):
        res = morph_variants(m, rules, args.mode)
        dropped += res.dropped
        for v, rid in res.variants:
            out.write(f"{write_canonical(v)}\t{name}\t{rid}\n")
    if dropped:
        print(f"{dropped} replacements failed to sanitize and were dropped", file=err)
    return EXIT_OK


def cmd_fragments(args, out, err) -> int:
    counts: Counter = Counter()
    for _, m in _valid_mols(args.inp, err):
        counts.update(f.smiles for f in brics_fragment(m))
    rows = [["schema_version", "fragment", "count"]]
    for frag, c in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
        rows.append([SCHEMA_VERSION, frag, c])
    _emit_csv(rows, out)
    return EXIT_OK


# -- parser -----------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so main() owns exit codes."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="molforge", description="De novo small-molecule design engine.")
    p.add_argument("--version", action="version", version=f"molforge {__version__}")
    sub = p.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("run", help="run a generation experiment from a config file")
    s.add_argument("--config", required=True, help="experiment config (JSON)")
    s.add_argument("--resume", help="checkpoint epoch directory or checkpoints root to resume from")
    s.add_argument("--threads", type=int, help="worker processes (default: MOLFORGE_THREADS or cores)")
    s.add_argument("--verbose", action="store_true", help="echo progress lines to stderr")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("score", help="score molecules with 2D modules and the reward")
    s.add_argument("--in", dest="inp", required=True, help="input .smi or .sdf file")
    s.add_argument("--modules", default="all", help=f"comma list of {','.join(MODULES)} or 'all'")
    s.add_argument("--weights", help="reward weights JSON (default: drug-likeness composite)")
    s.add_argument("--ref", help="reference .smi for novelty and similarity")
    s.set_defaults(func=cmd_score)

    s = sub.add_parser("benchmark", help="benchmark a generated set against reference and training sets")
    s.add_argument("--gen", required=True, help="generated .smi file")
    s.add_argument("--ref", required=True, help="reference .smi file")
    s.add_argument("--train", required=True, help="training .smi file")
    s.add_argument("-k", type=int, default=None, help="uniqueness cutoff (default: min(1000, batch size))")
    s.add_argument("--json", action="store_true", help="print JSON instead of CSV")
    s.add_argument("--out-dir", help="also write benchmark.csv and benchmark.json here")
    s.set_defaults(func=cmd_benchmark)

    s = sub.add_parser("cluster", help="Butina clustering into chemotypes")
    s.add_argument("--in", dest="inp", required=True, help="input .smi or .sdf file")
    s.add_argument("--threshold", type=float, default=0.35, help="Tanimoto distance cutoff in (0, 1)")
    s.set_defaults(func=cmd_cluster)

    s = sub.add_parser("morph", help="rule-based structure morphing")
    s.add_argument("--in", dest="inp", required=True, help="input .smi or .sdf file")
    s.add_argument("--rules", help="morph rule file (default: shipped rules)")
    s.add_argument("--mode", choices=MODES, default="bioisostere", help="rule family to apply")
    s.set_defaults(func=cmd_morph)

    s = sub.add_parser("fragments", help="BRICS fragment table")
    s.add_argument("--in", dest="inp", required=True, help="input .smi or .sdf file")
    s.set_defaults(func=cmd_fragments)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"error: {e}", file=err)
        return EXIT_USAGE
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)
    buf = io.StringIO()
    try:
        code = args.func(args, buf, err)
    except (UsageError, ConfigError, RuleFileError) as e:
        print(f"config error: {e}", file=err)
        return EXIT_USAGE
    except (InputError, IntegrityError, MolError) as e:
        print(f"input error: {e}", file=err)
        return EXIT_INPUT
    except Exception as e:  # noqa: BLE001 - any other failure is a runtime error
        print(f"runtime error: {type(e).__name__}: {e}", file=err)
        return EXIT_RUNTIME
    out.write(buf.getvalue())
    out.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
