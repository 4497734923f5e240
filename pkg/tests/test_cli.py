import csv
import io
import json

import pytest

from molforge import __version__
from molforge.cli import MODULE_COLUMNS, main

MOLS = ["CC(=O)Nc1ccc(O)cc1", "c1ccccc1", "CCO", "C1CC", "O=C(O)c1ccccc1OC(C)=O"]


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def smi(tmp_path):
    p = tmp_path / "in.smi"
    p.write_text("".join(f"{s}\tm{i}\n" for i, s in enumerate(MOLS)))
    return str(p)


def test_help_and_version(capsys):
    assert cli("--help")[0] == 0
    assert main(["--version"]) == 0
    assert __version__ in capsys.readouterr().out


def test_usage_errors(smi):
    assert cli()[0] == 2
    assert cli("frobnicate")[0] == 2
    assert cli("score")[0] == 2
    assert cli("score", "--in", "/nonexistent.smi")[0] == 2
    assert cli("score", "--in", smi, "--modules", "ro5,bogus")[0] == 2
    assert cli("score", "--in", smi, "--weights", "{broken")[0] == 2
    code, out, err = cli("cluster", "--in", smi, "--threshold", "1.5")
    assert code == 2 and out == "" and err


def test_score_flags_invalid_rows(smi):
    code, out, _ = cli("score", "--in", smi, "--modules", "ro5,flex")
    assert code == 0
    table = rows(out)
    assert [r["name"] for r in table] == ["m0", "m1", "m2", "m3", "m4"]
    assert [r["valid"] for r in table] == ["true", "true", "true", "false", "true"]
    assert table[1]["ro5"] == "pass" and table[1]["flex"] == "0.000000"
    assert table[3]["canonical_smiles"] == "" and table[0]["schema_version"] == "1"


def test_score_all_is_union_of_modules(smi):
    full = rows(cli("score", "--in", smi, "--modules", "all")[1])
    for module, cols in MODULE_COLUMNS.items():
        part = rows(cli("score", "--in", smi, "--modules", module)[1])
        for a, b in zip(full, part):
            assert [a[c] for c in cols] == [b[c] for c in cols], module


def test_benchmark_command(tmp_path, seed_1k):
    for name, mols in (("gen", seed_1k[:30]), ("ref", seed_1k[30:60]), ("train", seed_1k[:10])):
        (tmp_path / f"{name}.smi").write_text("\n".join(mols) + "\n")
    args = ["benchmark", "--gen", str(tmp_path / "gen.smi"), "--ref", str(tmp_path / "ref.smi"),
            "--train", str(tmp_path / "train.smi"), "-k", "20"]
    code, out, _ = cli(*args, "--out-dir", str(tmp_path / "bench"))
    assert code == 0
    row = rows(out)[0]
    assert row["k"] == "20" and float(row["validity"]) == 1.0
    doc = json.loads(cli(*args, "--json")[1])
    assert doc["rows"][0]["n_gen"] == 30
    assert (tmp_path / "bench" / "benchmark.csv").read_text() == out


def test_cluster_command(smi):
    code, out, _ = cli("cluster", "--in", smi)
    assert code == 0
    table = rows(out)
    assert len(table) == 4
    leaders = [r for r in table if r["leader"] == "true"]
    assert len(leaders) == len({r["cluster"] for r in table})


def test_morph_command(tmp_path):
    p = tmp_path / "acid.smi"
    p.write_text("OC(=O)c1ccccc1\tbenzoic\n")
    code, out, _ = cli("morph", "--in", str(p))
    assert code == 0
    variants = [line.split("\t") for line in out.splitlines()]
    assert variants and all(v[1] == "benzoic" for v in variants)
    assert any("nn" in v[0] for v in variants)
    bad = tmp_path / "bad.txt"
    bad.write_text("not a rule\n")
    assert cli("morph", "--in", str(p), "--rules", str(bad))[0] == 2


def test_fragments_command(smi):
    code, out, _ = cli("fragments", "--in", smi)
    assert code == 0
    table = rows(out)
    counts = [int(r["count"]) for r in table]
    assert counts == sorted(counts, reverse=True) and sum(counts) >= 4


def test_run_command(tmp_path, seed_1k):
    refs = tmp_path / "refs.smi"
    refs.write_text("\n".join(seed_1k[:60]) + "\n")
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 3, "reference_ligands": "refs.smi", "output_dir": "out",
                               "budgets": {"epochs": 2, "candidates_per_model_per_epoch": 10}}))
    code, out, _ = cli("run", "--config", str(cfg), "--threads", "1")
    assert code == 0
    assert json.loads(out)["epochs_completed"] == 2
    first = (tmp_path / "out" / "ranked.csv").read_bytes()
    assert cli("run", "--config", str(cfg))[0] == 0
    assert (tmp_path / "out" / "ranked.csv").read_bytes() == first
    manifest = tmp_path / "out" / "checkpoints" / "epoch_0001" / "MANIFEST.json"
    manifest.write_text("{oops")
    code, out, err = cli("run", "--config", str(cfg), "--resume", str(manifest.parent))
    assert code == 3 and out == "" and err


def test_run_bad_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"seed": 1}')
    assert cli("run", "--config", str(cfg))[0] == 2
    assert cli("run", "--config", str(tmp_path / "missing.json"))[0] == 2
