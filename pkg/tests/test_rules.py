import pytest

from molforge.scoring2d import RuleFileError, load_mcf
from molforge.scoring2d.rules import load_morph

import rulecheck


def test_every_shipped_rule_has_positive_and_negative():
    assert rulecheck.coverage_failures() == []


def test_verdicts_invariant_under_reordering():
    assert rulecheck.reorder_failures(n_perm=3) == []


def test_rule_counts():
    shipped = rulecheck.shipped()
    assert len(shipped["mcf_rules.txt"]) >= 40
    assert len({r.id for r in shipped["mcf_rules.txt"]}) == len(shipped["mcf_rules.txt"])


def test_bad_rule_file_fails_at_load(tmp_path, monkeypatch):
    (tmp_path / "bad_mcf.txt").write_text("r1\thard\t[C@H]\tchiral query\n")
    monkeypatch.setenv("MOLFORGE_DATA_DIR", str(tmp_path))
    with pytest.raises(RuleFileError, match="does not compile"):
        load_mcf("bad_mcf.txt")
    (tmp_path / "dup.txt").write_text("r1\thard\tC\ta\nr1\tsoft\tN\tb\n")
    with pytest.raises(RuleFileError, match="duplicate"):
        load_mcf("dup.txt")
    (tmp_path / "bad_morph.txt").write_text("m1\tbioisostere\tC(=O)O\t9:*C\tx\n")
    with pytest.raises(RuleFileError):
        load_morph("bad_morph.txt")
