from __future__ import annotations

import json

import pytest

from conftest import CORPUS, FIXTURES, make_unit

from dlperf import Config, ConfigError, discover_files, load_config, parse_expectations, run_check, run_corpus
from dlperf.cli import main


def test_discover_filters_to_python_files(tmp_path):
    (tmp_path / "a.py").write_text("x = 1\n")
    (tmp_path / "b.py").write_text("y = 2\n")
    (tmp_path / "sub").mkdir()
    (tmp_path / "sub" / "c.py").write_text("z = 3\n")
    (tmp_path / "notes.txt").write_text("not code\n")
    files = discover_files([tmp_path], Config())
    assert len(files) == 3
    assert files == sorted(files)


def test_discover_exclude_glob(tmp_path):
    (tmp_path / "keep.py").write_text("x = 1\n")
    (tmp_path / "vendor").mkdir()
    (tmp_path / "vendor" / "dep.py").write_text("y = 2\n")
    files = discover_files([tmp_path], Config(exclude=("**/vendor/**",)))
    assert [f for f in files if "vendor" in f] == []
    assert len(files) == 1


def test_discover_include_glob(tmp_path):
    (tmp_path / "train.py").write_text("x = 1\n")
    (tmp_path / "infer.py").write_text("y = 2\n")
    files = discover_files([tmp_path], Config(include=("train*",)))
    assert len(files) == 1 and files[0].endswith("train.py")


def test_discover_empty_dir(tmp_path):
    assert discover_files([tmp_path], Config()) == []


def test_missing_root_is_tool_error(tmp_path, capsys):
    with pytest.raises(ConfigError):
        discover_files([tmp_path / "nope"], Config())
    assert main(["check", str(tmp_path / "nope")]) == 2


def test_discover_symlink_cycle(tmp_path):
    (tmp_path / "a.py").write_text("x = 1\n")
    (tmp_path / "loop").symlink_to(tmp_path)
    files = discover_files([tmp_path], Config())
    assert any(f.endswith("a.py") for f in files)


def test_run_check_fig1_buggy():
    diags, summary = run_check([FIXTURES / "fig1_buggy.py"])
    assert sorted(d.code for d in diags) == ["DPM001", "MOB001"]
    assert summary.exit_code == 1


def test_run_check_fig2_buggy():
    diags, summary = run_check([FIXTURES / "fig2_buggy.py"])
    assert [d.code for d in diags] == ["RNC001", "RNC001"]
    assert summary.exit_code == 1


def test_run_check_fixed_fixtures_clean():
    diags, summary = run_check([FIXTURES / "fig1_fixed.py", FIXTURES / "fig2_fixed.py"])
    assert diags == []
    assert summary.exit_code == 0
    assert summary.files_scanned == 2


def test_run_check_parse_notice_keeps_exit_zero(tmp_path):
    (tmp_path / "broken.py").write_text("def broken(:\n")
    diags, summary = run_check([tmp_path])
    assert diags == []
    assert summary.exit_code == 0
    assert summary.files_with_notices == 1


def test_parse_expectations_single():
    unit = make_unit("ds.map(f)  # expect: DPM001\n")
    exps = parse_expectations(unit)
    assert len(exps) == 1
    assert (exps[0].line, exps[0].code) == (1, "DPM001")


def test_parse_expectations_none():
    assert parse_expectations(make_unit("x = 1\n")) == []


def test_parse_expectations_two_codes_one_line():
    exps = parse_expectations(make_unit("ds.map(f)  # expect: MOB001, DPM001\n"))
    assert [e.code for e in exps] == ["MOB001", "DPM001"]
    assert {e.line for e in exps} == {1}


def test_run_corpus_bundled_corpus_passes():
    report = run_corpus(CORPUS)
    assert report.total_expected >= 30
    assert report.matched == report.total_expected
    assert report.missing == ()
    assert report.unexpected == ()
    assert report.exit_code == 0


def test_run_corpus_stale_annotation(tmp_path):
    (tmp_path / "stale.py").write_text("x = 1  # expect: RNC001\n")
    report = run_corpus(tmp_path)
    assert len(report.missing) == 1
    assert report.exit_code != 0


def test_run_corpus_unexpected_finding(tmp_path):
    (tmp_path / "surprise.py").write_text(
        "import tensorflow as tf\nfor i in r:\n    tf.matmul(a, b)\n"
    )
    report = run_corpus(tmp_path)
    assert len(report.unexpected) == 1
    assert report.exit_code != 0


def test_run_corpus_empty(tmp_path):
    report = run_corpus(tmp_path)
    assert report.total_expected == 0
    assert report.matched == 0
    assert report.exit_code == 0


def test_config_rejects_unknown_rule():
    with pytest.raises(ConfigError):
        Config(rules=("RNC001", "XYZ999"))


def test_config_rejects_negative_depth():
    with pytest.raises(ConfigError):
        Config(depth_limit=-1)


def test_config_file_roundtrip(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"rules": ["DPM001"], "depth_limit": 3, "format": "json"}))
    config = load_config(path)
    assert config.rules == ("DPM001",)
    assert config.depth_limit == 3
    assert config.format == "json"


def test_config_file_unknown_key(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"rulez": []}))
    with pytest.raises(ConfigError, match="rulez"):
        load_config(path)


def test_config_rejects_bad_severity_and_jobs():
    with pytest.raises(ConfigError, match="severity"):
        Config(severity={"RNC001": "fatal"})
    with pytest.raises(ConfigError, match="severity"):
        Config(severity={"NOPE": "warning"})
    with pytest.raises(ConfigError, match="jobs"):
        Config(jobs=0)


def test_config_file_severity_reaches_diagnostics(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"severity": {"MOB001": "error"}, "format": "json"}))
    code = main(["check", str(FIXTURES / "fig1_buggy.py"), "--config", str(cfg)])
    payload = json.loads(capsys.readouterr().out)
    severities = {d["code"]: d["severity"] for d in payload["diagnostics"]}
    assert code == 1
    assert severities == {"MOB001": "error", "DPM001": "warning"}


def test_cli_check_text(capsys):
    code = main(["check", str(FIXTURES / "fig1_buggy.py")])
    out = capsys.readouterr().out
    assert code == 1
    assert "MOB001" in out and "DPM001" in out
    assert "hint:" in out


def test_cli_check_json(capsys):
    code = main(["check", str(FIXTURES / "fig2_buggy.py"), "--format", "json"])
    payload = json.loads(capsys.readouterr().out)
    assert code == 1
    assert [d["code"] for d in payload["diagnostics"]] == ["RNC001", "RNC001"]


def test_cli_check_clean_exit_zero(capsys):
    assert main(["check", str(FIXTURES / "fig1_fixed.py")]) == 0


def test_cli_rules_filter(capsys):
    code = main(["check", str(FIXTURES / "fig1_buggy.py"), "--rules", "MOB001"])
    payload = capsys.readouterr().out
    assert code == 1
    assert "MOB001" in payload and "DPM001" not in payload


def test_cli_bad_catalog_is_tool_error(tmp_path, capsys):
    code = main(["check", str(FIXTURES / "fig1_buggy.py"), "--catalog", str(tmp_path / "nope.json")])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_cli_unknown_rule_is_tool_error(capsys):
    assert main(["check", str(FIXTURES / "fig1_buggy.py"), "--rules", "BOGUS"]) == 2


def test_cli_corpus(capsys):
    code = main(["corpus", str(CORPUS)])
    out = capsys.readouterr().out
    assert code == 0
    assert "missing=0 unexpected=0" in out


def test_cli_notices_go_to_stderr(tmp_path, capsys):
    (tmp_path / "broken.py").write_text("def broken(:\n")
    code = main(["check", str(tmp_path)])
    captured = capsys.readouterr()
    assert code == 0
    assert "parse error" in captured.err
    assert "parse error" not in captured.out
    assert "(1 with notices)" in captured.out


def test_cli_custom_catalog_extension(tmp_path, capsys):
    catalog_file = tmp_path / "extra.json"
    catalog_file.write_text(json.dumps({"node_creating": {"add": ["tensorflow.contrib_op"]}}))
    target = tmp_path / "code.py"
    target.write_text("import tensorflow as tf\nfor i in r:\n    tf.contrib_op(x)\n")
    code = main(["check", str(target), "--catalog", str(catalog_file)])
    assert code == 1
    assert "RNC001" in capsys.readouterr().out
