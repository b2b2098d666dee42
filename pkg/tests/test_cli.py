import json

import pytest

from recordkit.cli import main


def run(*argv):
    return main([str(a) for a in argv])


def test_fixture_then_check(tmp_path, capsys):
    out = tmp_path / "maj9.nl"
    assert run("fixture", "maj9", "-o", out) == 0
    assert run("check", out) == 0
    assert "ok" in capsys.readouterr().out


def test_check_invalid_file(tmp_path, capsys):
    bad = tmp_path / "bad.nl"
    bad.write_text("module m\ninput a\noutput y\nnot y a\nnot y a\nend")
    assert run("check", bad) == 1
    assert "duplicate driver" in capsys.readouterr().err


def test_eval_bits(tmp_path, capsys):
    nl = tmp_path / "adder.nl"
    assert run("fixture", "adder4", "-o", nl) == 0
    assert run("eval", nl, "--bits", "11110001") == 0
    out = capsys.readouterr().out
    assert "bits: 10000" in out  # 0xF + 0x1


def test_eval_assign(tmp_path, capsys):
    nl = tmp_path / "m.nl"
    nl.write_text("module m\ninput a b\noutput y\nand y a b\nend")
    assert run("eval", nl, "--assign", "a=1,b=1") == 0
    assert "y=1" in capsys.readouterr().out


def test_recordize_verify_roundtrip(tmp_path):
    src = tmp_path / "maj9.nl"
    enc = tmp_path / "maj9r2.nl"
    assert run("fixture", "maj9", "-o", src) == 0
    assert run("recordize", src, "--rand-bits", "2", "--subset", "all",
               "--grouping", "checkerboard", "-o", enc) == 0
    assert run("verify", src, enc, "--mode", "exhaustive") == 0


def test_verify_corrupted_file_fails(tmp_path, capsys):
    src = tmp_path / "and2.nl"
    src.write_text("module and2\ninput a b\noutput y\nand y a b\nend")
    enc = tmp_path / "enc.nl"
    assert run("recordize", src, "-o", enc) == 0
    text = enc.read_text().replace("xor __z_y __y_y __r1",
                                   "buf __z_y __y_y")
    enc.write_text(text)
    assert run("verify", src, enc) == 1
    assert "NOT equivalent" in capsys.readouterr().out


def test_recordize_explicit_grouping(tmp_path):
    src = tmp_path / "adder.nl"
    assert run("fixture", "adder4", "-o", src) == 0
    grouping = tmp_path / "groups.json"
    grouping.write_text(json.dumps({"a3": 1, "a2": 2, "a1": 1, "a0": 2,
                                    "b3": 1, "b2": 2, "b1": 1, "b0": 2}))
    enc = tmp_path / "enc.nl"
    assert run("recordize", src, "--rand-bits", "2",
               "--grouping", "explicit:%s" % grouping, "-o", enc) == 0
    assert run("verify", src, enc) == 0


def test_recordize_config_out(tmp_path):
    src = tmp_path / "and2.nl"
    src.write_text("module and2\ninput a b\noutput y\nand y a b\nend")
    cfg = tmp_path / "cfg.json"
    assert run("recordize", src, "-o", tmp_path / "enc.nl",
               "--config-out", cfg) == 0
    doc = json.loads(cfg.read_text())
    assert doc == {"subset": ["a", "b"], "groups": 1,
                   "assignment": {"a": 1, "b": 1}}


def test_simulate_summary_and_csv(tmp_path):
    src = tmp_path / "maj9.nl"
    enc = tmp_path / "enc.nl"
    run("fixture", "maj9", "-o", src)
    run("recordize", src, "-o", enc)
    summary = tmp_path / "s.json"
    csv_out = tmp_path / "t.csv"
    assert run("simulate", enc, "--cycles", "20", "--summary", summary,
               "--csv", csv_out) == 0
    doc = json.loads(summary.read_text())
    assert doc["cycles"] == 20
    assert csv_out.read_text().startswith("cycle,wire,value")


def test_attack_report(tmp_path):
    src = tmp_path / "maj9.nl"
    enc = tmp_path / "enc.nl"
    run("fixture", "maj9", "-o", src)
    run("recordize", src, "-o", enc)
    report = tmp_path / "leak.json"
    assert run("attack", enc, "--cycles", "2000", "--report", report) == 0
    doc = json.loads(report.read_text())
    assert doc["wires"]["__t_x1"]["mi_vs"]["input"]["x1"] < 0.05
    gradient = [s for s in doc["strategies"]
                if s["name"].startswith("gradient")]
    assert gradient and all(s["accuracy"] == 1.0 for s in gradient)


def test_trigger_rates(tmp_path, capsys):
    src = tmp_path / "maj9.nl"
    enc1 = tmp_path / "e1.nl"
    enc2 = tmp_path / "e2.nl"
    run("fixture", "maj9", "-o", src)
    run("recordize", src, "-o", enc1)
    run("recordize", src, "--rand-bits", "2", "-o", enc2)
    capsys.readouterr()
    assert run("trigger", enc1, "--pattern", "101010101",
               "--cycles", "4000") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["analytic_rate"] == 0.5
    assert abs(doc["rate"] - 0.5) < 0.03
    assert run("trigger", enc2, "--pattern", "101010101",
               "--cycles", "4000") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["analytic_rate"] == 0.25


def test_ft_sim_clean_and_faulted(tmp_path, capsys):
    src = tmp_path / "maj9.nl"
    run("fixture", "maj9", "-o", src)
    report = tmp_path / "ft.json"
    assert run("ft-sim", src, "--cycles", "100", "--report", report) == 0
    doc = json.loads(report.read_text())
    assert doc["committed_equals_reference"] is True
    assert doc["replays"] == 0

    plan = tmp_path / "plan.json"
    plan.write_text(json.dumps(
        [{"cycle": 7, "replica": 0, "wire": "y", "value": 0},
         {"cycle": 31, "replica": 2, "wire": "t5", "value": 1}]))
    assert run("ft-sim", src, "--cycles", "100", "--faults", plan,
               "--report", report, "--csv", tmp_path / "ft.csv") == 0
    doc = json.loads(report.read_text())
    assert doc["committed_equals_reference"] is True


def test_cost_report_cli(tmp_path, capsys):
    src = tmp_path / "sbox.nl"
    enc = tmp_path / "enc.nl"
    run("fixture", "aes-sbox", "-o", src)
    run("recordize", src, "-o", enc)
    report = tmp_path / "cost.json"
    assert run("cost", src, enc, "--cycles", "200", "--report", report) == 0
    doc = json.loads(report.read_text())
    assert 2.0 <= doc["ratios"]["area"] <= 3.0
    assert doc["ratios"]["untrusted_area"] == 2.0
    assert doc["ratios"]["depth_delta"] == 3.0
    assert doc["paper_reference"]["area"] == 2.4


def test_demo_image_cli(tmp_path, capsys):
    out = tmp_path / "demo"
    assert run("demo-image", "-o", out, "--variant", "record1",
               "--seed", "3", "--report", tmp_path / "rep.json") == 0
    for name in ("original.pgm", "enhanced.pgm", "leaked.pgm"):
        assert (out / name).exists()
    text = capsys.readouterr().out
    assert "same_group_edge_f1" in text


def test_usage_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        run("frobnicate")
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        run("fixture", "maj9")  # missing -o
    assert exc.value.code == 2


def test_missing_file_exits_1(tmp_path, capsys):
    assert run("check", tmp_path / "nope.nl") == 1
    assert "error:" in capsys.readouterr().err


def test_fixture_and_tree(tmp_path):
    out = tmp_path / "t.nl"
    assert run("fixture", "and-tree-n", "--n", "8", "-o", out) == 0
    assert run("check", out) == 0


def test_attack_isolation(tmp_path):
    src = tmp_path / "maj9.nl"
    enc = tmp_path / "enc.nl"
    run("fixture", "maj9", "-o", src)
    run("recordize", src, "-o", enc)
    report = tmp_path / "leak.json"
    assert run("attack", enc, "--cycles", "500", "--isolate", "1",
               "--report", report) == 0
    doc = json.loads(report.read_text())
    assert all(w.startswith(("__f1_", "__tn_")) for w in doc["wires"])
