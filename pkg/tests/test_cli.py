"""Command line behaviour: exit codes, artifacts, scripted plays."""

import filecmp
import json
from pathlib import Path

from dutiful.cli import main

SPECS = Path(__file__).resolve().parent.parent / "specs"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestCheck:
    def test_realizable_exits_zero(self, capsys):
        code, out, _ = run(capsys, "check", str(SPECS / "minimal.spec"))
        assert code == 0
        assert "REALIZABLE" in out and "UNREALIZABLE" not in out

    def test_unrealizable_exits_one(self, capsys):
        code, out, _ = run(capsys, "check", str(SPECS / "unrealizable.spec"))
        assert code == 1
        assert "UNREALIZABLE" in out

    def test_env_unrealizable_exits_two(self, capsys):
        code, out, err = run(capsys, "check", str(SPECS / "env_unrealizable.spec"))
        assert code == 2
        assert "ENV-UNREALIZABLE" in out + err

    def test_missing_file_exits_three(self, capsys):
        code, _, err = run(capsys, "check", "no-such-file.spec")
        assert code == 3
        assert err

    def test_bad_spec_exits_three(self, capsys, tmp_path):
        bad = tmp_path / "bad.spec"
        bad.write_text("vars env: a\n")
        code, _, err = run(capsys, "check", str(bad))
        assert code == 3

    def test_further_pair_is_reported(self, capsys):
        code, out, _ = run(capsys, "check", str(SPECS / "hallway.spec"))
        assert code == 0
        assert "ACCEPTED" in out


class TestSynth:
    def test_artifacts_and_determinism(self, capsys, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run(capsys, "synth", str(SPECS / "minimal.spec"), "-o", str(a))[0] == 0
        assert run(capsys, "synth", str(SPECS / "minimal.spec"), "-o", str(b))[0] == 0
        names = ["product.dot", "regions.json", "T.json", "T_r.json"]
        for name in names:
            assert (a / name).is_file()
            assert filecmp.cmp(a / name, b / name, shallow=False), name

    def test_unrealizable_still_writes_the_product(self, capsys, tmp_path):
        out = tmp_path / "u"
        code, _, _ = run(capsys, "synth", str(SPECS / "unrealizable.spec"), "-o", str(out))
        assert code == 1
        assert (out / "product.dot").is_file()
        regions = json.loads((out / "regions.json").read_text())
        assert regions["agn"] is None
        assert not (out / "T.json").exists()

    def test_reserved_stop_adds_a_fresh_prop(self, capsys, tmp_path):
        out = tmp_path / "r"
        code, _, _ = run(
            capsys, "synth", str(SPECS / "minimal.spec"), "-o", str(out), "--reserved-stop"
        )
        assert code == 0
        t = json.loads((out / "T.json").read_text())
        tau_ys = {y for row in t["tau"].values() for ys in row.values() for y in ys}
        assert any("halt" in y for y in tau_ys)


class TestPlay:
    def test_scripted_play_prints_rounds_and_verdicts(self, capsys, tmp_path):
        script = tmp_path / "s.json"
        script.write_text(json.dumps({"env": {"kind": "random", "seed": 7}}))
        code, out, _ = run(
            capsys, "play", str(SPECS / "minimal.spec"), "--script", str(script)
        )
        assert code == 0
        assert "round 1:" in out and "stop after round" in out
        verdict = json.loads(out.strip().splitlines()[-1])
        assert verdict["duty_satisfied"] is True

    def test_scripted_env_moves(self, capsys, tmp_path):
        script = tmp_path / "s.json"
        script.write_text(
            json.dumps({"env": {"kind": "scripted", "moves": [["rain"], []]},
                        "events": [{"round": 1, "action": "exercise"}]})
        )
        code, out, _ = run(
            capsys, "play", str(SPECS / "minimal.spec"), "--script", str(script)
        )
        assert code == 0
        verdict = json.loads(out.strip().splitlines()[-1])
        assert verdict["right_satisfied"] is True

    def test_inject_event_uses_the_spec_files_pair(self, capsys, tmp_path):
        script = tmp_path / "s.json"
        script.write_text(
            json.dumps({"env": {"kind": "random", "seed": 7},
                        "events": [{"round": 1, "action": "inject"}]})
        )
        code, out, _ = run(
            capsys, "play", str(SPECS / "hallway.spec"), "--script", str(script)
        )
        assert code == 0
        assert "inject accepted" in out
        verdict = json.loads(out.strip().splitlines()[-1])
        assert verdict["further_duty_satisfied"] is True

    def test_inject_without_any_pair_is_an_input_error(self, capsys, tmp_path):
        script = tmp_path / "s.json"
        script.write_text(
            json.dumps({"env": {"kind": "random", "seed": 7},
                        "events": [{"round": 0, "action": "inject"}]})
        )
        code, _, err = run(
            capsys, "play", str(SPECS / "minimal.spec"), "--script", str(script)
        )
        assert code == 3

    def test_play_on_unrealizable_spec_exits_one(self, capsys, tmp_path):
        script = tmp_path / "s.json"
        script.write_text(json.dumps({"env": {"kind": "random", "seed": 7}}))
        code, _, _ = run(
            capsys, "play", str(SPECS / "unrealizable.spec"), "--script", str(script)
        )
        assert code == 1


class TestReport:
    def test_report_writes_csv_and_figures(self, capsys, tmp_path):
        out = tmp_path / "rep"
        code, _, _ = run(
            capsys, "report", str(SPECS / "minimal.spec"), "-o", str(out),
            "--samples", "5", "--seed", "1"
        )
        assert code == 0
        assert (out / "summary.csv").is_file()
        for name in ("sizes.png", "layers.png", "plays.png"):
            assert (out / name).stat().st_size > 0
        rows = dict(
            line.split(",", 1)
            for line in (out / "summary.csv").read_text().strip().splitlines()[1:]
        )
        assert rows["realizable"] == "True"
        assert rows["plays_sampled"] == "5"
