"""Command-line interface: argument plumbing, outputs, exit codes."""

import csv
import io
import json
import subprocess
import sys

import pytest

from sqdc.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSessionCommand:
    def test_clean_session_prints_record(self, capsys):
        code, out, _ = run_cli(capsys, "session", "--s", "8", "--r", "4",
                               "--seed", "1", "--message", "10110010")
        assert code == 0
        record = json.loads(out)
        assert record["status"] == "delivered"
        assert record["recovered"] == "10110010"
        assert record["config"]["seed"] == 1

    def test_bad_config_is_exit_2(self, capsys):
        code, _, err = run_cli(capsys, "session", "--s", "4", "--r", "2",
                               "--seed", "1", "--message", "01")
        assert code == 2
        assert "error:" in err

    def test_seed_is_mandatory(self, capsys):
        with pytest.raises(SystemExit):
            main(["session", "--s", "0", "--r", "1"])


class TestSweepCommand:
    def test_spec_file_to_stdout(self, capsys, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({
            "kind": "detection_vs_r", "p_values": [1.0], "r_values": [1, 2],
            "trials": 200, "seed": 4,
        }))
        code, out, _ = run_cli(capsys, "sweep", str(spec))
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0][:2] == ["p", "r"]
        assert len(rows) == 3

    def test_overrides_apply(self, capsys, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({
            "kind": "detection_vs_r", "p_values": [1.0], "r_values": [1],
            "trials": 100, "seed": 4,
        }))
        code, out, _ = run_cli(capsys, "sweep", str(spec), "--trials", "150")
        assert code == 0
        assert list(csv.reader(io.StringIO(out)))[1][5] == "150"

    def test_invalid_spec_is_exit_2(self, capsys, tmp_path):
        spec = tmp_path / "bad.json"
        spec.write_text('{"kind": "detection_vs_r"}')
        code, _, err = run_cli(capsys, "sweep", str(spec))
        assert code == 2 and "error:" in err

    def test_missing_file_is_exit_2(self, capsys):
        code, _, err = run_cli(capsys, "sweep", "/no/such/file.json")
        assert code == 2

    def test_write_to_file(self, capsys, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({
            "kind": "efficiency", "s_values": [1000], "r_values": [15],
        }))
        dest = tmp_path / "out.csv"
        code, out, _ = run_cli(capsys, "sweep", str(spec), "--out", str(dest))
        assert code == 0 and out == ""
        assert dest.read_text().startswith("mode,s,r,s_est,alpha")


class TestOracleCommand:
    def test_decode_table_and_alias(self, capsys):
        code, out, _ = run_cli(capsys, "oracle", "decode-table")
        assert code == 0
        code2, out2, _ = run_cli(capsys, "oracle", "tc-table")
        assert out2 == out
        assert len([l for l in out.splitlines() if "->" in l]) == 9  # header + 8 rows

    def test_detection_enumeration(self, capsys):
        code, out, _ = run_cli(capsys, "oracle", "detection", "--probes", "3",
                               "--attack-prob", "1")
        assert code == 0
        assert "7/8" in out

    def test_rational_attack_prob(self, capsys):
        code, out, _ = run_cli(capsys, "oracle", "detection", "--probes", "2",
                               "--attack-prob", "3/5")
        assert code == 0
        assert "51/100" in out

    def test_bad_probability_is_exit_2(self, capsys):
        code, _, err = run_cli(capsys, "oracle", "detection", "--attack-prob", "7/5")
        assert code == 2


class TestQuantileCommand:
    def test_value(self, capsys):
        code, out, _ = run_cli(capsys, "quantile", "0.05")
        assert code == 0
        assert out.strip() == "1.6448536270"

    def test_domain_error(self, capsys):
        code, _, err = run_cli(capsys, "quantile", "1.5")
        assert code == 2


class TestNetworkedCommands:
    def test_serve_and_connect_as_separate_processes(self, tmp_path):
        """Full two-process session through the console entry point."""
        serve = subprocess.Popen(
            [sys.executable, "-m", "sqdc.cli", "serve", "--s", "8", "--r", "4",
             "--seed", "1", "--message", "10110010", "--port", "0",
             "--timeout", "20"],
            stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True,
        )
        try:
            line = serve.stderr.readline()
            assert line.startswith("listening on ")
            port = int(line.rsplit(":", 1)[1])
            connect = subprocess.run(
                [sys.executable, "-m", "sqdc.cli", "connect", "--s", "8", "--r", "4",
                 "--seed", "1", "--host", "127.0.0.1", "--port", str(port),
                 "--timeout", "20"],
                capture_output=True, text=True, timeout=30,
            )
            out, _ = serve.communicate(timeout=30)
        finally:
            if serve.poll() is None:
                serve.kill()
        assert connect.returncode == 0
        bob_record = json.loads(connect.stdout)
        assert bob_record["status"] == "delivered"
        assert bob_record["recovered"] == "10110010"
        alice_record = json.loads(out)
        assert alice_record["status"] == "delivered"
