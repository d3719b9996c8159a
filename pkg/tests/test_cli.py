import pandas as pd

from core.statistics_manager import CSV_COLUMNS
from wss_app import cli_main

ONE_CELL = """
p: [20]
snr_db: [5.0]
bits: [1]
K: [4]
trials: 3
master_seed: 11
"""


def estimated_line(text):
    return next(line for line in text.splitlines() if "Estimated support" in line)


class TestSweepCommand:
    def test_one_cell(self, tmp_path, capsys):
        cfg = tmp_path / "one.yaml"
        cfg.write_text(ONE_CELL)
        out = tmp_path / "out.csv"
        assert cli_main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0

        lines = out.read_text().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 2
        assert lines[1].startswith("20,5.000000,1,4,3,")

    def test_flag_overrides(self, tmp_path, capsys):
        cfg = tmp_path / "one.yaml"
        cfg.write_text(ONE_CELL)
        out = tmp_path / "out.csv"
        code = cli_main(["sweep", "--config", str(cfg), "--out", str(out),
                         "--trials", "2", "--p", "12", "16", "--bits", "none", "--threads", "2"])
        assert code == 0
        df = pd.read_csv(out, keep_default_na=False)
        assert df.p.tolist() == [12, 16]
        assert df.bits.tolist() == ["none", "none"]
        assert df.trials.tolist() == [2, 2]

    def test_unknown_key_is_a_usage_error(self, tmp_path, capsys):
        cfg = tmp_path / "bad.yaml"
        cfg.write_text("cosets: [20]\n")
        assert cli_main(["sweep", "--config", str(cfg)]) == 2
        assert "unknown config key" in capsys.readouterr().err

    def test_missing_config_flag(self, capsys):
        assert cli_main(["sweep"]) == 2


class TestSenseCommand:
    def test_repeatable_output(self, capsys):
        assert cli_main(["sense", "--seed", "7"]) == 0
        first = capsys.readouterr().out
        assert cli_main(["sense", "--seed", "7"]) == 0
        assert capsys.readouterr().out == first
        assert "K_hat" in first

    def test_noiseless_unquantized(self, capsys):
        assert cli_main(["sense", "--seed", "3", "--snr", "inf", "--bits", "none", "--p", "24"]) == 0
        out = capsys.readouterr().out
        truth = next(line for line in out.splitlines() if "True support" in line).split(": ", 1)[1]
        assert estimated_line(out).split(": ", 1)[1] == truth

    def test_eigenvalue_export(self, tmp_path, capsys):
        path = tmp_path / "eigs.csv"
        assert cli_main(["sense", "--seed", "2", "--p", "10", "--eigs-out", str(path)]) == 0
        assert len(pd.read_csv(path)) == 10

    def test_parameter_error(self, capsys):
        assert cli_main(["sense", "--p", "41"]) == 2
        assert "❌" in capsys.readouterr().err

    def test_bad_bits(self, capsys):
        assert cli_main(["sense", "--bits", "zero"]) == 2

    def test_unknown_subcommand(self, capsys):
        assert cli_main(["listen"]) == 2


class TestReplayCommand:
    def test_matches_in_memory_path(self, tmp_path, capsys):
        capture = str(tmp_path / "frame.iq")
        assert cli_main(["sense", "--seed", "5", "--export", capture]) == 0
        sensed = estimated_line(capsys.readouterr().out)

        assert cli_main(["replay", capture, "--seed", "5"]) == 0
        assert estimated_line(capsys.readouterr().out) == sensed

    def test_missing_capture(self, tmp_path, capsys):
        assert cli_main(["replay", str(tmp_path / "absent.iq")]) == 2


class TestNoiseProfileCommand:
    def test_csv(self, tmp_path, capsys):
        out = tmp_path / "profile.csv"
        assert cli_main(["noise-profile", "--seed", "4", "--out", str(out)]) == 0
        df = pd.read_csv(out)
        assert len(df) == 40
        assert df.occupied.sum() == 4
