"""Command-line surface."""

import json

import pytest

from kinlab.cli import main


@pytest.fixture
def tiny_config(tmp_path):
    path = tmp_path / "tiny.cfg"
    path.write_text(
        "[model]\nkind = relaxation_bounded\nvelocity_nodes = 8\n"
        "[grid]\nx_max = 100\ndx = 0.5\n"
        "[time]\nt_max = 20\n"
        "[diagnostics]\nsample_t0 = 0.5\ndecades = 10\n"
        "[output]\nname = cli_tiny\n"
    )
    return path


class TestCli:
    def test_run_subcommand(self, tiny_config, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(["run", str(tiny_config), "--out", str(out)])
        captured = capsys.readouterr().out
        assert (out / "manifest.json").exists()
        assert "cli_tiny" in captured
        # asymptotic fits cannot pass at t = 20; hard errors would exit 1
        assert code in (0, 2)

    def test_run_invalid_config_exits_nonzero(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text("[grid]\ndx = -0.1\n")
        code = main(["run", str(bad), "--out", str(tmp_path / "o")])
        assert code == 1
        assert "dx" in capsys.readouterr().err

    def test_nash_subcommand(self, tmp_path, capsys):
        out = tmp_path / "nash_out"
        code = main(["nash", "--count", "24", "--out", str(out)])
        assert code == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["runs"][0]["kind"] == "nash"

    def test_heat_subcommand_and_report(self, tmp_path, capsys):
        out = tmp_path / "heat_out"
        code = main(["heat", "--mode", "half", "--t-max", "500", "--dx", "0.25",
                     "--out", str(out)])
        assert code == 0
        code = main(["report", str(out)])
        assert code == 0
        assert "heat_half_d1" in capsys.readouterr().out

    def test_report_flags_corruption(self, tmp_path, capsys):
        out = tmp_path / "x"
        main(["nash", "--count", "24", "--out", str(out)])
        victim = next(p for p in out.iterdir() if p.suffix == ".csv")
        victim.write_bytes(victim.read_bytes() + b"tamper\n")
        code = main(["report", str(out)])
        assert code == 1
        assert "checksum" in capsys.readouterr().err
