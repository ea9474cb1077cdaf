import re

import pytest

from uavpwe.cli import NO_SIGNAL, RunFlags, format_power, main, run
from uavpwe.scenario import golden_scenario, golden_text, parse_scenario

FACING = """
[scene]
name=facing rays=2000
[tx]
x=0 y=0 power_dbm=-30 lobe=40 az=0
[rx]
x=5 y=0 lobe=40 az=180
"""

# the only slot is behind the wall and the finite inventory cannot serve it
BLOCKED = golden_text().replace("mode=ideal", "mode=finite\nunit id=x kind=steer from=100 to=101")

DBM = re.compile(r"received power: (-?\d+\.\d+) dBm")


def test_format_power():
    assert format_power(0.0) == NO_SIGNAL
    assert format_power(1e-3) == "-30.00 dBm"


class TestRun:
    def test_baseline_no_signal(self):
        rep = run(golden_scenario(), RunFlags(rays=2_000, no_pwe=True))
        assert rep.exit_code == 0
        assert rep.text.rstrip().endswith("received power: No signal")
        assert rep.plan is None

    def test_default_run(self):
        rep = run(golden_scenario(), RunFlags(rays=5_000))
        assert rep.exit_code == 0
        assert rep.plan.complete
        assert "plan: complete" in rep.text
        assert "path: tx -> s2 -> rx" in rep.text
        value = float(DBM.search(rep.text).group(1))
        assert -49.87 - 15 <= value <= -49.87 + 15

    def test_facing_bounded_by_tx_power(self):
        rep = run(parse_scenario(FACING))
        value = float(DBM.search(rep.text).group(1))
        assert value <= -30.0
        assert rep.plan.complete and rep.plan.assignments == []

    def test_infeasible_exit_code(self):
        rep = run(parse_scenario(BLOCKED), RunFlags(rays=1_000))
        assert rep.exit_code == 2
        assert "plan: infeasible" in rep.text
        assert NO_SIGNAL in rep.text

    def test_flags_override(self):
        rep = run(golden_scenario(), RunFlags(rays=1_000, mode="friis", max_bounces=3))
        assert "mode: friis  rays: 1000  max_bounces: 3" in rep.text

    def test_byte_identical(self):
        a = run(golden_scenario(), RunFlags(rays=3_000)).text
        b = run(golden_scenario(), RunFlags(rays=3_000)).text
        assert a == b

    def test_energy_budget_failure(self):
        text = golden_text().replace("range=60", "range=1")
        rep = run(parse_scenario(text), RunFlags(rays=1_000))
        assert rep.exit_code == 2
        assert "energy" in rep.text


class TestMain:
    def test_run_golden(self, capsys):
        assert main(["run", "golden", "--rays", "2000"]) == 0
        out = capsys.readouterr()
        assert "plan: complete" in out.out
        assert out.err == ""

    def test_no_pwe(self, capsys):
        assert main(["run", "golden", "--rays", "1000", "--no-pwe"]) == 0
        assert "received power: No signal" in capsys.readouterr().out

    def test_timing_goes_to_stderr(self, capsys):
        main(["run", "golden", "--rays", "1000", "--timing"])
        out = capsys.readouterr()
        assert "timing" not in out.out
        assert "timing simulate" in out.err

    def test_missing_file(self, capsys, tmp_path):
        assert main(["run", str(tmp_path / "nope.pwe")]) == 1
        assert "error" in capsys.readouterr().err

    def test_parse_error(self, capsys, tmp_path):
        f = tmp_path / "bad.pwe"
        f.write_text("[tx]\nwhat=1\n")
        assert main(["run", str(f)]) == 1
        assert "line 2" in capsys.readouterr().err

    def test_infeasible(self, tmp_path):
        f = tmp_path / "blocked.pwe"
        f.write_text(BLOCKED)
        assert main(["run", str(f), "--rays", "500"]) == 2

    def test_check_prints_canonical(self, capsys, tmp_path):
        f = tmp_path / "g.pwe"
        f.write_text(golden_text())
        assert main(["check", str(f)]) == 0
        text = capsys.readouterr().out
        assert parse_scenario(text) == golden_scenario()

    def test_golden_command(self, capsys):
        assert main(["golden"]) == 0
        assert capsys.readouterr().out == golden_text()

    def test_svg_flag(self, tmp_path):
        out = tmp_path / "run.svg"
        assert main(["run", "golden", "--rays", "500", "--svg", str(out)]) == 0
        assert out.read_text().startswith("<?xml")

    def test_bad_flag_value(self):
        with pytest.raises(SystemExit):
            main(["run", "golden", "--mode", "magic"])
