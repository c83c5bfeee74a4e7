import json

import click
import pytest
from click.testing import CliRunner

from krtrace.cli import cli, parse_args
from krtrace.core.config import Command, OutputFormat
from krtrace.core.weyl import AdmLabel


@pytest.fixture
def runner():
    """Create CLI test runner"""
    return CliRunner()


def test_parse_verify():
    """Test parsing a verify command line"""
    config = parse_args(["verify", "--p", "3", "--r", "2", "--workers", "4"])
    assert config.command == Command.VERIFY
    assert (config.p, config.r, config.q) == (3, 2, 9)
    assert config.workers == 4


def test_parse_trace_and_phi():
    """Test parsing point and torus literals"""
    config = parse_args(["trace", "--point", "0,0,1,1,0", "--p", "3"])
    assert config.point == (0, 0, 1, 1, 0)
    config = parse_args(["phi", "--s", "1,1,1,1", "--w", "s02tau", "--p", "3"])
    assert config.s == (1, 1, 1, 1)
    assert config.w == AdmLabel.S02


def test_parse_json_flag(tmp_path):
    """Test that --json selects JSON output to a file"""
    path = tmp_path / "report.json"
    config = parse_args(["verify", "--p", "3", "--json", str(path)])
    assert config.output_format == OutputFormat.JSON
    assert config.output_path == path


@pytest.mark.parametrize(
    "argv,message",
    [
        (["verify", "--p", "4"], "p must be an odd prime"),
        (["verify", "--p", "2"], "p must be an odd prime"),
        (["trace", "--point", "0,0", "--p", "3"], "Expected 5"),
        (["phi", "--s", "1,1,1,1", "--w", "s3tau", "--p", "3"], "Unknown admissible element"),
    ],
)
def test_parse_rejects_bad_values(argv, message):
    """Test option validation errors"""
    with pytest.raises(click.BadParameter, match=message):
        parse_args(argv)


def test_parse_rejects_unknown_flag():
    """Test that unknown flags are usage errors"""
    with pytest.raises(click.UsageError):
        parse_args(["verify", "--p", "3", "--bogus"])


def test_parse_rejects_codes_out_of_range():
    """Test that codes must lie in [0, q)"""
    with pytest.raises(click.UsageError, match="codes must lie in"):
        parse_args(["trace", "--point", "0,0,0,0,3", "--p", "3"])


def test_adm_command(runner):
    """Test the admissible-set listing"""
    result = runner.invoke(cli, ["adm"])
    assert result.exit_code == 0
    assert "elements: 13" in result.output
    assert "s02τ" in result.output


def test_strata_csv(runner):
    """Test the census as CSV"""
    result = runner.invoke(cli, ["strata", "--p", "3", "--format", "csv"])
    assert result.exit_code == 0
    lines = result.output.strip().splitlines()
    assert lines[0] == "w,length,count,predicted"
    assert len(lines) == 14


def test_trace_command(runner):
    """Test a trace with fiber detail"""
    result = runner.invoke(cli, ["trace", "--point", "0,0,0,0,0", "--p", "3"])
    assert result.exit_code == 0
    assert "trace: -20" in result.output
    assert "tower" in result.output


def test_trace_off_special_fiber(runner):
    """Test that a generic point is a usage error"""
    result = runner.invoke(cli, ["trace", "--point", "1,1,0,0,0", "--p", "3"])
    assert result.exit_code == 2
    assert "not on the special fiber" in result.output


def test_phi_command(runner):
    """Test the scaled test function"""
    result = runner.invoke(cli, ["phi", "--s", "1,1,1,1", "--w", "tau", "--p", "3"])
    assert result.exit_code == 0
    assert "-20" in result.output

    result = runner.invoke(cli, ["phi", "--s", "1,0,1,1", "--w", "tau", "--p", "3"])
    assert result.exit_code == 2


def test_phi_accepts_subscript_labels(runner):
    """Test that s₀₂τ and s02tau name the same element"""
    ascii_run = runner.invoke(cli, ["phi", "--s", "1,1,1,1", "--w", "s02tau", "--p", "3"])
    subscript = runner.invoke(cli, ["phi", "--s", "1,1,1,1", "--w", "s₀₂τ", "--p", "3"])
    assert subscript.exit_code == 0
    assert subscript.output == ascii_run.output


def test_atlas_commands(runner):
    """Test the atlas listing and validation"""
    result = runner.invoke(cli, ["atlas", "--p", "3"])
    assert result.exit_code == 0
    assert "E0" in result.output

    result = runner.invoke(cli, ["atlas", "--validate", "--p", "3"])
    assert result.exit_code == 0
    assert "verdict: pass" in result.output


def test_drinfeld_command(runner):
    """Test the Drinfeld check"""
    result = runner.invoke(cli, ["drinfeld", "--n", "2", "--p", "3"])
    assert result.exit_code == 0
    assert "points: 5" in result.output
    assert "verdict: pass" in result.output


def test_verify_command(runner):
    """Test a passing verification"""
    result = runner.invoke(cli, ["verify", "--p", "3", "--no-timing"])
    assert result.exit_code == 0
    assert "points: 71" in result.output
    assert "verdict: pass" in result.output
    assert "elapsed" not in result.output


def test_verify_json_file(runner, tmp_path):
    """Test writing the verification report as JSON"""
    path = tmp_path / "report.json"
    result = runner.invoke(cli, ["verify", "--p", "3", "--json", str(path)])
    assert result.exit_code == 0
    assert result.output == ""
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["verdict"] == "pass"
    assert set(data) >= {"params", "strata", "verdict"}
    assert data["strata"][0] == {"label": "s010τ", "count": 14, "pass": 14, "fail": 0}


def test_verify_workers_same_output(runner):
    """Test that worker count does not change the report"""
    one = runner.invoke(cli, ["verify", "--p", "3", "--no-timing"])
    two = runner.invoke(cli, ["verify", "--p", "3", "--no-timing", "--workers", "2"])
    assert one.exit_code == two.exit_code == 0
    assert one.output == two.output


def test_verify_failure_exit_code(runner, monkeypatch):
    """Test that a failed check exits with status 1"""
    monkeypatch.setattr("krtrace.core.verify.phi_scaled", lambda s, w, ctx: 0)
    result = runner.invoke(cli, ["verify", "--p", "3", "--no-timing"])
    assert result.exit_code == 1
    assert "verdict: fail" in result.output
    assert "witness: (0,0,0,0,0)" in result.output


def test_limit_refusal(runner):
    """Test that the enumeration limit exits with status 2"""
    result = runner.invoke(cli, ["verify", "--p", "3", "--limit", "10"])
    assert result.exit_code == 2
    assert "exceeds the enumeration limit" in result.output

    result = runner.invoke(cli, ["verify", "--p", "3", "--limit", "10", "--force"])
    assert result.exit_code == 0


def test_limit_from_environment(runner):
    """Test KRTRACE_LIMIT and its override by the flag"""
    result = runner.invoke(cli, ["strata", "--p", "3"], env={"KRTRACE_LIMIT": "10"})
    assert result.exit_code == 2

    result = runner.invoke(
        cli, ["strata", "--p", "3", "--limit", "1000"], env={"KRTRACE_LIMIT": "10"}
    )
    assert result.exit_code == 0


def test_format_from_environment(runner):
    """Test KRTRACE_FORMAT"""
    result = runner.invoke(cli, ["drinfeld", "--n", "2", "--p", "3"], env={"KRTRACE_FORMAT": "json"})
    assert result.exit_code == 0
    assert json.loads(result.output)["total"] == 5


def test_identities_command(runner):
    """Test the identity suite"""
    result = runner.invoke(cli, ["identities", "--p", "3"])
    assert result.exit_code == 0
    assert "verdict: pass" in result.output


def test_bad_prime_exit_code(runner):
    """Test that a bad p is a usage error"""
    result = runner.invoke(cli, ["verify", "--p", "4"])
    assert result.exit_code == 2
    assert "p must be an odd prime" in result.output


def test_output_file(runner, tmp_path):
    """Test --output"""
    path = tmp_path / "adm.txt"
    result = runner.invoke(cli, ["adm", "-o", str(path)])
    assert result.exit_code == 0
    assert "s010τ" in path.read_text(encoding="utf-8")
