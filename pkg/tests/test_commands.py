"""Tests for the hhk command line (app/commands.py) and its exit codes."""

import json
from fractions import Fraction

import pytest

from app import commands
from app.services import scan_service
from utils.pydantic_schema import ScanReport, StageResult, VerificationReport


class TestScanCommand:
    def test_clean_scan(self, cli, runner, tmp_path):
        target = tmp_path / "scan.csv"
        result = runner.invoke(cli, ["scan", "--t", "0", "--n", "16", "--output", str(target)])
        assert result.exit_code == 0, result.output
        assert target.exists()
        assert "0 violation(s)" in result.output

    def test_resolution_too_small(self, cli, runner, tmp_path):
        result = runner.invoke(cli, ["scan", "--n", "8", "--output", str(tmp_path / "scan.csv")])
        assert result.exit_code == 1

    def test_bad_format(self, cli, runner, tmp_path):
        result = runner.invoke(cli, ["scan", "--n", "16", "--format", "xml", "--output", str(tmp_path / "scan.xml")])
        assert result.exit_code == 1

    def test_mismatched_extension(self, cli, runner, tmp_path):
        result = runner.invoke(cli, ["scan", "--n", "16", "--output", str(tmp_path / "scan.json")])
        assert result.exit_code == 1

    def test_bad_t(self, cli, runner, tmp_path):
        result = runner.invoke(cli, ["scan", "--t", "one", "--n", "16", "--output", str(tmp_path / "scan.csv")])
        assert result.exit_code == 1

    def test_t_range(self, cli, runner, tmp_path, config_class):
        target = tmp_path / "t_range.json"
        result = runner.invoke(cli, ["scan", "--t-range", "--n", "16", "--output", str(target)])
        assert result.exit_code == 0, result.output
        document = json.loads(target.read_text())
        assert [entry['t'] for entry in document['entries']] == list(config_class.T_SCAN_VALUES)
        assert set(document['negative_ts']) <= set(config_class.T_SCAN_VALUES)
        assert "K < 0 for t in" in result.output

    def test_t_range_rejects_csv(self, cli, runner, tmp_path):
        result = runner.invoke(cli, ["scan", "--t-range", "--n", "16", "--format", "csv",
                                     "--output", str(tmp_path / "t_range.csv")])
        assert result.exit_code == 1

    def test_violations_exit(self, cli, runner, tmp_path, monkeypatch):
        def fake_scan(t, n, margin, n_jobs=None):
            return ScanReport(quantity='curvature', t=float(t), resolution=n, margin=margin,
                              samples=10, violation_count=3)

        monkeypatch.setattr(scan_service, 'curvature_scan', fake_scan)
        target = tmp_path / "scan.json"
        result = runner.invoke(cli, ["scan", "--n", "16", "--format", "json", "--output", str(target)])
        assert result.exit_code == 2
        assert json.loads(target.read_text())['violation_count'] == 3


class TestCertifyCommand:
    def test_undecided_exit(self, cli, runner, tmp_path):
        target = tmp_path / "cert.json"
        result = runner.invoke(cli, ["certify", "--expr", "curvature", "--t", "1/12", "--margin", "0",
                                     "--depth", "4", "--budget", "1000", "--output", str(target)])
        assert result.exit_code == 4
        assert json.loads(target.read_text())['verdict'] == 'Undecided'

    def test_bad_sheet(self, cli, runner, tmp_path):
        result = runner.invoke(cli, ["certify", "--sheet", "2", "--output", str(tmp_path / "cert.json")])
        assert result.exit_code == 1

    def test_depth_cap(self, cli, runner, tmp_path):
        result = runner.invoke(cli, ["certify", "--depth", "41", "--output", str(tmp_path / "cert.json")])
        assert result.exit_code == 1


class TestMeshCommand:
    def test_crosscap(self, cli, runner, tmp_path):
        target = tmp_path / "crosscap.obj"
        result = runner.invoke(cli, ["mesh", "--surface", "crosscap", "--n", "8", "--output", str(target)])
        assert result.exit_code == 0, result.output
        assert target.read_text(encoding='ascii').startswith("# hhk mesh surface=crosscap")

    def test_unknown_surface(self, cli, runner, tmp_path):
        result = runner.invoke(cli, ["mesh", "--surface", "torus", "--output", str(tmp_path / "m.obj")])
        assert result.exit_code != 0


class TestIndexCommand:
    def test_sphere(self, cli, runner, tmp_path):
        target = tmp_path / "index.json"
        result = runner.invoke(cli, ["index", "--resolution", "16", "--output", str(target)])
        assert result.exit_code == 0, result.output
        document = json.loads(target.read_text())
        assert document['agrees'] is True
        assert document['index']['index'] == 1
        assert document['counts']['nu_plus'] == 1

    def test_bad_direction(self, cli, runner, tmp_path):
        result = runner.invoke(cli, ["index", "--direction", "0,1", "--output", str(tmp_path / "index.json")])
        assert result.exit_code == 1


class TestVerifyCommand:
    @pytest.mark.parametrize("exit_code", [0, 2, 4])
    def test_exit_code_is_forwarded(self, cli, runner, tmp_path, monkeypatch, exit_code):
        def fake_verification(config_class, preset, t_literal=None, seed=None):
            stage = StageResult(name='curvature_scan', passed=exit_code == 0, exit_code=exit_code, seconds=0.1)
            return VerificationReport(preset=preset, t=float(Fraction(t_literal)), t_literal=t_literal, seed=seed,
                                      passed=exit_code == 0, exit_code=exit_code, stages=[stage], seconds=0.1)

        monkeypatch.setattr(commands, 'run_verification', fake_verification)
        target = tmp_path / "verify.json"
        result = runner.invoke(cli, ["verify", "--output", str(target)])
        assert result.exit_code == exit_code
        document = json.loads(target.read_text())
        assert document['preset'] == 'quick'
        assert document['t_literal'] == '1/12'
