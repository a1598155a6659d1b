"""End-to-end tests of the batch command-line front door."""

import json

import numpy as np
import pytest

from tpoe import SpaceTimeField, TorusDomain, save_field
from tpoe.cli import (
    EXIT_CONFIG,
    EXIT_IO,
    EXIT_OK,
    EXIT_PRECONDITION,
    main,
    parse_config,
    run_directory,
)

BASE_CONFIG = """
# demo configuration
schema_version = 1
n = 2
N = 16
Nt = 16
lambda = 1.0
q = 2.0
seed = 3
recipe = mixed
"""


@pytest.fixture
def config_file(tmp_path):
    def write(extra: str = "", name: str = "run.cfg") -> str:
        path = tmp_path / name
        path.write_text(
            BASE_CONFIG + f"output_dir = {tmp_path / 'out'}\n" + extra
        )
        return str(path)

    return write


def run_dir_of(config_path, overrides=()):
    config = parse_config(config_path, list(overrides))
    return run_directory(config)


class TestConfigParsing:
    def test_unknown_key_rejected(self, config_file):
        path = config_file(extra="bogus_key = 1\n")
        assert main(["solve", "--config", path]) == EXIT_CONFIG

    def test_bad_value_rejected(self, config_file):
        path = config_file(extra="N = sixteen\n")
        assert main(["solve", "--config", path]) == EXIT_CONFIG

    def test_missing_config_file(self, tmp_path, capsys):
        assert main(["solve", "--config", str(tmp_path / "nope.cfg")]) == EXIT_CONFIG
        record = json.loads(capsys.readouterr().err.strip())
        assert record["error"] == "ConfigError"
        assert record["exit_code"] == EXIT_CONFIG

    def test_unknown_subcommand_prints_usage(self, config_file, capsys):
        path = config_file()
        code = main(["frobnicate", "--config", path])
        assert code == 2
        assert "usage" in capsys.readouterr().err.lower()

    def test_set_overrides_change_run_directory(self, config_file):
        path = config_file()
        base = run_dir_of(path)
        other = run_dir_of(path, ["N=32"])
        assert base != other

    def test_negative_tolerance_rejected(self, config_file):
        path = config_file(extra="tol = -1e-10\n")
        assert main(["solve", "--config", path]) == EXIT_CONFIG

    def test_internal_error_exit_code(self, config_file, capsys, monkeypatch):
        import tpoe.cli as cli_module

        def boom(config, outdir):
            raise RuntimeError("synthetic failure")

        monkeypatch.setitem(cli_module.RUNNERS, "solve", boom)
        path = config_file()
        assert main(["solve", "--config", path]) == 5
        record = json.loads(capsys.readouterr().err.strip())
        assert record["error"] == "RuntimeError"


class TestSolveCommand:
    def test_recipe_solve_writes_bundle_and_summary(self, config_file):
        path = config_file()
        assert main(["solve", "--config", path]) == EXIT_OK
        outdir = run_dir_of(path)
        for name in ("u.tpf", "v.tpf", "w.tpf", "p.tpf", "summary.json"):
            assert (outdir / name).is_file()
        summary = json.loads((outdir / "summary.json").read_text())
        assert summary["residual"] <= 1e-10
        assert summary["recovery_error"] <= 1e-10
        assert summary["source"] == {"recipe": "mixed"}
        assert "lq_data" in summary["norms"]

    def test_snapshot_input_roundtrip(self, config_file, tmp_path):
        d = TorusDomain(n=2, L=2 * np.pi, N=16, T=2 * np.pi, Nt=16)
        x1, _, t = d.meshgrid()
        samples = np.zeros((2,) + d.grid_shape)
        samples[1] = np.cos(x1 + t)
        field_path = tmp_path / "forcing.tpf"
        save_field(SpaceTimeField(d, samples), field_path)
        path = config_file(extra=f"input = {field_path}\n")
        assert main(["solve", "--config", path]) == EXIT_OK
        summary = json.loads(
            (run_dir_of(path) / "summary.json").read_text()
        )
        assert summary["residual"] <= 1e-10
        assert "recovery_error" not in summary

    def test_input_domain_mismatch_is_config_error(self, config_file, tmp_path):
        d = TorusDomain(n=2, L=2 * np.pi, N=32, T=2 * np.pi, Nt=32)
        field_path = tmp_path / "forcing.tpf"
        save_field(SpaceTimeField.zeros(d, 2), field_path)
        path = config_file(extra=f"input = {field_path}\n")  # config says N=16
        assert main(["solve", "--config", path]) == EXIT_CONFIG

    def test_missing_input_snapshot_is_io_error(self, config_file, tmp_path):
        path = config_file(extra=f"input = {tmp_path / 'absent.tpf'}\n")
        assert main(["solve", "--config", path]) == EXIT_IO

    def test_incompatible_mean_surfaces_as_named_error(
        self, config_file, tmp_path, capsys
    ):
        d = TorusDomain(n=2, L=2 * np.pi, N=16, T=2 * np.pi, Nt=16)
        samples = np.zeros((2,) + d.grid_shape)
        samples[1] = 1.0  # constant forcing: no steady torus inverse
        field_path = tmp_path / "constant.tpf"
        save_field(SpaceTimeField(d, samples), field_path)
        path = config_file(extra=f"input = {field_path}\n")
        assert main(["solve", "--config", path]) == EXIT_PRECONDITION
        record = json.loads(capsys.readouterr().err.strip())
        assert record["error"] == "IncompatibleMean"
        error_file = run_dir_of(path, [f"input={field_path}"]) / "error.json"
        assert error_file.is_file()
        assert json.loads(error_file.read_text())["exit_code"] == EXIT_PRECONDITION

    def test_rerun_is_byte_identical(self, config_file):
        path = config_file()
        assert main(["solve", "--config", path]) == EXIT_OK
        outdir = run_dir_of(path)
        before = {
            p.name: p.read_bytes() for p in outdir.iterdir() if p.is_file()
        }
        assert main(["solve", "--config", path]) == EXIT_OK
        after = {p.name: p.read_bytes() for p in outdir.iterdir() if p.is_file()}
        assert before == after


class TestAnalysisCommands:
    def test_roundtrip_command(self, config_file):
        path = config_file(extra="ensemble = 3\n")
        assert main(["roundtrip", "--config", path]) == EXIT_OK
        payload = json.loads(
            (run_dir_of(path, ["ensemble=3"]) / "roundtrip.json").read_text()
        )
        assert payload["worst_relative_error"] <= 1e-10
        assert payload["generator"] == "numpy-pcg64"

    def test_transference_command(self, config_file):
        path = config_file()
        assert main(["transference", "--config", path]) == EXIT_OK
        payload = json.loads(
            (run_dir_of(path) / "transference.json").read_text()
        )
        assert payload["max_deviation"] <= 1e-15

    def test_marcinkiewicz_command(self, config_file):
        path = config_file(extra="shells = 8\ndirections = 2\n")
        assert main(["marcinkiewicz", "--config", path]) == EXIT_OK
        outdir = run_dir_of(path, ["shells=8", "directions=2"])
        lines = (outdir / "marcinkiewicz.csv").read_text().splitlines()
        assert lines[0] == "eps_bits,sup_value"
        assert len(lines) == 1 + 8
        grid = json.loads((outdir / "marcinkiewicz_grid.json").read_text())
        assert grid["grid_spec"]["shells"] == 8

    def test_sweep_command_idempotent(self, config_file):
        extra = (
            "lambdas = 0,1\nperiods = 6.283185307179586\n"
            "ensemble = 2\nshells = 6\ndirections = 2\n"
        )
        path = config_file(extra=extra)
        assert main(["sweep", "--config", path]) == EXIT_OK
        outdir = run_dir_of(
            path,
            ["lambdas=0,1", "periods=6.283185307179586", "ensemble=2",
             "shells=6", "directions=2"],
        )
        first = (outdir / "sweep.csv").read_bytes()
        first_fit = (outdir / "sweep_fit.json").read_bytes()
        assert main(["sweep", "--config", path]) == EXIT_OK
        assert (outdir / "sweep.csv").read_bytes() == first
        assert (outdir / "sweep_fit.json").read_bytes() == first_fit

    def test_empty_sweep_is_config_error(self, config_file):
        path = config_file(extra="lambdas =\n")
        assert main(["sweep", "--config", path]) == EXIT_CONFIG

    def test_convergence_command(self, config_file):
        path = config_file(extra="resolutions = 16x16,32x32\n")
        assert main(["convergence", "--config", path]) == EXIT_OK
        outdir = run_dir_of(path, ["resolutions=16x16,32x32"])
        lines = (outdir / "convergence.csv").read_text().splitlines()
        assert len(lines) == 3
