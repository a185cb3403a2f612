"""Config loading, artifact layout, exit codes, and rerun determinism."""

import hashlib
import json
import subprocess
import sys

import pytest

from decouplab import cli
from decouplab.errors import ConfigError


def write_config(tmp_path, name="cfg.json", **payload):
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return p


def tiny_expect_config(tmp_path, out, seed=7, name="cfg.json"):
    return write_config(
        tmp_path, name=name, experiment="decouple-expect",
        dims={"a": 2, "r": 2}, samples=6, seed=seed, output_dir=str(out),
    )


class TestLoadConfig:
    def test_minimal(self, tmp_path):
        p = write_config(tmp_path, experiment="entropy", dims={"a": 2, "b": 2})
        cfg = cli.load_config(p)
        assert cfg.experiment == "entropy"
        assert cfg.samples == 200
        assert cfg.out_path.name == "entropy"

    def test_unknown_keys_listed(self, tmp_path):
        p = write_config(tmp_path, experiment="entropy", smaples=3, foo=1)
        with pytest.raises(ConfigError) as err:
            cli.load_config(p)
        assert "foo" in str(err.value) and "smaples" in str(err.value)

    def test_json_error_has_position(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"experiment": "entropy",\n  "samples": }\n')
        with pytest.raises(ConfigError) as err:
            cli.load_config(p)
        assert "line 2" in str(err.value)

    def test_top_level_must_be_object(self, tmp_path):
        p = tmp_path / "arr.json"
        p.write_text("[1, 2]")
        with pytest.raises(ConfigError):
            cli.load_config(p)

    def test_missing_experiment(self, tmp_path):
        p = write_config(tmp_path, samples=5)
        with pytest.raises(ConfigError) as err:
            cli.load_config(p)
        assert err.value.field == "experiment"

    def test_probs_coerced(self, tmp_path):
        p = write_config(tmp_path, experiment="typicality", probs=[0.5, 0.5],
                         n=4)
        cfg = cli.load_config(p)
        assert cfg.probs == (0.5, 0.5)


class TestConfigValidation:
    def test_unknown_experiment(self):
        with pytest.raises(ConfigError) as err:
            cli.ExperimentConfig(experiment="decouple")
        assert err.value.field == "experiment"

    @pytest.mark.parametrize("overrides,field", [
        ({"samples": 0}, "samples"),
        ({"epsilon": -0.1}, "epsilon"),
        ({"delta": -1.0}, "delta"),
        ({"kappa": 0.0}, "kappa"),
        ({"t": 0}, "t"),
        ({"n": 0}, "n"),
        ({"dims": {"a": 2.5}}, "dims"),
    ])
    def test_field_errors(self, overrides, field):
        with pytest.raises(ConfigError) as err:
            cli.ExperimentConfig(experiment="entropy", **overrides)
        assert err.value.field == field

    def test_default_output_dir(self):
        cfg = cli.ExperimentConfig(experiment="fqsw")
        assert str(cfg.out_path) == "runs/fqsw"


class TestValidateCommand:
    def test_ok(self, tmp_path, capsys):
        p = write_config(tmp_path, experiment="typicality", n=4)
        assert cli.main(["validate", str(p)]) == 0
        assert "ok:" in capsys.readouterr().out

    def test_validate_does_not_run(self, tmp_path):
        out = tmp_path / "never"
        p = tiny_expect_config(tmp_path, out)
        assert cli.main(["validate", str(p)]) == 0
        assert not out.exists()

    def test_missing_file(self, tmp_path, capsys):
        assert cli.main(["validate", str(tmp_path / "nope.json")]) == 2
        assert "error" in capsys.readouterr().err

    def test_bad_config(self, tmp_path, capsys):
        p = write_config(tmp_path, experiment="entropy", samples=-3)
        assert cli.main(["validate", str(p)]) == 2
        assert "samples" in capsys.readouterr().err

    def test_missing_subcommand(self):
        with pytest.raises(SystemExit):
            cli.main([])


class TestRunArtifacts:
    def test_three_files_and_echo(self, tmp_path):
        out = tmp_path / "run1"
        p = tiny_expect_config(tmp_path, out)
        assert cli.main(["run", str(p)]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["status"] == "complete"
        assert manifest["config"]["experiment"] == "decouple-expect"
        assert manifest["config"]["seed"] == 7
        summary = json.loads((out / "summary.json").read_text())
        assert summary["bound_holds"] is True
        assert summary["mean_f"] <= summary["expectation_bound"] + 1e-6
        lines = (out / "results.csv").read_text().splitlines()
        assert lines[0] == "experiment,seed,sample_index,value"
        assert len(lines) == 1 + 6

    def test_series_sorted_by_name(self, tmp_path):
        out = tmp_path / "run2"
        p = write_config(
            tmp_path, experiment="decouple-tail", dims={"a": 2, "r": 2},
            samples=3, seed=1, output_dir=str(out),
        )
        assert cli.main(["run", str(p)]) == 0
        rows = (out / "results.csv").read_text().splitlines()[1:]
        names = [r.split(",")[0] for r in rows]
        assert names == ["decouple-tail:f"] * 3 + ["decouple-tail:g"] * 3

    def test_output_dir_override(self, tmp_path):
        configured = tmp_path / "configured"
        actual = tmp_path / "actual"
        p = tiny_expect_config(tmp_path, configured)
        assert cli.main(["run", str(p), "--output-dir", str(actual)]) == 0
        assert actual.joinpath("summary.json").exists()
        assert not configured.exists()

    def test_failed_run_leaves_manifest(self, tmp_path, capsys):
        out = tmp_path / "run3"
        p = write_config(
            tmp_path, experiment="design-verify", t=1, samples=4,
            ensemble={"kind": "enumerated", "name": "pauli", "n_qubits": 3},
            output_dir=str(out),
        )
        assert cli.main(["run", str(p)]) == 3
        assert "computation error" in capsys.readouterr().err
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["status"] == "failed"
        assert "DomainError" in manifest["error"]
        assert not (out / "summary.json").exists()

    def test_config_error_in_driver_exits_two(self, tmp_path, capsys):
        out = tmp_path / "run4"
        p = write_config(
            tmp_path, experiment="design-verify", t=1, samples=4,
            output_dir=str(out),
        )
        assert cli.main(["run", str(p)]) == 2
        assert "ensemble" in capsys.readouterr().err

    def test_design_verify_exact_pauli(self, tmp_path):
        out = tmp_path / "run5"
        p = write_config(
            tmp_path, experiment="design-verify", t=1, samples=4,
            ensemble={"kind": "enumerated", "name": "pauli", "n_qubits": 1},
            output_dir=str(out),
        )
        assert cli.main(["run", str(p)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["design"]["lambda"] <= 1e-10
        assert summary["design"]["t"] == 1


class TestDeterminism:
    def test_rerun_is_byte_identical(self, tmp_path):
        digests = []
        for tag in ("first", "second"):
            out = tmp_path / tag
            p = tiny_expect_config(tmp_path, out, name=f"{tag}.json")
            assert cli.main(["run", str(p)]) == 0
            digests.append(hashlib.sha256(
                (out / "results.csv").read_bytes()
            ).hexdigest())
        assert digests[0] == digests[1]

    def test_seed_changes_results(self, tmp_path):
        digests = []
        for seed in (1, 2):
            out = tmp_path / f"seed{seed}"
            p = tiny_expect_config(tmp_path, out, seed=seed,
                                   name=f"seed{seed}.json")
            assert cli.main(["run", str(p)]) == 0
            digests.append(hashlib.sha256(
                (out / "results.csv").read_bytes()
            ).hexdigest())
        assert digests[0] != digests[1]


class TestConsoleEntry:
    def test_installed_script_runs(self, tmp_path):
        p = write_config(tmp_path, experiment="typicality", n=4)
        proc = subprocess.run(
            [sys.executable, "-c",
             "import sys; from decouplab.cli import main; "
             "sys.exit(main(sys.argv[1:]))", "validate", str(p)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert "ok:" in proc.stdout
