"""End-to-end checks of the command-line interface, run in-process."""

import json

import pytest

from sketchbounds import (
    matrix_from_json,
    matrix_to_json,
    one_sparse_map_from_json,
    one_sparse_map_to_json,
    sample_countsketch,
    sample_sparse_sign_jl,
)
from sketchbounds.cli import load_config, main

from conftest import dense


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestConstruct:
    def test_sign_jl_artifact_round_trips(self, write_config, capsys):
        cfg = write_config({"command": "construct", "seed": 7,
                            "params": {"family": "sign_jl", "m": 8, "n": 5, "s": 3}})
        code, out, err = run_cli(["construct", "--config", cfg], capsys)
        assert code == 0 and err == ""
        A = matrix_from_json(out)
        assert (A.m, A.n) == (8, 5)
        assert all(A.column_nnz(j) == 3 for j in range(5))

    def test_countsketch_emits_map(self, write_config, capsys):
        cfg = write_config({"command": "construct", "seed": 3,
                            "params": {"family": "countsketch", "m": 6, "n": 9}})
        code, out, _ = run_cli(["construct", "--config", cfg], capsys)
        assert code == 0
        S = one_sparse_map_from_json(out)
        assert (S.m, S.n) == (6, 9)

    def test_random_code_has_small_agreement(self, write_config, capsys):
        cfg = write_config({"command": "construct", "seed": 1,
                            "params": {"family": "random_code", "q": 8, "t": 6,
                                       "N": 16, "eps": 0.5}})
        code, out, _ = run_cli(["construct", "--config", cfg], capsys)
        assert code == 0
        obj = json.loads(out)
        assert obj["q"] == 8 and len(obj["words"]) == 16

    def test_code_matrix_from_file(self, write_config, tmp_path, capsys):
        code_path = tmp_path / "code.json"
        code_path.write_text(json.dumps({"q": 3, "t": 2, "words": [[0, 1], [2, 0]]}))
        cfg = write_config({"command": "construct",
                            "params": {"family": "code_matrix", "code": str(code_path)}})
        code, out, _ = run_cli(["construct", "--config", cfg], capsys)
        assert code == 0
        A = matrix_from_json(out)
        assert (A.m, A.n) == (6, 2)

    def test_csv_format_rejected(self, write_config, capsys):
        cfg = write_config({"command": "construct", "output_format": "csv",
                            "params": {"family": "sign_jl", "m": 4, "n": 2, "s": 1}})
        code, _, err = run_cli(["construct", "--config", cfg], capsys)
        assert code == 1 and "json" in err

    def test_unknown_family(self, write_config, capsys):
        cfg = write_config({"command": "construct", "params": {"family": "bogus"}})
        code, _, err = run_cli(["construct", "--config", cfg], capsys)
        assert code == 1 and "bogus" in err


class TestMeasure:
    @pytest.fixture
    def matrix_path(self, tmp_path):
        A = sample_sparse_sign_jl(8, 5, 3, 7)
        path = tmp_path / "A.json"
        path.write_text(matrix_to_json(A))
        return str(path)

    def test_coherence(self, matrix_path, write_config, capsys):
        cfg = write_config({"command": "measure",
                            "params": {"measure": "coherence", "input": matrix_path}})
        code, out, _ = run_cli(["measure", "--config", cfg], capsys)
        assert code == 0
        assert json.loads(out)["value"] == 0.6666666666666669

    def test_rip_exact_reports_witness(self, matrix_path, write_config, capsys):
        cfg = write_config({"command": "measure",
                            "params": {"measure": "rip_exact", "input": matrix_path, "k": 2}})
        code, out, _ = run_cli(["measure", "--config", cfg], capsys)
        assert code == 0
        obj = json.loads(out)
        assert abs(obj["value"]["delta"] - 0.666666666666667) <= 1e-12
        assert obj["value"]["mode"] == "exact"
        assert obj["value"]["worst_support"] == [2, 4]
        assert len(obj["witness"]) == 5

    def test_rip_estimate_needs_trials(self, matrix_path, write_config, capsys):
        cfg = write_config({"command": "measure",
                            "params": {"measure": "rip_lower_estimate",
                                       "input": matrix_path, "k": 2}})
        code, _, err = run_cli(["measure", "--config", cfg], capsys)
        assert code == 1 and "trials" in err

    def test_subspace_distortion_on_map(self, tmp_path, write_config, capsys):
        S = sample_countsketch(16, 8, 5)
        path = tmp_path / "S.json"
        path.write_text(one_sparse_map_to_json(S))
        cfg = write_config({"command": "measure",
                            "params": {"measure": "subspace_distortion",
                                       "input": str(path), "indices": [0, 1, 2]}})
        code, out, _ = run_cli(["measure", "--config", cfg], capsys)
        assert code == 0
        value = json.loads(out)["value"]
        assert 0.0 <= value["sigma_min"] <= value["sigma_max"]

    def test_scale_profile(self, tmp_path, write_config, capsys):
        path = tmp_path / "B.json"
        path.write_text(matrix_to_json(dense([[1.0], [0.0]])))
        cfg = write_config({"command": "measure",
                            "params": {"measure": "scale_profile", "input": str(path),
                                       "column": 0}})
        code, out, _ = run_cli(["measure", "--config", cfg], capsys)
        assert code == 0
        assert json.loads(out)["value"]["t"] == 1

    def test_unknown_measure(self, matrix_path, write_config, capsys):
        cfg = write_config({"command": "measure",
                            "params": {"measure": "nope", "input": matrix_path}})
        code, _, err = run_cli(["measure", "--config", cfg], capsys)
        assert code == 1 and "nope" in err


class TestWitness:
    def test_violation_exits_two(self, tmp_path, write_config, capsys):
        # ten duplicated basis columns overload the threshold search
        A = dense([[1.0] * 10, [0.0] * 10, [0.0] * 10, [0.0] * 10])
        path = tmp_path / "dup.json"
        path.write_text(matrix_to_json(A))
        cfg = write_config({"command": "witness",
                            "params": {"witness": "row_mass", "input": str(path),
                                       "eps": 0.25}})
        code, out, _ = run_cli(["witness", "--config", cfg], capsys)
        assert code == 2
        obj = json.loads(out)
        assert obj["kind"] == "incoherence_pair" and obj["dot"] == 1.0

    def test_clean_matrix_exits_zero(self, tmp_path, write_config, capsys):
        path = tmp_path / "eye.json"
        path.write_text(matrix_to_json(dense([[1.0, 0.0], [0.0, 1.0]])))
        cfg = write_config({"command": "witness",
                            "params": {"witness": "row_mass", "input": str(path),
                                       "eps": 0.25}})
        code, out, _ = run_cli(["witness", "--config", cfg], capsys)
        assert code == 0
        assert json.loads(out)["kind"] == "none"

    def test_ose_collision_kernel_vector(self, tmp_path, write_config, capsys):
        S = sample_countsketch(2, 6, 11)  # 6 columns into 2 rows must collide
        path = tmp_path / "S.json"
        path.write_text(one_sparse_map_to_json(S))
        cfg = write_config({"command": "witness",
                            "params": {"witness": "ose_collision", "input": str(path)}})
        code, out, _ = run_cli(["witness", "--config", cfg], capsys)
        assert code == 2
        assert json.loads(out)["kind"] == "kernel_witness"

    def test_ose_failure_report_always_zero(self, write_config, capsys):
        cfg = write_config({"command": "witness", "seed": 0, "trials": 20,
                            "params": {"witness": "ose_failure", "m": 4, "d": 2, "n": 8}})
        code, out, _ = run_cli(["witness", "--config", cfg], capsys)
        assert code == 0
        obj = json.loads(out)
        assert obj["trials"] == 20 and obj["failures"] == 6
        assert obj["rate"] == 0.3

    def test_rip_pattern_on_duplicates(self, tmp_path, write_config, capsys):
        A = dense([[1.0, 1.0], [0.0, 0.0]])
        path = tmp_path / "two.json"
        path.write_text(matrix_to_json(A))
        cfg = write_config({"command": "witness",
                            "params": {"witness": "rip_pattern", "input": str(path),
                                       "k": 2}})
        code, out, _ = run_cli(["witness", "--config", cfg], capsys)
        assert code == 2
        assert json.loads(out)["ratio"] == 2.0


class TestBounds:
    def test_formula_flag(self, capsys):
        code, out, err = run_cli(
            ["bounds", "--formula", "min_sparsity", "--params", "q=100,r=10"], capsys)
        assert code == 0 and err == ""
        obj = json.loads(out)
        assert obj["value"] == 3 and obj["normalized_constant"] is True

    def test_pair_valued_formula(self, capsys):
        code, out, _ = run_cli(
            ["bounds", "--formula", "code_size", "--params", "eps=0.25,k=4,n=1024"], capsys)
        assert code == 0
        assert json.loads(out)["value"] == [64.0, 3.4657359027997265]

    def test_config_with_inline_args(self, write_config, capsys):
        cfg = write_config({"command": "bounds",
                            "params": {"formula": "min_sparsity", "q": 100, "r": 10}})
        code, out, _ = run_cli(["bounds", "--config", cfg], capsys)
        assert code == 0 and json.loads(out)["value"] == 3

    def test_config_with_args_object(self, write_config, capsys):
        cfg = write_config({"command": "bounds",
                            "params": {"formula": "rip_rows",
                                       "args": {"delta": 0.5, "k": 2, "n": 1e4}}})
        code, out, _ = run_cli(["bounds", "--config", cfg], capsys)
        assert code == 0
        assert abs(json.loads(out)["value"] - 60.69240984530951) <= 1e-12

    def test_unknown_formula(self, capsys):
        code, _, err = run_cli(["bounds", "--formula", "nonsense"], capsys)
        assert code == 1 and "nonsense" in err

    def test_missing_param_named_in_error(self, capsys):
        code, _, err = run_cli(["bounds", "--formula", "min_sparsity",
                                "--params", "q=100"], capsys)
        assert code == 1 and "'r'" in err

    def test_bad_params_syntax(self, capsys):
        code, _, err = run_cli(["bounds", "--formula", "min_sparsity",
                                "--params", "q:100"], capsys)
        assert code == 1 and "key=value" in err

    def test_domain_error_exits_one(self, capsys):
        code, _, err = run_cli(["bounds", "--formula", "incoherent_rows",
                                "--params", "eps=0.1,N=100"], capsys)
        assert code == 1 and "error" in err

    def test_needs_formula_or_config(self, capsys):
        code, _, err = run_cli(["bounds"], capsys)
        assert code == 1


SWEEP_CSV = "param,value\n32,0.6\n64,0.375\n128,0.175\n"


class TestSweep:
    def test_ose_failure_rates_csv(self, write_config, capsys):
        cfg = write_config({"command": "sweep", "seed": 5, "trials": 40,
                            "output_format": "csv",
                            "params": {"experiment": "ose_failure", "d": 8, "n": 256,
                                       "grid": {"param": "m", "values": [32, 64, 128]}}})
        code, out, _ = run_cli(["sweep", "--config", cfg], capsys)
        assert code == 0
        assert out == SWEEP_CSV

    def test_json_record_echoes_config(self, write_config, capsys):
        cfg = write_config({"command": "sweep", "seed": 5, "trials": 40,
                            "params": {"experiment": "ose_failure", "d": 8, "n": 256,
                                       "grid": {"param": "m", "values": [32, 64]}}})
        code, out, _ = run_cli(["sweep", "--config", cfg], capsys)
        assert code == 0
        obj = json.loads(out)
        assert obj["config"]["seed"] == 5
        assert obj["rows"] == [{"param": 32, "value": 0.6}, {"param": 64, "value": 0.375}]
        assert obj["summary"]["points"] == 2

    def test_bounds_sweep(self, write_config, capsys):
        cfg = write_config({"command": "sweep", "output_format": "csv",
                            "params": {"experiment": "bounds", "formula": "incoherent_rows",
                                       "eps": 0.1,
                                       "grid": {"param": "N", "values": [200, 1000, 10000]}}})
        code, out, _ = run_cli(["sweep", "--config", cfg], capsys)
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "param,value"
        values = [float(line.split(",")[1]) for line in lines[1:]]
        assert values == sorted(values)

    def test_grid_must_be_complete(self, write_config, capsys):
        cfg = write_config({"command": "sweep", "trials": 5,
                            "params": {"experiment": "ose_failure", "d": 2, "n": 8,
                                       "grid": {"param": "m"}}})
        code, _, err = run_cli(["sweep", "--config", cfg], capsys)
        assert code == 1 and "grid" in err


class TestStreamDemo:
    def test_summary_values(self, write_config, capsys):
        cfg = write_config({"command": "stream-demo", "seed": 9,
                            "params": {"m": 32, "n": 100, "s": 4, "updates": 500}})
        code, out, _ = run_cli(["stream-demo", "--config", cfg], capsys)
        assert code == 0
        summary = json.loads(out)["summary"]
        assert summary["updates"] == 500
        assert summary["max_abs_deviation"] <= 1e-9
        assert summary["touched_min"] == 4 and summary["touched_max"] == 4
        assert summary["column_sparsity"] == 4

    def test_csv_output(self, write_config, capsys):
        cfg = write_config({"command": "stream-demo", "seed": 9, "output_format": "csv",
                            "params": {"m": 16, "n": 20, "s": 2, "updates": 50}})
        code, out, _ = run_cli(["stream-demo", "--config", cfg], capsys)
        assert code == 0
        assert out.startswith("param,value\nupdates,50\n")

    def test_zero_updates_rejected(self, write_config, capsys):
        cfg = write_config({"command": "stream-demo",
                            "params": {"m": 16, "n": 20, "s": 2, "updates": 0}})
        code, _, err = run_cli(["stream-demo", "--config", cfg], capsys)
        assert code == 1


class TestConfigHandling:
    def test_missing_file(self, capsys):
        code, _, err = run_cli(["measure", "--config", "/no/such/file.json"], capsys)
        assert code == 1 and "not found" in err

    def test_invalid_json(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, _, err = run_cli(["measure", "--config", str(path)], capsys)
        assert code == 1 and "JSON" in err

    def test_command_mismatch(self, write_config, capsys):
        cfg = write_config({"command": "sweep", "params": {}})
        code, _, err = run_cli(["measure", "--config", cfg], capsys)
        assert code == 1 and "sweep" in err

    def test_bad_output_format(self, write_config, capsys):
        cfg = write_config({"command": "stream-demo", "output_format": "xml",
                            "params": {"m": 4, "n": 4, "s": 1, "updates": 1}})
        code, _, err = run_cli(["stream-demo", "--config", cfg], capsys)
        assert code == 1 and "xml" in err

    def test_bad_seed(self, write_config, capsys):
        cfg = write_config({"command": "stream-demo", "seed": -1,
                            "params": {"m": 4, "n": 4, "s": 1, "updates": 1}})
        code, _, err = run_cli(["stream-demo", "--config", cfg], capsys)
        assert code == 1

    def test_bad_trials(self, write_config, capsys):
        cfg = write_config({"command": "sweep", "trials": 0,
                            "params": {"experiment": "ose_failure", "d": 2, "n": 8,
                                       "grid": {"param": "m", "values": [4]}}})
        code, _, err = run_cli(["sweep", "--config", cfg], capsys)
        assert code == 1 and "trials" in err

    def test_seed_override_changes_output(self, write_config, capsys):
        cfg = write_config({"command": "construct", "seed": 7,
                            "params": {"family": "sign_jl", "m": 8, "n": 5, "s": 3}})
        _, base, _ = run_cli(["construct", "--config", cfg], capsys)
        _, overridden, _ = run_cli(["construct", "--config", cfg, "--seed", "8"], capsys)
        _, same, _ = run_cli(["construct", "--config", cfg, "--seed", "7"], capsys)
        assert overridden != base
        assert same == base

    def test_format_override(self, write_config, capsys):
        cfg = write_config({"command": "stream-demo", "seed": 9,
                            "params": {"m": 16, "n": 20, "s": 2, "updates": 50}})
        code, out, _ = run_cli(
            ["stream-demo", "--config", cfg, "--format", "csv"], capsys)
        assert code == 0 and out.startswith("param,value\n")

    def test_out_writes_file_and_silences_stdout(self, write_config, tmp_path, capsys):
        cfg = write_config({"command": "bounds",
                            "params": {"formula": "min_sparsity", "q": 100, "r": 10}})
        dest = tmp_path / "result.json"
        code, out, _ = run_cli(["bounds", "--config", cfg, "--out", str(dest)], capsys)
        assert code == 0 and out == ""
        assert json.loads(dest.read_text())["value"] == 3

    def test_output_path_in_config(self, write_config, tmp_path, capsys):
        dest = tmp_path / "result.json"
        cfg = write_config({"command": "bounds", "output_path": str(dest),
                            "params": {"formula": "min_sparsity", "q": 100, "r": 10}})
        code, out, _ = run_cli(["bounds", "--config", cfg], capsys)
        assert code == 0 and out == ""
        assert dest.exists()

    def test_load_config_defaults(self, write_config):
        cfg = load_config(write_config({"params": {"x": 1}}), "measure")
        assert cfg.seed == 0 and cfg.trials is None
        assert cfg.output_format == "json" and cfg.output_path is None

    def test_usage_error_exits_one(self, capsys):
        assert main(["frobnicate"]) == 1
        assert main([]) == 1
        capsys.readouterr()


class TestDeterminism:
    @pytest.mark.parametrize("argv_builder", [
        lambda w: ["construct", "--config",
                   w({"command": "construct", "seed": 7,
                      "params": {"family": "sign_jl", "m": 8, "n": 5, "s": 3}})],
        lambda w: ["sweep", "--config",
                   w({"command": "sweep", "seed": 5, "trials": 40,
                      "output_format": "csv",
                      "params": {"experiment": "ose_failure", "d": 8, "n": 256,
                                 "grid": {"param": "m", "values": [32, 64, 128]}}})],
        lambda w: ["stream-demo", "--config",
                   w({"command": "stream-demo", "seed": 9,
                      "params": {"m": 32, "n": 100, "s": 4, "updates": 500}})],
        lambda w: ["bounds", "--formula", "rip_rows",
                   "--params", "delta=0.5,k=2,n=10000"],
    ])
    def test_reruns_are_byte_identical(self, argv_builder, write_config, capsys):
        argv = argv_builder(write_config)
        first_code, first_out, _ = run_cli(argv, capsys)
        second_code, second_out, _ = run_cli(argv, capsys)
        assert first_code == second_code == 0
        assert first_out == second_out
        assert first_out.endswith("\n")
