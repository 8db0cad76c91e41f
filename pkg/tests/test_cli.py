import json
import os

import numpy as np
import pytest

from triqsd.cli import main
from triqsd.runio import read_results_csv

FAST = [
    "--set", "n_traj=80",
    "--set", "total_time=0.5",
    "--set", "output_times=12",
    "--set", "steps_per_segment=4",
    "--set", "max_step=0.01",
]


def run_cli(*argv):
    return main(list(argv))


def test_run_preset_writes_results_and_metadata(tmp_path):
    out = tmp_path / "fig1a"
    code = run_cli("run", "--preset", "fig1a", "--outdir", str(out), *FAST)
    assert code == 0
    results = read_results_csv(out / "fig1a_results.csv")
    assert list(results) == [
        "time", "fidelity", "fidelity_stderr", "jx", "jy", "jz", "trace", "trace_stderr"
    ]
    assert results["time"][0] == 0.0
    assert abs(results["fidelity"][0] - 1.0) < 1e-9
    meta = json.loads((out / "fig1a_metadata.json").read_text())
    assert meta["config"]["model"] == "dephasing"
    assert meta["backend"] in ("numba", "numpy")
    assert meta["config"]["n_traj"] == 80
    # dephasing runs get the analytic oracle side by side
    oracle = read_results_csv(out / "fig1a_oracle.csv")
    assert np.array_equal(oracle["time"], results["time"])
    assert np.all(oracle["fidelity_stderr"] == 0.0)


def test_results_embed_config_echo(tmp_path):
    out = tmp_path / "echo"
    assert run_cli("run", "--preset", "fig1a", "--outdir", str(out), *FAST) == 0
    first = (out / "fig1a_results.csv").read_text().splitlines()[0]
    assert first.startswith("# triqsd-csv-v1 config=")
    echoed = json.loads(first.split("config=", 1)[1])
    assert echoed["n_traj"] == 80


def test_bitwise_identical_rerun(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        code = run_cli("run", "--preset", "fig4b", "--outdir", str(out), "--deterministic",
                       "--n-traj", "60", "--seed", "11", *FAST)
        assert code == 0
    assert (a / "fig4b_results.csv").read_bytes() == (b / "fig4b_results.csv").read_bytes()


def test_zero_trajectories_is_validation_error(tmp_path):
    out = tmp_path / "bad"
    code = run_cli("run", "--preset", "fig1a", "--outdir", str(out), "--n-traj", "0")
    assert code == 2
    assert not out.exists()  # no output files on validation failure


def test_unknown_preset_is_validation_error():
    assert run_cli("run", "--preset", "fig9z") == 2


def test_config_file_roundtrip(tmp_path):
    cfg_path = tmp_path / "run.json"
    from triqsd import get_preset

    cfg_path.write_text(get_preset("fig4a").to_json())
    out = tmp_path / "from_file"
    code = run_cli("run", "--config", str(cfg_path), "--outdir", str(out), *FAST)
    assert code == 0
    assert (out / "fig4a_results.csv").exists()
    # dissipative runs have no analytic oracle
    assert not (out / "fig4a_oracle.csv").exists()


def test_bad_json_config_is_config_error(tmp_path):
    cfg = tmp_path / "broken.json"
    cfg.write_text("{ not json")
    assert run_cli("run", "--config", str(cfg)) == 1


def test_unknown_config_key_is_config_error(tmp_path):
    cfg = tmp_path / "typo.json"
    cfg.write_text(json.dumps({"model": "dephasing", "gamm": 1.0}))
    assert run_cli("run", "--config", str(cfg)) == 1


def test_missing_source_is_usage_error():
    assert run_cli("run") == 1
    assert run_cli("run", "--preset", "fig1a", "--config", "x.json") == 1


def test_numerical_fault_exit_code(tmp_path):
    # a grid far too coarse for the memory rate blows up the table solve
    out = tmp_path / "blowup"
    code = run_cli(
        "run", "--preset", "fig4a", "--outdir", str(out),
        "--set", "gamma=2000.0", "--set", "steps_per_segment=1",
        "--set", "max_step=1.0", "--set", "n_traj=8", "--set", "output_times=4",
    )
    assert code == 3


def test_io_error_exit_code(tmp_path):
    blocker = tmp_path / "not_a_dir"
    blocker.write_text("file in the way")
    code = run_cli("run", "--preset", "fig1a", "--outdir", str(blocker), *FAST)
    assert code == 4


def test_presets_listing(capsys):
    assert run_cli("presets") == 0
    listed = capsys.readouterr().out
    for name in ("fig1a", "fig2_g0.5", "fig3a_m033", "fig4d", "fig5_g50", "fig6b_m100"):
        assert name in listed
    assert run_cli("presets", "--prefix", "fig2") == 0
    filtered = capsys.readouterr().out.strip().splitlines()
    assert len(filtered) == 4


def test_dump_flags_produce_debug_files(tmp_path):
    out = tmp_path / "dumps"
    code = run_cli(
        "run", "--preset", "fig1a", "--outdir", str(out),
        "--set", "dump_noise=2", "--set", "dump_coefficients=true", *FAST,
    )
    assert code == 0
    assert (out / "fig1a_noise_0000.csv").exists()
    assert (out / "fig1a_noise_0001.csv").exists()
    assert (out / "fig1a_coefficients.csv").exists()
