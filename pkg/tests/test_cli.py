"""End-to-end tests of the command-line interface (in-process)."""

import json
import re

import numpy as np
import pytest

from msqg.cli import main


BASE_CONFIG = """
delta = 0.5
seed = 123

[coefficients]
k = [[1, 0], [2, 1]]
h_box = 4

[sample]
N = 2
M = 400
law = "moment"
hermitian = true
save_count = 2

[evolve]
N = 2
T = 0.1
dt = 0.02
method = "implicit_midpoint"
initial = "sample"
store_every = 2

[expectation]
sum_k = [[1, 0]]
sum_R = 16
sum_deltas = [0.0, 1.0]
N = 2
s = -2.5
M = 400
mc_deltas = [0.5]

[invariance]
N = 2
T = 0.1
times = [0.1]
M = 150
dt = 0.02
method = "implicit_midpoint"
bug = false
z_threshold = 4.0
ks_family_level = 0.01
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "run.toml"
    # top-level keys must precede the first table header
    path.write_text(f'out = "{tmp_path / "out"}"\n' + BASE_CONFIG)
    return path, tmp_path / "out"


def read_csv_lines(path):
    lines = path.read_text().splitlines()
    assert re.fullmatch(r"# config_sha256=[0-9a-f]{64}", lines[0])
    return lines


def test_coefficients_command(config_file):
    cfg, out = config_file
    assert main(["--config", str(cfg), "coefficients"]) == 0
    lines = read_csv_lines(out / "coefficients.csv")
    assert lines[1] == "k1,k2,h1,h2,alpha,alpha_mirror"
    rows = [line.split(",") for line in lines[2:]]
    assert len(rows) == 2 * ((2 * 4 + 1) ** 2 - 1)
    # the two coefficient columns witness the pair symmetry row by row
    for row in rows:
        assert float(row[4]) == pytest.approx(float(row[5]), rel=1e-12, abs=1e-300)


def test_sample_command_and_reproducibility(config_file, tmp_path):
    cfg, out = config_file
    assert main(["--config", str(cfg), "sample"]) == 0
    lines = read_csv_lines(out / "moments.csv")
    assert lines[1] == "k1,k2,mean_re,mean_im,second_moment,expected,se,z"
    assert len(lines) == 2 + (2 * 2 + 1) ** 2 - 1
    assert (out / "sample_000000.msqg").exists()
    assert (out / "sample_000001.msqg").exists()
    assert not (out / "sample_000002.msqg").exists()
    # worst |z| within the acceptance rule for this frozen seed
    zs = [abs(float(line.split(",")[-1])) for line in lines[2:]]
    assert max(zs) <= 5.0

    # same seed, different output directory: identical data rows
    assert main(["--config", str(cfg), "--out", str(tmp_path / "out2"), "sample"]) == 0
    lines2 = read_csv_lines(tmp_path / "out2" / "moments.csv")
    assert lines2[1:] == lines[1:]
    assert lines2[0] != lines[0]  # the config hash covers the out dir

    # different seed: different draws
    assert main(["--config", str(cfg), "--seed", "7", "--out", str(tmp_path / "out3"), "sample"]) == 0
    lines3 = read_csv_lines(tmp_path / "out3" / "moments.csv")
    assert lines3[2:] != lines[2:]


def test_evolve_command_from_zero_and_snapshot(config_file, tmp_path):
    cfg, out = config_file
    assert main(["--config", str(cfg), "evolve"]) == 0
    report = json.loads((out / "drift.json").read_text())
    assert re.fullmatch(r"[0-9a-f]{64}", report["config_sha256"])
    assert report["drift"]["max_rel_drift"] <= 1e-9
    assert report["states_stored"] >= 2
    sidecar = report["sidecar"]
    assert (tmp_path / sidecar).exists() or (out / "trajectory" / "state_trajectory.json").exists()

    # restart from a written snapshot
    assert main(["--config", str(cfg), "sample"]) == 0
    snap = out / "sample_000000.msqg"
    override = tmp_path / "override.toml"
    override.write_text(
        f'out = "{tmp_path / "out4"}"\n'
        + BASE_CONFIG.replace('initial = "sample"', f'initial = "{snap}"')
    )
    assert main(["--config", str(override), "evolve"]) == 0


def test_expectation_command(config_file):
    cfg, out = config_file
    assert main(["--config", str(cfg), "expectation"]) == 0
    sums = read_csv_lines(out / "sums.csv")
    assert sums[1] == "k1,k2,R,S,S1,S2,S3,verdict"
    assert len(sums) == 2 + 2  # two deltas, one k
    verdicts = [line.split(",")[-1] for line in sums[2:]]
    assert set(verdicts) <= {"Converged", "LogDivergent", "Undetermined"}
    exp = read_csv_lines(out / "expectation.csv")
    assert exp[1] == "N,s,delta,analytic,mc,se"
    row = exp[2].split(",")
    analytic, mc, se = float(row[3]), float(row[4]), float(row[5])
    assert abs(mc - analytic) <= 3.0 * se


def test_invariance_command(config_file):
    cfg, out = config_file
    assert main(["--config", str(cfg), "invariance"]) == 0
    payload = json.loads((out / "invariance.json").read_text())
    assert payload["report"]["passed"] is True
    assert payload["report"]["worst_abs_z"] <= 4.0
    assert re.fullmatch(r"[0-9a-f]{64}", payload["config_sha256"])
    assert len(payload["report"]["observable_names"]) == 20


def test_defaults_need_no_config_file(tmp_path):
    # Every command runs on built-in defaults; use a small window to stay
    # quick and a writable output directory.
    out = tmp_path / "defaults"
    assert main(["--out", str(out), "coefficients"]) == 0
    assert (out / "coefficients.csv").exists()


def test_config_error_exit_codes(tmp_path):
    # missing config file
    assert main(["--config", str(tmp_path / "nope.toml"), "sample"]) == 4
    # invalid TOML
    bad = tmp_path / "bad.toml"
    bad.write_text("delta = [unclosed")
    assert main(["--config", str(bad), "sample"]) == 4
    # unknown subcommand (argparse error mapped to config exit)
    assert main(["frobnicate"]) == 4
    # invalid seed
    assert main(["--seed", "-3", "coefficients"]) == 4
    # invalid threads
    assert main(["--threads", "0", "coefficients"]) == 4
    # delta outside [0, 1]
    bad2 = tmp_path / "bad2.toml"
    bad2.write_text(f'delta = 1.5\nout = "{tmp_path / "x"}"\n')
    assert main(["--config", str(bad2), "coefficients"]) == 4
    # zero mode in the coefficients window
    bad3 = tmp_path / "bad3.toml"
    bad3.write_text(f'out = "{tmp_path / "y"}"\n[coefficients]\nk = [[0, 0]]\nh_box = 2\n')
    assert main(["--config", str(bad3), "coefficients"]) == 4


def test_formulation_override_changes_output(config_file, tmp_path):
    cfg, out = config_file
    assert main(["--config", str(cfg), "coefficients"]) == 0
    ref = read_csv_lines(out / "coefficients.csv")
    out2 = tmp_path / "stream"
    assert (
        main(["--config", str(cfg), "--formulation", "streamline", "--out", str(out2), "coefficients"])
        == 0
    )
    alt = read_csv_lines(out2 / "coefficients.csv")
    assert alt[2:] != ref[2:]


def test_floats_written_with_full_precision(config_file):
    cfg, out = config_file
    assert main(["--config", str(cfg), "sample"]) == 0
    lines = read_csv_lines(out / "moments.csv")
    # 17 significant digits survive a text round trip exactly
    val = lines[2].split(",")[4]
    assert float(val) == float(repr(float(val)))
    assert len(val.replace("-", "").replace(".", "").replace("e", "").lstrip("0")) >= 15
