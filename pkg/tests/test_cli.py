import numpy as np

from nocosim.cli import main


def run(argv):
    return main(argv)


def read(path):
    return path.read_text(encoding="utf-8")


def test_gate_error_success_and_schema(tmp_path):
    out = tmp_path / "ge.csv"
    code = run([
        "gate-error", "--epsilon", "0.1,0.3", "--freq_over_h", "1e3,1e4",
        "--gate", "rz", "--out", str(out),
    ])
    assert code == 0
    lines = read(out).splitlines()
    header = [l for l in lines if l.startswith("#")]
    assert len(header) == 3
    assert header[0].startswith("# nocosim ")
    assert any("config-sha256" in l for l in header)
    body = [l for l in lines if not l.startswith("#")]
    assert body[0] == "epsilon,freq_over_h,infidelity,N_periods"
    assert len(body) == 5  # header row + 2x2 grid
    first = body[1].split(",")
    assert first[0] == "1.00000000000e-01"
    assert int(first[3]) > 0
    # epsilon is the outer loop
    eps_col = [row.split(",")[0] for row in body[1:]]
    assert eps_col == sorted(eps_col)


def test_byte_identical_reruns(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["distill", "--rounds", "1,3", "--epsilon", "0.2", "--freq_over_h", "1e3"]
    assert run(args + ["--out", str(a)]) == 0
    assert run(args + ["--out", str(b)]) == 0
    assert read(a) == read(b)


def test_workers_do_not_change_bytes(tmp_path):
    a, b = tmp_path / "w1.csv", tmp_path / "w2.csv"
    args = ["gate-error", "--epsilon", "0.1,0.2", "--freq_over_h", "1e3,3e3"]
    assert run(args + ["--workers", "1", "--out", str(a)]) == 0
    assert run(args + ["--workers", "2", "--out", str(b)]) == 0
    assert read(a) == read(b)


def test_stdout_mode(capsys):
    assert run(["swap-check"]) == 0
    captured = capsys.readouterr()
    assert "deviation,halftime_deviation" in captured.out
    assert "swap-check" in captured.err  # summary goes to stderr


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nepsilon = 0.4\nrounds = 5\n", encoding="utf-8")
    assert run(["distill", "--config", str(cfg), "--epsilon", "0.3"]) == 0
    out = capsys.readouterr().out
    row = [l for l in out.splitlines() if not l.startswith("#")][1]
    fields = row.split(",")
    assert fields[0] == "5"  # rounds from file
    assert fields[1] == "3.00000000000e-01"  # cli overrides file


def test_invalid_config_exit_codes(tmp_path):
    assert run(["distill", "--rounds", "2"]) == 2
    assert run(["distill", "--epsilon", "1.4"]) == 2
    assert run(["distill", "--epsilon", "abc"]) == 2
    assert run(["gate-error", "--freq_over_h", ""]) == 2
    assert run(["threshold", "--bisect_tol", "-1"]) == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense_key = 1\n", encoding="utf-8")
    assert run(["distill", "--config", str(bad)]) == 2
    bad.write_text("no equals sign here\n", encoding="utf-8")
    assert run(["distill", "--config", str(bad)]) == 2


def test_unknown_gate_exit_code():
    assert run(["gate-error", "--gate", "cnot"]) == 3
    assert run(["fixed-state", "--gate", "nope"]) == 3


def test_no_threshold_exit_code():
    assert run(["threshold", "--freq_over_h", "1e3", "--rounds", "1",
                "--budget", "1e-9"]) == 4


def test_unwritable_output_exit_code():
    assert run(["swap-check", "--out", "/nonexistent-dir/x.csv"]) == 5


def test_missing_config_file_exit_code(tmp_path):
    assert run(["distill", "--config", str(tmp_path / "absent.cfg")]) == 5


def test_noise_check_reports_failures_with_exit_zero(capsys):
    assert run(["noise-check", "--epsilon", "0.2,1.0"]) == 0
    out = capsys.readouterr().out
    rows = [l for l in out.splitlines() if not l.startswith("#")][1:]
    assert rows[0].endswith(",1,1")
    assert rows[1].endswith(",0,0")


def test_fixed_state_two_actuator_gate_rejected():
    assert run(["fixed-state", "--gate", "rzz_prime"]) == 2


def test_threshold_table(tmp_path):
    out = tmp_path / "thr.csv"
    code = run([
        "threshold", "--freq_over_h", "1e4", "--rounds", "1,3",
        "--bisect_tol", "1e-3", "--out", str(out),
    ])
    assert code == 0
    body = [l for l in read(out).splitlines() if not l.startswith("#")]
    assert body[0] == "freq_over_h,rounds,epsilon_star,iterations"
    stars = [float(r.split(",")[2]) for r in body[1:]]
    assert len(stars) == 2
    assert stars[0] < stars[1]  # more rounds tolerate more noise
    assert all(0.0 < s < 1.0 for s in stars)


def test_eff_h_columns(capsys):
    assert run(["eff-h", "--gate", "rzz", "--epsilon", "0.2"]) == 0
    out = capsys.readouterr().out
    body = [l for l in out.splitlines() if not l.startswith("#")]
    cols = body[0].split(",")
    assert cols[:2] == ["epsilon_i", "epsilon_h"]
    assert "c_ZZ" in cols and len(cols) == 2 + 16
    vals = dict(zip(cols, body[1].split(",")))
    assert np.isclose(float(vals["c_ZZ"]), 0.8)
    assert np.isclose(float(vals["c_XX"]), 0.0)
