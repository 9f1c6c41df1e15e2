from pathlib import Path

import pytest

from hyperbound.cli import main

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("argv, want", [
    (["tail", "--kind", "C", "--n", "1000", "--t", "537"], "0.0104635"),
    (["tail", "--kind", "D", "--n", "1e5", "--t", "815"], "0.00995845"),
    (["tail", "--kind", "rho", "--n", "10", "--t", "0"], "5"),
    (["tail", "--kind", "Ball", "--n", "3", "--t", "0"], "0.125"),
    (["bounds", "risk", "--n", "100", "--mu", "0.5", "--r", "0"], "0.5"),
    (["bounds", "budget", "--n", "10^4", "--mu", "0.01", "--target", "0.5"], "117"),
    (["bounds", "robustness", "--n", "10000", "--mu", "0.01", "--closed"], "152.45"),
])
def test_single_value_commands(capsys, argv, want):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out.strip() == want


def test_tail_precision_flag(capsys):
    _, out, _ = run(capsys, "tail", "--kind", "C", "--n", "1000", "--t", "537", "--precision", "3")
    assert out.strip() == "0.0104"


def test_tail_solve(capsys):
    code, out, _ = run(capsys, "tail", "--kind", "C", "--n", "1000", "--solve", "0.01")
    assert code == 0 and "nearest t = 537" in out


def test_bounds_table(capsys):
    code, out, _ = run(capsys, "bounds", "table", "--n", "10000", "--mu", "0.01")
    assert code == 0
    rows = {line.split()[0]: line.split() for line in out.splitlines()}
    assert rows["risk_to_0.99"][1] == "233"
    assert rows["risk_to_0.50"][1] == "117"
    assert abs(float(rows["robustness"][1]) - 117) <= 2


def test_conjunction_outputs(capsys):
    _, out, _ = run(capsys, "conjunction", "--m", "2", "--u", "1", "--w", "1")
    assert "mu = 0.125" in out
    _, out, _ = run(capsys, "conjunction", "--m", "0", "--u", "0", "--w", "3", "--def", "pc")
    assert "pc: robustness = 1.625" in out
    _, out, _ = run(capsys, "conjunction", "--m", "5", "--u", "0", "--w", "0", "--def", "er")
    assert "er: robustness = inf" in out


def test_entropy(capsys):
    _, out, _ = run(capsys, "entropy", "--solve", "1")
    assert out.splitlines()[0] == "p = 0.5"
    _, out, _ = run(capsys, "entropy", "--solve", "0.5")
    assert out.splitlines() == ["p = 0.110028", "interval = (0.0833333, 0.5)"]


@pytest.mark.parametrize("argv", [
    ["tail", "--kind", "D", "--n", "10", "--t", "4", "--strict-parity"],
    ["tail", "--kind", "C", "--n", "10", "--t", "11"],
    ["bounds", "risk", "--n", "10", "--mu", "1.5", "--r", "0"],
    ["bounds", "risk", "--n", "10", "--mu", "0", "--r", "0"],
    ["conjunction", "--m", "1", "--u", "1", "--w", "1", "--n", "2"],
    ["entropy", "--solve", "2"],
    ["tail", "--kind", "Q", "--n", "10", "--t", "1"],
    ["bounds"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert err.strip()


def test_missing_subcommand_exits_2(capsys):
    assert run(capsys)[0] == 2


def test_experiment_config_error_reports_line(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("n = 10\nrun = 3\n")
    code, _, err = run(capsys, "experiment", "--config", str(cfg), "--out", str(tmp_path / "o.csv"))
    assert code == 2 and "bad.cfg:2:" in err


def test_experiment_unwritable_output_exits_1(capsys, tmp_path):
    code, _, err = run(capsys, "experiment", "--config", str(DATA / "tiny_find_s.cfg"),
                       "--out", str(tmp_path / "no" / "o.csv"))
    assert code == 1 and "o.csv" in err


def test_experiment_csv_and_seed(capsys, tmp_path):
    cfg = str(DATA / "tiny_find_s.cfg")
    a, b, c = (tmp_path / f"{x}.csv" for x in "abc")
    assert run(capsys, "experiment", "--config", cfg, "--out", str(a))[0] == 0
    code, out, err = run(capsys, "experiment", "--config", cfg, "--out", str(b), "--workers", "2")
    assert code == 0 and "|c|" in out and err
    run(capsys, "experiment", "--config", cfg, "--out", str(c), "--seed", "99")
    assert a.read_bytes() == b.read_bytes() == (DATA / "tiny_find_s.csv").read_bytes()
    assert a.read_bytes() != c.read_bytes()
