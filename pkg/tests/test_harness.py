import math
from pathlib import Path

import numpy as np
import pytest

from hyperbound.conjunctions import AttackDefinition, Conjunction, ConjunctionStructure, error_mass
from hyperbound.harness import (
    BUNDLED_CONFIGS,
    CSV_COLUMNS,
    Algorithm,
    ConfigError,
    ExperimentConfig,
    aggregate,
    default_workers,
    estimate_risk,
    estimate_robustness,
    format_aggregates,
    load_config,
    parse_int_list,
    run_experiment,
    write_csv,
)
from hyperbound.learning import make_rng

DATA = Path(__file__).parent / "data"


# -- config ------------------------------------------------------------------


def test_parse_int_list():
    assert parse_int_list("1-3, 7,9-10") == [1, 2, 3, 7, 9, 10]
    assert parse_int_list("25") == [25]
    assert parse_int_list("1,,2, 2") == [1, 2]
    assert parse_int_list("") == []
    for bad in ("3-1", "a", "1-x"):
        with pytest.raises(ValueError):
            parse_int_list(bad)


def test_config_round_trip():
    cfg = ExperimentConfig.from_text(
        "algorithm = swapping\nn = 20\ntarget_sizes = 1-4\nruns = 2\n"
        "eval_samples = 10\nseed = 3\ndefinitions = pc, er\ngenerations = 5\n")
    assert cfg.algorithm is Algorithm.SWAPPING
    assert cfg.target_sizes == [1, 2, 3, 4]
    assert cfg.definitions == [AttackDefinition.PC, AttackDefinition.ER]
    assert ExperimentConfig.from_text(cfg.to_text()) == cfg


@pytest.mark.parametrize("text, line, fragment", [
    ("n = 10\nbogus = 1\n", 2, "unknown key"),
    ("n = 10\n# c\nn = 11\n", 3, "duplicate key"),
    ("n = 10\nruns = many\n", 2, "bad value for runs"),
    ("\n\njust words\n", 3, "expected key = value"),
    ("algorithm = annealing\n", 1, "bad value for algorithm"),
])
def test_config_errors_carry_line_numbers(text, line, fragment):
    with pytest.raises(ConfigError) as info:
        ExperimentConfig.from_text(text, "x.cfg")
    assert info.value.line == line
    assert fragment in str(info.value)
    assert str(info.value).startswith(f"x.cfg:{line}:")


def test_config_semantic_validation():
    for text in ("runs = 0\n", "n = 10\ntarget_sizes = 11\n", "eval_samples = 0\n",
                 "epsilon = 1.5\n", "seed = -1\n"):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_text(text)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError) as info:
        ExperimentConfig.from_file(tmp_path / "nope.cfg")
    assert "nope.cfg" in str(info.value)


@pytest.mark.parametrize("name", BUNDLED_CONFIGS)
def test_bundled_configs_load(name):
    cfg = load_config(name)
    assert cfg.n == 100 and cfg.epsilon == 0.01 and cfg.delta == 0.05
    assert cfg.name == name


def test_small_bundled_configs_match_acceptance_setup():
    f1, f2 = load_config("figure1_small"), load_config("figure2_small")
    assert (f1.runs, f1.eval_samples, f1.algorithm) == (50, 2000, Algorithm.FIND_S)
    assert f1.target_sizes == list(range(1, 101))
    assert f2.algorithm is Algorithm.SWAPPING and f2.generations is None
    assert f2.target_sizes == list(range(1, 9)) + [25]


def test_thread_env(monkeypatch):
    monkeypatch.delenv("HYPERBOUND_THREADS", raising=False)
    assert default_workers() == 1
    monkeypatch.setenv("HYPERBOUND_THREADS", "3")
    assert default_workers() == 3
    monkeypatch.setenv("HYPERBOUND_THREADS", "x")
    with pytest.raises(ConfigError):
        default_workers()


# -- estimators --------------------------------------------------------------


def test_er_identical_is_infinite():
    c = Conjunction((0, 3))
    est = estimate_robustness(c, c, "er", 100, make_rng(0), 10)
    assert est.infinite and est.mean == math.inf


def test_pc_robustness_estimate():
    h = Conjunction((0, 1, 2))
    est = estimate_robustness(h, Conjunction((5,)), "pc", 100_000, make_rng(1), 20)
    assert not est.infinite
    assert abs(est.mean - 1.625) <= 3 * est.stderr
    again = estimate_robustness(h, Conjunction((5,)), "pc", 100_000, make_rng(1), 20)
    assert again == est


def test_estimate_risk_examples():
    h, c = Conjunction((0, 1, 2)), Conjunction((1, 2, 3))
    mu = float(error_mass(ConjunctionStructure(2, 1, 1)))
    p, se = estimate_risk(h, c, "er", 0, 50_000, make_rng(2), 12)
    assert abs(p - mu) <= 3 * se
    assert estimate_risk(h, c, "pc", 3, 1000, make_rng(2), 12)[0] == 1.0
    curve = [estimate_risk(h, c, "ci", r, 2000, make_rng(3), 12)[0] for r in range(5)]
    assert all(a <= b for a, b in zip(curve, curve[1:]))


def test_unbiasedness_hook():
    from hyperbound.conjunctions import robustness_exact
    s = ConjunctionStructure(2, 1, 2)
    h, c = Conjunction((0, 1, 3, 4)), Conjunction((0, 1, 2))
    exact = {d: float(robustness_exact(d, s)) for d in AttackDefinition}
    misses = 0
    for i in range(100):
        for d in AttackDefinition:
            e = estimate_robustness(h, c, d, 400, make_rng(9, i), 8)
            misses += abs(e.mean - exact[d]) > 5 * e.stderr
    assert misses <= 3


# -- experiments and CSV ------------------------------------------------------


def tiny(name):
    return load_config(str(DATA / f"{name}.cfg"))


@pytest.mark.parametrize("name", ["tiny_find_s", "tiny_swapping"])
def test_golden_csv(tmp_path, name):
    out = tmp_path / "run.csv"
    write_csv(run_experiment(tiny(name), workers=1).records, out)
    assert out.read_bytes() == (DATA / f"{name}.csv").read_bytes()


def test_seed_changes_output(tmp_path):
    cfg = tiny("tiny_find_s")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_csv(run_experiment(cfg).records, a)
    cfg.seed = 8
    write_csv(run_experiment(cfg).records, b)
    assert a.read_bytes() != b.read_bytes()


def test_workers_do_not_change_records():
    cfg = tiny("tiny_swapping")
    assert run_experiment(cfg, workers=2).records == run_experiment(cfg, workers=1).records


def test_header_only_csv(tmp_path):
    out = tmp_path / "empty.csv"
    write_csv([], out)
    assert out.read_text() == ",".join(CSV_COLUMNS) + "\n"


def test_csv_write_error_names_path(tmp_path):
    with pytest.raises(OSError) as info:
        write_csv([], tmp_path / "missing" / "x.csv")
    assert "x.csv" in str(info.value)


def test_infinite_row_format(tmp_path):
    out = tmp_path / "r.csv"
    write_csv(run_experiment(tiny("tiny_find_s")).records, out)
    rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
    er_inf = [r for r in rows if r[1] == "er" and r[10] == "1"]
    assert er_inf and all(r[9] == "" and r[11] == "inf" for r in er_inf)
    assert all(len(r) == len(CSV_COLUMNS) for r in rows)


def test_aggregates_exclude_infinite_runs():
    res = run_experiment(tiny("tiny_find_s"))
    a = res.aggregate_for(1, "er")
    assert a.infinite_runs == 3 and a.mean_distance is None and a.exact_identifications == 3
    pc = res.aggregate_for(3, "pc")
    finite = [r.estimates[AttackDefinition.PC].mean for r in res.records if r.target_size == 3]
    assert pc.mean_distance == pytest.approx(np.mean(finite))
    assert aggregate(res.records, [AttackDefinition.PC])[0].definition is AttackDefinition.PC
    text = format_aggregates(res.aggregates)
    assert text.splitlines()[0].split()[0] == "|c|"
    with pytest.raises(KeyError):
        res.aggregate_for(2, "er")
