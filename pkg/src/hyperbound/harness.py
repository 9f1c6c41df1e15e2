"""Monte Carlo estimation of attack quantities for learned conjunctions.

An experiment draws, for every target size and run index, a random target,
trains a learner on it and estimates the robustness of the result under each
attack definition from fresh uniform instances.  Every (target size, run)
pair owns a PCG64 substream, so results do not depend on scheduling.
"""
from __future__ import annotations

import csv
import enum
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .combinatorics import DomainError
from .conjunctions import (
    ALL_DEFINITIONS,
    AttackDefinition,
    Conjunction,
    ConjunctionStructure,
    instance_profiles,
    profile_distances,
    structure_of,
)
from .learning import find_s, make_rng, random_target, sample_uniform, swapping_run


class ConfigError(ValueError):
    """Malformed experiment configuration; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)
        self.line = line


class Algorithm(enum.Enum):
    FIND_S = "find_s"
    SWAPPING = "swapping"

    @classmethod
    def parse(cls, text: str) -> "Algorithm":
        key = text.strip().lower().replace("-", "_")
        aliases = {"finds": "find_s", "find_s": "find_s", "swapping": "swapping", "swap": "swapping"}
        if key not in aliases:
            raise ValueError(f"unknown algorithm {text!r}; use find_s or swapping")
        return cls(aliases[key])


def parse_int_list(text: str) -> list[int]:
    """``"1-8,25,30"`` -> ``[1, ..., 8, 25, 30]`` (order kept, duplicates dropped)."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = (int(p) for p in part.split("-", 1))
            if lo > hi:
                raise ValueError(f"empty range {part!r}")
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    seen = set()
    return [x for x in out if not (x in seen or seen.add(x))]


@dataclass
class ExperimentConfig:
    algorithm: Algorithm = Algorithm.FIND_S
    n: int = 100
    epsilon: float = 0.01
    delta: float = 0.05
    target_sizes: list[int] = field(default_factory=lambda: list(range(1, 101)))
    runs: int = 500
    eval_samples: int = 10_000
    seed: int = 0
    definitions: list[AttackDefinition] = field(default_factory=lambda: list(ALL_DEFINITIONS))
    generations: int | None = None  # Swapping only; None means 2 n q
    name: str = "experiment"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.n < 1:
            raise ConfigError("n must be positive")
        if not (0 < self.epsilon < 1 and 0 < self.delta < 1):
            raise ConfigError("epsilon and delta must lie in (0, 1)")
        if self.runs < 1:
            raise ConfigError("runs must be at least 1")
        if self.eval_samples < 1:
            raise ConfigError("eval_samples must be at least 1")
        if self.seed < 0 or self.seed >= 1 << 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if not self.target_sizes:
            raise ConfigError("target_sizes is empty")
        bad = [k for k in self.target_sizes if not 1 <= k <= self.n]
        if bad:
            raise ConfigError(f"target sizes outside [1, n]: {bad}")
        if not self.definitions:
            raise ConfigError("definitions is empty")
        if self.generations is not None and self.generations < 1:
            raise ConfigError("generations must be at least 1")

    # -- flat key=value text --------------------------------------------------

    @classmethod
    def from_text(cls, text: str, source: str | None = None) -> "ExperimentConfig":
        """Parse ``key = value`` lines; ``#`` starts a comment, blank lines are ignored."""
        values: dict = {}
        lines: dict = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"expected key = value, got {raw.strip()!r}", lineno, source)
            key, value = (p.strip() for p in line.split("=", 1))
            if key not in _CONFIG_PARSERS:
                raise ConfigError(f"unknown key {key!r}", lineno, source)
            if key in values:
                raise ConfigError(f"duplicate key {key!r} (first on line {lines[key]})", lineno, source)
            try:
                values[key] = _CONFIG_PARSERS[key](value)
            except (ValueError, DomainError) as exc:
                raise ConfigError(f"bad value for {key}: {exc}", lineno, source) from None
            lines[key] = lineno
        try:
            return cls(**values)
        except ConfigError as exc:
            raise ConfigError(str(exc), None, source) from None

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "ExperimentConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc.strerror}", None, str(path)) from None
        return cls.from_text(text, str(path))

    def to_text(self) -> str:
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            if isinstance(v, enum.Enum):
                v = v.value
            elif f.name == "definitions":
                v = ",".join(d.value for d in v)
            elif isinstance(v, list):
                v = ",".join(str(x) for x in v)
            out.append(f"{f.name} = {v}")
        return "\n".join(out) + "\n"


def _generations(text: str):
    return None if text.lower() in ("", "default", "auto") else int(text)


_CONFIG_PARSERS = {
    "name": str,
    "algorithm": Algorithm.parse,
    "n": int,
    "epsilon": float,
    "delta": float,
    "target_sizes": parse_int_list,
    "runs": int,
    "eval_samples": int,
    "seed": int,
    "definitions": lambda s: [AttackDefinition.parse(p) for p in s.split(",") if p.strip()],
    "generations": _generations,
}


BUNDLED_CONFIGS = ("figure1_small", "figure2_small", "figure1_full", "figure2_full")


def load_config(name_or_path: str) -> ExperimentConfig:
    """A bundled config by name (e.g. ``figure1_small``) or a config file path."""
    if name_or_path in BUNDLED_CONFIGS:
        ref = resources.files("hyperbound") / "configs" / f"{name_or_path}.cfg"
        return ExperimentConfig.from_text(ref.read_text(encoding="utf-8"), name_or_path)
    return ExperimentConfig.from_file(name_or_path)


# ---------------------------------------------------------------------------
# Estimators


@dataclass(frozen=True)
class Estimate:
    mean: float  # math.inf when some sampled instance is unreachable
    stderr: float
    infinite: bool


def _summarise(values: np.ndarray) -> Estimate:
    if np.isinf(values).any():
        return Estimate(math.inf, math.inf, True)
    k = len(values)
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(k)) if k > 1 else 0.0
    return Estimate(mean, stderr, False)


def sample_distances(h: Conjunction, c: Conjunction, definition, xs: np.ndarray) -> np.ndarray:
    """Exact per-instance perturbation distances for an instance batch."""
    st = structure_of(h, c, xs.shape[1])
    return profile_distances(definition, st, *instance_profiles(h, c, xs))


def estimate_robustness(h: Conjunction, c: Conjunction, definition, samples: int,
                        rng: np.random.Generator, n: int) -> Estimate:
    """Mean distance over ``samples`` fresh uniform instances."""
    if samples < 1:
        raise DomainError("samples must be at least 1")
    xs = sample_uniform(n, rng, samples)
    return _summarise(sample_distances(h, c, definition, xs))


def estimate_risk(h: Conjunction, c: Conjunction, definition, r: int, samples: int,
                  rng: np.random.Generator, n: int) -> tuple[float, float]:
    """Fraction of fresh instances whose distance is at most ``r``, with its standard error."""
    if samples < 1:
        raise DomainError("samples must be at least 1")
    xs = sample_uniform(n, rng, samples)
    hit = sample_distances(h, c, definition, xs) <= r
    p = float(hit.mean())
    return p, math.sqrt(p * (1 - p) / samples)


# ---------------------------------------------------------------------------
# Experiment driver


@dataclass
class RunRecord:
    target_size: int
    run_index: int
    hypothesis_size: int
    structure: ConjunctionStructure
    estimates: dict  # AttackDefinition -> Estimate, in config order
    algorithm: Algorithm = Algorithm.FIND_S
    n: int = 0
    seed: int = 0


def run_single(config: ExperimentConfig, target_size: int, run_index: int) -> RunRecord:
    rng = make_rng(config.seed, target_size, run_index)
    n = config.n
    target = random_target(n, target_size, rng)
    if config.algorithm is Algorithm.FIND_S:
        h = find_s(target, config.epsilon, config.delta, n, rng)
    else:
        h = swapping_run(target, config.epsilon, config.delta, n, config.generations, rng)
    # one evaluation sample shared by all definitions
    xs = sample_uniform(n, rng, config.eval_samples)
    est = {d: _summarise(sample_distances(h, target, d, xs)) for d in config.definitions}
    return RunRecord(target_size, run_index, h.size, structure_of(h, target, n), est,
                     config.algorithm, n, config.seed)


def _run_task(args):
    return run_single(*args)


def default_workers() -> int:
    raw = os.environ.get("HYPERBOUND_THREADS", "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"HYPERBOUND_THREADS must be an integer, got {raw!r}") from None


@dataclass
class Aggregate:
    target_size: int
    definition: AttackDefinition
    runs: int
    finite_runs: int
    infinite_runs: int
    mean_distance: float | None  # mean over finite runs; None if every run was infinite
    mean_hypothesis_size: float
    exact_identifications: int


def aggregate(records: Iterable[RunRecord], definitions: Iterable[AttackDefinition]) -> list[Aggregate]:
    by_size: dict = {}
    for rec in records:
        by_size.setdefault(rec.target_size, []).append(rec)
    out = []
    for size in sorted(by_size):
        recs = by_size[size]
        hsize = sum(r.hypothesis_size for r in recs) / len(recs)
        exact = sum(1 for r in recs if r.structure.identical)
        for d in definitions:
            finite = [r.estimates[d].mean for r in recs if not r.estimates[d].infinite]
            mean = sum(finite) / len(finite) if finite else None
            out.append(Aggregate(size, d, len(recs), len(finite), len(recs) - len(finite),
                                 mean, hsize, exact))
    return out


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[RunRecord]
    aggregates: list[Aggregate]

    def aggregate_for(self, target_size: int, definition) -> Aggregate:
        d = AttackDefinition.parse(definition)
        for a in self.aggregates:
            if a.target_size == target_size and a.definition is d:
                return a
        raise KeyError((target_size, d))


def run_experiment(config: ExperimentConfig, workers: int | None = None,
                   progress: Callable[[int, int], None] | None = None) -> ExperimentResult:
    config.validate()
    tasks = [(config, k, i) for k in config.target_sizes for i in range(config.runs)]
    workers = default_workers() if workers is None else workers
    records = []
    if workers <= 1:
        for done, task in enumerate(tasks, 1):
            records.append(_run_task(task))
            if progress:
                progress(done, len(tasks))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for done, rec in enumerate(pool.map(_run_task, tasks, chunksize=4), 1):
                records.append(rec)
                if progress:
                    progress(done, len(tasks))
    records.sort(key=lambda r: (r.target_size, r.run_index))
    return ExperimentResult(config, records, aggregate(records, config.definitions))


# ---------------------------------------------------------------------------
# CSV output

CSV_COLUMNS = (
    "algorithm", "definition", "n", "target_size", "run_index", "hypothesis_size",
    "m", "u", "w", "mean_distance", "infinite", "stderr", "seed",
)


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) else repr(float(x))


def csv_rows(records: Iterable[RunRecord]) -> list[list[str]]:
    rows = []
    for rec in records:
        s = rec.structure
        for d, e in rec.estimates.items():
            rows.append([
                rec.algorithm.value, d.value, str(rec.n), str(rec.target_size),
                str(rec.run_index), str(rec.hypothesis_size), str(s.m), str(s.u), str(s.w),
                "" if e.infinite else _fmt(e.mean), "1" if e.infinite else "0",
                _fmt(e.stderr), str(rec.seed),
            ])
    return rows


def write_csv(records: Iterable[RunRecord], path) -> None:
    """One row per (run, definition).

    An unreachable mean is left empty, flagged ``infinite = 1`` and its stderr
    column carries the token ``inf``.
    """
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            writer.writerows(csv_rows(records))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def format_aggregates(aggs: list[Aggregate]) -> str:
    lines = [f"{'|c|':>4} {'def':>3} {'mean':>9} {'inf':>4} {'|h|':>7} {'exact':>5}"]
    for a in aggs:
        mean = "-" if a.mean_distance is None else f"{a.mean_distance:.4f}"
        lines.append(f"{a.target_size:>4} {a.definition.value:>3} {mean:>9} "
                     f"{a.infinite_runs:>4} {a.mean_hypothesis_size:>7.2f} "
                     f"{a.exact_identifications:>5}")
    return "\n".join(lines)
