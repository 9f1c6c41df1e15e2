"""Uniform sampling and two learners for monotone conjunctions.

Randomness comes from numpy's PCG64.  A run's stream is derived from a
``SeedSequence`` over ``(seed, *keys)``, so run ``i`` of target size ``k``
sees the same bits however many runs execute or in what order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction

import numpy as np

from .combinatorics import DomainError, as_fraction
from .conjunctions import Conjunction, ConjunctionStructure, error_mass, structure_of

__all__ = [
    "Conjunction",
    "make_rng",
    "sample_uniform",
    "random_target",
    "sample_size",
    "find_s",
    "find_s_update",
    "find_s_from_examples",
    "SwappingParams",
    "swapping_params",
    "swapping_q",
    "true_performance",
    "perf_estimate",
    "neighbourhoods",
    "swapping_step",
    "swapping_run",
]


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """PCG64 generator for the substream ``(seed, *keys)``."""
    if seed < 0 or any(k < 0 for k in keys):
        raise DomainError("seed and substream keys must be nonnegative")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *keys])))


def sample_uniform(n: int, rng: np.random.Generator, count: int | None = None) -> np.ndarray:
    """One instance (shape ``(n,)``) or ``count`` instances (shape ``(count, n)``) of fair bits."""
    shape = (n,) if count is None else (count, n)
    return rng.integers(0, 2, size=shape, dtype=np.uint8)


def random_target(n: int, size: int, rng: np.random.Generator) -> Conjunction:
    if not 1 <= size <= n:
        raise DomainError(f"target size must lie in [1, {n}], got {size}")
    return Conjunction.of(rng.choice(n, size=size, replace=False))


def sample_size(epsilon, delta, n: int) -> int:
    """``ceil(ln((2^n - 1) / delta) / epsilon)`` evaluated in 80-digit decimal arithmetic."""
    eps, dlt = as_fraction(epsilon), as_fraction(delta)
    if not (0 < eps < 1 and 0 < dlt < 1):
        raise DomainError("need 0 < epsilon, delta < 1")
    with localcontext() as ctx:
        ctx.prec = 80
        size = Decimal((1 << n) - 1)
        val = (size.ln() - (Decimal(dlt.numerator) / Decimal(dlt.denominator)).ln())
        val = val * Decimal(eps.denominator) / Decimal(eps.numerator)
        return int(val.to_integral_value(rounding="ROUND_CEILING"))


# ---------------------------------------------------------------------------
# Find-S


def find_s_update(h: Conjunction, x, label: bool) -> Conjunction:
    """Drop from ``h`` every variable falsified by a positive example."""
    if not label:
        return h
    return Conjunction(tuple(i for i in h.vars if x[i]))


def find_s_from_examples(examples: np.ndarray, labels: np.ndarray, n: int) -> Conjunction:
    """Batch form: intersection of the one-bits of all positive examples."""
    examples = np.asarray(examples)
    pos = examples[np.asarray(labels, dtype=bool)]
    if pos.shape[0] == 0:
        return Conjunction.full(n)
    return Conjunction(tuple(int(i) for i in np.flatnonzero(pos.all(axis=0))))


def find_s(target: Conjunction, epsilon, delta, n: int, rng: np.random.Generator,
           m: int | None = None) -> Conjunction:
    """Learn ``target`` from ``sample_size(epsilon, delta, n)`` uniform labelled examples."""
    if target.size == 0:
        raise DomainError("target must be nonempty")
    m = sample_size(epsilon, delta, n) if m is None else m
    xs = sample_uniform(n, rng, m)
    return find_s_from_examples(xs, target.evaluate_batch(xs), n)


# ---------------------------------------------------------------------------
# Swapping algorithm


def swapping_q(epsilon) -> int:
    """Smallest ``q`` with ``2^q >= 3 / (2 epsilon)``, computed exactly."""
    eps = as_fraction(epsilon)
    if not 0 < eps < 1:
        raise DomainError("need 0 < epsilon < 1")
    goal = Fraction(3) / (2 * eps)
    q = max(0, math.floor(math.log2(goal)) - 1)
    while (1 << q) < goal:
        q += 1
    return q


@dataclass(frozen=True)
class SwappingParams:
    q: int
    tolerance: Fraction
    epsilon_s: Fraction
    delta_s: Fraction
    perf_samples: int


def perf_sample_size(epsilon_s, delta_s) -> int:
    """Hoeffding size ``ceil(ln(2 / delta_s) / (2 epsilon_s^2))`` for a [-1, 1] mean."""
    eps, dlt = as_fraction(epsilon_s), as_fraction(delta_s)
    with localcontext() as ctx:
        ctx.prec = 60
        val = (Decimal(2 * dlt.denominator) / Decimal(dlt.numerator)).ln()
        val = val * Decimal(eps.denominator ** 2) / Decimal(2 * eps.numerator ** 2)
        return int(val.to_integral_value(rounding="ROUND_CEILING"))


def swapping_params(epsilon, delta, n: int) -> SwappingParams:
    q = swapping_q(epsilon)
    t = Fraction(1, 1 << (2 * q))
    delta_s = as_fraction(delta) / (6 * q * q * n)
    return SwappingParams(q, t, t, delta_s, perf_sample_size(t, delta_s))


def _mu(m, u, w):
    """Vectorised float version of ``error_mass``."""
    m, u, w = (np.asarray(a, dtype=float) for a in (m, u, w))
    return (np.exp2(w) + np.exp2(u) - 2) * np.exp2(-(m + u + w))


def true_performance(s: ConjunctionStructure) -> Fraction:
    """Expected agreement score ``E[+1 if h(x) == c(x) else -1] = 1 - 2 mu``."""
    return 1 - 2 * error_mass(s)


def _draw_scores(mu: np.ndarray, samples: int, rng: np.random.Generator) -> np.ndarray:
    # the number of agreeing draws among `samples` uniform instances is Binomial(samples, 1 - mu)
    agree = rng.binomial(samples, np.clip(1 - mu, 0.0, 1.0))
    return 2 * agree / samples - 1


def perf_estimate(h: Conjunction, c: Conjunction, epsilon_s, delta_s, n: int,
                  rng: np.random.Generator, draw: str = "count") -> float:
    """Empirical agreement score over a Hoeffding-sized uniform sample.

    ``draw="count"`` draws the number of agreements directly from its exact
    binomial law; ``draw="instances"`` samples the instances one by one and
    is only practical when the sample size is small.
    """
    s = perf_sample_size(epsilon_s, delta_s)
    if draw == "count":
        st = structure_of(h, c, n)
        return float(_draw_scores(_mu(st.m, st.u, st.w), s, rng))
    if draw != "instances":
        raise DomainError(f"unknown draw mode {draw!r}")
    agree, left = 0, s
    while left:
        k = min(left, 1 << 16)
        xs = sample_uniform(n, rng, k)
        agree += int((h.evaluate_batch(xs) == c.evaluate_batch(xs)).sum())
        left -= k
    return 2 * agree / s - 1


@dataclass
class Neighbourhood:
    """Candidate moves from ``h``: removals, additions and swaps, as index arrays."""

    remove: np.ndarray  # variable dropped
    add: np.ndarray  # variable added
    swap_out: np.ndarray
    swap_in: np.ndarray

    @property
    def sizes(self) -> tuple[int, int, int]:
        return len(self.remove), len(self.add), len(self.swap_out)


def neighbourhoods(h: Conjunction, n: int, q: int) -> Neighbourhood:
    inside = np.array(h.vars, dtype=np.int64)
    outside = np.setdiff1d(np.arange(n), inside)
    k = len(inside)
    empty = np.zeros(0, dtype=np.int64)
    remove = inside if k > 0 else empty
    add = outside if k < q else empty
    if k <= q and k > 0:
        swap_out = np.repeat(inside, len(outside))
        swap_in = np.tile(outside, k)
    else:
        swap_out = swap_in = empty
    return Neighbourhood(remove, add, swap_out, swap_in)


def swapping_step(h: Conjunction, c: Conjunction, n: int, params: SwappingParams,
                  rng: np.random.Generator) -> Conjunction:
    """One mutator generation: score neighbours, then pick a beneficial or neutral one."""
    st = structure_of(h, c, n)
    in_c = np.zeros(n, dtype=bool)
    in_c[list(c.vars)] = True
    nb = neighbourhoods(h, n, params.q)
    r, a = in_c[nb.remove].astype(int), in_c[nb.add].astype(int)
    so, si = in_c[nb.swap_out].astype(int), in_c[nb.swap_in].astype(int)
    # structure shift of each candidate relative to (m, u, w); u always moves opposite to m
    dm = np.concatenate([-r, a, si - so])
    dw = np.concatenate([r - 1, 1 - a, so - si])
    mu = _mu(st.m + dm, st.u - dm, st.w + dw)

    s = params.perf_samples
    nu_h = float(_draw_scores(_mu(st.m, st.u, st.w), s, rng))
    est = _draw_scores(mu, s, rng)

    n_minus, n_plus, n_swap = nb.sizes
    group = n_minus + n_plus + 1
    weights = np.concatenate([
        np.full(n_minus + n_plus, 0.5 / group),
        np.full(n_swap, 0.5 / n_swap) if n_swap else np.zeros(0),
    ])
    t = float(params.tolerance)
    bene = est > nu_h + t
    if bene.any():
        pool = np.flatnonzero(bene)
        w = weights[pool]
    else:
        # neutral candidates plus h itself (index -1)
        pool = np.append(np.flatnonzero(est >= nu_h - t), -1)
        w = np.append(weights[pool[:-1]], 0.5 / group)
    pick = int(pool[rng.choice(len(pool), p=w / w.sum())])
    if pick < 0:
        return h
    vars_ = set(h.vars)
    if pick < n_minus:
        vars_.discard(int(nb.remove[pick]))
    elif pick < n_minus + n_plus:
        vars_.add(int(nb.add[pick - n_minus]))
    else:
        i = pick - n_minus - n_plus
        vars_.discard(int(nb.swap_out[i]))
        vars_.add(int(nb.swap_in[i]))
    return Conjunction.of(vars_)


def swapping_run(target: Conjunction, epsilon, delta, n: int, generations: int | None,
                 rng: np.random.Generator, trace: list | None = None) -> Conjunction:
    """Evolve from the empty conjunction for ``generations`` steps (default ``2 n q``)."""
    params = swapping_params(epsilon, delta, n)
    if generations is None:
        generations = 2 * n * params.q
    if generations < 1:
        raise DomainError("generations must be at least 1")
    h = Conjunction()
    for _ in range(generations):
        h = swapping_step(h, target, n, params, rng)
        if trace is not None:
            trace.append(h)
    return h
