"""Exact attack analysis for monotone conjunctions under the uniform distribution.

A hypothesis ``h`` and target ``c`` share ``m`` variables; ``u`` variables
appear only in ``c`` (undiscovered) and ``w`` only in ``h`` (wrong).  For an
instance, the counts ``(j, zeta, xi)`` of falsified mutual, undiscovered
and wrong variables determine the minimal number of bit flips an adversary
needs under each attack definition, so every risk and robustness quantity is
a finite binomial-weighted sum over these profiles.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .combinatorics import DomainError, binomial

INF = math.inf


class AttackDefinition(enum.Enum):
    """Success criterion for a perturbed instance ``x'`` of an original ``x``.

    ER: ``h(x') != c(x')``; PC: ``h(x') != h(x)``; CI: ``h(x') != c(x)``.
    """

    ER = "er"
    PC = "pc"
    CI = "ci"

    @classmethod
    def parse(cls, text: "str | AttackDefinition") -> "AttackDefinition":
        if isinstance(text, cls):
            return text
        try:
            return cls(str(text).strip().lower())
        except ValueError:
            raise DomainError(f"unknown attack definition {text!r}; use er, pc or ci") from None


ALL_DEFINITIONS = (AttackDefinition.ER, AttackDefinition.PC, AttackDefinition.CI)


@dataclass(frozen=True)
class Conjunction:
    """Monotone conjunction over strictly increasing variable indices."""

    vars: tuple[int, ...] = ()

    def __post_init__(self):
        v = tuple(int(i) for i in self.vars)
        if any(i < 0 for i in v) or any(a >= b for a, b in zip(v, v[1:])):
            raise DomainError(f"conjunction indices must be strictly increasing and >= 0: {v}")
        object.__setattr__(self, "vars", v)

    @classmethod
    def of(cls, indices: Iterable[int]) -> "Conjunction":
        return cls(tuple(sorted(set(int(i) for i in indices))))

    @classmethod
    def full(cls, n: int) -> "Conjunction":
        return cls(tuple(range(n)))

    def __len__(self) -> int:
        return len(self.vars)

    def __contains__(self, i) -> bool:
        return i in self.vars

    def __iter__(self) -> Iterator[int]:
        return iter(self.vars)

    @property
    def size(self) -> int:
        return len(self.vars)

    def bitmask(self) -> int:
        out = 0
        for i in self.vars:
            out |= 1 << i
        return out

    def evaluate(self, x: Sequence[int]) -> bool:
        return all(x[i] for i in self.vars)

    def evaluate_batch(self, xs: np.ndarray) -> np.ndarray:
        """Truth values for a ``(count, n)`` 0/1 array; the empty conjunction is always true."""
        if not self.vars:
            return np.ones(xs.shape[0], dtype=bool)
        return xs[:, list(self.vars)].all(axis=1)

    def __str__(self) -> str:
        return "{" + ",".join(f"x{i}" for i in self.vars) + "}"


@dataclass(frozen=True)
class ConjunctionStructure:
    """Mutual/undiscovered/wrong variable counts of a (hypothesis, target) pair.

    ``n`` defaults to the number of relevant variables ``m + u + w``.  Either
    conjunction may be empty here (the Swapping learner visits the empty
    hypothesis); theorem formulas check their own nonemptiness requirements.
    """

    m: int
    u: int
    w: int
    n: int | None = None

    def __post_init__(self):
        if min(self.m, self.u, self.w) < 0:
            raise DomainError(f"structure counts must be nonnegative: {self}")
        if self.n is None:
            object.__setattr__(self, "n", self.m + self.u + self.w)
        elif self.m + self.u + self.w > self.n:
            raise DomainError(f"m + u + w exceeds n in {self}")

    @property
    def h_size(self) -> int:
        return self.m + self.w

    @property
    def c_size(self) -> int:
        return self.m + self.u

    @property
    def relevant(self) -> int:
        return self.m + self.u + self.w

    @property
    def identical(self) -> bool:
        return self.u == 0 and self.w == 0

    def profiles(self) -> Iterator["CaseProfile"]:
        for j in range(self.m + 1):
            for z in range(self.u + 1):
                for x in range(self.w + 1):
                    yield CaseProfile(j, z, x)

    def profile_weight(self, p: "CaseProfile") -> int:
        """Number of relevant assignments with profile ``p`` (out of ``2^(m+u+w)``)."""
        return binomial(self.m, p.j) * binomial(self.u, p.zeta) * binomial(self.w, p.xi)


def structure_of(h: Conjunction, c: Conjunction, n: int | None = None) -> ConjunctionStructure:
    hs, cs = set(h.vars), set(c.vars)
    if n is None:
        n = max(hs | cs, default=-1) + 1
    return ConjunctionStructure(len(hs & cs), len(cs - hs), len(hs - cs), n)


class CaseProfile(NamedTuple):
    j: int
    zeta: int
    xi: int


def error_mass(s: ConjunctionStructure) -> Fraction:
    """``Pr[h(x) != c(x)] = (2^w + 2^u - 2) / 2^(m+u+w)``."""
    return Fraction((1 << s.w) + (1 << s.u) - 2, 1 << s.relevant)


# ---------------------------------------------------------------------------
# Per-profile distances


def profile_distances(definition, s: ConjunctionStructure, j, zeta, xi) -> np.ndarray:
    """Vectorised minimal flip counts; entries are floats with ``inf`` for unreachable."""
    d = AttackDefinition.parse(definition)
    j, zeta, xi = (np.asarray(a, dtype=np.int64) for a in (j, zeta, xi))
    h_true = (j == 0) & (xi == 0)
    c_true = (j == 0) & (zeta == 0)
    hx = (j + xi).astype(float)

    if d is AttackDefinition.PC:
        flip_h = 1.0 if s.h_size >= 1 else INF
        return np.where(h_true, flip_h, hx)

    one_false = h_true != c_true
    if d is AttackDefinition.CI:
        flip_h = 1.0 if s.h_size >= 1 else INF
        both_true = np.full(j.shape, flip_h)
        return np.where(one_false, 0.0, np.where(h_true, both_true, hx))

    # ER, both false: make h true and c false (A) or the reverse (B)
    a = (j + xi + (zeta == 0)).astype(float) if s.u >= 1 else np.full(j.shape, INF)
    b = (j + zeta + (xi == 0)).astype(float) if s.w >= 1 else np.full(j.shape, INF)
    both_false = np.minimum(a, b)
    both_true = 1.0 if s.u + s.w >= 1 else INF
    return np.where(one_false, 0.0, np.where(h_true, both_true, both_false))


def perturbation_distance(definition, s: ConjunctionStructure, p: CaseProfile) -> float | int:
    """Minimal Hamming perturbation for one profile (``math.inf`` if none succeeds)."""
    if not (0 <= p.j <= s.m and 0 <= p.zeta <= s.u and 0 <= p.xi <= s.w):
        raise DomainError(f"profile {p} out of range for {s}")
    d = float(profile_distances(definition, s, [p.j], [p.zeta], [p.xi])[0])
    return d if d == INF else int(d)


def instance_profiles(h: Conjunction, c: Conjunction, xs: np.ndarray) -> tuple[np.ndarray, ...]:
    """``(j, zeta, xi)`` counts for each row of a 0/1 instance array."""
    hs, cs = set(h.vars), set(c.vars)
    zeros = xs == 0

    def count(idx):
        if not idx:
            return np.zeros(xs.shape[0], dtype=np.int64)
        return zeros[:, sorted(idx)].sum(axis=1)

    return count(hs & cs), count(cs - hs), count(hs - cs)


# ---------------------------------------------------------------------------
# Exact distributions


@dataclass
class DistanceDistribution:
    """Exact law of the perturbation distance of a uniform instance."""

    masses: dict = field(default_factory=dict)  # distance (int or inf) -> Fraction

    def total(self) -> Fraction:
        return sum(self.masses.values(), Fraction(0))

    def support(self) -> list:
        return sorted(self.masses)

    def cdf(self, r: int) -> Fraction:
        return sum((p for d, p in self.masses.items() if d <= r), Fraction(0))

    def expectation(self) -> Fraction | float:
        if self.masses.get(INF, 0) > 0:
            return INF
        return sum((d * p for d, p in self.masses.items()), Fraction(0))


def distance_distribution(definition, s: ConjunctionStructure) -> DistanceDistribution:
    """Aggregate profile distances with weights ``C(m,j) C(u,zeta) C(w,xi) / 2^(m+u+w)``."""
    jj, zz, xx = np.meshgrid(
        np.arange(s.m + 1), np.arange(s.u + 1), np.arange(s.w + 1), indexing="ij"
    )
    dist = profile_distances(definition, s, jj, zz, xx)
    rows = [[binomial(k, i) for i in range(k + 1)] for k in (s.m, s.u, s.w)]
    counts: dict = {}
    for (j, z, x), d in np.ndenumerate(dist):
        key = INF if d == INF else int(d)
        counts[key] = counts.get(key, 0) + rows[0][j] * rows[1][z] * rows[2][x]
    den = 1 << s.relevant
    return DistanceDistribution({d: Fraction(c, den) for d, c in sorted(counts.items())})


def risk_exact(definition, s: ConjunctionStructure, r: int) -> Fraction:
    """Probability that at most ``r`` flips reach a successful instance."""
    if r < 0:
        raise DomainError("budget must be nonnegative")
    return distance_distribution(definition, s).cdf(r)


def robustness_exact(definition, s: ConjunctionStructure) -> Fraction | float:
    """Expected minimal perturbation; ``math.inf`` if some instances are unreachable."""
    return distance_distribution(definition, s).expectation()


# ---------------------------------------------------------------------------
# Closed-form theorem values


def er_risk_theorem_lb(s: ConjunctionStructure, r: int) -> Fraction:
    """Piecewise lower bound on the error-region risk for ``h != c``.

    The middle regime sums binomials over ``min(u, w)`` with prefactor
    ``2^-min(u, w) / 4``; this form is checked only as a lower bound.
    """
    if s.identical:
        raise DomainError("the bound needs h != c (the risk is 0 when they coincide)")
    if r < 0:
        raise DomainError("budget must be nonnegative")
    half = s.m // 2
    low = min(s.u, s.w)
    top = min(s.h_size, s.c_size)
    if r >= 1 + top:
        return Fraction(1)
    if r <= half:
        return error_mass(s) * sum(binomial(s.m, i) for i in range(r + 1))
    gamma = r - half
    if gamma <= low // 2:
        acc = sum(binomial(low, z) for z in range(1, gamma + 1))
        return Fraction(acc, 4 << low)
    return Fraction(1, 8)


def er_robustness_theorem_bounds(s: ConjunctionStructure) -> tuple:
    """``(min(|h|,|c|) / 16, 1 + min(|h|,|c|))``, or ``(inf, inf)`` when ``h == c``."""
    if s.identical:
        return INF, INF
    top = min(s.h_size, s.c_size)
    return Fraction(top, 16), Fraction(1 + top)


def _require_hypothesis(h_size: int) -> None:
    if h_size < 1:
        raise DomainError("the formula needs a nonempty hypothesis")


def pc_risk_formula(h_size: int, r: int) -> Fraction:
    """``2^-|h| * sum_{i<=r} C(|h|, i)`` for ``r >= 1``, and 0 at ``r = 0``."""
    _require_hypothesis(h_size)
    if r <= 0:
        return Fraction(0)
    return Fraction(sum(binomial(h_size, i) for i in range(r + 1)), 1 << h_size)


def pc_robustness_formula(h_size: int) -> Fraction:
    """``|h| / 2 + 2^-|h|``."""
    _require_hypothesis(h_size)
    return Fraction(h_size, 2) + Fraction(1, 1 << h_size)


def ci_risk_formula(s: ConjunctionStructure, r: int) -> Fraction:
    _require_hypothesis(s.h_size)
    if r < 0:
        raise DomainError("budget must be nonnegative")
    if r == 0:
        return error_mass(s)
    if r >= s.h_size:
        return Fraction(1)
    h_part = Fraction(sum(binomial(s.h_size, i) for i in range(r + 1)), 1 << s.h_size)
    if r >= s.w:
        return h_part
    w_part = Fraction(sum(binomial(s.w, i) for i in range(r + 1)), 1 << (s.h_size + s.u))
    return Fraction(1, 1 << s.c_size) + h_part - w_part


def ci_robustness_bounds(s: ConjunctionStructure) -> tuple[Fraction, Fraction]:
    """Open interval ``(|h| / 4, |h| + 1/2)`` containing the CI robustness.

    Needs both conjunctions nonempty: with an empty target the robustness is
    ``2^-|h|``, which falls below ``|h| / 4``.
    """
    _require_hypothesis(s.h_size)
    if s.c_size < 1:
        raise DomainError("the bounds need a nonempty target")
    return Fraction(s.h_size, 4), Fraction(2 * s.h_size + 1, 2)


# ---------------------------------------------------------------------------
# Brute-force oracles


def _succeeds(d: AttackDefinition, hm: int, cm: int, x: int, y: int) -> bool:
    hy = (y & hm) == hm
    if d is AttackDefinition.ER:
        return hy != ((y & cm) == cm)
    if d is AttackDefinition.PC:
        return hy != ((x & hm) == hm)
    return hy != ((x & cm) == cm)


BRUTE_FORCE_MAX_N = 20


def brute_force_distance(definition, h: Conjunction, c: Conjunction, x: Sequence[int]) -> float | int:
    """Minimal perturbation by growing Hamming spheres around ``x`` (``n <= 20``)."""
    d = AttackDefinition.parse(definition)
    n = len(x)
    if n > BRUTE_FORCE_MAX_N:
        raise DomainError(f"exhaustive search limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    if max(h.vars + c.vars, default=-1) >= n:
        raise DomainError("conjunction index outside the instance dimension")
    hm, cm = h.bitmask(), c.bitmask()
    xb = sum(1 << i for i, bit in enumerate(x) if bit)
    for radius in range(n + 1):
        for flips in itertools.combinations(range(n), radius):
            y = xb
            for i in flips:
                y ^= 1 << i
            if _succeeds(d, hm, cm, xb, y):
                return radius
    return INF


def _multi_source_bfs(targets: np.ndarray, nbits: int) -> np.ndarray:
    """Hamming distance from every node of ``{0,1}^nbits`` to a boolean node set."""
    dist = np.where(targets, 0.0, INF)
    idx = np.arange(1 << nbits)
    for _ in range(nbits):
        new = dist
        for bit in range(nbits):
            new = np.minimum(new, dist[idx ^ (1 << bit)] + 1)
        if np.array_equal(new, dist):
            break
        dist = new
    return dist


def cube_distances(definition, s: ConjunctionStructure) -> np.ndarray:
    """Brute-force distances for every assignment of the relevant variables.

    Bits ``0..m-1`` are mutual, then ``u`` undiscovered, then ``w`` wrong
    variables.  Entry ``x`` is the true minimal perturbation of instance ``x``
    found by breadth-first search over the whole cube.
    """
    d = AttackDefinition.parse(definition)
    nbits = s.relevant
    mutual = (1 << s.m) - 1
    und = ((1 << s.u) - 1) << s.m
    wrong = ((1 << s.w) - 1) << (s.m + s.u)
    hm, cm = mutual | wrong, mutual | und
    idx = np.arange(1 << nbits)
    h_val = (idx & hm) == hm
    c_val = (idx & cm) == cm
    if d is AttackDefinition.ER:
        return _multi_source_bfs(h_val != c_val, nbits)
    to_h0, to_h1 = _multi_source_bfs(~h_val, nbits), _multi_source_bfs(h_val, nbits)
    ref = h_val if d is AttackDefinition.PC else c_val
    return np.where(ref, to_h0, to_h1)


def cube_profiles(s: ConjunctionStructure) -> tuple[np.ndarray, ...]:
    """``(j, zeta, xi)`` for every assignment in the bit layout of ``cube_distances``."""
    idx = np.arange(1 << s.relevant)
    bits = (idx[:, None] >> np.arange(s.relevant)) & 1
    zeros = 1 - bits
    j = zeros[:, : s.m].sum(axis=1)
    z = zeros[:, s.m : s.m + s.u].sum(axis=1)
    x = zeros[:, s.m + s.u :].sum(axis=1)
    return j, z, x
