"""Exact binomial arithmetic on the Boolean hypercube.

Everything that represents a probability mass under the uniform distribution
on ``{0,1}^n`` is returned as a :class:`fractions.Fraction`; nothing is rounded
until :func:`render` is asked to print it.

Binomial rows are produced with the multiplicative recurrence
``C(n, i+1) = C(n, i) * (n - i) // (i + 1)`` so that every step costs a single
big-integer multiply and an exact division.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, NamedTuple, Union

Rational = Union[Fraction, int]

# Rows up to this dimension are cached whole; larger rows are streamed.
ROW_CACHE_MAX = 20_000


class DomainError(ValueError):
    """An argument lies outside the domain of the requested quantity."""


def as_fraction(x) -> Fraction:
    """Convert ``x`` to the exact rational it denotes.

    Strings are parsed as decimals (``"0.01"`` is exactly ``1/100``).  Floats
    go through their shortest ``repr`` so that ``0.01`` also becomes ``1/100``
    rather than the binary neighbour of 0.01.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise DomainError(f"not a finite number: {x!r}")
        return Fraction(repr(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse {x!r} as a rational") from exc
    return Fraction(x)


def binomial(n: int, k: int) -> int:
    """n choose k, with the convention that it is 0 for k outside 0..n."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


@lru_cache(maxsize=8)
def _cached_row(n: int) -> tuple[int, ...]:
    row = [1] * (n + 1)
    for i in range(n):
        row[i + 1] = row[i] * (n - i) // (i + 1)
    return tuple(row)


def binomial_row(n: int) -> tuple[int, ...]:
    """The full row ``(C(n,0), ..., C(n,n))``. Cached for moderate ``n``."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    if n <= ROW_CACHE_MAX:
        return _cached_row(n)
    return tuple(iter_binomials(n))


def iter_binomials(n: int, start: int = 0, stop: int | None = None) -> Iterator[int]:
    """Yield ``C(n, i)`` for ``i = start .. stop-1`` (``stop`` defaults to n+1)."""
    stop = n + 1 if stop is None else min(stop, n + 1)
    if start >= stop:
        return
    b = math.comb(n, start)
    for i in range(start, stop):
        yield b
        b = b * (n - i) // (i + 1)


def lower_layer_sum(n: int, k: int) -> int:
    """``sum_{i<k} C(n, i)``, i.e. ``2^n * BSize(k, 0)`` (0 for k <= 0)."""
    if k <= 0:
        return 0
    if k > n:
        return 1 << n
    if 2 * k > n + 1:
        # Use the shorter side: sum_{i<k} = 2^n - sum_{i<=n-k}.
        return (1 << n) - sum(iter_binomials(n, 0, n - k + 1))
    return sum(iter_binomials(n, 0, k))


# ---------------------------------------------------------------------------
# Fractional Hamming balls


class BallIndex(NamedTuple):
    """``(k, lam)``: all layers below ``k`` plus a ``lam`` fraction of layer ``k``."""

    k: int
    lam: Fraction


def bsize(n: int, k: int, lam: Rational = 0, *, cap: bool = False) -> Fraction:
    """Normalised size of the fractional Hamming ball ``(k, lam)`` in ``{0,1}^n``.

    ``2^-n * (sum_{i<k} C(n,i) + lam * C(n,k))``.  With ``cap=True`` any
    ``k > n`` is accepted and gives 1, which makes budget sums total.
    """
    lam = as_fraction(lam)
    if not 0 <= lam < 1:
        raise DomainError(f"lambda must lie in [0, 1), got {lam}")
    if k < 0:
        raise DomainError(f"k must be nonnegative, got {k}")
    if k > n:
        if cap:
            return Fraction(1)
        raise DomainError(f"k={k} exceeds n={n}")
    total = lower_layer_sum(n, k) + lam * binomial(n, k)
    return Fraction(total) / (1 << n)


def bsize_inv(n: int, mu: Rational) -> BallIndex:
    """The unique ``(k, lam)`` with ``bsize(n, k, lam) == mu``.

    Works for any rational ``mu`` in ``[0, 1)``, not only dyadic ones; ``lam``
    is then an exact rational with a non-power-of-two denominator.
    """
    mu = as_fraction(mu)
    if not 0 <= mu < 1:
        raise DomainError(f"mu must lie in [0, 1), got {mu}")
    scaled = mu * (1 << n)  # target count, possibly fractional
    acc = 0
    for k, b in enumerate(iter_binomials(n)):
        if acc + b > scaled:
            return BallIndex(k, (scaled - acc) / b)
        acc += b
    raise AssertionError("unreachable: mu < 1")  # pragma: no cover


# ---------------------------------------------------------------------------
# Binomial tails


class TailKind(enum.Enum):
    """The four tail quantities of Binomial(n, 1/2)."""

    C = "C"  # upper tail P[X >= t]
    D = "D"  # mass outside the t central layers
    BALL = "Ball"  # lower tail P[X <= t]
    RHO = "rho"  # E[(X - t)^+]

    @classmethod
    def parse(cls, s: "str | TailKind") -> "TailKind":
        if isinstance(s, cls):
            return s
        for kind in cls:
            if kind.value.lower() == str(s).lower():
                return kind
        raise DomainError(f"unknown tail kind {s!r}; expected one of C, D, Ball, rho")


def central_window(n: int, t: int) -> tuple[int, int]:
    """Summation limits ``((n-t+1)//2, (n+t-1)//2)`` of the D quantity.

    When ``n + t`` is odd these are the exact integers of the defining sum.
    When it is even the lower limit is floored, which keeps the window at
    exactly ``t`` layers and reproduces published D values at even ``n + t``.
    """
    return (n - t + 1) // 2, (n + t - 1) // 2


def binomial_tail(kind, n: int, t: int, *, strict_parity: bool = False) -> Fraction:
    """Exact value of C(t,n), D(t,n), Ball(t,n) or rho(t,n).

    * ``C(t, n)    = 2^-n sum_{i=t}^{n} C(n,i)``
    * ``D(t, n)    = 1 - 2^-n sum_{i=(n-t+1)/2}^{(n+t-1)/2} C(n,i)``
    * ``Ball(t, n) = 2^-n sum_{i=0}^{t} C(n,i)``
    * ``rho(t, n)  = 2^-n sum_{i=0}^{n-t} i C(n, t+i)``

    ``strict_parity`` rejects D at even ``n + t`` instead of flooring.
    """
    kind = TailKind.parse(kind)
    if n < 0:
        raise DomainError("n must be nonnegative")
    if not 0 <= t <= n:
        raise DomainError(f"t must lie in 0..n={n}, got {t}")
    full = 1 << n
    if kind is TailKind.C:
        # sum_{i>=t} C(n,i) = sum_{i<=n-t} C(n,i) by symmetry
        return Fraction(full - lower_layer_sum(n, t), full)
    if kind is TailKind.BALL:
        return Fraction(lower_layer_sum(n, t + 1), full)
    if kind is TailKind.D:
        if strict_parity and (n + t) % 2 == 0:
            raise DomainError(f"D(t, n) needs n + t odd; got n={n}, t={t}")
        lo, hi = central_window(n, t)
        inside = sum(iter_binomials(n, lo, hi + 1)) if hi >= lo else 0
        return Fraction(full - inside, full)
    # rho: sum_{j=t}^{n} (j - t) C(n, j)
    acc = 0
    for j, b in enumerate(iter_binomials(n, t), start=t):
        acc += (j - t) * b
    return Fraction(acc, full)


@dataclass(frozen=True)
class ThresholdCrossing:
    """Bracket ``value(t) >= gamma > value(t + 1)`` of a nonincreasing tail."""

    kind: TailKind
    n: int
    gamma: Fraction
    t: int
    value_at_t: Fraction
    value_at_t_plus_1: Fraction

    @property
    def nearest(self) -> int:
        """Whichever of ``t``, ``t + 1`` has its value closer to ``gamma``."""
        below = self.gamma - self.value_at_t_plus_1
        above = self.value_at_t - self.gamma
        return self.t + 1 if below < above else self.t

    @property
    def nearest_value(self) -> Fraction:
        return self.value_at_t if self.nearest == self.t else self.value_at_t_plus_1


def threshold_crossing(kind, n: int, gamma) -> ThresholdCrossing:
    """Locate where C(., n) or D(., n) passes below ``gamma``.

    Both quantities are nonincreasing in ``t``, so a single sweep outward
    (from the outer layers for C, from the centre for D) finds the crossing
    with exact integer comparisons.
    """
    kind = TailKind.parse(kind)
    gamma = as_fraction(gamma)
    if kind not in (TailKind.C, TailKind.D):
        raise DomainError("threshold_crossing supports only C and D")
    if not 0 < gamma < 1:
        raise DomainError(f"gamma must lie in (0, 1), got {gamma}")
    full = 1 << n
    target = gamma * full
    if kind is TailKind.C:
        # 2^n C(n - j, n) = S_j = sum_{i<=j} C(n,i); find the first S_j >= target
        acc = 0
        for j, b in enumerate(iter_binomials(n)):
            prev = acc
            acc += b
            if acc >= target:
                t = n - j
                return ThresholdCrossing(kind, n, gamma, t,
                                         Fraction(acc, full), Fraction(prev, full))
        raise AssertionError("unreachable")  # pragma: no cover
    # D: the window [lo(t), hi(t)] gains exactly one layer per step of t,
    # alternating sides; track the binomials at both edges.
    inside = 0
    lo, hi = central_window(n, 0)  # empty window
    b_lo = b_hi = 0
    for t in range(n + 1):
        nlo, nhi = central_window(n, t + 1)
        if t == 0:
            b_lo = b_hi = added = math.comb(n, nlo)
        elif nlo < lo:
            b_lo = b_lo * lo // (n - lo + 1)
            added = b_lo
        else:
            b_hi = b_hi * (n - hi) // (hi + 1)
            added = b_hi
        value_t = full - inside
        if value_t - added < target:
            return ThresholdCrossing(kind, n, gamma, t, Fraction(value_t, full),
                                     Fraction(value_t - added, full))
        inside += added
        lo, hi = nlo, nhi
    raise AssertionError("unreachable")  # pragma: no cover


# ---------------------------------------------------------------------------
# Approximate mode for very large n


def log2_binomial(n: int, k: int) -> float:
    return (math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)) / math.log(2)


def approx_upper_tail(n: int, t: int) -> float:
    """Floating C(t, n) by log-space accumulation.

    Each term carries ``lgamma`` rounding of order ``n * 1e-16`` in its
    exponent, so the relative error is bounded by roughly ``n * 2e-16``
    (about 2e-10 at n = 10^6).  Intended only for n beyond exact reach.
    """
    if not 0 <= t <= n:
        raise DomainError(f"t must lie in 0..n={n}, got {t}")
    # terms decay fast away from the peak term; stop once negligible
    logs = []
    peak = None
    for i in range(t, n + 1):
        v = log2_binomial(n, i) - n
        if peak is None or v > peak:
            peak = v
        logs.append(v)
        if i > n // 2 and v < peak - 80:
            break
    return sum(2.0 ** (v - peak) for v in logs) * 2.0 ** peak


# ---------------------------------------------------------------------------
# Rendering


def _decimal_exponent(x: Fraction) -> int:
    """The integer e with 10^e <= x < 10^(e+1), for x > 0."""
    e = math.floor((x.numerator.bit_length() - x.denominator.bit_length()) * math.log10(2))
    while _pow10(e) > x:
        e -= 1
    while _pow10(e + 1) <= x:
        e += 1
    return e


def _pow10(e: int) -> Fraction:
    return Fraction(10 ** e) if e >= 0 else Fraction(1, 10 ** -e)


def render(x: Rational, digits: int = 6, rounding: str = "half-even") -> str:
    """Decimal string of an exact rational at ``digits`` significant digits.

    ``rounding`` is ``"half-even"`` (default) or ``"down"`` (truncation,
    the convention of tables that print "0.0104635...").
    """
    x = as_fraction(x)
    if digits < 1:
        raise DomainError("digits must be positive")
    if rounding not in ("half-even", "down"):
        raise DomainError(f"unknown rounding {rounding!r}")
    if x == 0:
        return "0"
    sign = "-" if x < 0 else ""
    x = abs(x)
    e = _decimal_exponent(x)
    scale = Fraction(10) ** (digits - 1 - e)
    scaled = x * scale
    q = math.floor(scaled) if rounding == "down" else round(scaled)
    if q >= 10 ** digits:  # rounding carried into a new digit
        e += 1
        q //= 10
    s = str(q).rjust(digits, "0")
    point = e + 1  # digits before the decimal point
    if point <= 0:
        out = "0." + "0" * (-point) + s
    elif point >= digits:
        out = s + "0" * (point - digits)
    else:
        out = s[:point] + "." + s[point:]
    if "." in out:
        out = out.rstrip("0").rstrip(".")
    return sign + out


def truncate_digits(x: Rational, printed: str) -> bool:
    """True when ``printed`` is a digit-for-digit prefix of the decimal of ``x``."""
    x = as_fraction(x)
    places = len(printed.split(".")[1]) if "." in printed else 0
    return math.floor(x * 10 ** places) == round(Fraction(printed) * 10 ** places)


# ---------------------------------------------------------------------------
# Real-valued helpers


def entropy(p: float) -> float:
    """Binary entropy in bits."""
    if not 0 < p < 1:
        raise DomainError(f"entropy needs 0 < p < 1, got {p}")
    q = 1.0 - p
    return -(p * math.log2(p) + q * math.log2(q))


def entropy_bracket(c: float) -> tuple[float, float]:
    """Interval ``(c / (2 lg(4/c)), c / lg(1/c))`` known to contain H^-1(c)."""
    lo = c / (2 * math.log2(4 / c))
    hi = math.inf if c >= 1 else c / math.log2(1 / c)
    return lo, hi


def entropy_bracket_tight(c: float) -> tuple[float, float]:
    """Closed interval ``[c / (2 lg(4/c)), c / lg(5.84/c)]``, valid for c <= 0.833."""
    if not 0 < c <= 0.833:
        raise DomainError("the tight entropy bracket needs 0 < c <= 0.833")
    return c / (2 * math.log2(4 / c)), c / math.log2(5.84 / c)


def entropy_solve(c: float, tol: float = 1e-12) -> float:
    """The root ``p`` in ``(0, 1/2]`` of ``H(p) = c``, by bisection."""
    if not 0 < c <= 1:
        raise DomainError(f"entropy_solve needs 0 < c <= 1, got {c}")
    if c == 1:
        return 0.5
    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if entropy(mid) < c:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


# Acklam's rational approximation to the normal quantile (relative error 1.15e-9).
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def _acklam(p: float) -> float:
    if p < _P_LOW:
        q = math.sqrt(-2 * math.log(p))
        return ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
                / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1))
    if p > 1 - _P_LOW:
        return -_acklam(1 - p)
    q = p - 0.5
    r = q * q
    return ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
            / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1))


def normal_quantile(p: float) -> float:
    """Inverse of :func:`normal_cdf`: Acklam's approximation plus one Halley step."""
    if not 0 < p < 1:
        raise DomainError(f"normal_quantile needs 0 < p < 1, got {p}")
    x = _acklam(p)
    e = normal_cdf(x) - p
    u = e / normal_pdf(x)
    return x - u / (1 + 0.5 * x * u)


def hoeffding_k_lower(n: int, mu: float) -> float:
    """``(n - sqrt(-2 ln(mu) n)) / 2 + 1``, a lower bound on the layer index of mu."""
    mu = float(mu)
    if not 0 < mu <= 1:
        raise DomainError(f"mu must lie in (0, 1], got {mu}")
    return (n - math.sqrt(-2.0 * math.log(mu) * n)) / 2 + 1
