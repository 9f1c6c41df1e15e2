"""Classifier-agnostic risk and robustness bounds under the uniform distribution.

Any error region of volume ``mu`` in ``{0,1}^n`` expands under ``r`` bit flips
at least as fast as a fractional Hamming ball of the same volume.  The exact
bounds here evaluate that ball; the closed-form and asymptotic variants are
the Hoeffding and central-limit relaxations of the same quantity.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .combinatorics import (
    BallIndex,
    DomainError,
    as_fraction,
    binomial,
    bsize,
    bsize_inv,
    iter_binomials,
    lower_layer_sum,
    normal_quantile,
)


def _check_volume(vol: Fraction) -> None:
    if not 0 < vol < 1:
        raise DomainError(f"volume must lie strictly between 0 and 1, got {vol}")


def internal_boundary_bound(n: int, vol) -> Fraction:
    """Exact lower bound on ``|IB(A)|`` for any ``A`` with ``vol(A) == vol``.

    With ``(k, lam) = bsize_inv(vol)`` this is
    ``C(n, k-1) + lam * (C(n, k) - C(n, k-1))``.
    """
    vol = as_fraction(vol)
    _check_volume(vol)
    k, lam = bsize_inv(n, vol)
    lo = binomial(n, k - 1)
    return lo + lam * (binomial(n, k) - lo)


def internal_boundary_lb(n: int, vol) -> int:
    """Integer lower bound on the internal boundary count (floor of the exact bound)."""
    return math.floor(internal_boundary_bound(n, vol))


def external_boundary_lb(n: int, vol) -> Fraction:
    """Lower bound on ``|EB(A)|``: ``C(n, k) + lam * (C(n, k+1) - C(n, k))``.

    Derivation: let ``A' = A u EB(A)``.  Every internal boundary point of
    ``A'`` lies in ``EB(A)``, so ``|EB(A)| >= |IB(A')|``.  Applying the
    internal bound to ``A'`` and minimising over the volumes ``A'`` can have,
    monotonicity of ``bsize`` moves the index from ``k - 1`` to ``k``.
    """
    vol = as_fraction(vol)
    _check_volume(vol)
    k, lam = bsize_inv(n, vol)
    mid = binomial(n, k)
    return mid + lam * (binomial(n, k + 1) - mid)


def risk_lower_bound(n: int, mu, r: int) -> Fraction:
    """Minimum error-region risk after ``r`` flips: ``bsize(k + r, lam)``, capped at 1."""
    mu = as_fraction(mu)
    _check_volume(mu)
    if r < 0:
        raise DomainError(f"budget must be nonnegative, got {r}")
    k, lam = bsize_inv(n, mu)
    return bsize(n, k + r, lam, cap=True)


def risk_curve(n: int, mu) -> list[Fraction]:
    """``risk_lower_bound(n, mu, r)`` for ``r = 0 .. n-k+1`` in one sweep."""
    mu = as_fraction(mu)
    _check_volume(mu)
    k, lam = bsize_inv(n, mu)
    full = 1 << n
    acc = lower_layer_sum(n, k)
    out = []
    for b in iter_binomials(n, k):
        out.append((acc + lam * b) / full)
        acc += b
    out.append(Fraction(1))  # r = n - k + 1
    return out


def min_budget(n: int, mu, target) -> int:
    """Smallest ``r`` with ``risk_lower_bound(n, mu, r) >= target``.

    The bound is evaluated incrementally layer by layer, so locating the
    crossing costs one pass over the row rather than a fresh tail per probe.
    """
    mu, target = as_fraction(mu), as_fraction(target)
    _check_volume(mu)
    if not target <= 1:
        raise DomainError(f"target must be at most 1, got {target}")
    if target <= mu:
        return 0
    k, lam = bsize_inv(n, mu)
    full = 1 << n
    goal = target * full
    acc = lower_layer_sum(n, k)
    for r, b in enumerate(iter_binomials(n, k)):
        if acc + lam * b >= goal:
            return r
        acc += b
    return n - k + 1


def robustness_ub_exact(n: int, mu) -> Fraction:
    """``sum_{r=0}^{n-k+1} (1 - bsize(k + r, lam))`` as an exact rational."""
    mu = as_fraction(mu)
    _check_volume(mu)
    k, lam = bsize_inv(n, mu)
    full = 1 << n
    acc = lower_layer_sum(n, k)
    gap_total = 0  # sum of (2^n - prefix) over the layers
    for b in iter_binomials(n, k):
        gap_total += full - acc
        acc += b
    # the lam * C(n, k+r) terms add up to lam * (2^n - prefix(k))
    layer_total = full - lower_layer_sum(n, k)
    return (gap_total - lam * layer_total) / full


def budget_closed_form(n: int, mu: float, mu_prime: float) -> float:
    """Flips sufficient to lift risk from ``mu`` to ``mu_prime``, valid for every n.

    ``sqrt(-n ln(mu) / 2) + sqrt(-n ln(1 - mu') / 2)``; for ``mu' == 1/2`` the
    shorter ``sqrt(-n ln(mu) / 2)`` suffices and is returned instead.
    """
    mu, mu_prime = float(mu), float(mu_prime)
    if not (0 < mu <= 0.5 <= mu_prime <= 1):
        raise DomainError("need 0 < mu <= 1/2 <= mu_prime <= 1")
    first = math.sqrt(-n * math.log(mu) / 2)
    if mu_prime == 0.5:
        return first
    if mu_prime == 1:
        return math.inf
    return first + math.sqrt(-n * math.log(1 - mu_prime) / 2)


def budget_asymptotic(mu: float, mu_prime: float) -> float:
    """Coefficient of sqrt(n) in the large-n budget: ``(Phi^-1(mu') - Phi^-1(mu)) / 2``."""
    mu, mu_prime = float(mu), float(mu_prime)
    if not (0 < mu <= mu_prime < 1):
        raise DomainError("need 0 < mu <= mu_prime < 1")
    if mu == mu_prime:
        return 0.0
    return (normal_quantile(mu_prime) - normal_quantile(mu)) / 2


def robustness_ub_closed(n: int, mu: float) -> float:
    """``sqrt(-n ln(mu) / 2) + mu sqrt(n / 2)``, valid for every n and mu <= 1/2."""
    mu = float(mu)
    if not 0 < mu <= 0.5:
        raise DomainError("need 0 < mu <= 1/2")
    return math.sqrt(-n * math.log(mu) / 2) + mu * math.sqrt(n / 2)


def robustness_ub_asymptotic(mu: float) -> float:
    """Coefficient of sqrt(n): ``Phi^-1(1 - mu) / 2 + mu sqrt(pi / 8)``.

    The layer index of mu is near ``n/2 + Phi^-1(mu) sqrt(n) / 2``, so the
    ``n/2 - k`` term contributes ``-Phi^-1(mu) / 2 = Phi^-1(1 - mu) / 2``.
    """
    mu = float(mu)
    if not 0 < mu <= 0.5:
        raise DomainError("need 0 < mu <= 1/2")
    return normal_quantile(1 - mu) / 2 + mu * math.sqrt(math.pi / 8)


# ---------------------------------------------------------------------------
# Table of bounds


class BoundKind(enum.Enum):
    EXACT = "exact"
    CLOSED_FORM = "closed_form_all_n"
    ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class BoundEntry:
    quantity: str
    kind: BoundKind
    value: Fraction | int | float  # exact entries are int/Fraction

    def coefficient(self, n: int) -> float:
        """The value divided by sqrt(n) (asymptotic entries already are)."""
        v = float(self.value)
        return v if self.kind is BoundKind.ASYMPTOTIC else v / math.sqrt(n)


@dataclass
class BoundReport:
    n: int
    mu: Fraction
    ball_index: BallIndex
    entries: list[BoundEntry] = field(default_factory=list)

    def get(self, quantity: str, kind: BoundKind) -> BoundEntry:
        for e in self.entries:
            if e.quantity == quantity and e.kind is kind:
                return e
        raise KeyError((quantity, kind))


QUANTITIES = ("risk_to_0.99", "risk_to_0.50", "robustness")


def bound_report(n: int, mu=Fraction(1, 100)) -> BoundReport:
    """The three Table-1 rows for one ``n`` in all three bound kinds."""
    mu = as_fraction(mu)
    muf = float(mu)
    rep = BoundReport(n, mu, bsize_inv(n, mu))
    exact = [
        min_budget(n, mu, Fraction(99, 100)),
        min_budget(n, mu, Fraction(1, 2)),
        robustness_ub_exact(n, mu),
    ]
    closed = [
        budget_closed_form(n, muf, 0.99),
        budget_closed_form(n, muf, 0.5),
        robustness_ub_closed(n, muf),
    ]
    limit = [
        budget_asymptotic(muf, 0.99),
        budget_asymptotic(muf, 0.5),
        robustness_ub_asymptotic(muf),
    ]
    for q, ex, cl, li in zip(QUANTITIES, exact, closed, limit):
        rep.entries.append(BoundEntry(q, BoundKind.EXACT, ex))
        rep.entries.append(BoundEntry(q, BoundKind.CLOSED_FORM, cl))
        rep.entries.append(BoundEntry(q, BoundKind.ASYMPTOTIC, li))
    return rep


def table1_generate(n_list: Iterable[int], mu=Fraction(1, 100)) -> list[BoundReport]:
    reports = []
    for n in n_list:
        if n < 100:
            raise DomainError(f"table rows need n >= 100, got {n}")
        reports.append(bound_report(n, mu))
    return reports
