"""Exact adversarial risk and robustness on the Boolean hypercube."""
from .combinatorics import (
    BallIndex,
    DomainError,
    TailKind,
    binomial,
    binomial_tail,
    bsize,
    bsize_inv,
    entropy,
    entropy_solve,
    normal_cdf,
    normal_quantile,
    render,
    threshold_crossing,
)
from .conjunctions import (
    AttackDefinition,
    Conjunction,
    ConjunctionStructure,
    distance_distribution,
    error_mass,
    risk_exact,
    robustness_exact,
)
from .isoperimetry import min_budget, risk_lower_bound, robustness_ub_exact, table1_generate

__version__ = "0.1.0"
