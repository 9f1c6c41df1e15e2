import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from hyperbound.combinatorics import DomainError
from hyperbound.conjunctions import (
    ALL_DEFINITIONS,
    AttackDefinition,
    CaseProfile,
    Conjunction,
    ConjunctionStructure as S,
    brute_force_distance,
    ci_risk_formula,
    ci_robustness_bounds,
    cube_distances,
    cube_profiles,
    distance_distribution,
    er_risk_theorem_lb,
    er_robustness_theorem_bounds,
    error_mass,
    instance_profiles,
    pc_risk_formula,
    pc_robustness_formula,
    perturbation_distance,
    risk_exact,
    robustness_exact,
    structure_of,
)

small_structure = st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4)).filter(
    lambda t: sum(t) >= 1).map(lambda t: S(*t))


def layout(s: S, pad: int = 0):
    """Conjunctions in the bit layout of cube_distances, padded with irrelevant variables."""
    h = Conjunction(tuple(range(s.m)) + tuple(range(s.m + s.u, s.relevant)))
    c = Conjunction(tuple(range(s.m + s.u)))
    return h, c, s.relevant + pad


def test_error_mass_examples():
    assert error_mass(S(2, 1, 1)) == Fraction(1, 8)
    assert error_mass(S(5, 0, 0)) == 0
    assert error_mass(S(0, 1, 1)) == Fraction(1, 2)


def test_error_mass_by_enumeration():
    for s in oracles.structures(8):
        h, c, n = layout(s)
        hm, cm = h.bitmask(), c.bitmask()
        bad = sum(((x & hm) == hm) != ((x & cm) == cm) for x in range(1 << n))
        assert error_mass(s) == Fraction(bad, 1 << n)


def test_structure_validation():
    with pytest.raises(DomainError):
        S(-1, 0, 1)
    with pytest.raises(DomainError):
        S(3, 2, 1, n=5)
    s = S(2, 1, 1, n=10)
    assert (s.h_size, s.c_size, s.relevant) == (3, 3, 4)
    assert S(3, 0, 0).identical and not S(3, 1, 0).identical


def test_conjunction_type():
    with pytest.raises(DomainError):
        Conjunction((2, 1))
    with pytest.raises(DomainError):
        Conjunction((1, 1))
    h = Conjunction.of([5, 1, 3, 3])
    assert h.vars == (1, 3, 5) and len(h) == 3 and 3 in h
    x = np.array([[0, 1, 0, 1, 0, 1], [1, 1, 1, 1, 1, 0]], dtype=np.uint8)
    assert list(h.evaluate_batch(x)) == [True, False]
    assert Conjunction().evaluate_batch(x).all()
    assert structure_of(Conjunction((0, 1, 2)), Conjunction((1, 2, 3, 4)), 10) == S(2, 2, 1, 10)


def test_distance_examples():
    assert perturbation_distance("er", S(1, 1, 1), CaseProfile(1, 1, 1)) == 2
    assert perturbation_distance("ci", S(1, 1, 1), CaseProfile(1, 0, 1)) == 2
    for s in (S(3, 1, 0), S(0, 2, 2), S(1, 0, 4)):
        assert perturbation_distance("er", s, CaseProfile(0, 0, 0)) == 1
    assert perturbation_distance("er", S(4, 0, 0), CaseProfile(2, 0, 0)) == math.inf
    with pytest.raises(DomainError):
        perturbation_distance("pc", S(1, 1, 1), CaseProfile(2, 0, 0))


def test_distribution_examples():
    assert distance_distribution("pc", S(1, 0, 0)).masses == {1: Fraction(1)}
    assert distance_distribution("pc", S(0, 3, 1)).masses == {1: Fraction(1)}
    er = distance_distribution("er", S(2, 0, 1))
    assert er.expectation() == Fraction(3, 2)
    # distances (0,1,1,1,2,2,2,3) over the 8 assignments
    assert er.masses == {0: Fraction(1, 8), 1: Fraction(3, 8), 2: Fraction(3, 8), 3: Fraction(1, 8)}


@settings(max_examples=200, deadline=None)
@given(st.tuples(st.integers(0, 40), st.integers(0, 40), st.integers(0, 40)).map(lambda t: S(*t)))
def test_distribution_masses_sum_to_one(s):
    for d in ALL_DEFINITIONS:
        dist = distance_distribution(d, s)
        assert dist.total() == 1
        finite = [k for k in dist.masses if k != math.inf]
        if d is AttackDefinition.ER and not s.identical:
            assert max(finite) <= 1 + min(s.h_size, s.c_size)
        elif d is not AttackDefinition.ER and finite:
            assert max(finite) <= max(s.h_size, 1)


def test_risk_examples():
    assert risk_exact("er", S(1, 1, 1), 0) == Fraction(1, 4)
    assert risk_exact("ci", S(1, 1, 1), 1) == Fraction(3, 4)
    assert risk_exact("pc", S(2, 0, 0), 1) == Fraction(3, 4)
    assert risk_exact("pc", S(0, 0, 2), 1) == Fraction(3, 4)


def test_robustness_examples():
    assert robustness_exact("pc", S(0, 0, 3)) == Fraction(13, 8)
    assert robustness_exact("er", S(4, 0, 0)) == math.inf
    assert robustness_exact("er", S(2, 0, 1)) == Fraction(3, 2)
    assert robustness_exact("ci", S(1, 1, 1)) == 1


def test_theorem_examples():
    s = S(2, 1, 1)
    assert er_risk_theorem_lb(s, 0) == error_mass(s) == risk_exact("er", s, 0)
    assert er_risk_theorem_lb(S(20, 1, 10), 11) == Fraction(1, 8)
    assert er_risk_theorem_lb(s, 4) == 1 == risk_exact("er", s, 4)
    assert er_robustness_theorem_bounds(S(2, 0, 1)) == (Fraction(2, 16), 3)
    assert er_robustness_theorem_bounds(S(1, 1, 1)) == (Fraction(2, 16), 3)
    assert er_robustness_theorem_bounds(S(3, 0, 0)) == (math.inf, math.inf)
    with pytest.raises(DomainError):
        er_risk_theorem_lb(S(3, 0, 0), 1)
    assert pc_risk_formula(5, 0) == 0
    assert pc_robustness_formula(1) == 1
    assert pc_robustness_formula(100) == 50 + Fraction(1, 2 ** 100)
    assert ci_risk_formula(S(1, 1, 1), 0) == error_mass(S(1, 1, 1))
    assert ci_risk_formula(S(1, 1, 1), 1) == Fraction(3, 4)
    assert ci_robustness_bounds(S(1, 1, 1)) == (Fraction(1, 2), Fraction(5, 2))
    with pytest.raises(DomainError):
        pc_risk_formula(0, 1)
    with pytest.raises(DomainError):
        ci_robustness_bounds(S(0, 0, 2))


def test_er_theorem_worked_example_regime():
    # m = 20, w = m/2, u = m/20 and budget 0.55 m
    s = S(20, 1, 10)
    assert risk_exact("er", s, 11) >= Fraction(1, 8)


@pytest.mark.parametrize("total", range(1, 11))
def test_profile_rule_matches_cube_bfs(total):
    for s in oracles.structures(total):
        if s.relevant == total:
            oracles.check_structure(s)


def test_profile_rule_matches_cube_bfs_at_twelve():
    for s in oracles.structures(12):
        if s.relevant >= 11:
            oracles.check_structure(s)


@settings(max_examples=40, deadline=None)
@given(small_structure, st.integers(0, 2 ** 20), st.sampled_from(ALL_DEFINITIONS))
def test_sphere_growth_matches_profile_rule(s, seed, d):
    h, c, n = layout(s, pad=3)
    rng = np.random.default_rng(seed)
    xs = rng.integers(0, 2, size=(6, n), dtype=np.uint8)
    want = profile_distances_for(d, h, c, xs)
    got = [brute_force_distance(d, h, c, list(x)) for x in xs]
    assert list(want) == got


def profile_distances_for(d, h, c, xs):
    from hyperbound.conjunctions import profile_distances
    return profile_distances(d, structure_of(h, c, xs.shape[1]), *instance_profiles(h, c, xs))


def test_padding_does_not_change_distances():
    for s in (S(1, 1, 1), S(2, 0, 3), S(0, 3, 1)):
        h, c, n = layout(s)
        xs = [[(x >> i) & 1 for i in range(n)] for x in range(1 << n)]
        for d in ALL_DEFINITIONS:
            base = [brute_force_distance(d, h, c, x) for x in xs]
            padded = [brute_force_distance(d, h, c, x + [0, 1, 1, 0, 1]) for x in xs]
            assert base == padded
            assert list(cube_distances(d, s)) == base


def test_brute_force_edge_cases():
    h = Conjunction((0, 2))
    for x in ([0, 0, 0], [1, 1, 1], [1, 0, 0]):
        assert brute_force_distance("er", h, h, x) == math.inf
    c = Conjunction((0, 1))
    # h(x) = 0, c(x) = 1: x is already in the error region
    assert brute_force_distance("ci", h, c, [1, 1, 0]) == 0
    with pytest.raises(DomainError):
        brute_force_distance("pc", h, c, [0] * 21)


def test_empty_hypothesis_distances():
    s = S(0, 2, 0)
    assert robustness_exact("pc", s) == math.inf
    assert cube_profiles(s)[1].tolist() == [2, 1, 1, 0]
    # the empty conjunction is always true: CI success needs c(x) = 0 already
    assert distance_distribution("ci", s).masses == {0: Fraction(3, 4), math.inf: Fraction(1, 4)}
