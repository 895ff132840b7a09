"""Exact oracles: enumeration, Z, mixing time, conductance, entropy bounds."""

import math
from fractions import Fraction

import pytest

from torushc.errors import PreconditionError
from torushc.exact import (
    build_exact_model,
    conductance_lower_bound,
    cycle_transfer_partition_function,
    entropy_H,
    enumerate_independent_sets,
    exact_mixing_time,
    partition_function,
    total_variation,
    verify_bottleneck,
    weighted_binomial_bound_check,
)
from torushc.hardcore import BALANCED, EVEN_HEAVY, classify


def test_enumeration_c4(c4):
    states = enumerate_independent_sets(c4)
    assert len(states) == 7
    assert states[0].size() == 0
    sizes = sorted(I.size() for I in states)
    assert sizes == [0, 1, 1, 1, 1, 2, 2]


def test_enumeration_deterministic_order(c4):
    a = [I.key() for I in enumerate_independent_sets(c4)]
    b = [I.key() for I in enumerate_independent_sets(c4)]
    assert a == b
    # sorted by (size, index tuple)
    states = enumerate_independent_sets(c4)
    assert [I.indices() for I in states] == sorted(
        (I.indices() for I in states), key=lambda t: (len(t), t)
    )
    assert [I.size() for I in states] == sorted(I.size() for I in states)


@pytest.mark.parametrize("lam", [Fraction(1, 2), Fraction(1), Fraction(2)])
def test_z_c4_closed_form(c4, lam):
    assert partition_function(c4, lam) == 1 + 4 * lam + 2 * lam**2


@pytest.mark.parametrize("L", [4, 6, 8])
def test_transfer_matrix_matches_enumeration(L):
    from torushc import build_torus

    g = build_torus(L, 1)
    lam = Fraction(1, 2)
    assert cycle_transfer_partition_function(L, lam) == partition_function(g, lam)


def test_stationary_distribution_exact(model_c4):
    assert sum(model_c4.pi) == 1
    assert all(p > 0 for p in model_c4.pi)
    assert model_c4.Z == 7


def test_detailed_balance_c4(model_c4):
    m = model_c4
    for i in range(m.num_states):
        for j, p in m.transitions[i].items():
            assert m.pi[i] * p == m.pi[j] * m.transitions[j][i]


def test_total_variation():
    assert total_variation([1, 0], [0, 1]) == pytest.approx(1.0)
    assert total_variation([0.5, 0.5], [0.5, 0.5]) == 0
    assert total_variation([0.7, 0.3], [0.3, 0.7]) == pytest.approx(0.4)


def test_exact_mixing_time_c4(model_c4):
    mix = exact_mixing_time(model_c4)
    assert mix.tau == 6
    assert mix.window >= 8
    # every time beyond tau inside the window is below threshold
    assert all(w <= 1 / math.e for w in mix.worst_tv[mix.tau + 1 :])
    assert mix.worst_tv[mix.tau] > 1 / math.e


def test_bottleneck_verification(c4, model_c4):
    m = model_c4
    classes = {BALANCED: set(), EVEN_HEAVY: set(), "OddHeavy": set()}
    for i, I in enumerate(m.states):
        classes[classify(c4, I, 0)].add(i)
    A, M = classes[EVEN_HEAVY], classes[BALANCED]
    ok, witness = verify_bottleneck(m, A, M)
    assert ok and witness is None
    bound = conductance_lower_bound(m, A, M)
    assert bound == Fraction(3, 8)

    # overlapping A and M is rejected
    ok, witness = verify_bottleneck(m, A | {min(M)}, M)
    assert not ok
    # removing the moat exposes A -> outside transitions
    ok, witness = verify_bottleneck(m, A, set())
    assert not ok and "leaves" in witness
    with pytest.raises(PreconditionError):
        conductance_lower_bound(m, A, set())


def test_entropy(model_c4):
    assert entropy_H(0) == 0 and entropy_H(1) == 0
    assert entropy_H(0.5) == pytest.approx(1.0)
    with pytest.raises(PreconditionError):
        entropy_H(1.5)


def test_weighted_binomial_bound():
    lhs, rhs, holds = weighted_binomial_bound_check(20, 0.25, Fraction(1))
    assert holds and float(lhs) <= rhs * (1 + 1e-9)
    lhs, rhs, holds = weighted_binomial_bound_check(24, 0.3, Fraction(1, 2))
    assert holds
    with pytest.raises(PreconditionError):
        weighted_binomial_bound_check(25, 0.25, 1)
    with pytest.raises(PreconditionError):
        weighted_binomial_bound_check(10, 0.9, Fraction(1))  # c > lam/(1+lam)


def test_build_model_preconditions(c4):
    with pytest.raises(PreconditionError):
        build_exact_model(c4, 0)
    with pytest.raises(Exception):
        enumerate_independent_sets(c4, cap=3)
