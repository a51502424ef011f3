"""Exhaustive checks of the symbolic state algebra.

The state space is eight elements and every operation is a small table,
so most of these tests enumerate everything rather than sample.
"""

import random

import pytest

from sqdc.qstate import (
    BellState,
    ProductState,
    bell_measure,
    make_epr,
    z_measure_partner,
    z_measure_single,
)

TRIALS = 2000


def test_make_epr_mapping():
    assert make_epr(0) is BellState.PHI_PLUS
    assert make_epr(1) is BellState.PSI_MINUS


@pytest.mark.parametrize("bad", [2, -1, 0.5, None, "0", True, False])
def test_make_epr_rejects_non_bits(bad):
    with pytest.raises(ValueError):
        make_epr(bad)


@pytest.mark.parametrize("state,expected", [
    (BellState.PHI_PLUS, (0, 0)),
    (BellState.PHI_MINUS, (1, 0)),
    (BellState.PSI_PLUS, (0, 1)),
    (BellState.PSI_MINUS, (1, 1)),
])
def test_bell_measure_deterministic_on_bell_states(state, expected):
    rng = random.Random(1)
    assert all(bell_measure(state, rng) == expected for _ in range(50))


@pytest.mark.parametrize("a,b,outcomes", [
    (0, 0, {(0, 0), (1, 0)}),
    (0, 1, {(0, 1), (1, 1)}),
    (1, 0, {(0, 1), (1, 1)}),
    (1, 1, {(0, 0), (1, 0)}),
])
def test_bell_measure_product_outcome_support(a, b, outcomes):
    """A product state projects onto exactly its two overlapping Bell
    states, and the second outcome bit always equals a XOR b."""
    rng = random.Random(7)
    seen = set()
    for _ in range(TRIALS):
        e = bell_measure(ProductState(a, b), rng)
        assert e in outcomes
        assert e[1] == a ^ b
        seen.add(e)
    assert seen == outcomes


def test_bell_measure_product_outcomes_are_balanced():
    rng = random.Random(11)
    firsts = sum(bell_measure(ProductState(0, 0), rng)[0] for _ in range(TRIALS))
    assert abs(firsts / TRIALS - 0.5) < 0.05


def test_bell_measure_rejects_bad_product_values():
    rng = random.Random(0)
    with pytest.raises(ValueError):
        bell_measure(ProductState(2, 0), rng)
    with pytest.raises(ValueError):
        bell_measure(ProductState(0, None), rng)


@pytest.mark.parametrize("state,equal", [
    (BellState.PHI_PLUS, True),
    (BellState.PHI_MINUS, True),
    (BellState.PSI_PLUS, False),
    (BellState.PSI_MINUS, False),
])
def test_z_measure_partner_correlations(state, equal):
    """Measuring one half gives a uniform bit whose partner agrees for
    the phi states and disagrees for the psi states."""
    rng = random.Random(3)
    ones = 0
    for _ in range(TRIALS):
        u, partner = z_measure_partner(state, rng)
        assert u in (0, 1)
        assert (partner == u) is equal
        ones += u
    assert abs(ones / TRIALS - 0.5) < 0.05


def test_z_measure_partner_needs_entanglement():
    with pytest.raises(ValueError):
        z_measure_partner(ProductState(0, 1), random.Random(0))


def test_z_measure_single_reads_value():
    assert z_measure_single(0) == 0
    assert z_measure_single(1) == 1
    with pytest.raises(ValueError):
        z_measure_single(2)


def test_closure_under_measurement():
    """Every reachable post-measurement situation stays inside the
    eight-state set: Bell outcomes are bit pairs, collapsed halves are
    bits, and there is nothing else to produce."""
    rng = random.Random(5)
    for i in (0, 1):
        state = make_epr(i)
        u, partner = z_measure_partner(state, rng)
        e = bell_measure(ProductState(partner, u), rng)
        assert set(e) <= {0, 1}
        assert bell_measure(state, rng) == (i, i)
