"""Exact enumerations backing the simulator's statistical claims.

Everything here recomputes expected values from first principles --
walking every randomness branch of a probe round with rational
arithmetic, or inverting a high-precision normal CDF by bisection --
without importing the simulator's own state machinery.  Agreement
between the two routes is what the equivalence tests check, so keeping
the routes independent is the point, not an oversight.
"""

import itertools
from fractions import Fraction
from typing import Union

Rational = Union[Fraction, int]

# The two-outcome Bell measurement of a product state |ab>: each listed
# outcome occurs with probability 1/2.
_PRODUCT_OUTCOMES = {
    (0, 0): ((0, 0), (1, 0)),
    (0, 1): ((0, 1), (1, 1)),
    (1, 0): ((0, 1), (1, 1)),
    (1, 1): ((0, 0), (1, 0)),
}

# Bell measurement of the intact pair prepared from bit i is
# deterministic and yields (i, i).
_INTACT_OUTCOME = {0: (0, 0), 1: (1, 1)}

# Z-measuring one half of the pair prepared from i: result u is uniform,
# and the other half takes this value (equal halves for i=0, opposite
# for i=1).
_PARTNER = {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 0}


def probe_round_branches(p: Rational, omega: Rational) -> list[tuple[Fraction, int]]:
    """Every branch of one probe round as (probability, mismatch flag).

    Branch points: the preparation bit, whether the interceptor fires,
    her measurement result, whether the environment fires, its
    measurement result (only branching if the pair was still intact),
    and the final Bell-measurement coin where the state is a product.
    Zero-probability branches are dropped; the rest sum to 1.
    """
    p = Fraction(p)
    omega = Fraction(omega)
    if not (0 <= p <= 1 and 0 <= omega <= 1):
        raise ValueError("p and omega must be probabilities")
    half = Fraction(1, 2)
    branches: list[tuple[Fraction, int]] = []
    for i in (0, 1):
        for attacked, p_att in ((0, 1 - p), (1, p)):
            if p_att == 0:
                continue
            # value of the flying qubit after the interceptor (None = intact)
            attack_outcomes = [(None, Fraction(1))] if not attacked else [
                (u, half) for u in (0, 1)
            ]
            for flying, p_fly in attack_outcomes:
                for disturbed, p_dis in ((0, 1 - omega), (1, omega)):
                    if p_dis == 0:
                        continue
                    if disturbed and flying is None:
                        env_outcomes = [(v, half) for v in (0, 1)]
                    else:
                        # already collapsed (or untouched): the
                        # environment's measurement changes nothing
                        env_outcomes = [(flying, Fraction(1))]
                    for final, p_env in env_outcomes:
                        prob = half * p_att * p_fly * p_dis * p_env
                        if final is None:
                            e = _INTACT_OUTCOME[i]
                            branches.append((prob, int(e != (i, i))))
                        else:
                            state = (_PARTNER[(i, final)], final)
                            for e in _PRODUCT_OUTCOMES[state]:
                                branches.append((prob * half, int(e != (i, i))))
    total = sum(pr for pr, _ in branches)
    assert total == 1, f"branch probabilities sum to {total}"
    return branches


def probe_positive_probability(p: Rational, omega: Rational = 0) -> Fraction:
    """Exact chance one probe round shows a mismatch."""
    return sum(pr for pr, pos in probe_round_branches(p, omega) if pos)


def detection_probability_exact(p: Rational, r: int, omega: Rational = 0) -> Fraction:
    """Exact chance r probe rounds show at least one mismatch.

    Brute force over the joint branch space of all r rounds, so keep r
    small; the closed form the simulator is tested against falls out of
    this without ever assuming independence shortcuts.
    """
    if not 0 <= r <= 8:
        raise ValueError("brute-force enumeration is limited to r <= 8")
    per_round = probe_round_branches(p, omega)
    detected = Fraction(0)
    for combo in itertools.product(per_round, repeat=r):
        prob = Fraction(1)
        for pr, _ in combo:
            prob *= pr
        if any(pos for _, pos in combo):
            detected += prob
    return detected


def decode_table() -> list[tuple[int, int, int, int]]:
    """The bit-inference rule enumerated from its defining cases.

    Rows are (e1, e2, i, u): Bell outcomes 00 and 10 mean Alice's
    retained half read 0, outcomes 01 and 11 mean it read 1; a pair
    prepared from i=0 has equal halves and from i=1 opposite halves, so
    Bob's measured bit u undoes that relation.
    """
    rows = []
    for e1, e2, i in itertools.product((0, 1), repeat=3):
        retained = 0 if (e1, e2) in ((0, 0), (1, 0)) else 1
        u = retained if i == 0 else 1 - retained
        rows.append((e1, e2, i, u))
    return rows


def quantile_oracle(alpha: float, tol: float = 1e-12) -> float:
    """Upper-tail standard normal quantile by bisection at high precision.

    Uses mpmath's normal CDF at 40 decimal digits and bisects until the
    bracket is narrower than ``tol``; the slow-but-transparent reference
    the fast rational-approximation routine is tested against.
    """
    import mpmath

    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0,1)")
    with mpmath.workdps(40):
        target = 1 - mpmath.mpf(alpha)
        lo, hi = mpmath.mpf(-40), mpmath.mpf(40)
        while hi - lo > tol:
            mid = (lo + hi) / 2
            if mpmath.ncdf(mid) < target:
                lo = mid
            else:
                hi = mid
        return float((lo + hi) / 2)
