"""Closed symbolic state algebra for the entangled-pair channel.

The protocols only ever produce eight two-qubit states: the four Bell
states, and the four computational product states |ab> that appear after
one half of a pair has been measured in the Z basis.  Every operation the
simulator needs (pair creation, Z measurement of one half, joint Bell
measurement) maps this set back into itself, so states are tracked as
symbols rather than amplitude vectors.  That keeps the model exact and
lets tests enumerate every branch of every operation.

Outcome conventions: a Bell measurement yields a bit pair ``(e1, e2)``
where ``e1`` distinguishes the +/- phase pair members and ``e2`` the
correlated/anticorrelated pairs; Z measurements yield plain 0/1 bits.
"""

import enum
from typing import NamedTuple, Union


class BellState(enum.Enum):
    """The four maximally entangled two-qubit states."""

    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"


class ProductState(NamedTuple):
    """Computational product state |ab>: first qubit a, second qubit b."""

    a: int
    b: int


PairState = Union[BellState, ProductState]


def _as_bit(x, what: str) -> int:
    if x is True or x is False or x not in (0, 1):
        raise ValueError(f"{what} must be 0 or 1, got {x!r}")
    return x


# Bell measurement of a Bell state is deterministic.
_BELL_OUTCOME = {
    BellState.PHI_PLUS: (0, 0),
    BellState.PHI_MINUS: (1, 0),
    BellState.PSI_PLUS: (0, 1),
    BellState.PSI_MINUS: (1, 1),
}

# Bell measurement of |ab> collapses onto one of the two Bell states that
# overlap it, each with probability 1/2.  The second outcome bit is fixed
# by whether a and b agree (e2 = a XOR b); the first is the coin.
_PRODUCT_OUTCOMES = {
    (0, 0): ((0, 0), (1, 0)),
    (0, 1): ((0, 1), (1, 1)),
    (1, 0): ((0, 1), (1, 1)),
    (1, 1): ((0, 0), (1, 0)),
}

# Whether the Z values of the two halves of a Bell state agree.
_HALVES_EQUAL = {
    BellState.PHI_PLUS: True,
    BellState.PHI_MINUS: True,
    BellState.PSI_PLUS: False,
    BellState.PSI_MINUS: False,
}


def make_epr(i: int) -> BellState:
    """Prepare the pair encoding preparation bit ``i``.

    Bit 0 maps to the correlated state phi+, bit 1 to the anticorrelated
    state psi-; these are the two states whose Bell outcome satisfies
    e1 == e2 == i, which is what the probe check relies on.
    """
    return BellState.PSI_MINUS if _as_bit(i, "preparation bit") else BellState.PHI_PLUS


def bell_measure(state: PairState, rng) -> tuple[int, int]:
    """Jointly measure both qubits in the Bell basis.

    Deterministic on Bell states; a fair coin from ``rng`` picks between
    the two possible outcomes of a product state.
    """
    if isinstance(state, BellState):
        return _BELL_OUTCOME[state]
    outcomes = _PRODUCT_OUTCOMES[(_as_bit(state.a, "state.a"), _as_bit(state.b, "state.b"))]
    return outcomes[rng.getrandbits(1)]


def z_measure_partner(state: BellState, rng) -> tuple[int, int]:
    """Z-measure one half of an intact Bell state.

    Returns ``(u, partner)``: the uniformly random result ``u`` on the
    measured half and the now-definite value of the other half.  Only
    entangled states can be measured this way; product states have no
    partner correlation left.
    """
    if not isinstance(state, BellState):
        raise ValueError(
            f"z_measure_partner needs an intact Bell state, got {state!r}; "
            "the entanglement was already destroyed"
        )
    u = rng.getrandbits(1)
    return (u, u) if _HALVES_EQUAL[state] else (u, 1 - u)


def z_measure_single(value: int) -> int:
    """Z-measure a bare qubit already in a basis state: reads its value."""
    return _as_bit(value, "qubit value")
