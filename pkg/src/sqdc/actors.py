"""Per-slot mechanics of one quantum round trip.

A round trip for slot ``k`` looks like::

    alice_send -> channel_transit (outbound) -> bob_handle
               <- channel_transit (return)   <-
    alice_measure

``alice_send`` creates the entangled pair and keeps one half; the other
half travels.  On the outbound leg the channel may apply an intercepting
Z measurement (the attack) and an environmental Z measurement (the
disturbance).  Bob either Z-measures the arriving qubit and returns a
fresh qubit prepared as |0>, or reflects it untouched.  Finally Alice
Bell-measures her retained half jointly with whatever came back.

Attack and disturbance both act only on the outbound leg: the attack is
defined on qubits Alice emits, and the disturbance budget is per qubit
rather than per leg, so each travelling qubit is disturbed with total
probability omega.  The return leg is kept as an explicit step purely for
protocol shape; it never touches the state.
"""

import enum
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .qstate import (
    BellState,
    ProductState,
    bell_measure,
    make_epr,
    z_measure_partner,
    z_measure_single,
)


class ChannelModel(NamedTuple):
    """Per-qubit probabilities of an attack and of a disturbance event."""

    p: float = 0.0
    omega: float = 0.0


class Direction(enum.Enum):
    ALICE_TO_BOB = "outbound"
    BOB_TO_ALICE = "return"


class BobAction(enum.Enum):
    MEASURE = "measure"
    REFLECT = "reflect"


@dataclass(slots=True)
class AliceSlot:
    """Alice's book-keeping for one emitted pair.

    ``pair`` holds the joint state while the pair is entangled and is
    cleared the moment either half gets measured, at which point
    ``retained`` carries the definite value of Alice's half.
    """

    index: int
    prep_bit: int
    pair: Optional[BellState]
    retained: Optional[int] = None
    consumed: bool = False


class FlyingQubit:
    """The travelling half of a slot's pair (or a replacement for it).

    ``value`` is None while the qubit is still the entangled partner of
    ``slot.pair``; once anything Z-measures it, the value is definite.
    """

    __slots__ = ("slot", "value")

    def __init__(self, slot: AliceSlot, value: Optional[int] = None):
        self.slot = slot
        self.value = value


@dataclass(slots=True)
class FlightRecord:
    """Ground truth of what happened to one qubit in transit."""

    index: int
    attacked: bool = False
    disturbed: bool = False
    intercepted_value: Optional[int] = None


def z_measure_flying(q: FlyingQubit, rng) -> int:
    """Z-measure an in-flight qubit, collapsing the retained half if needed."""
    if q.value is None:
        slot = q.slot
        u, partner = z_measure_partner(slot.pair, rng)
        slot.pair = None
        slot.retained = partner
        q.value = u
        return u
    return z_measure_single(q.value)


def alice_send(index: int, rng) -> tuple[AliceSlot, FlyingQubit]:
    """Draw a preparation bit, create the pair, and launch one half.

    Callers are responsible for using each slot index once; the session
    engine keeps the registry.
    """
    i = rng.getrandbits(1)
    slot = AliceSlot(index, i, make_epr(i))
    return slot, FlyingQubit(slot)


def channel_transit(
    q: FlyingQubit,
    model: ChannelModel,
    direction: Direction,
    eve_rng,
    env_rng,
    record: Optional[FlightRecord] = None,
) -> Optional[FlightRecord]:
    """Carry a qubit across one leg of the channel.

    On the outbound leg, with probability ``model.p`` the interceptor
    Z-measures the qubit and sends on a fresh qubit carrying the observed
    value (indistinguishable, in this state set, from the collapsed
    original), then with probability ``model.omega`` the environment
    Z-measures it.  Both coins are drawn even when their probability is
    zero, so stream positions do not depend on the channel parameters.
    The return leg is a structural no-op.
    """
    if direction is Direction.BOB_TO_ALICE:
        return record
    if record is None:
        record = FlightRecord(q.slot.index)
    if eve_rng.random() < model.p:
        record.attacked = True
        record.intercepted_value = z_measure_flying(q, eve_rng)
    if env_rng.random() < model.omega:
        record.disturbed = True
        z_measure_flying(q, env_rng)
    return record


def bob_handle(action: BobAction, q: FlyingQubit, rng) -> tuple[FlyingQubit, Optional[int]]:
    """Apply Bob's choice to an arriving qubit.

    MEASURE returns ``(fresh |0> qubit, result)``; REFLECT returns the
    arriving qubit unchanged with no result.
    """
    if action is BobAction.MEASURE:
        u = z_measure_flying(q, rng)
        return FlyingQubit(q.slot, 0), u
    return q, None


def alice_measure(slot: AliceSlot, returned: FlyingQubit, rng) -> tuple[int, int]:
    """Bell-measure Alice's retained half jointly with the returned qubit.

    Consumes the slot: measuring it twice is an error, as is receiving a
    definite-valued qubit while the slot's pair is still intact (that
    would mean a third qubit entered the closed two-qubit state space).
    """
    if slot.consumed:
        raise RuntimeError(f"slot {slot.index} was already Bell-measured")
    slot.consumed = True
    if returned.value is None:
        if slot.pair is None:
            raise RuntimeError(
                f"slot {slot.index}: flying qubit undefined after pair collapse"
            )
        state = slot.pair
        slot.pair = None
        return bell_measure(state, rng)
    if slot.pair is not None:
        raise RuntimeError(
            f"slot {slot.index}: returned qubit has a definite value but the "
            "pair was never collapsed; a foreign qubit entered the round trip"
        )
    return bell_measure(ProductState(slot.retained, returned.value), rng)
