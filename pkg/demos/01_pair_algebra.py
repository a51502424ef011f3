"""A walk through the pair algebra the whole simulator rests on.

Everything downstream -- eavesdropper detection, bit transfer, the
statistics -- reduces to how entangled pairs respond to two operations:
a partner measurement in the computational basis, and a joint Bell
measurement.  This script shows both on every reachable state, then
derives the decode rule the receiver relies on.

Run it directly; it only prints, no plots, and finishes instantly.
"""

import random

from sqdc.qstate import (
    BellState,
    ProductState,
    bell_measure,
    make_epr,
    z_measure_partner,
)

rng = random.Random(7)

# ----------------------------------------------------------------------
# 1. Preparation: one bit chooses one of two Bell states.
# ----------------------------------------------------------------------
print("Preparation map")
for bit in (0, 1):
    print(f"  prep bit {bit} -> {make_epr(bit).name}")

# ----------------------------------------------------------------------
# 2. Bell measurement is deterministic on Bell states.  The two result
# bits (e1, e2) identify the state exactly, so an undisturbed pair
# always comes back as the state that was sent.
# ----------------------------------------------------------------------
print("\nBell measurement on intact pairs (deterministic)")
for state in BellState:
    outcomes = {bell_measure(state, rng) for _ in range(200)}
    assert len(outcomes) == 1
    print(f"  {state.name:9s} -> e1e2 = {outcomes.pop()}")

# ----------------------------------------------------------------------
# 3. A partner measurement collapses the pair into a product state.
# The measuring side sees a uniform bit u; the partner qubit is then
# fixed: equal to u for the Phi states, opposite for the Psi states.
# ----------------------------------------------------------------------
print("\nPartner correlation after a computational-basis measurement")
for bit in (0, 1):
    state = make_epr(bit)
    seen = sorted({z_measure_partner(state, rng) for _ in range(50)})
    print(f"  {state.name:9s}: (u, partner) in {seen}")

# ----------------------------------------------------------------------
# 4. Bell measurement on a product state |ab> is the one stochastic
# spot: e2 is pinned to a XOR b while e1 is a fair coin.  Tally the
# empirical split to see the 50/50.
# ----------------------------------------------------------------------
print("\nBell measurement on product states (e2 = a XOR b, e1 = coin)")
for a in (0, 1):
    for b in (0, 1):
        state = ProductState(a, b)
        tally = {}
        for _ in range(10_000):
            out = bell_measure(state, rng)
            tally[out] = tally.get(out, 0) + 1
        parts = ", ".join(f"{k}: {v / 10_000:.3f}" for k, v in sorted(tally.items()))
        print(f"  |{a}{b}> -> {{{parts}}}")

# ----------------------------------------------------------------------
# 5. The decode rule.  In the protocol, a receiver who measures gets u,
# which collapses the sender's kept half to the partner value, and
# sends back a fresh |0>.  The sender then Bell-measures (kept, |0>):
# e2 = kept XOR 0 = kept.  Chain in the partner table from step 3 and
# everything telescopes to u = e2 XOR prep.  Verify every branch.
# ----------------------------------------------------------------------
print("\nDecode rule: receiver's bit u from (prep, e2)")
for prep in (0, 1):
    branches = sorted({z_measure_partner(make_epr(prep), rng) for _ in range(50)})
    for u, kept in branches:
        after_round_trip = ProductState(kept, 0)
        e2_values = {bell_measure(after_round_trip, rng)[1] for _ in range(100)}
        assert len(e2_values) == 1
        e2 = e2_values.pop()
        assert u == e2 ^ prep
        print(f"  prep={prep}, u={u}: kept half collapses to {kept}, "
              f"Bell result e2={e2}, e2 XOR prep = {e2 ^ prep}")

print("\nSo one classical bit rides each pair: u = e2 XOR prep, always.")
