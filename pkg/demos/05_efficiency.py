"""What the security checks cost in qubits.

Every transmitted pair either carries a message bit or gets burned on a
check.  Efficiency is the fraction doing useful work, folding in probes,
calibration slots, and -- for the tolerant variant -- the expected
restarts caused by false alarms.  The punchline: security overhead is a
constant while the message grows, so efficiency approaches 1.

Instant; pure closed forms, no simulation.
"""

from sqdc.experiments import KIND_EFFICIENCY, SweepSpec, csv_text, efficiency_report, run_sweep
from sqdc.protocol import MODE_TOLERANT
from sqdc.stats import detection_probability

# ----------------------------------------------------------------------
# 1. Strict variant: eta = s / (s + r).  Probes that would catch an
# always-on attacker with probability > 0.9999 cost 15 qubits, full
# stop, regardless of message size.
# ----------------------------------------------------------------------
R = 15
print(f"strict variant, r = {R} probes "
      f"(certain attacker caught w.p. {detection_probability(1.0, R):.6f})")
print("  message bits s        eta")
for s in (100, 10_000, 1_000_000):
    rep = efficiency_report(s, R)
    print(f"  {s:>14,d}   {rep.eta:.6f}")

# ----------------------------------------------------------------------
# 2. Tolerant variant on a noisy channel.  Known disturbance needs no
# calibration slots; estimated disturbance pays s_est extra.  Both pay
# a restart factor 1/(1-alpha) because an honest session still aborts
# with probability ~alpha.
# ----------------------------------------------------------------------
print("\ntolerant variant, s = 10^6, alpha = 0.01")
print("  probes r   s_est      eta")
for r, s_est in ((40, 0), (60, 60), (600, 600)):
    rep = efficiency_report(10 ** 6, r, alpha=0.01, mode=MODE_TOLERANT, s_est=s_est)
    print(f"  {r:>8d}   {s_est:>5d}   {rep.eta:.6f}")

# ----------------------------------------------------------------------
# 3. The same numbers through the sweep harness, as they land in CSV.
# ----------------------------------------------------------------------
spec = SweepSpec(
    kind=KIND_EFFICIENCY,
    s_values=(1000, 100_000, 1_000_000), r_values=(15, 40),
)
print("\nCSV form (strict, alpha ignored):\n")
print(csv_text(run_sweep(spec)))
