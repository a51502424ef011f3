"""Noise vs. attack: the two error rates of the tolerant decision rule.

On a noisy channel the security check becomes a hypothesis test, and a
test has two ways to be wrong: accept an attacked session (missed
attack) or abort a clean one (false alarm).  This script sweeps the
probe budget and shows both rates falling as probes accumulate, then
compares knowing the disturbance rate against estimating it, and checks
the false-alarm rate really sits at the chosen significance level.

Uses the sweep harness with modest trial counts; runs in ~20 seconds.
"""

from sqdc.experiments import (
    KIND_ALPHA,
    KIND_ERRORS_KNOWN,
    KIND_ERRORS_UNKNOWN,
    SweepSpec,
    run_sweep,
)

TRIALS = 2000


def error_table(result, probes_values):
    """Print missed-attack / false-alarm columns per probe budget."""
    rows = {}
    for row in result.rows:
        params = dict(row.params)
        rows[(params["probes"], params["error_type"])] = row
    print("  probes   missed-attack   false-alarm")
    for n in probes_values:
        missed = rows.get((n, "missed_attack"))
        alarm = rows.get((n, "false_alarm"))
        m = f"{missed.estimate:.4f}" if missed else "--"
        a = f"{alarm.estimate:.4f}" if alarm else "--"
        print(f"  {n:>6d}   {m:>13s}   {a:>11s}")


# ----------------------------------------------------------------------
# 1. Error rates vs. probe count, disturbance estimated on the fly.
# Channel: attack probability 0.6, disturbance 5%, significance 5%.
# Each probe budget n uses n calibration probes plus n check probes.
# A false-alarm column may be empty: at p=0.6 almost every trial
# contains at least one attack, so the clean population vanishes.
# ----------------------------------------------------------------------
spec = SweepSpec(
    kind=KIND_ERRORS_UNKNOWN,
    p_values=(0.6,), probes_values=(5, 10, 20, 40, 60),
    omega=0.05, alpha=0.05,
    trials=TRIALS, seed=3,
)
print("disturbance estimated (calibration probes = check probes)")
error_table(run_sweep(spec), spec.probes_values)

# ----------------------------------------------------------------------
# 2. Same sweep but the disturbance rate is known in advance.  The
# one-sample test needs no calibration slots and less evidence, so the
# missed-attack rate collapses sooner.
# ----------------------------------------------------------------------
spec_known = SweepSpec(
    kind=KIND_ERRORS_KNOWN,
    p_values=(0.6,), probes_values=(5, 10, 20, 40),
    omega=0.05, alpha=0.05,
    trials=TRIALS, seed=3,
)
print("\ndisturbance known in advance")
error_table(run_sweep(spec_known), spec_known.probes_values)

# ----------------------------------------------------------------------
# 3. Calibration: with no attacker, the rejection rate should track the
# significance level alpha.  Large probe counts make the test's normal
# approximation honest.  The sweep runs both disturbance modes.
# ----------------------------------------------------------------------
spec_alpha = SweepSpec(
    kind=KIND_ALPHA,
    alpha_values=(0.01, 0.05, 0.1),
    p=0.0, omega=0.05, r=600, s_est=600,
    trials=TRIALS, seed=3,
)
result = run_sweep(spec_alpha)
print("\nno attacker, 600 probes: false-alarm rate vs. significance level")
print("  alpha    mode        observed    95% interval")
for row in result.rows:
    params = dict(row.params)
    print(f"  {params['alpha']:<7g}  {params['disturbance_mode']:<9s}  "
          f"{row.estimate:.4f}     [{row.ci_lo:.4f}, {row.ci_hi:.4f}]")
print("\nThe estimated-mode rates track alpha; the known-mode test runs a")
print("little conservative because its variance is plugged in at the")
print("observed rate, which overshoots near the boundary.  The chosen alpha")
print("is the price in honest aborts; the probe budget buys down the")
print("missed-attack rate independently.")
