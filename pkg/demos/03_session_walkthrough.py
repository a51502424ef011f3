"""One full session, slot by slot: what each party knows and when.

Three runs of the same small configuration:

  1. a clean channel, where the message comes through exactly;
  2. the same seed with an attacker, where the strict check aborts;
  3. a noisy channel under the tolerant variant, where a z-test decides.

Along the way we dump the transcript -- the sender's complete record --
and close by replaying the audit record to show determinism.
"""

import json

from sqdc.protocol import (
    MODE_TOLERANT,
    SessionConfig,
    outcome_record,
    replay_record,
    run_session,
)

MESSAGE = "10110100"

# ----------------------------------------------------------------------
# 1. Clean strict session.  Eight data slots, four probe slots; the
# receiver picks which eight to measure, everything else is reflected.
# ----------------------------------------------------------------------
cfg = SessionConfig(s=8, r=4, seed=1, message=MESSAGE)
out = run_session(cfg)
t = out.transcript
print("clean strict session")
print(f"  status            {out.status.value}")
print(f"  prep bits         {t.prepared}")
print(f"  measured mask     {t.measured_mask}   (1 = receiver measured that slot)")
print(f"  bell e1           {t.bell_first}")
print(f"  bell e2           {t.bell_second}")
print(f"  receiver's u      {t.bob_results}      (measured slots only)")
print(f"  sender inferred   {t.inferred}      (= e2 XOR prep, matches u)")
print(f"  probe mismatches  {t.probe_mismatches} of {cfg.r}")
print(f"  signals           {[sig.name for sig in out.transcript.signals]}")
print(f"  recovered         {out.recovered}   (sent {MESSAGE})")
assert out.recovered == MESSAGE

# The signal list is the only thing that crosses the classical channel
# about the message: KEEP where the inferred bit already equals the
# message bit, FLIP where the receiver must invert.

# ----------------------------------------------------------------------
# 2. Same seed, now with a half-strength attacker.  The strict variant
# aborts on the first probe mismatch and never reveals signals.
# ----------------------------------------------------------------------
attacked = run_session(SessionConfig(s=8, r=4, seed=1, message=MESSAGE, p=0.5))
assert attacked.status.value == "aborted_insecure"
print("\nsame seed, attack probability 0.5, strict")
print(f"  status            {attacked.status.value}")
print(f"  attack occurred   {attacked.any_attack}")
print(f"  probe mismatches  {attacked.transcript.probe_mismatches} (abort on the first)")
print(f"  signals released  {len(attacked.transcript.signals)}")

# ----------------------------------------------------------------------
# 3. Tolerant session on a noisy channel.  With 5% disturbance a strict
# check would abort almost every honest run, so the tolerant variant
# first estimates the noise floor on calibration probes, then accepts
# unless the probe mismatch rate is significantly above it.
# ----------------------------------------------------------------------
cfg_noisy = SessionConfig(
    s=8, r=64, mode=MODE_TOLERANT, omega=0.05, s_est=64, alpha=0.05,
    seed=7, message=MESSAGE,
)
noisy = run_session(cfg_noisy)
st = noisy.stats
print("\nnoisy channel (omega=0.05), tolerant, no attacker")
print(f"  status            {noisy.status.value}")
print(f"  baseline           {noisy.transcript.baseline_mismatches}"
      f"/{noisy.transcript.baseline_probes} calibration mismatches")
print(f"  probe mismatches  {noisy.transcript.probe_mismatches}/{cfg_noisy.r}")
print(f"  z = {st.z:.3f} vs threshold {st.threshold:.3f}  ->  "
      f"{'reject' if st.rejected else 'accept'}")
print(f"  recovered         {noisy.recovered}")

# ----------------------------------------------------------------------
# 4. Determinism.  The audit record pins the configuration; replaying
# it must reproduce the transcript bit for bit, and does.
# ----------------------------------------------------------------------
record = outcome_record(cfg, out)
line = json.dumps(record, sort_keys=True)
print(f"\naudit record is one JSON line, {len(line)} bytes; replaying it ...")
replayed = replay_record(json.loads(line))
print(f"  replay status     {replayed.status.value}, transcript identical")
