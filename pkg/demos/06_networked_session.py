"""The same protocol split across two processes talking over TCP.

Sender and receiver run as separate endpoints exchanging one JSON
object per line: qubit handoffs, measure/reflect choices, measurement
results, the position reveal, and finally signals or an abort.  The
point of this demo is the determinism guarantee: with matching seeds,
the two-process transcript is byte-identical to the in-process run.

Starts a listener on a free local port, connects, and compares.
"""

import json
import threading

from sqdc.netsession import connect_bob, serve_alice
from sqdc.protocol import SessionConfig, SessionStatus, run_session

MESSAGE = "0110100111000101"
config = SessionConfig(s=16, r=8, seed=2024, message=MESSAGE)

# ----------------------------------------------------------------------
# 1. Reference run: both parties in one process.
# ----------------------------------------------------------------------
local = run_session(config)
print(f"in-process run: {local.status.value}, recovered {local.recovered}")

# ----------------------------------------------------------------------
# 2. Networked run.  The sender serves; the receiver connects knowing
# only the shared parameters (including the seed) -- never the message.
# The listener thread reports its ephemeral port through a callback.
# ----------------------------------------------------------------------
ready = threading.Event()
address = {}


def _on_listening(addr):
    address["port"] = addr[1]
    ready.set()


server = {}
thread = threading.Thread(
    target=lambda: server.setdefault(
        "outcome", serve_alice(config, host="127.0.0.1", port=0,
                               timeout=10, on_listening=_on_listening)),
)
thread.start()
ready.wait(5)

receiver_view = SessionConfig(s=16, r=8, seed=2024)   # no message here
bob = connect_bob(receiver_view, "127.0.0.1", address["port"], timeout=10)
thread.join(10)
alice = server["outcome"]

print(f"networked run:  sender {alice.status.value}, "
      f"receiver recovered {bob.recovered}")
assert bob.recovered == MESSAGE

# ----------------------------------------------------------------------
# 3. Byte-for-byte equivalence of the two transcripts.
# ----------------------------------------------------------------------
as_json = lambda out: json.dumps(out.transcript.to_dict(), sort_keys=True)
match = as_json(local) == as_json(alice)
print(f"transcripts byte-identical: {match}")
assert match

# ----------------------------------------------------------------------
# 4. Security still works across the wire: raise the attack rate and
# the sender aborts before revealing any signals; the receiver learns
# only that the session died.
# ----------------------------------------------------------------------
hostile = SessionConfig(s=16, r=8, seed=2024, message=MESSAGE, p=0.9)
ready.clear()
server = {}
thread = threading.Thread(
    target=lambda: server.setdefault(
        "outcome", serve_alice(hostile, host="127.0.0.1", port=0,
                               timeout=10, on_listening=_on_listening)),
)
thread.start()
ready.wait(5)
bob = connect_bob(receiver_view, "127.0.0.1", address["port"], timeout=10)
thread.join(10)

print(f"\nwith attack rate 0.9: sender {server['outcome'].status.value}, "
      f"receiver {bob.status.value}, recovered message: {bob.recovered}")
assert server["outcome"].status is SessionStatus.ABORTED_INSECURE
assert bob.recovered is None
