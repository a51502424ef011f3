"""Deterministic named random streams.

Every stochastic element of a session (state preparation, the receiver's
subset choice, attack and disturbance coins, measurement collapses) draws
from its own named stream, derived from the session seed with SHA-256.
Because the streams are independent, the number of draws one party makes
can never shift another party's sequence -- which is what makes a session
replayable byte-for-byte whether it runs in one process or across two.
"""

import hashlib
import random

MAX_SEED = 2**64 - 1


def derive_seed(seed: int, *path) -> int:
    """Derive a 64-bit child seed from a base seed and a label path.

    Uses SHA-256 over the decimal seed and the path labels, so the result
    is stable across platforms and Python builds (unlike ``hash()``).
    """
    h = hashlib.sha256()
    h.update(str(int(seed)).encode())
    for part in path:
        h.update(b"/")
        h.update(str(part).encode())
    return int.from_bytes(h.digest()[:8], "big")


def derive_stream(seed: int, *path) -> random.Random:
    """A fresh ``random.Random`` seeded from ``derive_seed(seed, *path)``."""
    return random.Random(derive_seed(seed, *path))


class StreamBank:
    """Lazily created named streams rooted at one seed.

    Asking for the same name twice returns the same stream object, so a
    bank behaves like a per-session registry of random sources.
    """

    def __init__(self, seed: int):
        if not 0 <= int(seed) <= MAX_SEED:
            raise ValueError(f"seed must be in [0, 2**64), got {seed}")
        self.seed = int(seed)
        self._streams: dict[str, random.Random] = {}

    def stream(self, name: str) -> random.Random:
        rng = self._streams.get(name)
        if rng is None:
            rng = derive_stream(self.seed, name)
            self._streams[name] = rng
        return rng
