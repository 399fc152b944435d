"""Deterministic seed derivation for independent random substreams.

Every stochastic choice in a run (per-instance execution-time draw,
per-instance color draw, per-cell workload) gets its own ``random.Random``
seeded from a hash of the identifying coordinates, so the same coordinates
always see the same stream regardless of scheduling policy or call order.
"""

import hashlib
import struct

__all__ = ["derive_seed", "substream"]


def derive_seed(*parts) -> int:
    """Collision-resistant 64-bit seed from ints and short strings."""
    h = hashlib.blake2b(digest_size=8)
    for p in parts:
        if isinstance(p, int):
            h.update(b"i")
            h.update(struct.pack(">Q", p & 0xFFFFFFFFFFFFFFFF))
        else:
            data = str(p).encode("utf-8")
            h.update(b"s")
            h.update(struct.pack(">I", len(data)))
            h.update(data)
    return int.from_bytes(h.digest(), "big")


def substream(*parts):
    """A fresh ``random.Random`` bound to the given coordinates."""
    import random

    return random.Random(derive_seed(*parts))
