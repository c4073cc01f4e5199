"""Deterministic seed substreams.

Every randomized procedure in the package takes an explicit 64-bit master
seed and derives independent child streams keyed by structured labels
(level, address, trial index, ...).  Derivation goes through SHA-256 so the
result does not depend on dict iteration order or on how many other streams
were drawn first.
"""

import hashlib
import random


def derive_seed(master: int, *labels) -> int:
    h = hashlib.sha256()
    h.update(str(int(master)).encode())
    for lab in labels:
        h.update(b"|")
        h.update(repr(lab).encode())
    return int.from_bytes(h.digest()[:8], "big")


def substream(master: int, *labels) -> random.Random:
    return random.Random(derive_seed(master, *labels))
