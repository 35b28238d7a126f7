"""Named sub-seed derivation.

All randomness in a run flows from one master seed. Stages derive their own
seeds by name ("stage:purpose"), so any stage can be rerun in isolation and
reproduce its part of the pipeline exactly.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(master: int, *names: str) -> int:
    """Return a 63-bit seed deterministically derived from master + names."""
    h = hashlib.sha256()
    h.update(str(int(master)).encode("ascii"))
    for name in names:
        h.update(b"/")
        h.update(name.encode("utf-8"))
    return int.from_bytes(h.digest()[:8], "little") & 0x7FFFFFFFFFFFFFFF


def derive_rng(master: int, *names: str) -> np.random.Generator:
    """Generator seeded by :func:`derive_seed`."""
    return np.random.default_rng(derive_seed(master, *names))
