"""Seed derivation and stable content hashing.

All randomness in the package flows from explicit integer seeds.  Derived
seeds are produced by hashing, not by incrementing, so independent parts of
a run (repeats, folds, learners) get independent streams regardless of the
order they execute in.
"""

from __future__ import annotations

import hashlib

import numpy as np


def split_seed(master: int, *parts) -> int:
    """Derive a child seed from ``master`` and a label path.

    Uses SHA-256 over the rendered parts, so the result is stable across
    processes and platforms (unlike the builtin ``hash``).
    """
    h = hashlib.sha256()
    h.update(str(int(master)).encode())
    for p in parts:
        h.update(b"/")
        h.update(str(p).encode())
    return int.from_bytes(h.digest()[:8], "big")


def rng_from(master: int, *parts) -> np.random.Generator:
    """Fresh generator seeded from ``split_seed(master, *parts)``."""
    return np.random.default_rng(split_seed(master, *parts))


def content_hash(*chunks) -> str:
    """Short stable hex digest of a sequence of strings/bytes/arrays."""
    h = hashlib.sha256()
    for c in chunks:
        if isinstance(c, np.ndarray):
            h.update(np.ascontiguousarray(c).tobytes())
            h.update(str(c.dtype).encode())
            h.update(str(c.shape).encode())
        elif isinstance(c, bytes):
            h.update(c)
        else:
            h.update(str(c).encode())
        h.update(b"\x1f")
    return h.hexdigest()[:16]
