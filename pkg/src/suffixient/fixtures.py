"""Deterministic synthetic corpora and pattern samplers."""

from __future__ import annotations

import numpy as np

DNA_BYTES = np.frombuffer(b"ACGT", dtype=np.uint8)


def repetitive_dna(copies: int = 100, seed_len: int = 10_000, rate: float = 0.001,
                   seed: int = 0) -> bytes:
    """``copies`` mutated copies of a random DNA seed (uniform substitutions at ``rate``)."""
    rng = np.random.default_rng(seed)
    base = rng.choice(DNA_BYTES, seed_len)
    parts = []
    for _ in range(copies):
        c = base.copy()
        hit = rng.random(seed_len) < rate
        c[hit] = rng.choice(DNA_BYTES, int(hit.sum()))
        parts.append(c)
    return np.concatenate(parts).tobytes()


def random_text(n: int, alphabet: bytes, seed: int = 0) -> bytes:
    rng = np.random.default_rng(seed)
    return rng.choice(np.frombuffer(alphabet, dtype=np.uint8), n).tobytes()


def sample_patterns(raw: bytes, m: int, count: int, seed: int = 0) -> list[bytes]:
    """Substrings of length ``m`` starting at uniform positions in ``[0, len - m]``."""
    if len(raw) < m:
        raise ValueError(f"corpus of length {len(raw)} is shorter than m = {m}")
    rng = np.random.default_rng(seed)
    starts = rng.integers(0, len(raw) - m + 1, count)
    return [raw[s : s + m] for s in starts.tolist()]


def mutate(p: bytes, alphabet: bytes, rate: float, rng) -> bytes:
    """Substitute each symbol with probability ``rate`` (may pick the same symbol)."""
    a = np.frombuffer(p, dtype=np.uint8).copy()
    hit = rng.random(len(a)) < rate
    a[hit] = rng.choice(np.frombuffer(alphabet, dtype=np.uint8), int(hit.sum()))
    return a.tobytes()
