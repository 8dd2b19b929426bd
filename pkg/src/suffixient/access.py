"""Random access to the text: bit-packed plain text and an RLZ oracle.

Both oracles work on dense symbol codes and 0-based positions:
``extract(i, length)`` returns ``T[i : i + length]`` as bytes of codes.

Serialized blobs start with a tag byte (0 = packed, 1 = rlz); all integers
are little-endian. The in-memory objects keep a decoded copy of the packed
payloads so that extraction runs at bytes-slice speed; :meth:`size` always
reports the serialized footprint.
"""

from __future__ import annotations

import math
import struct
from bisect import bisect_left, bisect_right
from dataclasses import dataclass

import numpy as np

from .structs import suffix_array
from .text import Text

TAG_PACKED = 0
TAG_RLZ = 1
LITERAL = 1 << 31
MAX_N = (1 << 31) - 1   # phrase records and starts are u32

DEFAULT_RHO0 = 1 << 20
DEFAULT_EPSILON = 0.5


class OracleError(ValueError):
    pass


@dataclass
class ExtractStats:
    """Caller-owned counters; oracles only ever add to them."""

    pred_lookups: int = 0
    chars: int = 0


def bits_per_symbol(sigma_prime: int) -> int:
    return max(1, math.ceil(math.log2(sigma_prime)))


def pack_bits(codes: bytes, b: int) -> bytes:
    a = np.frombuffer(codes, dtype=np.uint8)
    bits = (a[:, None] >> np.arange(b, dtype=np.uint8)) & 1
    return np.packbits(bits.reshape(-1), bitorder="little").tobytes()


def unpack_bits(payload: bytes, n: int, b: int) -> bytes:
    bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8), bitorder="little")
    bits = bits[: n * b].reshape(n, b).astype(np.uint8)
    return (bits << np.arange(b, dtype=np.uint8)).sum(axis=1).astype(np.uint8).tobytes()


def _packed_len(n: int, b: int) -> int:
    return (n * b + 7) // 8


class OracleContract:
    """Random access over ``T``; subclasses provide ``extract``."""

    n: int
    sigma_prime: int

    def extract(self, i: int, length: int, stats: ExtractStats | None = None) -> bytes:
        raise NotImplementedError

    def access(self, i: int, stats: ExtractStats | None = None) -> int:
        return self.extract(i, 1, stats)[0]

    def to_bytes(self) -> bytes:
        raise NotImplementedError

    def size(self) -> int:
        raise NotImplementedError

    def _check(self, i: int, length: int):
        if length < 0 or i < 0 or i + length > self.n:
            raise IndexError(f"range [{i}, {i + length}) outside [0, {self.n})")


# -- plain ---------------------------------------------------------------------

_PACKED_HDR = struct.Struct("<BQBB")  # tag, n, sigma', bits


class PackedText(OracleContract):
    def __init__(self, codes: bytes, sigma_prime: int):
        self.n = len(codes)
        self.sigma_prime = sigma_prime
        self.bits = bits_per_symbol(sigma_prime)
        self._plain = bytes(codes)

    def extract(self, i, length, stats=None):
        self._check(i, length)
        if stats is not None:
            stats.chars += length
        return self._plain[i : i + length]

    def to_bytes(self) -> bytes:
        hdr = _PACKED_HDR.pack(TAG_PACKED, self.n, self.sigma_prime % 256, self.bits)
        return hdr + pack_bits(self._plain, self.bits)

    def size(self) -> int:
        return _PACKED_HDR.size + _packed_len(self.n, self.bits)

    @classmethod
    def from_bytes(cls, buf, offset=0):
        tag, n, sigma, b = _PACKED_HDR.unpack_from(buf, offset)
        if tag != TAG_PACKED:
            raise OracleError(f"expected packed oracle tag, got {tag}")
        offset += _PACKED_HDR.size
        plen = _packed_len(n, b)
        codes = unpack_bits(bytes(buf[offset : offset + plen]), n, b)
        return cls(codes, sigma or 256), offset + plen


def pack(t: Text) -> PackedText:
    return PackedText(t.data, t.sigma_prime)


# -- RLZ -------------------------------------------------------------------------


def _common_prefix(a: bytes, b: bytes) -> int:
    lo, hi = 0, min(len(a), len(b))
    if a[:hi] == b[:hi]:
        return hi
    while lo < hi:  # a[:lo] == b[:lo] and a[:hi] != b[:hi]
        mid = (lo + hi + 1) // 2
        if a[:mid] == b[:mid]:
            lo = mid
        else:
            hi = mid - 1
    return lo


class _RefMatcher:
    """Longest match of ``text[p:]`` against any substring of ``ref``."""

    def __init__(self, ref: bytes):
        self.ref = ref
        self.sa = suffix_array(ref).tolist() if ref else []

    def longest(self, text: bytes, p: int) -> tuple[int, int]:
        ref, sa = self.ref, self.sa
        if not sa:
            return 0, 0
        w = 32
        while True:
            q = text[p : p + w]
            k = bisect_left(sa, q, key=lambda s: ref[s : s + w])
            best_len, best_pos = 0, 0
            for r in (k - 1, k):
                if 0 <= r < len(sa):
                    s = sa[r]
                    h = _common_prefix(ref[s : s + len(q)], q)
                    if h > best_len:
                        best_len, best_pos = h, s
            if best_len < len(q) or p + w >= len(text):
                return best_len, best_pos
            w *= 2


def rlz_parse(codes: bytes, rho: int, abort_above: int | None = None):
    """Greedy longest-match parse of ``codes[rho:]`` against ``codes[:rho]``.

    Returns ``(records, starts)``: a record is ``ref_pos`` for a copy phrase
    or ``LITERAL | code`` for a single literal symbol. Returns ``None`` as
    soon as the phrase count exceeds ``abort_above``.
    """
    n = len(codes)
    if not 1 <= rho <= n:
        raise OracleError(f"reference length {rho} outside [1, {n}]")
    m = _RefMatcher(codes[:rho])
    records, starts = [], []
    p = rho
    while p < n:
        length, pos = m.longest(codes, p)
        starts.append(p)
        if length == 0:
            records.append(LITERAL | codes[p])
            p += 1
        else:
            records.append(pos)
            p += length
        if abort_above is not None and len(records) > abort_above:
            return None
    return records, starts


_RLZ_HDR = struct.Struct("<BQBBQQ")  # tag, n, sigma', bits, rho, phrases


def rlz_size(n: int, sigma_prime: int, rho: int, phrases: int) -> int:
    return _RLZ_HDR.size + _packed_len(rho, bits_per_symbol(sigma_prime)) + 8 * phrases


class RlzOracle(OracleContract):
    def __init__(self, ref: bytes, n: int, sigma_prime: int, records, starts):
        if n > MAX_N:
            raise OracleError("text too long for 32-bit phrase records")
        self.n = n
        self.sigma_prime = sigma_prime
        self.rho = len(ref)
        self.ref = bytes(ref)
        self.records = list(records)
        self.starts = list(starts)

    @classmethod
    def build(cls, t: Text, rho: int) -> "RlzOracle":
        records, starts = rlz_parse(t.data, rho)
        return cls(t.data[:rho], t.n, t.sigma_prime, records, starts)

    @property
    def phrases(self) -> int:
        return len(self.records)

    def _phrase_end(self, k: int) -> int:
        return self.starts[k + 1] if k + 1 < len(self.starts) else self.n

    def extract(self, i, length, stats=None):
        self._check(i, length)
        if stats is not None:
            stats.chars += length
        end = i + length
        rho = self.rho
        if end <= rho:
            return self.ref[i:end]
        out = []
        if i < rho:
            out.append(self.ref[i:rho])
            i = rho
        k = bisect_right(self.starts, i) - 1
        ref, records = self.ref, self.records
        while i < end:
            if stats is not None:
                stats.pred_lookups += 1
            s = self.starts[k]
            e = self._phrase_end(k)
            rec = records[k]
            stop = min(e, end)
            if rec & LITERAL:
                out.append(bytes([rec & 0xFF]))
            else:
                off = rec + (i - s)
                out.append(ref[off : off + stop - i])
            i = stop
            k += 1
        return b"".join(out)

    def size(self) -> int:
        return rlz_size(self.n, self.sigma_prime, self.rho, self.phrases)

    def to_bytes(self) -> bytes:
        b = bits_per_symbol(self.sigma_prime)
        hdr = _RLZ_HDR.pack(TAG_RLZ, self.n, self.sigma_prime % 256, b, self.rho, self.phrases)
        return b"".join(
            (
                hdr,
                pack_bits(self.ref, b),
                np.asarray(self.records, dtype="<u4").tobytes(),
                np.asarray(self.starts, dtype="<u4").tobytes(),
            )
        )

    @classmethod
    def from_bytes(cls, buf, offset=0):
        tag, n, sigma, b, rho, z = _RLZ_HDR.unpack_from(buf, offset)
        if tag != TAG_RLZ:
            raise OracleError(f"expected rlz oracle tag, got {tag}")
        offset += _RLZ_HDR.size
        plen = _packed_len(rho, b)
        ref = unpack_bits(bytes(buf[offset : offset + plen]), rho, b)
        offset += plen
        records = np.frombuffer(buf, dtype="<u4", count=z, offset=offset).tolist()
        offset += 4 * z
        starts = np.frombuffer(buf, dtype="<u4", count=z, offset=offset).tolist()
        offset += 4 * z
        return cls(ref, n, sigma or 256, records, starts), offset


def reference_candidates(n: int, rho0: int = DEFAULT_RHO0, epsilon: float = DEFAULT_EPSILON):
    """``min(n, ceil(rho0 * (1 + epsilon) ** t))`` for t = 0, 1, ... up to n."""
    if epsilon <= 0:
        raise OracleError("epsilon must be positive")
    out, t = [], 0
    while True:
        rho = min(n, math.ceil(rho0 * (1 + epsilon) ** t))
        if not out or rho != out[-1]:
            out.append(rho)
        if rho >= n:
            return out
        t += 1


def choose_reference(t: Text, epsilon: float = DEFAULT_EPSILON, rho0: int = DEFAULT_RHO0):
    """Reference length minimizing the serialized RLZ blob.

    Candidates are tried from the longest down; a parse is abandoned once its
    phrase count already makes it larger than the best blob so far.
    Returns ``(rho, parse)`` where ``parse`` is ``(records, starts)``.
    """
    n, sp = t.n, t.sigma_prime
    best_rho, best_parse = n, ([], [])
    best_size = rlz_size(n, sp, n, 0)
    for rho in reversed(reference_candidates(n, rho0, epsilon)[:-1]):
        base = rlz_size(n, sp, rho, 0)
        if base >= best_size:
            continue
        parse = rlz_parse(t.data, rho, abort_above=(best_size - base) // 8)
        if parse is None:
            continue
        size = base + 8 * len(parse[0])
        if size < best_size:
            best_rho, best_parse, best_size = rho, parse, size
    return best_rho, best_parse


def build_rlz(t: Text, epsilon: float = DEFAULT_EPSILON, rho0: int = DEFAULT_RHO0) -> RlzOracle:
    rho, (records, starts) = choose_reference(t, epsilon, rho0)
    return RlzOracle(t.data[:rho], t.n, t.sigma_prime, records, starts)


def oracle_from_bytes(buf, offset=0):
    tag = buf[offset]
    if tag == TAG_PACKED:
        return PackedText.from_bytes(buf, offset)
    if tag == TAG_RLZ:
        return RlzOracle.from_bytes(buf, offset)
    raise OracleError(f"unknown oracle tag {tag}")
