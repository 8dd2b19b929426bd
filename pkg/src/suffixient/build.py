"""Smallest suffixient sets from the BWT/LCP/SA of the reversed text.

Every builder scans the BWT of ``reverse_text(T)`` looking for *run breaks*:
rows ``i >= 1`` with ``bwt[i - 1] != bwt[i]``. A run break is a ``c``-run
break for both symbols it separates. The position of ``T`` written at row
``i'`` is ``n - 1 - sa[i']``.

The four builders return sets of equal (minimum) cardinality. They may pick
different witness positions for the same supermaximal extension, because
they break ties differently.

Positions are 0-based. The core loops take plain sequences so they can be
driven with instrumented arrays in tests; the ``build_*`` wrappers take a
:class:`~suffixient.structs.SuffixStructs`.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .structs import SuffixStructs, SvArrays, build_sv, colex_ranks, runs
from .text import Text

INF = float("inf")
ALGORITHMS = ("quadratic", "one-pass", "linear-lf", "linear-fm")


def _arrays(ss: SuffixStructs):
    return ss.bwt, ss.lcp.tolist(), ss.sa.tolist()


# -- quadratic ---------------------------------------------------------------


def quadratic(bwt, lcp, sa) -> set[int]:
    n = len(bwt)
    out = set()
    for i in range(1, n):
        if bwt[i - 1] == bwt[i]:
            continue
        h = lcp[i]
        lo = i
        while lo > 0 and lcp[lo - 1] >= h:
            lo -= 1
        hi = i
        while hi + 1 < n and lcp[hi + 1] >= h:
            hi += 1
        for ip in (i - 1, i):
            c = bwt[ip]
            best_len, best = -1, -1
            for k in range(max(lo, 1), hi + 1):
                a, b = bwt[k - 1], bwt[k]
                if a != b and (a == c or b == c) and lcp[k] >= best_len:
                    best_len, best = lcp[k], k
            if best == i:
                out.add(n - 1 - sa[ip])
    return out


def build_quadratic(ss: SuffixStructs) -> set[int]:
    """O(n^2) reference: keep a run break iff it is the largest maximum of its box."""
    return quadratic(*_arrays(ss))


# -- one pass ----------------------------------------------------------------


def _eval(symbols, limit, cand_len, cand_pos, cand_active, out):
    for c in symbols:
        if limit < cand_len[c]:
            if cand_active[c]:
                out.add(cand_pos[c])
            cand_len[c] = limit
            cand_pos[c] = 0
            cand_active[c] = False


def one_pass(bwt, lcp, sa, sigma) -> set[int]:
    n = len(bwt)
    out = set()
    cand_len = [-1] * sigma
    cand_pos = [0] * sigma
    cand_active = [False] * sigma
    alphabet = range(sigma)
    m = INF
    for i in range(1, n):
        h = lcp[i]
        if h < m:
            m = h
        if bwt[i] != bwt[i - 1]:
            _eval(alphabet, m, cand_len, cand_pos, cand_active, out)
            for ip in (i - 1, i):
                c = bwt[ip]
                if h > cand_len[c]:
                    cand_len[c] = h
                    cand_pos[c] = n - 1 - sa[ip]
                    cand_active[c] = True
            m = INF
    _eval(alphabet, -1, cand_len, cand_pos, cand_active, out)
    return out


def build_one_pass(ss: SuffixStructs) -> set[int]:
    """Single scan keeping one LCP-maximum candidate per symbol; O(n + r*sigma)."""
    return one_pass(*_arrays(ss), ss.sigma)


# -- linear time via incremental LF ------------------------------------------


def symbol_starts(bwt, sigma) -> list[int]:
    """``starts[c]`` = number of symbols smaller than ``c``."""
    counts = np.bincount(np.frombuffer(bytes(bwt), dtype=np.uint8), minlength=sigma)
    return [0] + np.cumsum(counts[:-1]).tolist()


def linear_lf(bwt, lcp, sa, sigma, starts=None) -> set[int]:
    n = len(bwt)
    out = set()
    cand_len = [-1] * sigma
    cand_pos = [0] * sigma
    cand_active = [False] * sigma
    if starts is None:
        starts = symbol_starts(bwt, sigma)
    # lf[c] is the LF image of the last scanned occurrence of c
    lf = [s - 1 for s in starts]
    lf[bwt[0]] += 1
    m = INF
    for i in range(1, n):
        b = bwt[i]
        lf[b] += 1
        h = lcp[i]
        if h < m:
            m = h
        if b != bwt[i - 1]:
            for ip in (i - 1, i):
                c = bwt[ip]
                if ip == i - 1:
                    _eval((c,), m, cand_len, cand_pos, cand_active, out)
                elif cand_len[c] != -1:
                    # min LCP since the previous c-run break, via LF
                    _eval((c,), lcp[lf[c]] - 1, cand_len, cand_pos, cand_active, out)
                if h > cand_len[c]:
                    cand_len[c] = h
                    cand_pos[c] = n - 1 - sa[ip]
                    cand_active[c] = True
            m = INF
    _eval(range(sigma), -1, cand_len, cand_pos, cand_active, out)
    return out


def build_linear_lf(ss: SuffixStructs) -> set[int]:
    """O(n): evaluates only the two symbols of each run break, using the LF vector."""
    return linear_lf(*_arrays(ss), ss.sigma)


# -- linear time via first c-maxima ------------------------------------------


def linear_fm(bwt, sa, psv, nsv, sigma) -> set[int]:
    n = len(bwt)
    out = set()
    last_row = [-1] * sigma
    last_pos = [0] * sigma
    active = [False] * sigma
    last_nsv = [n] * sigma
    for i in range(1, n):
        if bwt[i] == bwt[i - 1]:
            continue
        for ip in (i - 1, i):
            c = bwt[ip]
            if last_row[c] <= psv[i]:          # i is a first c-candidate
                if last_nsv[c] < i:            # previous candidate was a first c-maximum
                    out.add(last_pos[c])
                last_row[c] = i
                last_pos[c] = n - 1 - sa[ip]
                active[c] = True
                last_nsv[c] = nsv[i]
    for c in range(sigma):
        if active[c]:
            out.add(last_pos[c])
    return out


def build_linear_fm(ss: SuffixStructs, sv: SvArrays | None = None) -> set[int]:
    """O(n) with PSV/NSV: keep exactly the first c-maximum run breaks."""
    if sv is None:
        sv = build_sv(ss.lcp)
    return linear_fm(ss.bwt, ss.sa.tolist(), sv.psv, sv.nsv, ss.sigma)


BUILDERS = {
    "quadratic": build_quadratic,
    "one-pass": build_one_pass,
    "linear-lf": build_linear_lf,
    "linear-fm": build_linear_fm,
}


def run_boundary_set(ss: SuffixStructs) -> set[int]:
    """Positions at BWT run boundaries: suffixient, at most ``2 * runs(bwt)``."""
    b = np.frombuffer(ss.bwt, dtype=np.uint8)
    n = len(b)
    keep = np.zeros(n, dtype=bool)
    keep[0] = keep[-1] = True
    diff = b[1:] != b[:-1]
    keep[1:] |= diff
    keep[:-1] |= diff
    return set((n - 1 - ss.sa[keep]).tolist())


# -- Suffixient Array --------------------------------------------------------

MAGIC = b"SUFX"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIQB")


class FormatError(ValueError):
    pass


@dataclass(frozen=True)
class SuffixientArray:
    """A smallest suffixient set sorted by colex order of the prefixes it ends."""

    entries: np.ndarray      # int64, 0-based positions of T
    n: int
    sigma_prime: int
    alpha_map: bytes

    @property
    def chi(self) -> int:
        return len(self.entries)

    def to_bytes(self) -> bytes:
        """``SUFX`` | version u32 | n u64 | sigma' u8 | alpha_map[256] | chi u64 | positions u64[chi].

        Little-endian; positions are 0-based.
        """
        return b"".join(
            (
                _HEADER.pack(MAGIC, FORMAT_VERSION, self.n, self.sigma_prime % 256),
                self.alpha_map,
                struct.pack("<Q", self.chi),
                self.entries.astype("<u8").tobytes(),
            )
        )

    @classmethod
    def from_bytes(cls, buf: bytes, offset: int = 0) -> tuple["SuffixientArray", int]:
        """Parse one array at ``offset``; returns it and the offset just past it."""
        try:
            magic, version, n, sigma = _HEADER.unpack_from(buf, offset)
        except struct.error as exc:
            raise FormatError("truncated suffixient array header") from exc
        if magic != MAGIC:
            raise FormatError(f"bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise FormatError(f"unsupported format version {version}")
        offset += _HEADER.size
        alpha_map = bytes(buf[offset : offset + 256])
        offset += 256
        (chi,) = struct.unpack_from("<Q", buf, offset)
        offset += 8
        entries = np.frombuffer(buf, dtype="<u8", count=chi, offset=offset).astype(np.int64)
        offset += 8 * chi
        return cls(entries, n, sigma or 256, alpha_map), offset


def to_suffixient_array(s, ss: SuffixStructs, t: Text) -> SuffixientArray:
    """Sort positions by colex rank of ``T[0..x]``; ``ss`` is built over the reversed text."""
    xs = np.fromiter(s, dtype=np.int64, count=len(s))
    order = np.argsort(colex_ranks(ss, xs), kind="stable")
    return SuffixientArray(xs[order], t.n, t.sigma_prime, t.alpha_map)


def summary(ss: SuffixStructs, s) -> dict:
    return {"n": ss.n, "chi": len(s), "r": runs(ss.bwt)}
